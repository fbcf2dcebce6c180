#  ~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~
#  MIT License
#
#  Copyright (c) 2021 Nathan Juraj Michlo
#
#  Permission is hereby granted, free of charge, to any person obtaining a copy
#  of this software and associated documentation files (the "Software"), to deal
#  in the Software without restriction, including without limitation the rights
#  to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
#  copies of the Software, and to permit persons to whom the Software is
#  furnished to do so, subject to the following conditions:
#
#  The above copyright notice and this permission notice shall be included in
#  all copies or substantial portions of the Software.
#
#  THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
#  IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
#  FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
#  AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
#  LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
#  OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
#  SOFTWARE.
#  ~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import ndimage
from scipy import sparse

from hyperglio.cube import HsiCube
from hyperglio.spectral import sam_to_centers
from hyperglio.spectral import unit_angle
from hyperglio.superpixel._tiles import FOUR_CONNECTED
from hyperglio.superpixel._tiles import NO_TILE
from hyperglio.superpixel._tiles import TileMap
from hyperglio.superpixel._tiles import tiles_from_assignment
from hyperglio.util.profiling import Timer


log = logging.getLogger(__name__)


# ========================================================================= #
# Params                                                                    #
# ========================================================================= #


@dataclass
class SlicParams(object):
    target_pixels_per_tile: int = 200
    compactness: float = 0.5
    max_iters: int = 10
    convergence_px: float = 0.5

    def __post_init__(self):
        if self.target_pixels_per_tile < 16:
            raise ValueError(f'target_pixels_per_tile must be >= 16, got: {self.target_pixels_per_tile}')
        if self.compactness < 0:
            raise ValueError(f'compactness must be >= 0, got: {self.compactness}')
        if self.max_iters < 0:
            raise ValueError(f'max_iters must be >= 0, got: {self.max_iters}')


# ========================================================================= #
# Clustering                                                                #
# ========================================================================= #


class _SpectralSlic(object):
    """
    Simple linear iterative clustering where the colour distance is replaced by
    the spectral angle: D = SAM(pixel, center) + m * spatial_distance / S
    with S = sqrt(target_pixels_per_tile). Each center only competes for the
    pixels inside its 2S x 2S window.
    """

    def __init__(self, cube: HsiCube, params: SlicParams):
        self.params = params
        self.valid = cube.valid_mask
        self.H, self.W, self.B = cube.shape
        self.S = math.sqrt(params.target_pixels_per_tile)
        # unit spectra, zero spectra stay zero and are at pi/2 from everything
        data = np.asarray(cube.data, dtype='float64')
        norms = np.linalg.norm(data, axis=-1, keepdims=True)
        self.data = data
        self.unit = np.divide(data, norms, out=np.zeros_like(data), where=norms > 0)
        self.rows, self.cols = np.nonzero(self.valid)

    def init_centers(self) -> Tuple[np.ndarray, np.ndarray]:
        n_r = max(1, int(round(self.H / self.S)))
        n_c = max(1, int(round(self.W / self.S)))
        r_edges = np.linspace(0, self.H, n_r + 1).round().astype(int)
        c_edges = np.linspace(0, self.W, n_c + 1).round().astype(int)
        min_count = max(1, self.params.target_pixels_per_tile // 4)
        cells = []
        for r0, r1 in zip(r_edges[:-1], r_edges[1:]):
            for c0, c1 in zip(c_edges[:-1], c_edges[1:]):
                rr, cc = np.nonzero(self.valid[r0:r1, c0:c1])
                if len(rr) > 0:
                    cells.append((len(rr), rr + r0, cc + c0))
        # cells with too few valid pixels are absorbed by their neighbours
        kept = [c for c in cells if c[0] >= min_count] or cells
        pos = np.array([[rr.mean(), cc.mean()] for _, rr, cc in kept], dtype='float64')
        spec = np.array([self.data[rr, cc].mean(axis=0) for _, rr, cc in kept], dtype='float64')
        return pos, spec

    def _distance(self, unit_win: np.ndarray, center_unit: np.ndarray, dr: np.ndarray, dc: np.ndarray) -> np.ndarray:
        sam = unit_angle(unit_win, center_unit)
        return sam + self.params.compactness * np.sqrt(dr**2 + dc**2) / self.S

    def assign(self, pos: np.ndarray, spec: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        norms = np.linalg.norm(spec, axis=-1, keepdims=True)
        spec_unit = np.divide(spec, norms, out=np.zeros_like(spec), where=norms > 0)
        best = np.full((self.H, self.W), np.inf)
        labels = np.full((self.H, self.W), NO_TILE, dtype='int64')
        for k, (r, c) in enumerate(pos):
            r0, r1 = max(0, int(math.floor(r - self.S))), min(self.H, int(math.ceil(r + self.S)) + 1)
            c0, c1 = max(0, int(math.floor(c - self.S))), min(self.W, int(math.ceil(c + self.S)) + 1)
            if r0 >= r1 or c0 >= c1:
                continue
            dr = (np.arange(r0, r1) - r)[:, None]
            dc = (np.arange(c0, c1) - c)[None, :]
            d = self._distance(self.unit[r0:r1, c0:c1], spec_unit[k], dr, dc)
            # strict comparison, ties go to the earlier center
            better = self.valid[r0:r1, c0:c1] & (d < best[r0:r1, c0:c1])
            best[r0:r1, c0:c1][better] = d[better]
            labels[r0:r1, c0:c1][better] = k
        # valid pixels outside every window compete globally
        rr, cc = np.nonzero(self.valid & (labels == NO_TILE))
        if len(rr) > 0:
            sam = sam_to_centers(self.unit[rr, cc], spec_unit)
            dist = np.sqrt((rr[:, None] - pos[None, :, 0])**2 + (cc[:, None] - pos[None, :, 1])**2)
            d = sam + self.params.compactness * dist / self.S
            k = np.argmin(d, axis=1)
            labels[rr, cc] = k
            best[rr, cc] = d[np.arange(len(k)), k]
        return labels, best

    def update(self, labels: np.ndarray, num_centers: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        lbl = labels[self.rows, self.cols]
        membership = sparse.csr_matrix((np.ones(len(lbl)), (lbl, np.arange(len(lbl)))), shape=(num_centers, len(lbl)))
        counts = np.asarray(membership.sum(axis=1)).ravel()
        keep = counts > 0
        spec = np.asarray(membership @ self.data[self.rows, self.cols])[keep] / counts[keep, None]
        pos = np.stack([
            np.asarray(membership @ self.rows.astype('float64')).ravel(),
            np.asarray(membership @ self.cols.astype('float64')).ravel(),
        ], axis=-1)[keep] / counts[keep, None]
        return pos, spec, keep

    def objective(self, best: np.ndarray) -> float:
        return float(best[self.valid].sum())


# ========================================================================= #
# Connectivity                                                              #
# ========================================================================= #


def enforce_connectivity(labels: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """
    Keep the largest 4-connected component of every cluster. Orphan fragments
    are merged into the largest adjacent cluster, or become a new cluster when
    no cluster touches them. Output ids are relabelled in row-major order of
    first occurrence.
    """
    labels = np.asarray(labels, dtype='int64')
    out = labels.copy()
    orphans = np.zeros(labels.shape, dtype='bool')
    for k, slc in enumerate(ndimage.find_objects(labels + 1)):
        if slc is None:
            continue
        member = labels[slc] == k
        components, n = ndimage.label(member, structure=FOUR_CONNECTED)
        if n <= 1:
            continue
        largest = int(np.argmax(np.bincount(components.ravel())[1:])) + 1
        orphans[slc] |= member & (components != largest)
    out[orphans] = NO_TILE
    # sizes before merging decide the receiving cluster
    sizes = np.bincount(out[out >= 0], minlength=int(labels.max()) + 1)
    next_label = len(sizes)
    blobs, _ = ndimage.label(orphans, structure=FOUR_CONNECTED)
    for b, slc in enumerate(ndimage.find_objects(blobs), start=1):
        padded = tuple(slice(max(0, s.start - 1), min(dim, s.stop + 1)) for s, dim in zip(slc, labels.shape))
        blob = blobs[padded] == b
        ring = ndimage.binary_dilation(blob, structure=FOUR_CONNECTED) & ~blob
        neighbours = out[padded][ring]
        neighbours = np.unique(neighbours[neighbours >= 0])
        if len(neighbours):
            target = int(neighbours[np.argmax(sizes[neighbours])])
        else:
            target, next_label = next_label, next_label + 1
        out[padded][blob] = target
    # relabel by first occurrence
    flat = out.ravel()
    ids, first = np.unique(flat[flat >= 0], return_index=True)
    order = ids[np.argsort(np.flatnonzero(flat >= 0)[first])]
    mapping = np.full(int(out.max()) + 1 if out.max() >= 0 else 0, NO_TILE, dtype='int64')
    mapping[order] = np.arange(len(order))
    result = np.full(out.shape, NO_TILE, dtype='int64')
    result[out >= 0] = mapping[out[out >= 0]]
    result[~valid] = NO_TILE
    return result


# ========================================================================= #
# Segmentation                                                              #
# ========================================================================= #


def slic_segment(
    cube: HsiCube,
    target_pixels_per_tile: int = 200,
    compactness: float = 0.5,
    max_iters: int = 10,
    convergence_px: float = 0.5,
) -> TileMap:
    """
    Partition the valid pixels of a cube into spatially connected tiles of
    roughly `target_pixels_per_tile` pixels that are spectrally homogeneous.

    The total joint distance is recorded after every accepted iteration. An
    iteration that would increase it is rejected and the clustering stops,
    so `objective_history` is non-increasing.
    """
    params = SlicParams(target_pixels_per_tile, compactness, max_iters, convergence_px)
    if cube.valid_count == 0:
        raise ValueError('cannot segment a cube without valid pixels')
    with Timer() as t:
        slic = _SpectralSlic(cube, params)
        pos, spec = slic.init_centers()
        labels, best = slic.assign(pos, spec)
        history = [slic.objective(best)]
        iterations, converged = 0, False
        for _ in range(params.max_iters):
            new_pos, new_spec, keep = slic.update(labels, len(pos))
            new_labels, new_best = slic.assign(new_pos, new_spec)
            objective = slic.objective(new_best)
            if objective > history[-1]:
                log.debug(f'rejected iteration {iterations + 1}, objective increased: {history[-1]:.6g} -> {objective:.6g}')
                break
            movement = float(np.max(np.linalg.norm(new_pos - pos[keep], axis=-1))) if len(new_pos) else 0.0
            pos, spec, labels = new_pos, new_spec, new_labels
            history.append(objective)
            iterations += 1
            if movement < params.convergence_px:
                converged = True
                break
        assignment = enforce_connectivity(labels, cube.valid_mask)
        tiles = tiles_from_assignment(cube, assignment)
    log.info(f'segmented {cube.valid_count} valid pixels into {len(tiles)} tiles in {iterations} iterations ({t.pretty}, converged={converged})')
    return TileMap(assignment=assignment, tiles=tiles, objective_history=history, iterations=iterations, converged=converged)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
