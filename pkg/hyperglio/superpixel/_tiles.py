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
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np
from scipy import ndimage

from hyperglio.cube import AnnotationMask
from hyperglio.cube import HsiCube
from hyperglio.spectral import SeparabilityReport
from hyperglio.spectral import l2_to_reference
from hyperglio.spectral import sam_to_reference
from hyperglio.spectral import separability_from_groups


log = logging.getLogger(__name__)


# label of a tile whose pixels carry more than one annotation class
MIXED_LABEL = -1

# value of invalid pixels in a tile assignment image
NO_TILE = -1

# 4-connectivity structuring element
FOUR_CONNECTED = ndimage.generate_binary_structure(2, 1)


# ========================================================================= #
# Tiles                                                                     #
# ========================================================================= #


@dataclass(frozen=True, eq=False)
class Tile(object):
    """
    A connected set of valid pixels with its quality statistics.

    - coords: (N, 2) int array of (row, col) member pixels, row-major order
    - bbox: (row_start, col_start, row_stop, col_stop), stops are exclusive
    - label: None before annotation, the unique class id of all members, or MIXED_LABEL
    - quality: None before filtration, True when the tile passes all quality cuts
    """

    tile_id: int
    coords: np.ndarray
    bbox: Tuple[int, int, int, int]
    mean_spectrum: np.ndarray
    mean_sam_uniformity: float
    mean_l2_uniformity: float
    mean_intensity: float
    label: Optional[int] = None
    quality: Optional[bool] = None

    @property
    def size(self) -> int:
        return int(self.coords.shape[0])

    @property
    def bbox_shape(self) -> Tuple[int, int]:
        r0, c0, r1, c1 = self.bbox
        return r1 - r0, c1 - c0

    @property
    def is_mixed(self) -> bool:
        return self.label == MIXED_LABEL

    def fits(self, patch_size: int) -> bool:
        h, w = self.bbox_shape
        return (h <= patch_size) and (w <= patch_size)

    def pixels(self, cube: HsiCube) -> np.ndarray:
        return np.asarray(cube.data[self.coords[:, 0], self.coords[:, 1]], dtype='float64')


def compute_tile(cube: HsiCube, tile_id: int, coords: np.ndarray) -> Tile:
    """Recompute the statistics of a tile from its pixel set and the cube."""
    coords = np.asarray(coords, dtype='int64').reshape(-1, 2)
    if coords.shape[0] == 0:
        raise ValueError(f'tile {tile_id} has no pixels')
    pixels = np.asarray(cube.data[coords[:, 0], coords[:, 1]], dtype='float64')
    mean = pixels.mean(axis=0)
    if np.linalg.norm(mean) > 0:
        sam_uniformity = float(sam_to_reference(pixels, mean).mean())
    else:
        sam_uniformity = 0.0
    return Tile(
        tile_id=int(tile_id),
        coords=coords,
        bbox=(int(coords[:, 0].min()), int(coords[:, 1].min()), int(coords[:, 0].max()) + 1, int(coords[:, 1].max()) + 1),
        mean_spectrum=mean,
        mean_sam_uniformity=sam_uniformity,
        mean_l2_uniformity=float(l2_to_reference(pixels, mean).mean()),
        mean_intensity=float(pixels.mean()),
    )


# ========================================================================= #
# Tile Map                                                                  #
# ========================================================================= #


@dataclass(frozen=True, eq=False)
class TileMap(object):
    """
    Segmentation of a cube into tiles. `assignment` holds the tile id of every
    valid pixel and NO_TILE for invalid pixels, tile ids are 0..len(tiles)-1.
    """

    assignment: np.ndarray
    tiles: List[Tile]
    objective_history: List[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False

    @property
    def num_tiles(self) -> int:
        return len(self.tiles)

    @property
    def shape(self):
        return self.assignment.shape

    @property
    def is_annotated(self) -> bool:
        return all(t.label is not None for t in self.tiles)

    @property
    def is_filtered(self) -> bool:
        return all(t.quality is not None for t in self.tiles)

    def tile_sizes(self) -> np.ndarray:
        return np.array([t.size for t in self.tiles], dtype='int64')

    def passing(self) -> List[Tile]:
        return [t for t in self.tiles if t.quality]

    def with_tiles(self, tiles: Sequence[Tile]) -> 'TileMap':
        return replace(self, tiles=list(tiles))

    def tile_mask(self, tile_id: int) -> np.ndarray:
        return self.assignment == tile_id


def tiles_from_assignment(cube: HsiCube, assignment: np.ndarray) -> List[Tile]:
    """Build tiles from an assignment image whose ids are 0..K-1."""
    assignment = np.asarray(assignment, dtype='int64')
    if assignment.shape != cube.shape[:2]:
        raise ValueError(f'assignment shape {assignment.shape} does not match cube spatial shape {cube.shape[:2]}')
    tiles = []
    for k, slc in enumerate(ndimage.find_objects(assignment + 1)):
        if slc is None:
            raise ValueError(f'tile ids must be contiguous, tile {k} has no pixels')
        rows, cols = np.nonzero(assignment[slc] == k)
        coords = np.stack([rows + slc[0].start, cols + slc[1].start], axis=-1)
        tiles.append(compute_tile(cube, k, coords))
    return tiles


# ========================================================================= #
# Annotation                                                                #
# ========================================================================= #


def annotate_tiles(tile_map: TileMap, mask: AnnotationMask) -> TileMap:
    """Label every tile with the unique class of its pixels, or MIXED_LABEL."""
    if mask.shape != tile_map.shape:
        raise ValueError(f'annotation shape {mask.shape} does not match tile map shape {tile_map.shape}')
    tiles = []
    for tile in tile_map.tiles:
        classes = np.unique(mask.labels[tile.coords[:, 0], tile.coords[:, 1]])
        tiles.append(replace(tile, label=int(classes[0]) if (len(classes) == 1) else MIXED_LABEL))
    num_mixed = sum(t.is_mixed for t in tiles)
    log.debug(f'annotated {len(tiles)} tiles, {num_mixed} mixed')
    return tile_map.with_tiles(tiles)


def tile_separability(
    tile_map: TileMap,
    classes: Sequence[int],
    passing_only: bool = True,
    seed: int = 0,
) -> SeparabilityReport:
    """
    Tile-level separability, computed on the mean spectra of (quality passing)
    tiles instead of on raw pixels.
    """
    if not tile_map.is_annotated:
        raise ValueError('tile separability requires an annotated tile map')
    groups: Dict[int, List[np.ndarray]] = {int(c): [] for c in classes}
    for tile in tile_map.tiles:
        if passing_only and not tile.quality:
            continue
        if tile.label in groups:
            groups[tile.label].append(tile.mean_spectrum)
    for c, spectra in groups.items():
        if not spectra:
            raise ValueError(f'class {c} has no {"passing " if passing_only else ""}tiles')
    return separability_from_groups({c: np.stack(s) for c, s in groups.items()}, seed=seed, level='tile')


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
