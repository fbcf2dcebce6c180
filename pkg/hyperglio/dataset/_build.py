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
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np
from joblib import Parallel
from joblib import delayed
from tqdm import tqdm

from hyperglio.cube import AnnotationMask
from hyperglio.cube import HsiCube
from hyperglio.dataset._examples import FOCUS_CLASSES
from hyperglio.dataset._examples import LabeledExample
from hyperglio.dataset._examples import PatchSet
from hyperglio.dataset._examples import Scene
from hyperglio.dataset._split import SplitSpec
from hyperglio.dataset._split import split_indices
from hyperglio.superpixel import FilterParams
from hyperglio.superpixel import PATCH_SIZE
from hyperglio.superpixel import SlicParams
from hyperglio.superpixel import TileMap
from hyperglio.superpixel import annotate_tiles
from hyperglio.superpixel import extract_patch
from hyperglio.superpixel import filter_tiles
from hyperglio.superpixel import slic_segment


log = logging.getLogger(__name__)


# ========================================================================= #
# Scene Processing                                                          #
# ========================================================================= #


def segment_scene(scene: Scene, slic: Optional[SlicParams] = None, filt: Optional[FilterParams] = None) -> TileMap:
    """Tile, annotate and quality filter a scene, only focus class tiles are candidates."""
    filt = FilterParams() if (filt is None) else filt
    tile_map = segment_cube(scene.cube, slic=slic, mask=scene.mask)
    return filter_tiles(
        tile_map,
        sam_pctl=filt.sam_pctl,
        l2_pctl=filt.l2_pctl,
        intensity_lo=filt.intensity_lo,
        intensity_hi=filt.intensity_hi,
        classes=sorted(FOCUS_CLASSES),
    )


def scene_examples(
    scene: Scene,
    tile_map: TileMap,
    channels: Optional[Sequence[int]] = None,
    patch_size: int = PATCH_SIZE,
) -> List[LabeledExample]:
    """Padded patches of every passing focus class tile, oversize tiles are skipped with a warning."""
    examples, oversize = [], 0
    for tile in tile_map.passing():
        if tile.label not in FOCUS_CLASSES:
            continue
        if not tile.fits(patch_size):
            oversize += 1
            continue
        examples.append(LabeledExample(
            patch=extract_patch(scene.cube, tile, channels=channels, size=patch_size),
            binary_label=FOCUS_CLASSES[tile.label],
            scene_id=scene.scene_id,
            patient_id=scene.patient_id,
            class_id=int(tile.label),
        ))
    if oversize:
        log.warning(f'{scene.scene_id}: excluded {oversize} passing tiles whose bounding box exceeds {patch_size}x{patch_size}')
    return examples


def _process_scene(scene, slic, filt, channels, patch_size):
    tile_map = segment_scene(scene, slic=slic, filt=filt)
    return tile_map, scene_examples(scene, tile_map, channels=channels, patch_size=patch_size)


UNLABELED = -1


def segment_cube(cube: HsiCube, slic: Optional[SlicParams] = None, mask: Optional[AnnotationMask] = None) -> TileMap:
    """Tile a cube for inference, annotated when a mask is given but never quality filtered."""
    slic = SlicParams() if (slic is None) else slic
    tile_map = slic_segment(
        cube,
        target_pixels_per_tile=slic.target_pixels_per_tile,
        compactness=slic.compactness,
        max_iters=slic.max_iters,
        convergence_px=slic.convergence_px,
    )
    return tile_map if (mask is None) else annotate_tiles(tile_map, mask)


def tile_patch_set(
    cube: HsiCube,
    tile_map: TileMap,
    channels: Optional[Sequence[int]] = None,
    patch_size: int = PATCH_SIZE,
    scene_id: str = 'scene',
    patient_id: str = 'unknown',
) -> Tuple[PatchSet, List[int]]:
    """
    Patches of every tile of a segmentation regardless of quality, for
    inference. Tiles of a focus class carry their binary label, all other
    tiles UNLABELED. Returns the patch set and the ids of oversize tiles.
    """
    channels = np.arange(cube.band_count) if (channels is None) else np.asarray(channels, dtype='int64')
    examples, oversize = [], []
    for tile in tile_map.tiles:
        if not tile.fits(patch_size):
            oversize.append(tile.tile_id)
            continue
        examples.append(LabeledExample(
            patch=extract_patch(cube, tile, channels=channels, size=patch_size),
            binary_label=FOCUS_CLASSES.get(tile.label, UNLABELED),
            scene_id=scene_id,
            patient_id=patient_id,
            class_id=UNLABELED if (tile.label is None) else int(tile.label),
        ))
    return PatchSet.from_examples(examples, channels=channels, patch_size=patch_size), oversize


# ========================================================================= #
# Dataset                                                                   #
# ========================================================================= #


@dataclass(frozen=True, eq=False)
class DatasetSplit(object):
    train: PatchSet
    test: PatchSet
    tile_maps: Dict[str, TileMap] = field(default_factory=dict)

    def summary(self) -> dict:
        return dict(
            train=dict(count=len(self.train), **self.train.class_counts()),
            test=dict(count=len(self.test), **self.test.class_counts()),
            channels=self.train.channels.tolist(),
            scenes=sorted(self.tile_maps),
        )


def build_patch_set(
    scenes: Sequence[Scene],
    channels: Optional[Sequence[int]] = None,
    slic: Optional[SlicParams] = None,
    filt: Optional[FilterParams] = None,
    patch_size: int = PATCH_SIZE,
    tile_maps: Optional[Dict[str, TileMap]] = None,
    n_jobs: int = 1,
    progress: bool = False,
) -> Tuple[PatchSet, Dict[str, TileMap]]:
    """
    All labeled examples of the scenes in scene order. Previously computed tile
    maps can be passed to skip segmentation, eg. when rebuilding with a
    different channel selection.
    """
    if len(scenes) == 0:
        raise ValueError('at least one scene is required')
    if not any(s.has_both_classes() for s in scenes):
        raise ValueError('no scene contains both healthy and lgg annotations')
    ids = [s.scene_id for s in scenes]
    if len(set(ids)) != len(ids):
        raise ValueError(f'scene ids must be unique, got: {ids}')
    band_count = scenes[0].cube.band_count
    channels = np.arange(band_count) if (channels is None) else np.asarray(channels, dtype='int64')
    # reuse tile maps
    if tile_maps is not None:
        results = [(tile_maps[s.scene_id], scene_examples(s, tile_maps[s.scene_id], channels=channels, patch_size=patch_size)) for s in scenes]
    else:
        jobs = (delayed(_process_scene)(s, slic, filt, channels, patch_size) for s in tqdm(scenes, desc='tiling', disable=not progress))
        results = Parallel(n_jobs=n_jobs)(jobs)
    examples = [e for _, scene_exs in results for e in scene_exs]
    patch_set = PatchSet.from_examples(examples, channels=channels, patch_size=patch_size)
    return patch_set, {s.scene_id: tm for s, (tm, _) in zip(scenes, results)}


def build_dataset(
    scenes: Sequence[Scene],
    split: SplitSpec,
    channels: Optional[Sequence[int]] = None,
    slic: Optional[SlicParams] = None,
    filt: Optional[FilterParams] = None,
    patch_size: int = PATCH_SIZE,
    tile_maps: Optional[Dict[str, TileMap]] = None,
    n_jobs: int = 1,
    progress: bool = False,
) -> DatasetSplit:
    """
    Segment, filter and patch every scene, then split the examples into train
    and test sets. Deterministic in the split seed, scenes are processed in
    parallel but their results are combined in scene order.
    """
    patch_set, tile_maps = build_patch_set(scenes, channels=channels, slic=slic, filt=filt, patch_size=patch_size, tile_maps=tile_maps, n_jobs=n_jobs, progress=progress)
    train_idx, test_idx = split_indices(patch_set.labels, split, patient_ids=patch_set.patient_ids)
    result = DatasetSplit(train=patch_set.subset(train_idx), test=patch_set.subset(test_idx), tile_maps=tile_maps)
    log.info(f'dataset: {len(patch_set)} tiles from {len(scenes)} scenes, train={result.train.class_counts()} test={result.test.class_counts()}')
    return result


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
