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
from pathlib import Path
from typing import Dict
from typing import Optional
from typing import Sequence
from typing import Union

import numpy as np

from hyperglio.cube import AnnotationMask
from hyperglio.cube import HsiCube
from hyperglio.dataset import FOCUS_CLASSES
from hyperglio.dataset import segment_cube
from hyperglio.dataset import tile_patch_set
from hyperglio.ensemble import PREDICTION_NAMES
from hyperglio.ensemble import PredictionLabel
from hyperglio.ensemble import threshold_labels
from hyperglio.metrics import predict_labels
from hyperglio.superpixel import NO_TILE
from hyperglio.superpixel import PATCH_SIZE
from hyperglio.superpixel import SlicParams
from hyperglio.superpixel import TileMap
from hyperglio.util.inout.files import AtomicSaveFile
from hyperglio.util.profiling import Timer


log = logging.getLogger(__name__)


# ========================================================================= #
# Prediction Map                                                            #
# ========================================================================= #


@dataclass(frozen=True, eq=False)
class PredictionMap(object):
    """
    Tile-wise labels of a whole image.

    labels:      (H, W) PredictionLabel of every pixel, NO_PREDICTION on
                 invalid pixels and on tiles that were not classified
    assignment:  (H, W) tile id of every pixel, NO_TILE on invalid pixels
    tile_ids:    (M,) ids of the classified tiles
    tile_probs:  (M, 2) class probabilities of the classified tiles
    tile_labels: (M,) labels of the classified tiles
    """

    scene_id: str
    model_name: str
    labels: np.ndarray
    assignment: np.ndarray
    tile_ids: np.ndarray
    tile_probs: np.ndarray
    tile_labels: np.ndarray
    tau: Optional[float] = None
    oversize_count: int = 0
    accuracy: Optional[float] = None
    coverage: Optional[float] = None
    test_accuracy: Optional[float] = None

    @property
    def shape(self):
        return self.labels.shape

    def pixel_counts(self) -> Dict[str, int]:
        return {name: int(np.sum(self.labels == label)) for label, name in PREDICTION_NAMES.items()}

    def summary(self) -> dict:
        return dict(
            scene_id=self.scene_id,
            model=self.model_name,
            tau=self.tau,
            tiles=int(len(self.tile_ids)),
            oversize_tiles=int(self.oversize_count),
            accuracy=self.accuracy,
            coverage=self.coverage,
            test_accuracy=self.test_accuracy,
            pixels=self.pixel_counts(),
        )

    def save(self, path: Union[str, Path], overwrite: bool = True) -> Path:
        with AtomicSaveFile(path, open_mode='wb', overwrite=overwrite) as (_, fp):
            np.savez_compressed(
                fp,
                labels=self.labels.astype('uint8'),
                assignment=self.assignment.astype('int64'),
                tile_ids=self.tile_ids.astype('int64'),
                tile_probs=self.tile_probs.astype('float64'),
                tile_labels=self.tile_labels.astype('int64'),
                scene_id=np.array(self.scene_id),
                model_name=np.array(self.model_name),
                tau=np.float64(np.nan if self.tau is None else self.tau),
                oversize_count=np.int64(self.oversize_count),
                scores=np.array([np.nan if v is None else v for v in (self.accuracy, self.coverage, self.test_accuracy)], dtype='float64'),
            )
        return Path(path)

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'PredictionMap':
        def _opt(v):
            return None if np.isnan(v) else float(v)
        with np.load(path) as data:
            accuracy, coverage, test_accuracy = (_opt(v) for v in data['scores'])
            return cls(
                scene_id=str(data['scene_id']),
                model_name=str(data['model_name']),
                labels=data['labels'].astype('int64'),
                assignment=data['assignment'],
                tile_ids=data['tile_ids'],
                tile_probs=data['tile_probs'],
                tile_labels=data['tile_labels'],
                tau=_opt(data['tau']),
                oversize_count=int(data['oversize_count']),
                accuracy=accuracy,
                coverage=coverage,
                test_accuracy=test_accuracy,
            )


# ========================================================================= #
# Accuracy                                                                  #
# ========================================================================= #


def annotation_labels(mask: AnnotationMask) -> np.ndarray:
    """Binary ground truth of every pixel, NO_PREDICTION outside the focus classes."""
    truth = np.full(mask.labels.shape, int(PredictionLabel.NO_PREDICTION), dtype='int64')
    for class_id, label in FOCUS_CLASSES.items():
        truth[mask.labels == class_id] = int(label)
    return truth


def pixel_accuracy(labels: np.ndarray, mask: AnnotationMask, where: Optional[np.ndarray] = None):
    """
    Accuracy over the pixels annotated as a focus class that received a
    healthy or lgg prediction, and the fraction of annotated focus pixels
    that received one. Both are None without annotated focus pixels.
    """
    truth = annotation_labels(mask)
    annotated = truth != PredictionLabel.NO_PREDICTION
    if where is not None:
        annotated &= where
    if not np.any(annotated):
        return None, None
    decided = annotated & np.isin(labels, [PredictionLabel.HEALTHY, PredictionLabel.LGG])
    coverage = float(decided.sum() / annotated.sum())
    if not np.any(decided):
        return None, coverage
    return float(np.mean(labels[decided] == truth[decided])), coverage


# ========================================================================= #
# Inference                                                                 #
# ========================================================================= #


def infer_full_image(
    model,
    cube: HsiCube,
    slic: Optional[SlicParams] = None,
    tau: Optional[float] = None,
    mask: Optional[AnnotationMask] = None,
    test_tile_ids: Optional[Sequence[int]] = None,
    tile_map: Optional[TileMap] = None,
    scene_id: str = 'scene',
    patch_size: int = PATCH_SIZE,
) -> PredictionMap:
    """
    Re-segment the whole cube without quality filtration and classify every
    tile independently. `model` is a trained network, an ensemble or a
    classical model. Without `tau` the operating point decides the label,
    with `tau` low confidence tiles become UNKNOWN. Oversize tiles get
    NO_PREDICTION.

    `test_tile_ids` are tile ids of the same segmentation that belong to the
    test split, their accuracy is reported separately.
    """
    channels = np.asarray(model.channels, dtype='int64')
    if len(channels) == 0 or channels.max() >= cube.band_count or channels.min() < 0:
        raise ValueError(f'{model.name} uses channels {channels.tolist()} which the {cube.band_count} band cube does not have')
    with Timer(f'infer {scene_id} with {model.name}', log_level=logging.DEBUG):
        if tile_map is None:
            tile_map = segment_cube(cube, slic=slic)
        if tile_map.num_tiles == 0:
            raise ValueError(f'{scene_id}: the segmentation is empty')
        tiles, oversize = tile_patch_set(cube, tile_map, channels=channels, patch_size=patch_size, scene_id=scene_id)
        probs = model.predict_patch_set(tiles) if len(tiles) else np.zeros((0, 2))
    if oversize:
        log.warning(f'{scene_id}: {len(oversize)} tiles exceed the {patch_size}x{patch_size} patch and have no prediction')
    if tau is None:
        tile_labels = predict_labels(probs).astype('int64')
    else:
        tile_labels = threshold_labels(probs, tau) if len(probs) else np.zeros(0, dtype='int64')
    # tile-constant pixel labels
    lut = np.full(tile_map.num_tiles, int(PredictionLabel.NO_PREDICTION), dtype='int64')
    lut[tiles.tile_ids] = tile_labels
    valid = tile_map.assignment != NO_TILE
    labels = np.full(tile_map.shape, int(PredictionLabel.NO_PREDICTION), dtype='int64')
    labels[valid] = lut[tile_map.assignment[valid]]
    # accuracy against annotations
    accuracy = coverage = test_accuracy = None
    if mask is not None:
        mask.check_matches(cube)
        accuracy, coverage = pixel_accuracy(labels, mask)
        if test_tile_ids is not None:
            test_accuracy, _ = pixel_accuracy(labels, mask, where=np.isin(tile_map.assignment, np.asarray(test_tile_ids, dtype='int64')) & valid)
    pmap = PredictionMap(
        scene_id=scene_id,
        model_name=model.name,
        labels=labels,
        assignment=tile_map.assignment,
        tile_ids=tiles.tile_ids,
        tile_probs=probs,
        tile_labels=tile_labels,
        tau=None if (tau is None) else float(tau),
        oversize_count=len(oversize),
        accuracy=accuracy,
        coverage=coverage,
        test_accuracy=test_accuracy,
    )
    log.info(f'{scene_id} [{model.name}{"" if tau is None else f", tau={tau}"}]: {len(tiles)} tiles, accuracy={accuracy}, test accuracy={test_accuracy}')
    return pmap


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
