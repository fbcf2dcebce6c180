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

from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image

from hyperglio.cube import AnnotationMask
from hyperglio.cube import HsiCube
from hyperglio.ensemble import PredictionLabel
from hyperglio.pipeline._inference import PredictionMap
from hyperglio.pipeline._inference import annotation_labels
from hyperglio.util.inout.files import AtomicSaveFile


# grayscale base channel
BASE_BAND_NM = 660.0
OVERLAY_ALPHA = 0.5

OVERLAY_COLORS = {
    PredictionLabel.HEALTHY: (255, 0, 0),
    PredictionLabel.LGG: (0, 0, 255),
    PredictionLabel.UNKNOWN: (255, 165, 0),
}


# ========================================================================= #
# Overlays                                                                  #
# ========================================================================= #


def grayscale_base(cube: HsiCube, band_nm: float = BASE_BAND_NM) -> np.ndarray:
    """(H, W) float intensities in [0, 255], min-max stretched over the valid pixels, invalid pixels are 0."""
    band = np.asarray(cube.data[..., cube.axis.band_index(band_nm)], dtype='float64')
    gray = np.zeros(band.shape, dtype='float64')
    valid = cube.valid_mask
    if np.any(valid):
        lo, hi = band[valid].min(), band[valid].max()
        gray[valid] = 0.0 if (hi <= lo) else (band[valid] - lo) / (hi - lo) * 255.0
    return gray


def overlay_image(labels: np.ndarray, cube: HsiCube, band_nm: float = BASE_BAND_NM, alpha: float = OVERLAY_ALPHA) -> np.ndarray:
    """(H, W, 3) uint8 image, labeled pixels are blended with their class colour."""
    labels = np.asarray(labels)
    if labels.shape != cube.shape[:2]:
        raise ValueError(f'label image shape {labels.shape} does not match cube spatial shape {cube.shape[:2]}')
    if not (0 <= alpha <= 1):
        raise ValueError(f'alpha must be in [0, 1], got: {alpha}')
    rgb = np.repeat(grayscale_base(cube, band_nm)[..., None], 3, axis=-1)
    for label, color in OVERLAY_COLORS.items():
        selected = labels == label
        rgb[selected] = (1 - alpha) * rgb[selected] + alpha * np.asarray(color, dtype='float64')
    return np.clip(np.rint(rgb), 0, 255).astype('uint8')


def save_png(rgb: np.ndarray, path: Union[str, Path]) -> Path:
    with AtomicSaveFile(path, open_mode='wb', overwrite=True) as (_, fp):
        Image.fromarray(rgb).save(fp, format='PNG')
    return Path(path)


def render_overlay(pmap: PredictionMap, cube: HsiCube, path: Union[str, Path], band_nm: float = BASE_BAND_NM, alpha: float = OVERLAY_ALPHA) -> Path:
    """Write the prediction map over the grayscale base band as a PNG. The cube is not modified."""
    return save_png(overlay_image(pmap.labels, cube, band_nm=band_nm, alpha=alpha), path)


def render_annotation(mask: AnnotationMask, cube: HsiCube, path: Union[str, Path], band_nm: float = BASE_BAND_NM, alpha: float = OVERLAY_ALPHA) -> Path:
    """The two class ground truth in the same colours as the predictions."""
    mask.check_matches(cube)
    return save_png(overlay_image(annotation_labels(mask), cube, band_nm=band_nm, alpha=alpha), path)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
