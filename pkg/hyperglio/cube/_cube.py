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
from enum import IntEnum
from typing import Optional

import numpy as np

from hyperglio.cube._axis import SpectralAxis


log = logging.getLogger(__name__)


# ========================================================================= #
# Constants                                                                 #
# ========================================================================= #


# reflectance above this value is treated as saturated
SATURATION_CAP = 1.2

# reflectance of the calibration target
WHITE_TARGET_REFLECTANCE = 0.95


class CubeFormatError(ValueError):
    """Raised when a cube or annotation does not satisfy its container contract."""


# ========================================================================= #
# Tissue Classes                                                            #
# ========================================================================= #


class TissueClass(IntEnum):
    BACKGROUND = 0
    HEALTHY = 1
    FOREIGN_OBJECT = 2
    BLOOD = 3
    COAGULATION = 4
    HGG = 5
    LGG = 6
    HISTO_HGG = 7
    HISTO_LGG = 8
    BLOOD_VESSEL = 9
    WHITE_MATTER = 10
    DEEP_CORTEX = 11
    PIA = 12
    HISTO_HEALTHY = 13


NUM_TISSUE_CLASSES = len(TissueClass)

CLASS_NAMES = {
    int(c): c.name.replace('_', ' ').title().replace('Hgg', 'HGG').replace('Lgg', 'LGG')
    for c in TissueClass
}


# ========================================================================= #
# Cube                                                                      #
# ========================================================================= #


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class HsiCube(object):
    """
    Reflectance cube of shape (height, width, bands) with a per-pixel validity mask.
    Arrays are copied and made read-only on construction, a cube is immutable.

    Parameters:
    - data: float32 (storage) or float64 (computed) reflectance values, all finite
    - axis: the spectral axis, band_count must match the last data dimension
    - valid_mask: (height, width) bool, illuminated and non-missing pixels
    """

    data: np.ndarray
    axis: SpectralAxis = field(default_factory=SpectralAxis.default)
    valid_mask: Optional[np.ndarray] = None

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 3:
            raise CubeFormatError(f'cube data must have shape (height, width, bands), got: {data.shape}')
        if data.dtype not in (np.float32, np.float64):
            data = data.astype('float32')
        if not isinstance(self.axis, SpectralAxis):
            raise TypeError(f'axis must be a {SpectralAxis.__name__}, got: {type(self.axis)}')
        if data.shape[-1] != self.axis.band_count:
            raise CubeFormatError(f'cube has {data.shape[-1]} bands but the spectral axis has {self.axis.band_count}')
        if not np.all(np.isfinite(data)):
            raise CubeFormatError('cube data contains non-finite values')
        # validity mask
        if self.valid_mask is None:
            mask = np.ones(data.shape[:2], dtype='bool')
        else:
            mask = np.asarray(self.valid_mask)
            if mask.shape != data.shape[:2]:
                raise CubeFormatError(f'valid_mask shape {mask.shape} does not match cube spatial shape {data.shape[:2]}')
            mask = mask.astype('bool')
        object.__setattr__(self, 'data', _readonly(data))
        object.__setattr__(self, 'valid_mask', _readonly(mask))

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def band_count(self) -> int:
        return int(self.data.shape[2])

    @property
    def shape(self):
        return self.data.shape

    @property
    def valid_count(self) -> int:
        return int(self.valid_mask.sum())

    def valid_pixels(self) -> np.ndarray:
        """(N, bands) float64 spectra of valid pixels in row-major order."""
        return np.asarray(self.data[self.valid_mask], dtype='float64')

    def with_data(self, data: np.ndarray, valid_mask: Optional[np.ndarray] = None) -> 'HsiCube':
        return HsiCube(data=data, axis=self.axis, valid_mask=self.valid_mask if (valid_mask is None) else valid_mask)

    def as_float32(self) -> 'HsiCube':
        """Storage precision copy of this cube, the only precision `save_cube` accepts."""
        if self.data.dtype == np.float32:
            return self
        data = self.data.astype('float32')
        if not np.all(np.isfinite(data)):
            raise CubeFormatError('cube data is not representable as finite float32 values')
        return self.with_data(data)

    def select_channels(self, channels) -> 'HsiCube':
        channels = np.asarray(channels, dtype='int64')
        return HsiCube(data=self.data[..., channels], axis=self.axis.subset(channels), valid_mask=self.valid_mask)

    def equals(self, other: 'HsiCube') -> bool:
        """Bitwise equality of data, mask and axis."""
        return (
            isinstance(other, HsiCube)
            and self.data.dtype == other.data.dtype
            and self.axis == other.axis
            and np.array_equal(self.valid_mask, other.valid_mask)
            and self.data.tobytes() == other.data.tobytes()
        )

    def __repr__(self):
        return f'{self.__class__.__name__}(shape={self.shape}, dtype={self.data.dtype}, valid={self.valid_count}/{self.height * self.width})'


# ========================================================================= #
# Annotations                                                               #
# ========================================================================= #


@dataclass(frozen=True, eq=False)
class AnnotationMask(object):
    """
    Per-pixel tissue class ids, restricted to the 14 annotated classes.
    """

    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 2:
            raise CubeFormatError(f'annotation labels must have shape (height, width), got: {labels.shape}')
        if labels.size and ((labels.min() < 0) or (labels.max() >= NUM_TISSUE_CLASSES)):
            raise CubeFormatError(f'annotation labels must be in range [0, {NUM_TISSUE_CLASSES - 1}], got: [{labels.min()}, {labels.max()}]')
        object.__setattr__(self, 'labels', _readonly(labels.astype('uint8')))

    @classmethod
    def background(cls, height: int, width: int) -> 'AnnotationMask':
        return cls(np.zeros((height, width), dtype='uint8'))

    @property
    def height(self) -> int:
        return int(self.labels.shape[0])

    @property
    def width(self) -> int:
        return int(self.labels.shape[1])

    @property
    def shape(self):
        return self.labels.shape

    def present_classes(self):
        return sorted(int(c) for c in np.unique(self.labels))

    def check_matches(self, cube: HsiCube):
        if self.shape != cube.shape[:2]:
            raise ValueError(f'annotation shape {self.shape} does not match cube spatial shape {cube.shape[:2]}')

    def equals(self, other: 'AnnotationMask') -> bool:
        return isinstance(other, AnnotationMask) and np.array_equal(self.labels, other.labels)


# ========================================================================= #
# White Reference                                                           #
# ========================================================================= #


@dataclass(frozen=True, eq=False)
class WhiteReference(object):
    spectrum: np.ndarray
    target_reflectance: float = WHITE_TARGET_REFLECTANCE

    def __post_init__(self):
        spectrum = np.asarray(self.spectrum, dtype='float64').reshape(-1)
        if spectrum.size == 0:
            raise ValueError('white reference spectrum must not be empty')
        if not np.all(np.isfinite(spectrum)) or np.any(spectrum <= 0):
            raise ValueError('white reference entries must be finite and strictly positive')
        if not (self.target_reflectance > 0):
            raise ValueError(f'target_reflectance must be positive, got: {self.target_reflectance}')
        object.__setattr__(self, 'spectrum', _readonly(spectrum))

    @property
    def band_count(self) -> int:
        return int(self.spectrum.size)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
