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
from typing import Sequence

import numpy as np


log = logging.getLogger(__name__)


# ========================================================================= #
# Spectral Axis                                                             #
# ========================================================================= #


DEFAULT_WAVELENGTH_MIN_NM = 468.0
DEFAULT_WAVELENGTH_MAX_NM = 787.0
DEFAULT_BAND_COUNT = 104


@dataclass(frozen=True, eq=False)
class SpectralAxis(object):
    """
    Band-center wavelengths (nm) of a hyperspectral cube, strictly increasing.
    """

    wavelengths_nm: np.ndarray

    def __post_init__(self):
        # wavelengths are stored as f32 in cube files, keep them at that precision
        wavelengths = np.array(self.wavelengths_nm, dtype='float32').astype('float64').reshape(-1)
        if wavelengths.size < 1:
            raise ValueError('spectral axis requires at least one band')
        if not np.all(np.isfinite(wavelengths)):
            raise ValueError('spectral axis wavelengths must be finite')
        if np.any(np.diff(wavelengths) <= 0):
            raise ValueError('spectral axis wavelengths must be strictly increasing')
        wavelengths.setflags(write=False)
        object.__setattr__(self, 'wavelengths_nm', wavelengths)

    @classmethod
    def default(cls) -> 'SpectralAxis':
        return cls.linspace(DEFAULT_WAVELENGTH_MIN_NM, DEFAULT_WAVELENGTH_MAX_NM, DEFAULT_BAND_COUNT)

    @classmethod
    def linspace(cls, start_nm: float, stop_nm: float, band_count: int) -> 'SpectralAxis':
        if band_count < 1:
            raise ValueError(f'band_count must be positive, got: {band_count}')
        return cls(np.linspace(start_nm, stop_nm, band_count, dtype='float64'))

    @property
    def band_count(self) -> int:
        return int(self.wavelengths_nm.size)

    def __len__(self):
        return self.band_count

    def __eq__(self, other):
        if not isinstance(other, SpectralAxis):
            return NotImplemented
        return np.array_equal(self.wavelengths_nm, other.wavelengths_nm)

    def __hash__(self):
        return hash(self.wavelengths_nm.tobytes())

    def __repr__(self):
        return f'{self.__class__.__name__}(bands={self.band_count}, range=[{self.wavelengths_nm[0]:.1f}, {self.wavelengths_nm[-1]:.1f}] nm)'

    def half_spacing(self, index: int) -> float:
        """Half the spacing to the neighbouring band, used for the outer range tolerance."""
        if self.band_count == 1:
            return 0.0
        if index == 0:
            return float(self.wavelengths_nm[1] - self.wavelengths_nm[0]) / 2
        return float(self.wavelengths_nm[-1] - self.wavelengths_nm[-2]) / 2

    def band_index(self, wavelength_nm: float) -> int:
        return band_index(self, wavelength_nm)

    def subset(self, channels: Sequence[int]) -> 'SpectralAxis':
        return SpectralAxis(self.wavelengths_nm[np.asarray(channels, dtype='int64')])


def band_index(axis: SpectralAxis, wavelength_nm: float) -> int:
    """
    Index of the band center nearest to the wavelength, ties are broken toward
    the lower index. Queries further than half a band spacing beyond either end
    of the axis are rejected.
    """
    wavelength_nm = float(wavelength_nm)
    wavelengths = axis.wavelengths_nm
    lo = wavelengths[0] - axis.half_spacing(0)
    hi = wavelengths[-1] + axis.half_spacing(-1)
    if not (lo <= wavelength_nm <= hi):
        raise ValueError(f'wavelength {wavelength_nm} nm is out of range for axis [{lo:.2f}, {hi:.2f}] nm')
    # argmin returns the first occurrence of the minimum, ie. the lower index on ties
    return int(np.argmin(np.abs(wavelengths - wavelength_nm)))


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
