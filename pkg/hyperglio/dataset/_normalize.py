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
from dataclasses import replace
from pathlib import Path
from typing import Tuple
from typing import Union

import numpy as np

from hyperglio.dataset._examples import PatchSet
from hyperglio.util.inout.files import AtomicSaveFile


log = logging.getLogger(__name__)


# ========================================================================= #
# Normalization                                                             #
# ========================================================================= #


@dataclass(frozen=True, eq=False)
class NormalizationParams(object):
    """Per-channel mean and std of the member (non-padding) pixels of a training set."""

    mean: np.ndarray
    std: np.ndarray
    channels: np.ndarray

    @classmethod
    def fit(cls, patch_set: PatchSet) -> 'NormalizationParams':
        if len(patch_set) == 0:
            raise ValueError('cannot fit normalization to an empty training set')
        pixels = patch_set.patches[patch_set.masks].astype('float64')
        mean = pixels.mean(axis=0)
        std = pixels.std(axis=0)
        constant = std == 0
        if np.any(constant):
            log.warning(f'channels {patch_set.channels[constant].tolist()} have zero variance, using unit scale')
            std = np.where(constant, 1.0, std)
        return cls(mean=mean, std=std, channels=np.asarray(patch_set.channels, dtype='int64'))

    def apply(self, patch_set: PatchSet) -> PatchSet:
        """Transform member pixels, padding stays exactly zero. The output keeps the input dtype."""
        if not np.array_equal(patch_set.channels, self.channels):
            raise ValueError(f'normalization channels {self.channels.tolist()} do not match patch set channels {patch_set.channels.tolist()}')
        patches = np.zeros_like(patch_set.patches)
        member = patch_set.masks
        patches[member] = (patch_set.patches[member].astype('float64') - self.mean) / self.std
        return replace(patch_set, patches=patches, normalized=True)

    def apply_pixels(self, pixels: np.ndarray) -> np.ndarray:
        return (np.asarray(pixels, dtype='float64') - self.mean) / self.std

    def save(self, path: Union[str, Path]) -> Path:
        with AtomicSaveFile(path, open_mode='wb', overwrite=True) as (_, fp):
            np.savez(fp, mean=self.mean, std=self.std, channels=self.channels)
        return Path(path)

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'NormalizationParams':
        with np.load(path) as data:
            return cls(mean=data['mean'], std=data['std'], channels=data['channels'])

    def to_dict(self) -> dict:
        return dict(mean=self.mean.tolist(), std=self.std.tolist(), channels=self.channels.tolist())

    @classmethod
    def from_dict(cls, d: dict) -> 'NormalizationParams':
        return cls(mean=np.asarray(d['mean'], dtype='float64'), std=np.asarray(d['std'], dtype='float64'), channels=np.asarray(d['channels'], dtype='int64'))


def standardize(train: PatchSet, test: PatchSet) -> Tuple[PatchSet, PatchSet, NormalizationParams]:
    """Fit on the training set only and transform both sets."""
    params = NormalizationParams.fit(train)
    return params.apply(train), params.apply(test), params


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
