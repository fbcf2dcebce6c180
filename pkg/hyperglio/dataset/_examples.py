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
from enum import IntEnum
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence

import numpy as np
import torch
from torch.utils.data import Dataset

from hyperglio.cube import AnnotationMask
from hyperglio.cube import HsiCube
from hyperglio.cube import TissueClass
from hyperglio.superpixel import PaddedPatch


log = logging.getLogger(__name__)


# ========================================================================= #
# Binary Task                                                               #
# ========================================================================= #


class BinaryLabel(IntEnum):
    HEALTHY = 0
    LGG = 1


# histologically confirmed and unconfirmed tiles are aggregated
FOCUS_CLASSES: Dict[int, BinaryLabel] = {
    int(TissueClass.HEALTHY): BinaryLabel.HEALTHY,
    int(TissueClass.HISTO_HEALTHY): BinaryLabel.HEALTHY,
    int(TissueClass.LGG): BinaryLabel.LGG,
    int(TissueClass.HISTO_LGG): BinaryLabel.LGG,
}

BINARY_NAMES = {BinaryLabel.HEALTHY: 'healthy', BinaryLabel.LGG: 'lgg'}


def to_binary_label(class_id: int) -> BinaryLabel:
    try:
        return FOCUS_CLASSES[int(class_id)]
    except KeyError:
        raise ValueError(f'class {class_id} is not part of the healthy vs. lgg task, focus classes are: {sorted(FOCUS_CLASSES)}')


# ========================================================================= #
# Scenes & Examples                                                         #
# ========================================================================= #


@dataclass(frozen=True, eq=False)
class Scene(object):
    cube: HsiCube
    mask: AnnotationMask
    scene_id: str
    patient_id: str

    def __post_init__(self):
        self.mask.check_matches(self.cube)

    def has_both_classes(self) -> bool:
        present = {FOCUS_CLASSES[c] for c in self.mask.present_classes() if c in FOCUS_CLASSES}
        return present == set(BinaryLabel)


@dataclass(frozen=True, eq=False)
class LabeledExample(object):
    patch: PaddedPatch
    binary_label: BinaryLabel
    scene_id: str
    patient_id: str
    class_id: int

    @property
    def tile_id(self) -> int:
        return self.patch.tile_id


# ========================================================================= #
# Patch Set                                                                 #
# ========================================================================= #


@dataclass(frozen=True, eq=False)
class PatchSet(object):
    """
    Column store of labeled examples sharing one channel selection.
    Patches are stored (N, H, W, C), masks (N, H, W).
    """

    patches: np.ndarray
    masks: np.ndarray
    labels: np.ndarray
    tile_ids: np.ndarray
    scene_ids: np.ndarray
    patient_ids: np.ndarray
    class_ids: np.ndarray
    channels: np.ndarray
    normalized: bool = False
    meta: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.patches)
        for name in ['masks', 'labels', 'tile_ids', 'scene_ids', 'patient_ids', 'class_ids']:
            assert len(getattr(self, name)) == n, f'PatchSet.{name} has length {len(getattr(self, name))}, expected {n}'
        assert self.patches.ndim == 4, f'patches must be (N, H, W, C), got shape: {self.patches.shape}'
        assert self.patches.shape[-1] == len(self.channels), f'patch channels {self.patches.shape[-1]} do not match channel list of length {len(self.channels)}'

    @classmethod
    def from_examples(cls, examples: Sequence[LabeledExample], channels: Sequence[int], patch_size: int = 40) -> 'PatchSet':
        channels = np.asarray(channels, dtype='int64')
        if examples:
            patches = np.stack([e.patch.data for e in examples])
            masks = np.stack([e.patch.mask for e in examples])
        else:
            patches = np.zeros((0, patch_size, patch_size, len(channels)), dtype='float32')
            masks = np.zeros((0, patch_size, patch_size), dtype='bool')
        return cls(
            patches=patches,
            masks=masks,
            labels=np.array([int(e.binary_label) for e in examples], dtype='int64'),
            tile_ids=np.array([e.tile_id for e in examples], dtype='int64'),
            scene_ids=np.array([e.scene_id for e in examples], dtype='U'),
            patient_ids=np.array([e.patient_id for e in examples], dtype='U'),
            class_ids=np.array([e.class_id for e in examples], dtype='int64'),
            channels=channels,
        )

    def __len__(self):
        return len(self.patches)

    @property
    def channel_count(self) -> int:
        return len(self.channels)

    @property
    def patch_shape(self):
        return self.patches.shape[1:]

    def class_counts(self) -> Dict[str, int]:
        return {BINARY_NAMES[label]: int(np.sum(self.labels == label)) for label in BinaryLabel}

    def subset(self, indices: Sequence[int]) -> 'PatchSet':
        idx = np.asarray(indices, dtype='int64')
        return replace(
            self,
            patches=self.patches[idx], masks=self.masks[idx], labels=self.labels[idx],
            tile_ids=self.tile_ids[idx], scene_ids=self.scene_ids[idx], patient_ids=self.patient_ids[idx],
            class_ids=self.class_ids[idx],
        )

    def features(self) -> np.ndarray:
        """Mean spectrum of the member pixels of every patch, spatial information is discarded."""
        counts = self.masks.sum(axis=(1, 2)).astype('float64')
        sums = np.einsum('nhwc,nhw->nc', self.patches.astype('float64'), self.masks.astype('float64'))
        return sums / counts[:, None]

    def example_keys(self) -> List[str]:
        return [f'{s}:{t}' for s, t in zip(self.scene_ids, self.tile_ids)]


# ========================================================================= #
# Torch Dataset                                                             #
# ========================================================================= #


class TileDataset(Dataset):
    """
    Torch view of a patch set. Items are dictionaries with
    `x` (C, H, W) float64 tensors, `y` the binary label and `idx`.
    """

    def __init__(self, patch_set: PatchSet, dtype: torch.dtype = torch.float64):
        self._patch_set = patch_set
        self._dtype = dtype

    @property
    def patch_set(self) -> PatchSet:
        return self._patch_set

    def __len__(self):
        return len(self._patch_set)

    def __getitem__(self, idx: int):
        x = torch.from_numpy(np.ascontiguousarray(self._patch_set.patches[idx].transpose(2, 0, 1)))
        return {
            'x': x.to(self._dtype),
            'y': torch.tensor(int(self._patch_set.labels[idx]), dtype=torch.long),
            'idx': idx,
        }

    def tensors(self, indices: Optional[Sequence[int]] = None):
        """All (or the selected) patches as a single (N, C, H, W) tensor and their labels."""
        ps = self._patch_set if (indices is None) else self._patch_set.subset(indices)
        x = torch.from_numpy(np.ascontiguousarray(ps.patches.transpose(0, 3, 1, 2))).to(self._dtype)
        return x, torch.from_numpy(ps.labels)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
