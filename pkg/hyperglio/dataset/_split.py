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
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np

from hyperglio.dataset._examples import BINARY_NAMES
from hyperglio.dataset._examples import BinaryLabel
from hyperglio.util.seeds import make_rng


log = logging.getLogger(__name__)


SPLIT_MODES = ('random-tile', 'by-patient')

# stream index of the split generator, independent of any other use of the seed
_SPLIT_STREAM = 11


@dataclass
class SplitSpec(object):
    mode: str = 'random-tile'
    train_fraction: float = 6620 / 8671
    seed: int = 0

    def __post_init__(self):
        if self.mode not in SPLIT_MODES:
            raise KeyError(f'invalid split mode: {repr(self.mode)}, must be one of: {list(SPLIT_MODES)}')
        if not (0.0 < self.train_fraction < 1.0):
            raise ValueError(f'train_fraction must be in the open interval (0, 1), got: {self.train_fraction}')


def _partition_size(fraction: float, n: int, what: str) -> int:
    n_train = int(round(fraction * n))
    if n_train <= 0 or n_train >= n:
        raise ValueError(f'train_fraction={fraction} over {n} {what} leaves an empty partition ({n_train} / {n - n_train})')
    return n_train


def split_indices(
    labels: Sequence[int],
    split: SplitSpec,
    patient_ids: Optional[Sequence[str]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Deterministically split example indices into sorted, disjoint train and test
    index arrays whose union is every example. `random-tile` draws round(f * n)
    training examples uniformly, `by-patient` draws round(f * num_patients)
    whole patients. Both partitions must contain both classes.
    """
    labels = np.asarray(labels, dtype='int64')
    n = len(labels)
    if n == 0:
        raise ValueError('cannot split an empty set of examples')
    rng = make_rng(split.seed, _SPLIT_STREAM)
    if split.mode == 'random-tile':
        n_train = _partition_size(split.train_fraction, n, 'examples')
        order = rng.permutation(n)
        train, test = np.sort(order[:n_train]), np.sort(order[n_train:])
    else:
        if patient_ids is None:
            raise ValueError('by-patient splits require patient ids')
        patient_ids = np.asarray(patient_ids)
        patients = np.unique(patient_ids)
        n_train = _partition_size(split.train_fraction, len(patients), 'patients')
        train_patients = patients[rng.permutation(len(patients))[:n_train]]
        is_train = np.isin(patient_ids, train_patients)
        train, test = np.flatnonzero(is_train), np.flatnonzero(~is_train)
    for name, idx in [('train', train), ('test', test)]:
        for label in BinaryLabel:
            if not np.any(labels[idx] == label):
                raise ValueError(f'the {name} partition has no {BINARY_NAMES[label]} examples ({split.mode}, seed={split.seed})')
    return train, test


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
