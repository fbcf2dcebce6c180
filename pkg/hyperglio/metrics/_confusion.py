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
from dataclasses import asdict
from dataclasses import dataclass
from typing import Dict
from typing import Sequence
from typing import Tuple

import numpy as np


log = logging.getLogger(__name__)


# lgg is the positive class
POSITIVE_LABEL = 1

# probabilities at exactly the operating point resolve to the positive class
OPERATING_POINT = 0.5


# ========================================================================= #
# Confusion Counts                                                          #
# ========================================================================= #


def _ratio(num: int, den: int) -> float:
    return float(num) / float(den) if den > 0 else float('nan')


@dataclass(frozen=True)
class ConfusionCounts(object):
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for k, v in asdict(self).items():
            if v < 0:
                raise ValueError(f'confusion count {k} must be non-negative, got: {v}')

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def accuracy(self) -> float:
        return _ratio(self.tp + self.tn, self.total)

    @property
    def precision(self) -> float:
        return _ratio(self.tp, self.tp + self.fp)

    @property
    def recall(self) -> float:
        return _ratio(self.tp, self.tp + self.fn)

    @property
    def f1(self) -> float:
        return _ratio(2 * self.tp, 2 * self.tp + self.fp + self.fn)

    def metrics(self) -> Dict[str, float]:
        return dict(accuracy=self.accuracy, precision=self.precision, recall=self.recall, f1=self.f1)

    def to_dict(self) -> dict:
        return dict(**asdict(self), total=self.total, **self.metrics())

    def __add__(self, other: 'ConfusionCounts') -> 'ConfusionCounts':
        return ConfusionCounts(self.tp + other.tp, self.tn + other.tn, self.fp + other.fp, self.fn + other.fn)


# ========================================================================= #
# Evaluation                                                                #
# ========================================================================= #


def _check_binary(array: np.ndarray, name: str):
    if not np.all((array == 0) | (array == 1)):
        raise ValueError(f'{name} must only contain binary labels 0 (healthy) and 1 (lgg), got: {np.unique(array).tolist()}')


def confusion_counts(predictions: Sequence[int], labels: Sequence[int]) -> ConfusionCounts:
    predictions = np.asarray(predictions).reshape(-1)
    labels = np.asarray(labels).reshape(-1)
    if len(predictions) != len(labels):
        raise ValueError(f'number of predictions {len(predictions)} does not match number of labels {len(labels)}')
    if len(labels) == 0:
        raise ValueError('cannot evaluate an empty set of predictions')
    _check_binary(predictions, 'predictions')
    _check_binary(labels, 'labels')
    pos_p, pos_l = predictions == POSITIVE_LABEL, labels == POSITIVE_LABEL
    return ConfusionCounts(
        tp=int(np.sum(pos_p & pos_l)),
        tn=int(np.sum(~pos_p & ~pos_l)),
        fp=int(np.sum(pos_p & ~pos_l)),
        fn=int(np.sum(~pos_p & pos_l)),
    )


def evaluate(predictions: Sequence[int], labels: Sequence[int]) -> Tuple[ConfusionCounts, float, float, float]:
    """
    Confusion counts with accuracy, precision and recall. Ratios with a zero
    denominator are returned as nan.
    """
    counts = confusion_counts(predictions, labels)
    return counts, counts.accuracy, counts.precision, counts.recall


def predict_labels(probabilities: np.ndarray) -> np.ndarray:
    """(N, 2) class probabilities to labels at the operating point."""
    probabilities = np.asarray(probabilities)
    if probabilities.ndim != 2 or probabilities.shape[1] != 2:
        raise ValueError(f'expected (N, 2) class probabilities, got shape: {probabilities.shape}')
    return (probabilities[:, POSITIVE_LABEL] >= OPERATING_POINT).astype('int64')


# ========================================================================= #
# Reference Rows                                                            #
# ========================================================================= #


# confusion counts of channel compressing networks trained on clinical data,
# with the rounded percentages reported for them (accuracy, precision, recall)
REFERENCE_CONFUSION_ROWS = [
    ('104-3',  ConfusionCounts(tp=1137, tn=428, fp=95, fn=391), (76, 92, 74)),
    ('104-3',  ConfusionCounts(tp=1238, tn=426, fp=97, fn=290), (81, 93, 81)),
    ('104-3',  ConfusionCounts(tp=1178, tn=430, fp=93, fn=350), (78, 93, 77)),
    ('104-6',  ConfusionCounts(tp=1334, tn=444, fp=79, fn=194), (87, 94, 87)),
    ('104-6',  ConfusionCounts(tp=1221, tn=460, fp=63, fn=307), (82, 95, 80)),
    ('104-6',  ConfusionCounts(tp=1298, tn=450, fp=73, fn=230), (85, 95, 85)),
    ('104-12', ConfusionCounts(tp=1378, tn=443, fp=80, fn=150), (89, 94, 90)),
    ('104-12', ConfusionCounts(tp=1297, tn=446, fp=57, fn=231), (86, 96, 85)),
    ('104-12', ConfusionCounts(tp=1373, tn=445, fp=78, fn=155), (89, 94, 90)),
]


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
