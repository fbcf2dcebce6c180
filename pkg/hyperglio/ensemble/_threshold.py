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

from dataclasses import dataclass
from enum import IntEnum
from typing import Dict
from typing import Optional

import numpy as np

from hyperglio.dataset import BinaryLabel


# ========================================================================= #
# Labels                                                                    #
# ========================================================================= #


class PredictionLabel(IntEnum):
    HEALTHY = int(BinaryLabel.HEALTHY)
    LGG = int(BinaryLabel.LGG)
    UNKNOWN = 2
    NO_PREDICTION = 3


PREDICTION_NAMES = {
    PredictionLabel.HEALTHY: 'healthy',
    PredictionLabel.LGG: 'lgg',
    PredictionLabel.UNKNOWN: 'unknown',
    PredictionLabel.NO_PREDICTION: 'no-prediction',
}


def check_threshold(tau: float) -> float:
    tau = float(tau)
    if not (0.5 < tau <= 1.0):
        raise ValueError(f'threshold must be in the range (0.5, 1], got: {tau}')
    return tau


def threshold_labels(mean_probs: np.ndarray, tau: float) -> np.ndarray:
    """The winning class where its mean probability reaches `tau`, otherwise UNKNOWN."""
    tau = check_threshold(tau)
    mean_probs = np.asarray(mean_probs, dtype='float64')
    if mean_probs.ndim != 2 or mean_probs.shape[1] != 2:
        raise ValueError(f'expected (N, 2) class probabilities, got shape: {mean_probs.shape}')
    labels = np.argmax(mean_probs, axis=1).astype('int64')
    labels[mean_probs.max(axis=1) < tau] = PredictionLabel.UNKNOWN
    return labels


# ========================================================================= #
# Thresholded Prediction                                                    #
# ========================================================================= #


@dataclass(frozen=True, eq=False)
class ThresholdedPrediction(object):
    """
    labels:  (N,) PredictionLabel values, HEALTHY, LGG or UNKNOWN
    mean:    (N, 2) class probabilities averaged over the members
    members: (K, N, 2) class probabilities of every member
    """

    labels: np.ndarray
    mean: np.ndarray
    members: np.ndarray
    tau: float

    def __len__(self):
        return len(self.labels)

    @property
    def unknown(self) -> np.ndarray:
        return self.labels == PredictionLabel.UNKNOWN

    @property
    def confident(self) -> np.ndarray:
        return ~self.unknown

    def unknown_fraction(self, where: Optional[np.ndarray] = None) -> float:
        unknown = self.unknown if (where is None) else self.unknown[np.asarray(where, dtype='bool')]
        return float(unknown.mean()) if len(unknown) else float('nan')

    def confident_accuracy(self, labels: np.ndarray, where: Optional[np.ndarray] = None) -> float:
        """Accuracy over the confident predictions, NaN when there are none."""
        keep = self.confident if (where is None) else (self.confident & np.asarray(where, dtype='bool'))
        if not np.any(keep):
            return float('nan')
        return float(np.mean(self.labels[keep] == np.asarray(labels)[keep]))

    def label_counts(self) -> Dict[str, int]:
        return {PREDICTION_NAMES[l]: int(np.sum(self.labels == l)) for l in (PredictionLabel.HEALTHY, PredictionLabel.LGG, PredictionLabel.UNKNOWN)}


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
