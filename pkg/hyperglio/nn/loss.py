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

from typing import Optional
from typing import Sequence

import numpy as np
import torch
import torch.nn.functional as F


# ========================================================================= #
# Class Weights                                                             #
# ========================================================================= #


def inverse_frequency_weights(labels: Sequence[int], num_classes: int = 2) -> np.ndarray:
    """Weights n / (num_classes * count_c), so that every class contributes equally."""
    counts = np.bincount(np.asarray(labels, dtype='int64'), minlength=num_classes).astype('float64')
    if np.any(counts == 0):
        raise ValueError(f'every class needs at least one example to compute class weights, got counts: {counts.tolist()}')
    return counts.sum() / (num_classes * counts)


# ========================================================================= #
# Loss                                                                      #
# ========================================================================= #


def weighted_cross_entropy(logits: torch.Tensor, targets: torch.Tensor, class_weights: Optional[torch.Tensor] = None) -> torch.Tensor:
    """
    mean_i w[y_i] * -log softmax(logits_i)[y_i]

    Normalised by the number of examples and not by the sum of weights,
    so each class term is linear in its weight.
    """
    nll = F.cross_entropy(logits, targets, reduction='none')
    if class_weights is not None:
        class_weights = torch.as_tensor(class_weights, dtype=nll.dtype, device=nll.device)
        nll = nll * class_weights[targets]
    return nll.mean()


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
