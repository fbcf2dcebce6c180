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
import math
from typing import Optional

import numpy as np
import torch
from torch import nn


log = logging.getLogger(__name__)


# ========================================================================= #
# Basic Weight Initialisation                                               #
# ========================================================================= #


def _fan_in_uniform_(weight: torch.Tensor):
    fan_in = int(np.prod(weight.shape[1:]))
    bound = 1 / math.sqrt(fan_in)
    return nn.init.uniform_(weight, -bound, bound)


_WEIGHT_INIT_FNS = {
    'fan_in_uniform':  _fan_in_uniform_,
    'xavier_uniform':  lambda weight: nn.init.xavier_uniform_(weight, gain=1.0),
    'xavier_normal':   lambda weight: nn.init.xavier_normal_(weight, gain=1.0),
    'kaiming_uniform': lambda weight: nn.init.kaiming_uniform_(weight, a=0, mode='fan_in', nonlinearity='relu'),
    'kaiming_normal':  lambda weight: nn.init.kaiming_normal_(weight, a=0, mode='fan_in', nonlinearity='relu'),
    'zeros':           nn.init.zeros_,
}


def init_model_weights(model: nn.Module, mode: Optional[str] = 'fan_in_uniform', log_level=logging.DEBUG) -> nn.Module:
    """
    Initialise the weights of every conv and dense layer, biases are zeroed.
    Other layers keep their own initialisation, eg. the channel compression
    layer starts as group averages.
    """
    if mode is None:
        mode = 'default'
    if (mode != 'default') and (mode not in _WEIGHT_INIT_FNS):
        raise KeyError(f'Unknown init mode: {repr(mode)}, valid modes are: {["default"] + sorted(_WEIGHT_INIT_FNS)}')
    count = 0

    def _apply_init_weights(m):
        nonlocal count
        count += 1
        if (mode != 'default') and isinstance(m, (nn.Linear, nn.Conv2d)):
            _WEIGHT_INIT_FNS[mode](m.weight)
            if m.bias is not None:
                nn.init.zeros_(m.bias)
            log.log(log_level, f'| {count:03d} INIT: {m.__class__.__name__}')
        else:
            log.log(log_level, f'| {count:03d} SKIP: {m.__class__.__name__}')

    log.log(log_level, f'Initialising Model Layers: {mode}')
    model.apply(_apply_init_weights)
    return model


def group_average_weights(out_channels: int, in_channels: int) -> np.ndarray:
    """
    (out, in) matrix averaging contiguous channel groups, each output channel
    is the mean of one group. With out == in this is the identity.
    """
    if not (0 < out_channels <= in_channels):
        raise ValueError(f'cannot average {in_channels} channels into {out_channels} groups')
    weights = np.zeros((out_channels, in_channels), dtype='float64')
    for i, group in enumerate(np.array_split(np.arange(in_channels), out_channels)):
        weights[i, group] = 1.0 / len(group)
    return weights


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
