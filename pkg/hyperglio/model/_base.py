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
from typing import final
from typing import Tuple

import torch

from hyperglio.nn.modules import HyperGlioModule


log = logging.getLogger(__name__)


# ========================================================================= #
# Tile Classifier Base                                                      #
# ========================================================================= #


class TileClassifier(HyperGlioModule):
    """
    Base for networks mapping a batch of examples to two class probabilities.
    Subclasses implement `_logits`, input shapes are checked here.
    """

    def __init__(self, x_shape: Tuple[int, ...], num_classes: int = 2):
        super().__init__()
        self._x_shape = tuple(int(d) for d in x_shape)
        self._num_classes = int(num_classes)

    @property
    def x_shape(self) -> Tuple[int, ...]:
        return self._x_shape

    @property
    def num_classes(self) -> int:
        return self._num_classes

    @property
    def in_channels(self) -> int:
        return self._x_shape[0]

    @final
    def logits(self, x: torch.Tensor) -> torch.Tensor:
        if tuple(x.shape[1:]) != self._x_shape:
            raise ValueError(f'{self.__class__.__name__} expects inputs of shape (B, {", ".join(map(str, self._x_shape))}), got: {tuple(x.shape)}')
        z = self._logits(x)
        assert z.shape == (x.shape[0], self._num_classes), f'logits shape {tuple(z.shape)} does not match (B, {self._num_classes})'
        return z

    @final
    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """class probabilities, rows sum to one"""
        return torch.softmax(self.logits(x), dim=-1)

    def _logits(self, x: torch.Tensor) -> torch.Tensor:
        raise NotImplementedError


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
