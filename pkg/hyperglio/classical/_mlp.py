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
from typing import Optional

from hyperglio.dataset import NormalizationParams
from hyperglio.dataset import PatchSet
from hyperglio.frameworks import TrainConfig
from hyperglio.frameworks import TrainedNetwork
from hyperglio.frameworks import train_network
from hyperglio.model import MlpSpec


log = logging.getLogger(__name__)


# ========================================================================= #
# MLP                                                                       #
# ========================================================================= #


def mlp_train(
    train_set: PatchSet,
    hidden_units: int = 64,
    config: Optional[TrainConfig] = None,
    normalization: Optional[NormalizationParams] = None,
) -> TrainedNetwork:
    """
    One hidden layer network on the mean tile spectra, trained with the
    same loss, optimizers and determinism contract as the tile CNNs.
    """
    config = TrainConfig(epochs=200) if (config is None) else config
    labels = set(train_set.labels.tolist())
    if len(labels) < 2:
        raise ValueError(f'training requires examples of both classes, got only: {sorted(labels)}')
    spec = MlpSpec(in_channels=train_set.channel_count, hidden_units=hidden_units)
    return train_network(spec, train_set, config, normalization=normalization)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
