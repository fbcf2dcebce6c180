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
from typing import Optional
from typing import Tuple

import torch
from torch import nn

from hyperglio.model._base import TileClassifier
from hyperglio.nn.modules import HyperGlioModule
from hyperglio.nn.weights import group_average_weights
from hyperglio.nn.weights import init_model_weights


log = logging.getLogger(__name__)


# ========================================================================= #
# Specs                                                                     #
# ========================================================================= #


@dataclass(frozen=True)
class NetworkSpec(object):
    """
    Channel compressing tile CNN. When `compress_to` is set the first layer
    forms that many meta-channels, learnable linear combinations of the
    input channels, before the convolutional encoder.
    """

    in_channels: int
    compress_to: Optional[int] = None
    features: Tuple[int, ...] = (16, 32, 64)
    patch_size: int = 40
    kernel_size: int = 3
    num_classes: int = 2

    def __post_init__(self):
        object.__setattr__(self, 'features', tuple(int(f) for f in self.features))
        if self.in_channels < 1:
            raise ValueError(f'in_channels must be >= 1, got: {self.in_channels}')
        if (self.compress_to is not None) and not (1 <= self.compress_to <= self.in_channels):
            raise ValueError(f'compress_to must be in the range [1, {self.in_channels}], got: {self.compress_to}')
        if len(self.features) < 1 or any(f < 1 for f in self.features):
            raise ValueError(f'features must be a non-empty list of positive sizes, got: {self.features}')
        if self.patch_size < 2 ** len(self.features):
            raise ValueError(f'patch_size {self.patch_size} is too small for {len(self.features)} pooling blocks')
        if self.kernel_size < 1 or self.kernel_size % 2 == 0:
            raise ValueError(f'kernel_size must be odd and positive, got: {self.kernel_size}')

    @property
    def x_shape(self) -> Tuple[int, int, int]:
        return self.in_channels, self.patch_size, self.patch_size

    @property
    def name(self) -> str:
        return f'cnn_k{self.compress_to}' if self.compress_to else 'cnn'

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, d: dict) -> 'NetworkSpec':
        return cls(**{**d, 'features': tuple(d.get('features', cls.features))})


@dataclass(frozen=True)
class MlpSpec(object):
    """One hidden layer classifier on mean tile spectra."""

    in_channels: int
    hidden_units: int = 64
    num_classes: int = 2

    def __post_init__(self):
        if self.in_channels < 1 or self.hidden_units < 1:
            raise ValueError(f'in_channels and hidden_units must be >= 1, got: {self.in_channels}, {self.hidden_units}')

    @property
    def x_shape(self) -> Tuple[int]:
        return (self.in_channels,)

    @property
    def name(self) -> str:
        return 'mlp'

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> 'MlpSpec':
        return cls(**d)


# ========================================================================= #
# Layers                                                                    #
# ========================================================================= #


class ChannelCompress(HyperGlioModule):
    """
    1x1 linear map across channels without bias: (B, C, H, W) -> (B, K, H, W).
    Starts as the average over contiguous channel groups.
    """

    def __init__(self, in_channels: int, out_channels: int):
        super().__init__()
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.weight = nn.Parameter(torch.empty(out_channels, in_channels))
        self.reset_parameters()

    def reset_parameters(self):
        with torch.no_grad():
            self.weight.copy_(torch.from_numpy(group_average_weights(self.out_channels, self.in_channels)))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return torch.einsum('bchw,kc->bkhw', x, self.weight)


class EncoderBlock(nn.Sequential):
    """conv (same padding) -> relu -> maxpool 2x2 -> batchnorm"""

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int = 3):
        super().__init__(
            nn.Conv2d(in_channels, out_channels, kernel_size=kernel_size, stride=1, padding=kernel_size // 2),
            nn.ReLU(),
            nn.MaxPool2d(kernel_size=2),
            nn.BatchNorm2d(out_channels),
        )


# ========================================================================= #
# Networks                                                                  #
# ========================================================================= #


class TileCNN(TileClassifier):

    def __init__(self, spec: NetworkSpec, init_mode: Optional[str] = 'fan_in_uniform'):
        super().__init__(x_shape=spec.x_shape, num_classes=spec.num_classes)
        self.spec = spec
        # meta-channels
        if spec.compress_to is not None:
            self.compress = ChannelCompress(spec.in_channels, spec.compress_to)
            channels = spec.compress_to
        else:
            self.compress = nn.Identity()
            channels = spec.in_channels
        # encoder
        blocks = []
        for features in spec.features:
            blocks.append(EncoderBlock(channels, features, kernel_size=spec.kernel_size))
            channels = features
        self.encoder = nn.Sequential(*blocks)
        # readout
        self.readout = nn.Linear(channels, spec.num_classes)
        init_model_weights(self, mode=init_mode)

    @property
    def has_batchnorm(self) -> bool:
        return any(isinstance(m, nn.modules.batchnorm._BatchNorm) for m in self.modules())

    def _logits(self, x: torch.Tensor) -> torch.Tensor:
        if self.training and self.has_batchnorm and x.shape[0] < 2:
            raise ValueError('batch size 1 is not supported in training mode, batchnorm statistics would be degenerate')
        z = self.compress(x)
        z = self.encoder(z)
        z = z.mean(dim=(2, 3))
        return self.readout(z)


class TileMLP(TileClassifier):

    def __init__(self, spec: MlpSpec, init_mode: Optional[str] = 'fan_in_uniform'):
        super().__init__(x_shape=spec.x_shape, num_classes=spec.num_classes)
        self.spec = spec
        self.model = nn.Sequential(
            nn.Linear(spec.in_channels, spec.hidden_units),
            nn.ReLU(),
            nn.Linear(spec.hidden_units, spec.num_classes),
        )
        init_model_weights(self, mode=init_mode)

    def _logits(self, x: torch.Tensor) -> torch.Tensor:
        return self.model(x)


def make_network(spec, dtype: torch.dtype = torch.float64) -> TileClassifier:
    if isinstance(spec, NetworkSpec):
        model = TileCNN(spec)
    elif isinstance(spec, MlpSpec):
        model = TileMLP(spec)
    else:
        raise TypeError(f'unsupported network spec: {type(spec)}')
    return model.to(dtype)


def spec_from_dict(d: dict):
    d = dict(d)
    kind = d.pop('kind', 'cnn')
    if kind == 'cnn':
        return NetworkSpec.from_dict(d)
    elif kind == 'mlp':
        return MlpSpec.from_dict(d)
    raise KeyError(f'invalid network kind: {repr(kind)}, must be one of: cnn, mlp')


def spec_to_dict(spec) -> dict:
    return {'kind': 'mlp' if isinstance(spec, MlpSpec) else 'cnn', **spec.to_dict()}


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
