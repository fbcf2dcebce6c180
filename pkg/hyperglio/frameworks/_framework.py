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
from pprint import pformat
from typing import Dict
from typing import final
from typing import Optional
from typing import Sequence
from typing import Union

import torch

from hyperglio import registry
from hyperglio.model import TileClassifier
from hyperglio.nn.loss import weighted_cross_entropy
from hyperglio.nn.modules import HyperGlioLightningModule


log = logging.getLogger(__name__)


# used when `optimizer_kwargs` has no `lr`
DEFAULT_LR = 1e-3


class TrainingDivergedError(RuntimeError):
    """The training loss became nan, inf or unreasonably large."""


# ========================================================================= #
# framework config                                                          #
# ========================================================================= #


class HyperGlioConfigurable(object):

    @dataclass
    class cfg(object):
        def get_keys(self) -> list:
            return list(self.to_dict().keys())

        def to_dict(self) -> dict:
            return asdict(self)

        def __str__(self):
            return pformat(self.to_dict(), sort_dicts=False)

    def __init__(self, cfg: cfg = cfg()):
        if cfg is None:
            cfg = self.__class__.cfg()
            log.debug(f'Initialised default config {cfg=} for {self.__class__.__name__}')
        super().__init__()
        assert isinstance(cfg, self.__class__.cfg), f'{cfg=} ({type(cfg)}) is not an instance of {self.__class__.cfg}'
        self.cfg = cfg


# ========================================================================= #
# framework                                                                 #
# ========================================================================= #


class TileFramework(HyperGlioConfigurable, HyperGlioLightningModule):
    """
    Trains a tile classifier with a class weighted cross entropy. Batches
    are `(x, y)` tuples, the model receives `x` unchanged.
    """

    @dataclass
    class cfg(HyperGlioConfigurable.cfg):
        # name in the registry, eg. `adam` OR the path to an optimizer eg. `torch.optim.Adam`
        optimizer: str = 'adam'
        optimizer_kwargs: Optional[Dict[str, Union[str, float, int]]] = None
        # per class loss weights, indexed by binary label
        class_weights: Optional[Sequence[float]] = None

    def __init__(self, model: TileClassifier, cfg: cfg = None):
        super().__init__(cfg=cfg)
        assert isinstance(model, TileClassifier), f'model must be an instance of {TileClassifier.__name__}, got: {type(model)}'
        self.model = model
        self.cfg.optimizer_kwargs = self._normalise_optimizer(self.cfg.optimizer, self.cfg.optimizer_kwargs)
        # loss weights follow the module dtype and device
        if self.cfg.class_weights is not None:
            weights = torch.as_tensor(list(self.cfg.class_weights), dtype=torch.float64)
            if weights.shape != (model.num_classes,) or torch.any(weights <= 0):
                raise ValueError(f'class_weights must be {model.num_classes} positive values, got: {self.cfg.class_weights}')
            self.register_buffer('class_weights', weights)
        else:
            self.class_weights = None

    @staticmethod
    def _normalise_optimizer(optimizer: str, optimizer_kwargs: Optional[dict]) -> dict:
        """Fail early on an unknown optimizer and fill in the default learning rate."""
        if not isinstance(optimizer, str):
            raise TypeError(f'optimizer must be a registry name or import path, got: {repr(optimizer)}')
        registry.resolve(registry.OPTIMIZERS, optimizer)
        if not isinstance(optimizer_kwargs, (dict, type(None))):
            raise TypeError(f'optimizer_kwargs must be a dict or None, got: {type(optimizer_kwargs)}')
        kwargs = {'lr': DEFAULT_LR, **(optimizer_kwargs or {})}
        if kwargs['lr'] < 0:
            raise ValueError(f'learning rate must be non-negative, got: {kwargs["lr"]}')
        return kwargs

    @final
    def configure_optimizers(self):
        make_optimizer = registry.resolve(registry.OPTIMIZERS, self.cfg.optimizer)
        optimizer = make_optimizer(self.parameters(), **self.cfg.optimizer_kwargs)
        if not isinstance(optimizer, torch.optim.Optimizer):
            raise TypeError(f'{self.cfg.optimizer} did not create a torch.optim.Optimizer, got: {type(optimizer)}')
        return optimizer

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.model(x)

    def compute_loss(self, x: torch.Tensor, y: torch.Tensor) -> torch.Tensor:
        return weighted_cross_entropy(self.model.logits(x), y, self.class_weights)

    @final
    def _compute_loss_step(self, batch, batch_idx, name: str):
        x, y = batch
        loss = self.compute_loss(x, y)
        self._assert_valid_loss(loss, batch_idx)
        self.log(name, float(loss), prog_bar=True)
        return loss

    @final
    def training_step(self, batch, batch_idx):
        return self._compute_loss_step(batch, batch_idx, name='loss')

    def validation_step(self, batch, batch_idx):
        return self._compute_loss_step(batch, batch_idx, name='val_loss')

    @final
    def _assert_valid_loss(self, loss, batch_idx: int = -1):
        epoch = self.trainer.current_epoch if (self._trainer is not None) else -1
        if torch.isnan(loss) or torch.isinf(loss):
            raise TrainingDivergedError(f'the loss is {float(loss)} at epoch {epoch + 1}, batch {batch_idx}, try lowering the learning rate: {self.cfg.optimizer_kwargs["lr"]}')
        if loss > 1e+20:
            raise TrainingDivergedError(f'the loss: {float(loss):.2e} is out of bounds: > {1e+20:.0e} at epoch {epoch + 1}, batch {batch_idx}')


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
