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
from dataclasses import field
from pathlib import Path
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import numpy as np
import pytorch_lightning as pl
import torch
from torch.utils.data import DataLoader
from torch.utils.data import TensorDataset

from hyperglio.dataset import NormalizationParams
from hyperglio.dataset import PatchSet
from hyperglio.dataset import SplitSpec
from hyperglio.dataset import TileDataset
from hyperglio.dataset import split_indices
from hyperglio.frameworks._framework import TileFramework
from hyperglio.metrics import ConfusionCounts
from hyperglio.metrics import evaluate
from hyperglio.metrics import predict_labels
from hyperglio.model import MlpSpec
from hyperglio.model import NetworkSpec
from hyperglio.model import TileClassifier
from hyperglio.model import make_network
from hyperglio.model import spec_from_dict
from hyperglio.model import spec_to_dict
from hyperglio.nn.loss import inverse_frequency_weights
from hyperglio.nn.loss import weighted_cross_entropy
from hyperglio.util.inout.files import AtomicSaveFile
from hyperglio.util.lightning.callbacks import BestStateCallback
from hyperglio.util.lightning.callbacks import HistoryCallback
from hyperglio.util.lightning.callbacks import LoggerProgressCallback
from hyperglio.util.profiling import Timer
from hyperglio.util.seeds import derive_seed
from hyperglio.util.seeds import temp_seed


log = logging.getLogger(__name__)


NETWORK_FILE_VERSION = 1

_EVAL_BATCH_SIZE = 256


# ========================================================================= #
# Config                                                                    #
# ========================================================================= #


@dataclass
class TrainConfig(object):
    """
    class_weights: 'inverse_frequency', 'none' or explicit (healthy, lgg) weights.
    seed:          parameter initialisation stream.
    data_seed:     shuffle and validation split stream, defaults to `seed`.
    val_fraction:  held out from the training set to select the best epoch,
                   with 0 the best epoch is chosen by training loss instead.
    """

    epochs: int = 50
    batch_size: int = 32
    lr: float = 1e-3
    optimizer: str = 'adam'
    optimizer_kwargs: Optional[Dict[str, float]] = None
    class_weights: Union[str, Tuple[float, float]] = 'inverse_frequency'
    seed: int = 0
    data_seed: Optional[int] = None
    val_fraction: float = 0.1
    progress_interval: float = 10.0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f'epochs must be >= 1, got: {self.epochs}')
        if self.batch_size < 1:
            raise ValueError(f'batch_size must be >= 1, got: {self.batch_size}')
        if self.lr < 0:
            raise ValueError(f'lr must be non-negative, got: {self.lr}')
        if not (0 <= self.val_fraction < 1):
            raise ValueError(f'val_fraction must be in the range [0, 1), got: {self.val_fraction}')
        if isinstance(self.class_weights, str) and self.class_weights not in ('inverse_frequency', 'none'):
            raise KeyError(f'invalid class_weights: {repr(self.class_weights)}, must be one of: inverse_frequency, none, or two positive values')

    @property
    def shuffle_seed(self) -> int:
        return self.seed if (self.data_seed is None) else self.data_seed

    def resolve_class_weights(self, labels: Sequence[int]) -> Optional[Tuple[float, float]]:
        if isinstance(self.class_weights, str):
            if self.class_weights == 'none':
                return None
            return tuple(float(w) for w in inverse_frequency_weights(labels))
        return tuple(float(w) for w in self.class_weights)

    def to_dict(self) -> dict:
        d = asdict(self)
        if not isinstance(d['class_weights'], str):
            d['class_weights'] = list(d['class_weights'])
        return d


# ========================================================================= #
# Trained Network                                                           #
# ========================================================================= #


@dataclass(eq=False)
class TrainedNetwork(object):
    """
    A trained classifier with everything needed to apply it to new
    patches: the spec, the channel selection and the normalization
    fitted on its training set.
    """

    spec: Union[NetworkSpec, MlpSpec]
    model: TileClassifier
    channels: np.ndarray
    normalization: Optional[NormalizationParams] = None
    history: List[Dict[str, float]] = field(default_factory=list)
    best_epoch: Optional[int] = None
    seed: Optional[int] = None

    @property
    def kind(self) -> str:
        return 'mlp' if isinstance(self.spec, MlpSpec) else 'cnn'

    @property
    def name(self) -> str:
        return self.spec.name

    def prepare(self, patch_set: PatchSet) -> PatchSet:
        if not np.array_equal(patch_set.channels, self.channels):
            raise ValueError(f'network channels {self.channels.tolist()} do not match patch set channels {patch_set.channels.tolist()}')
        if (self.normalization is not None) and not patch_set.normalized:
            patch_set = self.normalization.apply(patch_set)
        return patch_set

    def inputs(self, patch_set: PatchSet) -> np.ndarray:
        """Model inputs for a patch set, normalized if needed."""
        return model_inputs(self.prepare(patch_set), self.kind)

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return predict_proba(self.model, x)

    def predict_patch_set(self, patch_set: PatchSet) -> np.ndarray:
        return self.predict_proba(self.inputs(patch_set))

    def save(self, path: Union[str, Path], overwrite: bool = True) -> Path:
        return save_network(self, path, overwrite=overwrite)

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'TrainedNetwork':
        return load_network(path)


def model_inputs(patch_set: PatchSet, kind: str) -> np.ndarray:
    if kind == 'mlp':
        return patch_set.features()
    x, _ = TileDataset(patch_set).tensors()
    return x.numpy()


@torch.no_grad()
def predict_proba(model: TileClassifier, x: Union[np.ndarray, torch.Tensor], batch_size: int = _EVAL_BATCH_SIZE) -> np.ndarray:
    """Class probabilities in eval mode, batchnorm uses its running statistics."""
    was_training = model.training
    model.eval()
    try:
        dtype = next(model.parameters()).dtype
        x = torch.as_tensor(np.asarray(x) if not torch.is_tensor(x) else x).to(dtype)
        probs = [model(x[i:i + batch_size]) for i in range(0, len(x), batch_size)]
        return torch.cat(probs).numpy() if probs else np.zeros((0, model.num_classes))
    finally:
        model.train(was_training)


# ========================================================================= #
# Training                                                                  #
# ========================================================================= #


def _eval_fn(x_train, y_train, x_val, y_val):
    def eval_fn(framework: TileFramework) -> Dict[str, float]:
        metrics = {}
        for prefix, x, y in [('', x_train, y_train), ('val_', x_val, y_val)]:
            if x is None:
                continue
            logits = torch.cat([framework.model.logits(x[i:i + _EVAL_BATCH_SIZE]) for i in range(0, len(x), _EVAL_BATCH_SIZE)])
            metrics[f'{prefix}loss'] = float(weighted_cross_entropy(logits, y, framework.class_weights))
            metrics[f'{prefix}accuracy'] = float((logits.argmax(dim=1) == y).double().mean())
        return metrics
    return eval_fn


def fit(
    spec: Union[NetworkSpec, MlpSpec],
    x: np.ndarray,
    y: np.ndarray,
    config: TrainConfig,
    x_val: Optional[np.ndarray] = None,
    y_val: Optional[np.ndarray] = None,
    model: Optional[TileClassifier] = None,
) -> Tuple[TileClassifier, List[Dict[str, float]], int]:
    """
    Train a network on model inputs. Returns the parameters of the epoch with
    the lowest validation loss (training loss without a validation set), the
    per epoch history and that epoch. Deterministic in the config seeds.
    """
    y = np.asarray(y, dtype='int64')
    if len(x) == 0:
        raise ValueError('cannot train on an empty training set')
    if len(x) != len(y):
        raise ValueError(f'got {len(x)} inputs but {len(y)} labels')
    # initialise
    if model is None:
        with temp_seed(derive_seed(config.seed, 0)):
            model = make_network(spec)
    batchnorm = getattr(model, 'has_batchnorm', False)
    if batchnorm and len(x) < 2:
        raise ValueError('batchnorm networks need at least 2 training examples')
    dtype = next(model.parameters()).dtype
    x_t, y_t = torch.as_tensor(np.asarray(x)).to(dtype), torch.as_tensor(y)
    xv_t = None if (x_val is None) else torch.as_tensor(np.asarray(x_val)).to(dtype)
    yv_t = None if (y_val is None) else torch.as_tensor(np.asarray(y_val, dtype='int64'))
    # framework
    framework = TileFramework(model, cfg=TileFramework.cfg(
        optimizer=config.optimizer,
        optimizer_kwargs={**(config.optimizer_kwargs or {}), 'lr': config.lr},
        class_weights=config.resolve_class_weights(y),
    ))
    # a trailing batch of one would break batchnorm
    drop_last = batchnorm and (len(x) % config.batch_size == 1)
    loader = DataLoader(
        TensorDataset(x_t, y_t),
        batch_size=config.batch_size,
        shuffle=True,
        drop_last=drop_last,
        generator=torch.Generator().manual_seed(derive_seed(config.shuffle_seed, 1)),
    )
    history = HistoryCallback(_eval_fn(x_t, y_t, xv_t, yv_t))
    best = BestStateCallback(history, monitor='loss' if (xv_t is None) else 'val_loss')
    trainer = pl.Trainer(
        max_epochs=config.epochs,
        accelerator='cpu',
        devices=1,
        logger=False,
        enable_checkpointing=False,
        enable_progress_bar=False,
        enable_model_summary=False,
        num_sanity_val_steps=0,
        callbacks=[history, best, LoggerProgressCallback(interval=config.progress_interval, prefix=f'[{spec.name}] ')],
    )
    with Timer(f'train {spec.name}', log_level=logging.DEBUG), temp_seed(derive_seed(config.seed, 2)):
        trainer.fit(framework, train_dataloaders=loader)
    best.restore(framework)
    model.eval()
    log.debug(f'{spec.name}: best epoch {best.best_epoch} with {best.monitor}={best.best_value:.4g}')
    return model, history.history, best.best_epoch


def train_network(
    spec: Union[NetworkSpec, MlpSpec],
    train_set: PatchSet,
    config: TrainConfig,
    val_set: Optional[PatchSet] = None,
    normalization: Optional[NormalizationParams] = None,
) -> TrainedNetwork:
    """
    Train on a patch set, CNNs see the padded patches and MLPs the mean tile
    spectra. Without a validation set `config.val_fraction` of the training
    set is held out.
    """
    if len(train_set) == 0:
        raise ValueError('cannot train on an empty training set')
    if spec.in_channels != train_set.channel_count:
        raise ValueError(f'network expects {spec.in_channels} channels, but the training set has {train_set.channel_count}')
    kind = 'mlp' if isinstance(spec, MlpSpec) else 'cnn'
    fit_set = train_set
    if (val_set is None) and (config.val_fraction > 0):
        fit_idx, val_idx = split_indices(train_set.labels, SplitSpec(train_fraction=1 - config.val_fraction, seed=config.shuffle_seed))
        fit_set, val_set = train_set.subset(fit_idx), train_set.subset(val_idx)
    model, history, best_epoch = fit(
        spec,
        model_inputs(fit_set, kind), fit_set.labels, config,
        x_val=None if (val_set is None) else model_inputs(val_set, kind),
        y_val=None if (val_set is None) else val_set.labels,
    )
    return TrainedNetwork(
        spec=spec,
        model=model,
        channels=np.asarray(train_set.channels, dtype='int64'),
        normalization=normalization,
        history=history,
        best_epoch=best_epoch,
        seed=config.seed,
    )


def evaluate_network(network: TrainedNetwork, test_set: PatchSet) -> Tuple[ConfusionCounts, Dict[str, float]]:
    """Confusion counts and metrics of the network predictions at the operating point."""
    if len(test_set) == 0:
        raise ValueError('cannot evaluate on an empty test set')
    predictions = predict_labels(network.predict_patch_set(test_set))
    counts, _, _, _ = evaluate(predictions, test_set.labels)
    return counts, counts.metrics()


# ========================================================================= #
# Network Files                                                             #
# ========================================================================= #


def save_network(network: TrainedNetwork, path: Union[str, Path], overwrite: bool = True) -> Path:
    data = {
        'version': NETWORK_FILE_VERSION,
        'spec': spec_to_dict(network.spec),
        'state_dict': network.model.state_dict(),
        'trained': True,
        'normalization': None if (network.normalization is None) else network.normalization.to_dict(),
        'channels': network.channels.tolist(),
        'history': network.history,
        'best_epoch': network.best_epoch,
        'seed': network.seed,
    }
    with AtomicSaveFile(path, open_mode='wb', overwrite=overwrite) as (_, fp):
        torch.save(data, fp)
    return Path(path)


def load_network(path: Union[str, Path]) -> TrainedNetwork:
    data = torch.load(path, map_location='cpu', weights_only=True)
    if data.get('version') != NETWORK_FILE_VERSION:
        raise ValueError(f'unsupported network file version: {data.get("version")}, expected: {NETWORK_FILE_VERSION}')
    if not data.get('trained', False):
        raise ValueError(f'network file holds an untrained network: {path}')
    spec = spec_from_dict(data['spec'])
    model = make_network(spec)
    model.load_state_dict(data['state_dict'])
    model.eval()
    return TrainedNetwork(
        spec=spec,
        model=model,
        channels=np.asarray(data['channels'], dtype='int64'),
        normalization=None if (data['normalization'] is None) else NormalizationParams.from_dict(data['normalization']),
        history=list(data['history']),
        best_epoch=data['best_epoch'],
        seed=data['seed'],
    )


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
