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
from dataclasses import field
from typing import Any
from typing import Dict
from typing import List
from typing import Optional

from omegaconf import DictConfig
from omegaconf import II
from omegaconf import MISSING
from omegaconf import OmegaConf
from omegaconf.errors import OmegaConfBaseException

from hyperglio import registry
from hyperglio.dataset import SplitSpec
from hyperglio.ensemble import check_threshold
from hyperglio.frameworks import TrainConfig
from hyperglio.superpixel import FilterParams
from hyperglio.superpixel import PATCH_SIZE
from hyperglio.superpixel import SlicParams


log = logging.getLogger(__name__)


class ConfigValidationError(ValueError):
    """Raised before any stage runs when the pipeline config is incomplete or invalid."""


# ========================================================================= #
# Sections                                                                  #
# ========================================================================= #


# sections that draw random numbers follow `settings.seed` unless set explicitly
GLOBAL_SEED = II('settings.seed')


@dataclass
class SettingsSection:
    seed: int = 0
    # parent of timestamped run directories
    runs_root: str = 'runs'
    run_dir: str = MISSING
    n_jobs: int = 1
    progress: bool = False


@dataclass
class PhantomSection:
    preset: str = 'standard'
    count: int = 6
    size: int = 256
    seed: int = GLOBAL_SEED
    # extra PhantomConfig fields, eg. noise_sigma
    kwargs: Dict[str, Any] = field(default_factory=dict)


@dataclass
class TilingSection:
    slic: SlicParams = field(default_factory=SlicParams)
    filter: FilterParams = field(default_factory=FilterParams)


@dataclass
class DatasetSection:
    split: SplitSpec = field(default_factory=lambda: SplitSpec(seed=GLOBAL_SEED))
    patch_size: int = PATCH_SIZE


@dataclass
class TrainSection:
    epochs: int = 50
    batch_size: int = 32
    lr: float = 1e-3
    optimizer: str = 'adam'
    optimizer_kwargs: Dict[str, float] = field(default_factory=dict)
    # 'inverse_frequency' or 'none'
    class_weights: str = 'inverse_frequency'
    val_fraction: float = 0.1
    seed: int = GLOBAL_SEED
    progress_interval: float = 10.0

    def to_train_config(self, **overrides) -> TrainConfig:
        return TrainConfig(**{**dict(
            epochs=self.epochs,
            batch_size=self.batch_size,
            lr=self.lr,
            optimizer=self.optimizer,
            optimizer_kwargs=dict(self.optimizer_kwargs) or None,
            class_weights=self.class_weights,
            val_fraction=self.val_fraction,
            seed=self.seed,
            progress_interval=self.progress_interval,
        ), **overrides})


@dataclass
class NetworksSection:
    compress: List[int] = field(default_factory=lambda: [3, 6, 12])
    features: List[int] = field(default_factory=lambda: [16, 32, 64])
    # compression width of the network used as the reference model
    reference: int = 12


@dataclass
class ClassicalSection:
    trees: int = 100
    mlp_hidden: int = 64
    mlp_epochs: int = 200


@dataclass
class AttributionSection:
    per_class: int = 32
    n_samples: int = 64
    max_examples: Optional[int] = None
    min_accuracy: float = 0.80
    top_k: int = 12


@dataclass
class EnsembleSection:
    size: int = 10
    compress_to: int = 12
    taus: List[float] = field(default_factory=lambda: [0.7, 0.8])
    coverage_taus: List[float] = field(default_factory=lambda: [0.6, 0.7, 0.8, 0.9])


@dataclass
class InferenceSection:
    band_nm: float = 660.0
    # scene ids to infer, all scenes when empty
    scenes: List[str] = field(default_factory=list)


@dataclass
class PipelineConfig:
    action: str = 'run'
    settings: SettingsSection = field(default_factory=SettingsSection)
    phantom: PhantomSection = field(default_factory=PhantomSection)
    tiling: TilingSection = field(default_factory=TilingSection)
    dataset: DatasetSection = field(default_factory=DatasetSection)
    train: TrainSection = field(default_factory=TrainSection)
    networks: NetworksSection = field(default_factory=NetworksSection)
    classical: ClassicalSection = field(default_factory=ClassicalSection)
    attribution: AttributionSection = field(default_factory=AttributionSection)
    ensemble: EnsembleSection = field(default_factory=EnsembleSection)
    inference: InferenceSection = field(default_factory=InferenceSection)


# ========================================================================= #
# Validation                                                                #
# ========================================================================= #


def _check(condition: bool, message: str):
    if not condition:
        raise ConfigValidationError(message)


def _check_values(cfg: PipelineConfig):
    _check(cfg.settings.n_jobs != 0, 'settings.n_jobs must be non-zero')
    _check(cfg.phantom.count >= 1, f'phantom.count must be >= 1, got: {cfg.phantom.count}')
    _check(cfg.phantom.size >= 32, f'phantom.size must be >= 32, got: {cfg.phantom.size}')
    _check(len(cfg.networks.compress) > 0, 'networks.compress must list at least one compression width')
    _check(cfg.networks.reference in cfg.networks.compress, f'networks.reference={cfg.networks.reference} is not one of networks.compress={list(cfg.networks.compress)}')
    _check(len(cfg.networks.features) > 0, 'networks.features must not be empty')
    _check(cfg.attribution.top_k >= 1, f'attribution.top_k must be >= 1, got: {cfg.attribution.top_k}')
    _check(cfg.ensemble.size >= 2, f'ensemble.size must be >= 2, got: {cfg.ensemble.size}')
    # library level checks
    cfg.train.to_train_config()
    registry.resolve(registry.OPTIMIZERS, cfg.train.optimizer)
    for tau in [*cfg.ensemble.taus, *cfg.ensemble.coverage_taus]:
        check_threshold(tau)


def validate_config(cfg) -> PipelineConfig:
    """
    Merge a config tree onto the schema and check every value, returning the
    typed config. Missing required values and invalid values raise
    ConfigValidationError.
    """
    if isinstance(cfg, PipelineConfig):
        cfg = OmegaConf.structured(cfg)
    elif not isinstance(cfg, DictConfig):
        cfg = OmegaConf.create(cfg)
    try:
        merged = OmegaConf.merge(OmegaConf.structured(PipelineConfig), cfg)
        missing = sorted(OmegaConf.missing_keys(merged))
    except OmegaConfBaseException as e:
        raise ConfigValidationError(f'invalid pipeline config: {e}') from e
    if missing:
        raise ConfigValidationError(f'pipeline config is missing required values: {missing}')
    try:
        # nested library dataclasses validate themselves on construction
        typed: PipelineConfig = OmegaConf.to_object(merged)
        _check_values(typed)
    except ConfigValidationError:
        raise
    except (OmegaConfBaseException, ValueError, KeyError, TypeError) as e:
        raise ConfigValidationError(f'invalid pipeline config: {e}') from e
    return typed


def config_to_yaml(cfg: PipelineConfig) -> str:
    return OmegaConf.to_yaml(OmegaConf.structured(cfg), resolve=True)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
