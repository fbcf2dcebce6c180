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
import os
import sys
from typing import Callable
from typing import Optional
from typing import Sequence
from typing import Tuple

import hydra
from hydra.core.config_store import ConfigStore
from omegaconf import DictConfig
from omegaconf import OmegaConf

from hyperglio.pipeline import ConfigValidationError
from hyperglio.pipeline import PipelineConfig
from hyperglio.pipeline import StageError
from experiment.util.run_utils import exit_code_for
from experiment.util.run_utils import log_error_and_exit


log = logging.getLogger(__name__)


# ========================================================================= #
# VARS                                                                      #
# ========================================================================= #


# experiment/util/_hydra_searchpath_plugin_ is put on `sys.path` so that
# hydra can discover the `hydra_plugins` package inside it
PLUGIN_NAMESPACE = os.path.abspath(os.path.join(__file__, '..', '_hydra_searchpath_plugin_'))

# experiment/config
EXP_CONFIG_DIR = os.path.abspath(os.path.join(__file__, '../..', 'config'))

# structured schema listed first in every defaults list
SCHEMA_NAME = 'pipeline_schema'

# read by the search path plugin, set once by `register_config_dirs`
_HYPERGLIO_CONFIG_DIRS: Optional[Tuple[str, ...]] = None


# ========================================================================= #
# REGISTRATION                                                              #
# ========================================================================= #


def register_config_dirs(config_dirs: Sequence[str] = (EXP_CONFIG_DIR,)):
    """
    Make the given config directories visible to hydra. The environment
    variables `HYPERGLIO_CONFIGS_PREPEND` and `HYPERGLIO_CONFIGS_APPEND`
    (`;` separated) are added around them by the search path plugin.

    Passing `--config-path` on the command line takes priority over all of
    these, while `--config-dir` is searched last.
    """
    config_dirs = tuple(config_dirs)
    if not config_dirs or not all(isinstance(d, str) and d for d in config_dirs):
        raise ValueError(f'config_dirs must be a non-empty sequence of directory paths, got: {repr(config_dirs)}')
    global _HYPERGLIO_CONFIG_DIRS
    if _HYPERGLIO_CONFIG_DIRS not in (None, config_dirs):
        raise RuntimeError(f'config dirs were already registered as: {_HYPERGLIO_CONFIG_DIRS}, cannot change them to: {config_dirs}')
    _HYPERGLIO_CONFIG_DIRS = config_dirs
    if PLUGIN_NAMESPACE not in sys.path:
        sys.path.insert(0, PLUGIN_NAMESPACE)


def register_pipeline_schema():
    """
    Store `PipelineConfig` as a structured config, listing it first in a
    defaults list makes every pipeline key overridable from the command line
    and type checked by OmegaConf.
    """
    ConfigStore.instance().store(name=SCHEMA_NAME, node=PipelineConfig)


def _raise_config_error(msg: str):
    raise ConfigValidationError(msg)


# name -> resolver
_RESOLVERS = {
    # ${exit:"settings.run_dir is required"}
    'exit': _raise_config_error,
    # ${fmt:"{:04d}",42} -> "0042"
    'fmt': str.format,
    # ${abspath:runs} relative to the directory the command was launched from
    'abspath': hydra.utils.to_absolute_path,
}


def register_hydra_resolvers():
    for name, resolver in _RESOLVERS.items():
        if not OmegaConf.has_resolver(name):
            OmegaConf.register_new_resolver(name, resolver)


def patch_hydra(config_dirs: Sequence[str] = (EXP_CONFIG_DIR,)):
    """Safe to call more than once with the same directories."""
    register_config_dirs(config_dirs)
    register_pipeline_schema()
    register_hydra_resolvers()


# ========================================================================= #
# RUN HYDRA                                                                 #
# ========================================================================= #


def _run_callback(callback: Callable[[DictConfig], None], cfg: DictConfig, exc_info: bool):
    try:
        callback(cfg)
    except ConfigValidationError as e:
        log_error_and_exit(err_type='invalid config', err_msg=str(e), exit_code=exit_code_for(e), exc_info=False)
    except StageError as e:
        log_error_and_exit(err_type=f'stage {e.stage} failed', err_msg=str(e.cause), exit_code=exit_code_for(e), exc_info=exc_info)
    except Exception as e:
        log_error_and_exit(err_type='experiment error', err_msg=str(e), exit_code=exit_code_for(e), exc_info=exc_info)


def hydra_main(
    callback: Callable[[DictConfig], None],
    config_name: str = 'config',
    config_dirs: Sequence[str] = (EXP_CONFIG_DIR,),
    log_level: Optional[int] = logging.INFO,
    log_exc_info: bool = True,
):
    """
    Compose the config from `sys.argv` and run `callback` on it. Exits with
    code 1 on an invalid config, 2 when a pipeline stage fails and returns
    normally on success.
    """
    # hydra replaces the logging config once it has initialised
    if log_level is not None:
        logging.basicConfig(level=log_level)
    patch_hydra(config_dirs)

    @hydra.main(version_base=None, config_path=None, config_name=config_name)
    def _hydra_main(cfg: DictConfig):
        _run_callback(callback, cfg, exc_info=log_exc_info)

    try:
        _hydra_main()
    except SystemExit:
        raise
    except KeyboardInterrupt:
        log_error_and_exit(err_type='interrupted', err_msg='stopped by the user', exc_info=False)
    except Exception as e:
        # composition failures, eg. unknown config groups or bad overrides
        log_error_and_exit(err_type='hydra error', err_msg=str(e), exc_info=False)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
