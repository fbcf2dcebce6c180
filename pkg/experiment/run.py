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
from datetime import datetime
from typing import Callable

import hydra
from omegaconf import DictConfig
from omegaconf import OmegaConf

from hyperglio.pipeline import STAGES
from hyperglio.pipeline import run_pipeline
from hyperglio.pipeline import run_stages
from hyperglio.util.seeds import seed
from hyperglio.util.strings import make_box_str

from experiment.util.hydra_main import EXP_CONFIG_DIR
from experiment.util.hydra_main import hydra_main


log = logging.getLogger(__name__)


# ========================================================================= #
# ACTIONS                                                                   #
# ========================================================================= #


def _log_start(cfg: DictConfig):
    log.info(f'Starting {repr(cfg.action)} at time: {datetime.today().strftime("%Y-%m-%d--%H-%M-%S")}')
    log.info(f'Current working directory : {os.getcwd()}')
    log.info(f'Orig working directory    : {hydra.utils.get_original_cwd()}')
    log.debug(f'Config Is:\n{make_box_str(OmegaConf.to_yaml(cfg))}')


def action_run(cfg: DictConfig):
    """Every stage in order into a fresh run directory."""
    _log_start(cfg)
    seed(cfg.settings.seed)
    run_dir = run_pipeline(cfg)
    log.info(f'finished run: {run_dir}')


def make_stage_action(stage: str) -> Callable[[DictConfig], None]:
    """A single stage on an existing run directory, the resolved config is saved as `configs/<stage>.yaml`."""
    def action(cfg: DictConfig):
        _log_start(cfg)
        seed(cfg.settings.seed)
        run_stages(cfg, [stage], config_name=stage)
    action.__name__ = f'action_{stage}'
    return action


# available actions
ACTIONS = {
    **{stage: make_stage_action(stage) for stage in STAGES},
    'run': action_run,
}


def run_action(cfg: DictConfig):
    action_key = cfg.action
    if action_key not in ACTIONS:
        raise KeyError(f'The given action: {repr(action_key)} is invalid, must be one of: {sorted(ACTIONS.keys())}')
    ACTIONS[action_key](cfg)


# ========================================================================= #
# MAIN                                                                      #
# ========================================================================= #


def main():
    hydra_main(callback=run_action, config_name='config', config_dirs=(EXP_CONFIG_DIR,))


# launch the action
if __name__ == '__main__':
    main()


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
