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
from pathlib import Path

import pytest
from omegaconf import OmegaConf

import experiment.run as experiment_run
from experiment.util.hydra_main import hydra_main
from tests.util import temp_sys_args


# ========================================================================= #
# HELPERS                                                                   #
# ========================================================================= #


def _run(*args, config_name='config_test'):
    # show full errors in hydra
    os.environ['HYDRA_FULL_ERROR'] = '1'
    with temp_sys_args([experiment_run.__file__, *args]):
        hydra_main(
            callback=experiment_run.run_action,
            config_name=config_name,
            log_level=logging.DEBUG,
        )


def _exit_code(*args, **kwargs) -> int:
    try:
        _run(*args, **kwargs)
    except SystemExit as e:
        return 0 if (e.code is None) else e.code
    return 0


def _run_dirs(runs_root: Path):
    return sorted(p for p in runs_root.iterdir() if p.is_dir() and p.name != 'hydra_run')


# ========================================================================= #
# TESTS                                                                     #
# ========================================================================= #


def test_every_stage_has_an_action():
    assert set(experiment_run.ACTIONS) == {
        'phantom', 'tile', 'stats', 'dataset', 'train', 'train_classical', 'attribute',
        'select_channels', 'retrain', 'ensemble', 'infer', 'render', 'run',
    }
    config_dir = Path(experiment_run.__file__).parent / 'config' / 'run_action'
    assert {p.stem for p in config_dir.glob('*.yaml')} == set(experiment_run.ACTIONS)


def test_missing_run_dir_exits_with_config_error(tmp_path):
    code = _exit_code('run_action=train', f'settings.runs_root={tmp_path}')
    assert code == 1
    # nothing was written for the stage
    assert not (tmp_path / 'configs').exists()


def test_invalid_value_exits_with_config_error(tmp_path):
    code = _exit_code('run_action=run', f'settings.runs_root={tmp_path}', 'ensemble.taus=[0.4]')
    assert code == 1
    assert _run_dirs(tmp_path) == []


def test_failing_stage_exits_with_stage_error(tmp_path):
    code = _exit_code('run_action=tile', f'settings.runs_root={tmp_path}', f'settings.run_dir={tmp_path / "run"}')
    assert code == 2
    assert (tmp_path / 'run' / 'configs' / 'tile.yaml').exists()


def test_individual_stages(tmp_path):
    run_dir = tmp_path / 'run'
    for action in ['phantom', 'tile', 'stats']:
        assert _exit_code(f'run_action={action}', f'settings.runs_root={tmp_path}', f'settings.run_dir={run_dir}', 'phantom.count=2') == 0
        assert (run_dir / 'configs' / f'{action}.yaml').exists()
    assert (run_dir / 'reports' / 'separability.json').exists()
    assert 'stage tile' in (run_dir / 'logs' / 'pipeline.log').read_text()


def test_settings_seed_controls_phantoms(tmp_path):
    cubes = {}
    for seed in [0, 5]:
        run_dir = tmp_path / f'seed{seed}'
        assert _exit_code('run_action=phantom', f'settings.runs_root={tmp_path}', f'settings.run_dir={run_dir}', 'phantom.count=1', f'settings.seed={seed}') == 0
        (cube_path,) = sorted((run_dir / 'data' / 'scenes').glob('*.hsic'))
        cubes[seed] = cube_path.read_bytes()
        saved = OmegaConf.load(run_dir / 'configs' / 'phantom.yaml')
        assert saved.phantom.seed == saved.dataset.split.seed == saved.train.seed == seed
    assert cubes[0] != cubes[5]


@pytest.mark.slow
def test_run_and_rerun_from_persisted_config(tmp_path):
    assert _exit_code('run_action=run', f'settings.runs_root={tmp_path}') == 0
    (run_dir,) = _run_dirs(tmp_path)
    reports = ['metrics.json', 'separability.json', 'attribution.json', 'coverage.json', 'inference.json']
    before = {name: (run_dir / 'reports' / name).read_bytes() for name in reports}
    # the persisted config reproduces every report
    assert _exit_code(f'--config-path={run_dir / "configs"}', f'hydra.run.dir={tmp_path / "hydra_run" / "rerun"}', config_name='config') == 0
    for name in reports:
        assert (run_dir / 'reports' / name).read_bytes() == before[name], name
    assert _run_dirs(tmp_path) == [run_dir]


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
