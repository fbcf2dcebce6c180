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

"""
Pipeline stages. Every stage reads the artifacts of earlier stages from the
run directory and writes its own, so stages can be run one at a time or all
in order with `run_pipeline`.
"""

import contextlib
import logging
from pathlib import Path
from typing import Callable
from typing import Dict
from typing import List
from typing import Tuple
from typing import Union

import numpy as np
import pandas as pd
from joblib import Parallel
from joblib import delayed

from hyperglio.attribution import AttributionReport
from hyperglio.attribution import ChannelSubset
from hyperglio.attribution import aggregate_importance
from hyperglio.attribution import attribute_networks
from hyperglio.attribution import make_baselines
from hyperglio.attribution import retrain_on_subset
from hyperglio.attribution import select_top_k
from hyperglio.classical import ForestModel
from hyperglio.classical import evaluate_model
from hyperglio.classical import mlp_train
from hyperglio.classical import rf_train
from hyperglio.cube import load_annotation
from hyperglio.cube import load_cube
from hyperglio.cube import save_annotation
from hyperglio.cube import save_cube
from hyperglio.dataset import FOCUS_CLASSES
from hyperglio.dataset import NormalizationParams
from hyperglio.dataset import PatchSet
from hyperglio.dataset import Scene
from hyperglio.dataset import build_dataset
from hyperglio.dataset import segment_scene
from hyperglio.dataset.data import generate_scene
from hyperglio.dataset.data import make_phantom_config
from hyperglio.dataset.util import load_patch_set
from hyperglio.dataset.util import save_patch_set
from hyperglio.ensemble import load_ensemble
from hyperglio.ensemble import scene_coverage
from hyperglio.ensemble import train_ensemble
from hyperglio.frameworks import evaluate_network
from hyperglio.frameworks import load_network
from hyperglio.frameworks import train_network
from hyperglio.model import NetworkSpec
from hyperglio.pipeline._config import PipelineConfig
from hyperglio.pipeline._config import config_to_yaml
from hyperglio.pipeline._config import validate_config
from hyperglio.pipeline._inference import PredictionMap
from hyperglio.pipeline._inference import infer_full_image
from hyperglio.pipeline._render import render_annotation
from hyperglio.pipeline._render import render_overlay
from hyperglio.spectral import cluster_separability
from hyperglio.superpixel import TileMap
from hyperglio.superpixel import load_tile_map
from hyperglio.superpixel import save_tile_map
from hyperglio.superpixel import tile_separability
from hyperglio.util.inout.files import AtomicSaveFile
from hyperglio.util.inout.files import ensure_dir
from hyperglio.util.inout.files import read_json
from hyperglio.util.inout.files import write_json
from hyperglio.util.inout.files import write_text
from hyperglio.util.profiling import Timer
from hyperglio.util.seeds import make_rng
from hyperglio.util.strings import fmt_metrics


log = logging.getLogger(__name__)


class StageError(RuntimeError):
    """Raised when a pipeline stage fails, carries the stage name."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f'stage {repr(stage)} failed: {type(cause).__name__}: {cause}')
        self.stage = stage
        self.cause = cause


# ========================================================================= #
# Run Directory                                                             #
# ========================================================================= #


class RunDirectory(object):
    """
    configs/   resolved configs
    data/      scenes, tile maps, patch containers, normalization, prediction maps
    models/    trained models and the ensemble directory
    reports/   json and tsv reports, attribution chart, channel subset
    overlays/  png prediction overlays
    logs/      pipeline.log
    """

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root).absolute()

    def _dir(self, *parts) -> Path:
        return ensure_dir(self.root.joinpath(*parts))

    configs = property(lambda self: self._dir('configs'))
    data = property(lambda self: self._dir('data'))
    models = property(lambda self: self._dir('models'))
    reports = property(lambda self: self._dir('reports'))
    overlays = property(lambda self: self._dir('overlays'))
    logs = property(lambda self: self._dir('logs'))

    def scene_paths(self, scene_id: str) -> Tuple[Path, Path]:
        scenes = self._dir('data', 'scenes')
        return scenes / f'{scene_id}.hsic', scenes / f'{scene_id}.hsia'

    def tile_map_path(self, scene_id: str) -> Path:
        return self._dir('data', 'tiles') / scene_id

    def prediction_path(self, name: str) -> Path:
        return self._dir('data', 'predictions') / f'{name}.npz'

    @property
    def scenes_manifest(self) -> Path:
        return self.data / 'scenes.json'

    @property
    def metrics_path(self) -> Path:
        return self.reports / 'metrics.json'

    def require(self, path: Path, stage: str) -> Path:
        if not path.exists():
            raise FileNotFoundError(f'missing artifact {path}, run the {repr(stage)} stage first')
        return path

    # metrics are merged so stages can add their results in any order
    def read_metrics(self) -> dict:
        return read_json(self.metrics_path) if self.metrics_path.exists() else {}

    def update_metrics(self, name: str, entry: dict):
        metrics = self.read_metrics()
        metrics[name] = entry
        write_json(self.metrics_path, metrics)


@contextlib.contextmanager
def log_to_file(path: Union[str, Path], level: int = logging.INFO):
    """Copy all log records to a file for the duration of the context."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path, mode='a', encoding='utf-8')
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter('[%(asctime)s][%(name)s][%(levelname)s] - %(message)s'))
    root = logging.getLogger()
    root.addHandler(handler)
    try:
        yield handler
    finally:
        root.removeHandler(handler)
        handler.close()


# ========================================================================= #
# Artifact Helpers                                                          #
# ========================================================================= #


def load_scenes(run: RunDirectory) -> List[Scene]:
    manifest = read_json(run.require(run.scenes_manifest, 'phantom'))
    scenes = []
    for entry in manifest['scenes']:
        cube_path, mask_path = run.scene_paths(entry['scene_id'])
        scenes.append(Scene(cube=load_cube(cube_path), mask=load_annotation(mask_path), scene_id=entry['scene_id'], patient_id=entry['patient_id']))
    return scenes


def load_tile_maps(run: RunDirectory, scenes: List[Scene]) -> Dict[str, TileMap]:
    tile_maps = {}
    for scene in scenes:
        path = run.tile_map_path(scene.scene_id)
        run.require(path.with_name(path.name + '.npz'), 'tile')
        tile_maps[scene.scene_id] = load_tile_map(path, scene.cube)
    return tile_maps


def load_dataset(run: RunDirectory) -> Tuple[PatchSet, PatchSet, NormalizationParams]:
    """Standardized train and test sets and the training set statistics."""
    train = load_patch_set(run.require(run.data / 'train.h5', 'dataset'))
    test = load_patch_set(run.require(run.data / 'test.h5', 'dataset'))
    normalization = NormalizationParams.load(run.require(run.data / 'normalization.npz', 'dataset'))
    return normalization.apply(train), normalization.apply(test), normalization


def _network_spec(cfg: PipelineConfig, in_channels: int, compress_to) -> NetworkSpec:
    return NetworkSpec(in_channels=in_channels, compress_to=compress_to, features=tuple(cfg.networks.features), patch_size=cfg.dataset.patch_size)


def _record(run: RunDirectory, name: str, counts, metrics: dict, **extra):
    run.update_metrics(name, dict(counts=counts.to_dict(), metrics=metrics, **extra))
    log.info(f'{name}: {fmt_metrics(metrics)}')


def _inferred_scenes(cfg: PipelineConfig, scenes: List[Scene]) -> List[Scene]:
    if not cfg.inference.scenes:
        return scenes
    unknown = sorted(set(cfg.inference.scenes) - {s.scene_id for s in scenes})
    if unknown:
        raise KeyError(f'inference.scenes lists unknown scene ids: {unknown}')
    return [s for s in scenes if s.scene_id in set(cfg.inference.scenes)]


def _tau_name(tau: float) -> str:
    return f'tau{tau:g}'


# ========================================================================= #
# Stages                                                                    #
# ========================================================================= #


def stage_phantom(cfg: PipelineConfig, run: RunDirectory):
    entries = []
    for i in range(cfg.phantom.count):
        config = make_phantom_config(
            cfg.phantom.preset,
            seed=cfg.phantom.seed * 1000 + i,
            size=cfg.phantom.size,
            patient_id=f'P{i:02d}',
            **dict(cfg.phantom.kwargs),
        )
        scene = generate_scene(config).as_scene()
        cube_path, mask_path = run.scene_paths(scene.scene_id)
        save_cube(scene.cube, cube_path)
        save_annotation(scene.mask, mask_path)
        entries.append(dict(scene_id=scene.scene_id, patient_id=scene.patient_id, preset=cfg.phantom.preset, seed=config.seed))
    write_json(run.scenes_manifest, dict(scenes=entries))
    log.info(f'generated {len(entries)} {cfg.phantom.preset} phantom scenes')


def stage_tile(cfg: PipelineConfig, run: RunDirectory):
    scenes = load_scenes(run)
    tile_maps = Parallel(n_jobs=cfg.settings.n_jobs)(delayed(segment_scene)(s, slic=cfg.tiling.slic, filt=cfg.tiling.filter) for s in scenes)
    for scene, tile_map in zip(scenes, tile_maps):
        save_tile_map(tile_map, run.tile_map_path(scene.scene_id))
        log.info(f'{scene.scene_id}: {tile_map.num_tiles} tiles, {len(tile_map.passing())} pass the quality filter')


def stage_stats(cfg: PipelineConfig, run: RunDirectory):
    scenes = load_scenes(run)
    tile_maps = load_tile_maps(run, scenes)
    reports, tables = {}, []
    for scene in scenes:
        classes = [c for c in scene.mask.present_classes() if c in FOCUS_CLASSES]
        if len(classes) < 2:
            log.warning(f'{scene.scene_id}: skipped separability, fewer than two focus classes are annotated')
            continue
        scene_reports = {}
        for level in ('pixel', 'tile'):
            try:
                if level == 'pixel':
                    report = cluster_separability(scene.cube, scene.mask, classes, seed=cfg.settings.seed)
                else:
                    report = tile_separability(tile_maps[scene.scene_id], classes, seed=cfg.settings.seed)
            except ValueError as e:
                log.warning(f'{scene.scene_id}: skipped {level} separability: {e}')
                continue
            scene_reports[level] = report.to_dict()
            tables.append(report.to_dataframe().assign(scene_id=scene.scene_id))
        reports[scene.scene_id] = scene_reports
    write_json(run.reports / 'separability.json', reports)
    table = pd.concat(tables, ignore_index=True) if tables else pd.DataFrame()
    with AtomicSaveFile(run.reports / 'separability.tsv', open_mode='w', overwrite=True) as (_, fp):
        table.to_csv(fp, sep='\t', index=False, float_format='%.10g')


def stage_dataset(cfg: PipelineConfig, run: RunDirectory):
    scenes = load_scenes(run)
    data = build_dataset(
        scenes,
        cfg.dataset.split,
        slic=cfg.tiling.slic,
        filt=cfg.tiling.filter,
        patch_size=cfg.dataset.patch_size,
        tile_maps=load_tile_maps(run, scenes),
        n_jobs=cfg.settings.n_jobs,
        progress=cfg.settings.progress,
    )
    save_patch_set(data.train, run.data / 'train.h5')
    save_patch_set(data.test, run.data / 'test.h5')
    NormalizationParams.fit(data.train).save(run.data / 'normalization.npz')
    write_json(run.reports / 'dataset.json', data.summary())


def stage_train(cfg: PipelineConfig, run: RunDirectory):
    train, test, normalization = load_dataset(run)
    for k in cfg.networks.compress:
        spec = _network_spec(cfg, train.channel_count, k)
        network = train_network(spec, train, cfg.train.to_train_config(), normalization=normalization)
        counts, metrics = evaluate_network(network, test)
        network.save(run.models / f'{spec.name}.pt')
        write_json(run.reports / f'history_{spec.name}.json', dict(best_epoch=network.best_epoch, history=network.history))
        _record(run, spec.name, counts, metrics, best_epoch=network.best_epoch)


def stage_train_classical(cfg: PipelineConfig, run: RunDirectory):
    train, test, normalization = load_dataset(run)
    forest = rf_train(train, trees=cfg.classical.trees, seed=cfg.settings.seed, normalization=normalization, n_jobs=cfg.settings.n_jobs)
    forest.save(run.models / 'rf.joblib')
    _record(run, 'rf', *evaluate_model(forest, test))
    mlp = mlp_train(train, hidden_units=cfg.classical.mlp_hidden, config=cfg.train.to_train_config(epochs=cfg.classical.mlp_epochs), normalization=normalization)
    mlp.save(run.models / 'mlp.pt')
    write_json(run.reports / 'history_mlp.json', dict(best_epoch=mlp.best_epoch, history=mlp.history))
    _record(run, 'mlp', *evaluate_model(mlp, test), best_epoch=mlp.best_epoch)


def stage_attribute(cfg: PipelineConfig, run: RunDirectory):
    train, test, _ = load_dataset(run)
    networks = {}
    for k in cfg.networks.compress:
        name = _network_spec(cfg, train.channel_count, k).name
        networks[name] = load_network(run.require(run.models / f'{name}.pt', 'train'))
    if cfg.attribution.max_examples is not None and cfg.attribution.max_examples < len(test):
        idx = make_rng(cfg.settings.seed, 31).permutation(len(test))[:cfg.attribution.max_examples]
        test = test.subset(np.sort(idx))
    baselines = make_baselines(train, per_class=cfg.attribution.per_class, seed=cfg.settings.seed)
    scores = attribute_networks(networks, test, baselines, n_samples=cfg.attribution.n_samples, seed=cfg.settings.seed, progress=cfg.settings.progress)
    first = read_json(run.require(run.scenes_manifest, 'phantom'))['scenes'][0]['scene_id']
    axis = load_cube(run.scene_paths(first)[0]).axis
    report = aggregate_importance(scores, channels=train.channels, wavelengths_nm=axis.wavelengths_nm[train.channels], min_accuracy=cfg.attribution.min_accuracy)
    report.save_json(run.reports / 'attribution.json')
    report.plot(run.reports / 'attribution.png')


def stage_select_channels(cfg: PipelineConfig, run: RunDirectory):
    report = AttributionReport.load_json(run.require(run.reports / 'attribution.json', 'attribute'))
    subset = select_top_k(report, cfg.attribution.top_k)
    subset.save(run.reports / 'channels.txt')
    log.info(f'selected {subset.k} channels: {subset.indices}')


def stage_retrain(cfg: PipelineConfig, run: RunDirectory):
    subset = ChannelSubset.load(run.require(run.reports / 'channels.txt', 'select_channels'))
    scenes = load_scenes(run)
    reference = f'cnn_k{cfg.networks.reference}'
    reference_entry = run.read_metrics().get(reference)
    if reference_entry is None:
        log.warning(f'no metrics for the reference network {reference}, the retrained network is reported without deltas')
    result = retrain_on_subset(
        subset, scenes, cfg.dataset.split, cfg.train.to_train_config(),
        slic=cfg.tiling.slic, filt=cfg.tiling.filter, tile_maps=load_tile_maps(run, scenes),
        reference_metrics=None if (reference_entry is None) else reference_entry['metrics'],
        features=tuple(cfg.networks.features),
    )
    name = f'retrain_top{subset.k}'
    result.network.save(run.models / f'{name}.pt')
    _record(run, name, result.counts, result.metrics, channels=result.network.channels.tolist(), reference=reference, delta=result.delta)


def stage_ensemble(cfg: PipelineConfig, run: RunDirectory):
    train, _, normalization = load_dataset(run)
    spec = _network_spec(cfg, train.channel_count, cfg.ensemble.compress_to)
    ensemble = train_ensemble(
        spec, train, cfg.train.to_train_config(),
        k=cfg.ensemble.size,
        master_seed=cfg.settings.seed,
        normalization=normalization,
        n_jobs=cfg.settings.n_jobs,
        progress=cfg.settings.progress,
    )
    ensemble.save(run.models / 'ensemble')
    scenes = load_scenes(run)
    tile_maps = load_tile_maps(run, scenes)
    coverage = {s.scene_id: scene_coverage(ensemble, s, cfg.ensemble.coverage_taus, tile_map=tile_maps[s.scene_id]).to_dict() for s in scenes}
    write_json(run.reports / 'coverage.json', coverage)


def stage_infer(cfg: PipelineConfig, run: RunDirectory):
    scenes = _inferred_scenes(cfg, load_scenes(run))
    tile_maps = load_tile_maps(run, scenes)
    test = load_patch_set(run.require(run.data / 'test.h5', 'dataset'))
    reference = f'cnn_k{cfg.networks.reference}'
    models = [
        ('ensemble', load_ensemble(run.require(run.models / 'ensemble', 'ensemble')), list(cfg.ensemble.taus)),
        ('cnn', load_network(run.require(run.models / f'{reference}.pt', 'train')), [None]),
        ('rf', ForestModel.load(run.require(run.models / 'rf.joblib', 'train_classical')), [None]),
    ]
    summaries = {}
    for scene in scenes:
        test_tile_ids = test.tile_ids[test.scene_ids == scene.scene_id]
        summaries[scene.scene_id] = {}
        for key, model, taus in models:
            for tau in taus:
                pmap = infer_full_image(
                    model, scene.cube, tau=tau, mask=scene.mask, test_tile_ids=test_tile_ids,
                    tile_map=tile_maps[scene.scene_id], scene_id=scene.scene_id, patch_size=cfg.dataset.patch_size,
                )
                name = key if (tau is None) else _tau_name(tau)
                pmap.save(run.prediction_path(f'{scene.scene_id}_{name}'))
                summaries[scene.scene_id][name] = pmap.summary()
    write_json(run.reports / 'inference.json', summaries)


def stage_render(cfg: PipelineConfig, run: RunDirectory):
    scenes = {s.scene_id: s for s in _inferred_scenes(cfg, load_scenes(run))}
    summaries = read_json(run.require(run.reports / 'inference.json', 'infer'))
    for scene_id, entries in summaries.items():
        if scene_id not in scenes:
            continue
        scene = scenes[scene_id]
        render_annotation(scene.mask, scene.cube, run.overlays / f'{scene_id}_annotation.png', band_nm=cfg.inference.band_nm)
        for name in entries:
            pmap = PredictionMap.load(run.require(run.prediction_path(f'{scene_id}_{name}'), 'infer'))
            render_overlay(pmap, scene.cube, run.overlays / f'{scene_id}_{name}.png', band_nm=cfg.inference.band_nm)


# execution order of a full run
STAGES: Dict[str, Callable[[PipelineConfig, RunDirectory], None]] = {
    'phantom': stage_phantom,
    'tile': stage_tile,
    'stats': stage_stats,
    'dataset': stage_dataset,
    'train': stage_train,
    'train_classical': stage_train_classical,
    'attribute': stage_attribute,
    'select_channels': stage_select_channels,
    'retrain': stage_retrain,
    'ensemble': stage_ensemble,
    'infer': stage_infer,
    'render': stage_render,
}


# ========================================================================= #
# Running                                                                   #
# ========================================================================= #


def run_stage(name: str, cfg: PipelineConfig, run: RunDirectory):
    if name not in STAGES:
        raise KeyError(f'invalid stage: {repr(name)}, must be one of: {list(STAGES)}')
    try:
        with Timer(f'stage {name}'):
            STAGES[name](cfg, run)
    except Exception as e:
        log.error(f'stage {repr(name)} failed', exc_info=True)
        raise StageError(name, e) from e


def run_stages(cfg, stages: List[str], config_name: str = 'config') -> Path:
    """
    Validate the config, persist it resolved to `configs/<config_name>.yaml`
    and run the stages in the given order. Nothing runs when the config is
    invalid.
    """
    cfg = validate_config(cfg)
    run = RunDirectory(cfg.settings.run_dir)
    write_text(run.configs / f'{config_name}.yaml', config_to_yaml(cfg))
    with log_to_file(run.logs / 'pipeline.log'):
        log.info(f'running stages {stages} in: {run.root}')
        for name in stages:
            run_stage(name, cfg, run)
    return run.root


def run_pipeline(cfg) -> Path:
    """Every stage in order into `settings.run_dir`, returns the run directory."""
    return run_stages(cfg, list(STAGES), config_name='config')


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
