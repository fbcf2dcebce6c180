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

import json

import numpy as np
import pytest
from PIL import Image

from hyperglio.cube import HsiCube
from hyperglio.dataset import FOCUS_CLASSES
from hyperglio.dataset import segment_cube
from hyperglio.ensemble import PredictionLabel
from hyperglio.pipeline import BASE_BAND_NM
from hyperglio.pipeline import ConfigValidationError
from hyperglio.pipeline import OVERLAY_ALPHA
from hyperglio.pipeline import OVERLAY_COLORS
from hyperglio.pipeline import PipelineConfig
from hyperglio.pipeline import PredictionMap
from hyperglio.pipeline import RunDirectory
from hyperglio.pipeline import StageError
from hyperglio.pipeline import config_to_yaml
from hyperglio.pipeline import grayscale_base
from hyperglio.pipeline import infer_full_image
from hyperglio.pipeline import overlay_image
from hyperglio.pipeline import render_overlay
from hyperglio.pipeline import run_pipeline
from hyperglio.pipeline import run_stages
from hyperglio.pipeline import validate_config
from hyperglio.superpixel import NO_TILE
from tests.util import TEST_SLIC
from tests.util import phantom_scenes


# ========================================================================= #
# HELPERS                                                                   #
# ========================================================================= #


class _TileIdModel(object):
    """Probabilities that depend only on the tile id: p_lgg in {0, .25, .5, .75, 1}."""

    name = 'tile_id'

    def __init__(self, channels):
        self.channels = np.asarray(channels)

    def predict_patch_set(self, patch_set):
        q = (patch_set.tile_ids % 5) / 4
        return np.stack([1 - q, q], axis=1)


def _scene():
    return phantom_scenes('standard', count=1, size=96)[0]


def _model(scene):
    return _TileIdModel(np.arange(scene.cube.band_count))


def _tiny_config(run_dir, **settings) -> dict:
    return dict(
        settings=dict(run_dir=str(run_dir), seed=0, **settings),
        phantom=dict(preset='standard', count=4, size=128, seed=0),
        tiling=dict(
            slic=dict(target_pixels_per_tile=100, compactness=0.5, max_iters=6),
            filter=dict(sam_pctl=100, l2_pctl=100, intensity_lo=0, intensity_hi=100),
        ),
        dataset=dict(split=dict(mode='random-tile', train_fraction=0.7, seed=0)),
        train=dict(epochs=2, batch_size=16, val_fraction=0.0),
        networks=dict(compress=[3, 6], features=[4, 8], reference=6),
        classical=dict(trees=10, mlp_hidden=8, mlp_epochs=2),
        attribution=dict(per_class=4, n_samples=4, max_examples=16, min_accuracy=0.0, top_k=4),
        ensemble=dict(size=2, compress_to=6, taus=[0.7], coverage_taus=[0.7, 0.9]),
    )


# ========================================================================= #
# INFERENCE                                                                 #
# ========================================================================= #


def test_infer_labels_are_constant_per_tile():
    scene = _scene()
    pmap = infer_full_image(_model(scene), scene.cube, slic=TEST_SLIC, scene_id=scene.scene_id)
    assert pmap.shape == scene.cube.shape[:2]
    for tile_id in np.unique(pmap.assignment[pmap.assignment != NO_TILE]):
        assert len(np.unique(pmap.labels[pmap.assignment == tile_id])) == 1
    # pixels outside every tile have no prediction
    assert np.all(pmap.labels[pmap.assignment == NO_TILE] == PredictionLabel.NO_PREDICTION)
    # operating point, p_lgg >= 0.5 is lgg
    q = (pmap.tile_ids % 5) / 4
    assert pmap.tile_labels.tolist() == (q >= 0.5).astype(int).tolist()


def test_infer_with_threshold_marks_unknown():
    scene = _scene()
    pmap = infer_full_image(_model(scene), scene.cube, slic=TEST_SLIC, tau=0.8)
    q = (pmap.tile_ids % 5) / 4
    expected = np.full(len(q), int(PredictionLabel.UNKNOWN))
    expected[q == 0] = PredictionLabel.HEALTHY
    expected[q == 1] = PredictionLabel.LGG
    assert pmap.tile_labels.tolist() == expected.tolist()
    assert pmap.tau == 0.8
    assert pmap.pixel_counts()['unknown'] > 0


def test_infer_is_deterministic():
    scene = _scene()
    a = infer_full_image(_model(scene), scene.cube, slic=TEST_SLIC)
    b = infer_full_image(_model(scene), scene.cube, slic=TEST_SLIC)
    assert np.array_equal(a.labels, b.labels)
    assert np.array_equal(a.assignment, b.assignment)
    assert np.array_equal(a.tile_probs, b.tile_probs)


def test_infer_accuracy_matches_recount():
    scene = _scene()
    pmap = infer_full_image(_model(scene), scene.cube, slic=TEST_SLIC, mask=scene.mask)
    truth = np.full(scene.mask.labels.shape, -1)
    for class_id, label in FOCUS_CLASSES.items():
        truth[scene.mask.labels == class_id] = int(label)
    decided = (truth >= 0) & np.isin(pmap.labels, [0, 1])
    assert pmap.accuracy == pytest.approx(np.mean(pmap.labels[decided] == truth[decided]))
    assert pmap.coverage == pytest.approx(decided.sum() / (truth >= 0).sum())


def test_infer_test_tiles_only():
    scene = _scene()
    tile_map = segment_cube(scene.cube, slic=TEST_SLIC)
    test_ids = np.arange(0, tile_map.num_tiles, 2)
    pmap = infer_full_image(_model(scene), scene.cube, mask=scene.mask, tile_map=tile_map, test_tile_ids=test_ids)
    assert np.array_equal(pmap.assignment, tile_map.assignment)
    truth = np.full(scene.mask.labels.shape, -1)
    for class_id, label in FOCUS_CLASSES.items():
        truth[scene.mask.labels == class_id] = int(label)
    decided = (truth >= 0) & np.isin(pmap.labels, [0, 1]) & np.isin(pmap.assignment, test_ids)
    if np.any(decided):
        assert pmap.test_accuracy == pytest.approx(np.mean(pmap.labels[decided] == truth[decided]))
    else:
        assert pmap.test_accuracy is None


def test_infer_oversize_tiles_have_no_prediction():
    scene = _scene()
    tile_map = segment_cube(scene.cube, slic=TEST_SLIC)
    pmap = infer_full_image(_model(scene), scene.cube, tile_map=tile_map, patch_size=12)
    assert pmap.oversize_count + len(pmap.tile_ids) == tile_map.num_tiles
    classified = np.isin(pmap.assignment, pmap.tile_ids)
    assert np.all(pmap.labels[~classified] == PredictionLabel.NO_PREDICTION)
    for tile in tile_map.tiles:
        assert (tile.tile_id in set(pmap.tile_ids.tolist())) == tile.fits(12)
    # ~100 pixel tiles rarely fit into a 4x4 patch
    pmap = infer_full_image(_model(scene), scene.cube, tile_map=tile_map, patch_size=4)
    assert pmap.oversize_count > tile_map.num_tiles // 2


def test_infer_errors():
    scene = _scene()
    cube = scene.cube
    # channel beyond the cube
    with pytest.raises(ValueError, match='channels'):
        infer_full_image(_TileIdModel([0, cube.band_count]), cube, slic=TEST_SLIC)
    # nothing to segment
    invalid = HsiCube(data=cube.data, axis=cube.axis, valid_mask=np.zeros(cube.shape[:2], dtype='bool'))
    with pytest.raises(ValueError):
        infer_full_image(_model(scene), invalid, slic=TEST_SLIC)


def test_prediction_map_file(tmp_path):
    scene = _scene()
    pmap = infer_full_image(_model(scene), scene.cube, slic=TEST_SLIC, tau=0.7, mask=scene.mask, scene_id=scene.scene_id)
    loaded = PredictionMap.load(pmap.save(tmp_path / 'pred.npz'))
    assert np.array_equal(loaded.labels, pmap.labels)
    assert np.array_equal(loaded.tile_ids, pmap.tile_ids)
    assert loaded.summary() == pmap.summary()


# ========================================================================= #
# RENDER                                                                    #
# ========================================================================= #


def test_overlay_without_predictions_is_gray():
    cube = _scene().cube
    labels = np.full(cube.shape[:2], int(PredictionLabel.NO_PREDICTION))
    rgb = overlay_image(labels, cube)
    assert rgb.dtype == np.uint8 and rgb.shape == (*cube.shape[:2], 3)
    assert np.array_equal(rgb[..., 0], rgb[..., 1]) and np.array_equal(rgb[..., 1], rgb[..., 2])
    assert np.array_equal(rgb[..., 0], np.rint(grayscale_base(cube, BASE_BAND_NM)).astype('uint8'))


def test_overlay_tints_labeled_pixels_only():
    cube = _scene().cube
    labels = np.full(cube.shape[:2], int(PredictionLabel.NO_PREDICTION))
    labels[:8, :8] = PredictionLabel.LGG
    labels[-8:, -8:] = PredictionLabel.UNKNOWN
    rgb = overlay_image(labels, cube).astype('float64')
    gray = grayscale_base(cube)
    for label, color in OVERLAY_COLORS.items():
        selected = labels == label
        expected = (1 - OVERLAY_ALPHA) * gray[selected][:, None] + OVERLAY_ALPHA * np.asarray(color)[None, :]
        assert np.allclose(rgb[selected], np.rint(expected))
    untouched = labels == PredictionLabel.NO_PREDICTION
    assert np.allclose(rgb[untouched], np.rint(gray[untouched])[:, None])


def test_render_overlay_pixel_counts(tmp_path):
    scene = _scene()
    pmap = infer_full_image(_model(scene), scene.cube, slic=TEST_SLIC, tau=0.8)
    path = render_overlay(pmap, scene.cube, tmp_path / 'overlay.png')
    with Image.open(path) as img:
        rgb = np.asarray(img.convert('RGB'))
    assert rgb.shape == (*scene.cube.shape[:2], 3)
    assert np.array_equal(rgb, overlay_image(pmap.labels, scene.cube))


def test_render_band_out_of_range():
    cube = _scene().cube
    labels = np.zeros(cube.shape[:2], dtype=int)
    with pytest.raises(ValueError):
        overlay_image(labels, cube, band_nm=100.0)
    with pytest.raises(ValueError):
        overlay_image(labels[:-1], cube)


# ========================================================================= #
# CONFIG                                                                    #
# ========================================================================= #


def test_config_requires_run_dir():
    with pytest.raises(ConfigValidationError, match='settings.run_dir'):
        validate_config({})


def test_config_defaults(tmp_path):
    cfg = validate_config(dict(settings=dict(run_dir=str(tmp_path))))
    assert isinstance(cfg, PipelineConfig)
    assert cfg.networks.compress == [3, 6, 12]
    assert cfg.dataset.split.train_fraction == pytest.approx(6620 / 8671)


def test_config_global_seed(tmp_path):
    cfg = validate_config(dict(settings=dict(run_dir=str(tmp_path), seed=5)))
    assert cfg.phantom.seed == 5
    assert cfg.dataset.split.seed == 5
    assert cfg.train.seed == 5
    assert cfg.train.to_train_config().seed == 5
    # explicit section seeds win
    cfg = validate_config(dict(settings=dict(run_dir=str(tmp_path), seed=5), phantom=dict(seed=2)))
    assert (cfg.phantom.seed, cfg.train.seed) == (2, 5)
    # the saved config holds concrete seeds
    assert 'settings.seed' not in config_to_yaml(cfg)


@pytest.mark.parametrize(['section', 'values'], [
    ('ensemble', dict(taus=[0.5])),
    ('ensemble', dict(size=1)),
    ('networks', dict(reference=5)),
    ('train', dict(class_weights='bogus')),
    ('train', dict(epochs=0)),
    ('train', dict(optimizer='not_an_optimizer')),
    ('tiling', dict(slic=dict(target_pixels_per_tile=4))),
    ('settings', dict(not_a_setting=1)),
])
def test_config_invalid_values(tmp_path, section, values):
    cfg = _tiny_config(tmp_path)
    cfg.setdefault(section, {}).update(values)
    with pytest.raises(ConfigValidationError):
        validate_config(cfg)


def test_invalid_config_writes_nothing(tmp_path):
    cfg = _tiny_config(tmp_path / 'run')
    cfg['ensemble']['taus'] = [1.5]
    with pytest.raises(ConfigValidationError):
        run_pipeline(cfg)
    assert not (tmp_path / 'run').exists()


# ========================================================================= #
# STAGES                                                                    #
# ========================================================================= #


def test_stage_without_inputs_fails(tmp_path):
    with pytest.raises(StageError) as info:
        run_stages(_tiny_config(tmp_path), ['tile'], config_name='tile')
    assert info.value.stage == 'tile'
    assert isinstance(info.value.cause, FileNotFoundError)
    assert (tmp_path / 'configs' / 'tile.yaml').exists()
    assert 'failed' in (tmp_path / 'logs' / 'pipeline.log').read_text()


def test_phantom_tile_and_stats_stages(tmp_path):
    run_stages(_tiny_config(tmp_path), ['phantom', 'tile', 'stats'])
    run = RunDirectory(tmp_path)
    scenes = json.loads(run.scenes_manifest.read_text())['scenes']
    assert [s['patient_id'] for s in scenes] == ['P00', 'P01', 'P02', 'P03']
    for s in scenes:
        for path in run.scene_paths(s['scene_id']):
            assert path.exists()
        assert run.tile_map_path(s['scene_id']).with_name(f'{s["scene_id"]}.npz').exists()
    separability = json.loads((run.reports / 'separability.json').read_text())
    assert set(separability) <= {s['scene_id'] for s in scenes}
    assert (run.reports / 'separability.tsv').exists()


@pytest.mark.slow
def test_full_pipeline(tmp_path):
    root = run_pipeline(_tiny_config(tmp_path / 'run'))
    run = RunDirectory(root)
    assert (run.configs / 'config.yaml').exists()
    for name in ['train.h5', 'test.h5', 'normalization.npz', 'scenes.json']:
        assert (run.data / name).exists()
    for name in ['cnn_k3.pt', 'cnn_k6.pt', 'rf.joblib', 'mlp.pt', 'retrain_top4.pt', 'ensemble/manifest.json']:
        assert (run.models / name).exists()
    metrics = json.loads(run.metrics_path.read_text())
    assert set(metrics) == {'cnn_k3', 'cnn_k6', 'rf', 'mlp', 'retrain_top4'}
    assert set(metrics['retrain_top4']['delta']) == set(metrics['cnn_k6']['metrics'])
    assert len((run.reports / 'channels.txt').read_text().split()) == 4
    coverage = json.loads((run.reports / 'coverage.json').read_text())
    assert len(coverage) == 4
    inference = json.loads((run.reports / 'inference.json').read_text())
    for scene_id, entries in inference.items():
        assert set(entries) == {'tau0.7', 'cnn', 'rf'}
        for name in entries:
            assert (run.overlays / f'{scene_id}_{name}.png').exists()
        assert (run.overlays / f'{scene_id}_annotation.png').exists()
    # rerunning a metric stage from the same config reproduces its files
    before = run.metrics_path.read_bytes()
    run_stages(_tiny_config(tmp_path / 'run'), ['train', 'train_classical', 'retrain'], config_name='rerun')
    assert run.metrics_path.read_bytes() == before


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
