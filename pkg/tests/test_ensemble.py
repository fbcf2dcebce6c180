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

import numpy as np
import pytest
import torch

from hyperglio.dataset import PatchSet
from hyperglio.dataset import SplitSpec
from hyperglio.dataset import build_dataset
from hyperglio.dataset import standardize
from hyperglio.dataset.data import generate_scene
from hyperglio.dataset.data import make_phantom_config
from hyperglio.ensemble import Ensemble
from hyperglio.ensemble import EnsembleMemberError
from hyperglio.ensemble import PredictionLabel
from hyperglio.ensemble import coverage_report
from hyperglio.ensemble import load_ensemble
from hyperglio.ensemble import mean_probabilities
from hyperglio.ensemble import predict_thresholded
from hyperglio.ensemble import scene_coverage
from hyperglio.ensemble import threshold_labels
from hyperglio.ensemble import train_ensemble
from hyperglio.frameworks import TrainConfig
from hyperglio.model import MlpSpec
from hyperglio.model import NetworkSpec
from hyperglio.util.seeds import derive_seed
from tests.util import TEST_FILTER
from tests.util import TEST_SLIC


# ========================================================================= #
# HELPERS                                                                   #
# ========================================================================= #


def _patch_set(n=24, c=4, size=6, seed=0, class_ids=None) -> PatchSet:
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % 2
    masks = np.zeros((n, size, size), dtype='bool')
    masks[:, 1:5, 1:5] = True
    patches = rng.normal(size=(n, size, size, c)) + 1.5 * labels[:, None, None, None]
    patches[~masks] = 0
    return PatchSet(
        patches=patches, masks=masks, labels=labels, tile_ids=np.arange(n),
        class_ids=np.where(labels, 6, 1) if (class_ids is None) else np.asarray(class_ids),
        scene_ids=np.array(['s0'] * n), patient_ids=np.array(['p0'] * n), channels=np.arange(c), normalized=True,
    )


_CONFIG = TrainConfig(epochs=3, batch_size=8, val_fraction=0, seed=0)


def _ensemble(k=3, master_seed=0, **kwargs) -> Ensemble:
    return train_ensemble(MlpSpec(in_channels=4, hidden_units=8), _patch_set(), _CONFIG, k=k, master_seed=master_seed, **kwargs)


def _state_equal(a, b) -> bool:
    sa, sb = a.model.state_dict(), b.model.state_dict()
    return sa.keys() == sb.keys() and all(torch.equal(sa[k], sb[k]) for k in sa)


# ========================================================================= #
# THRESHOLDING                                                              #
# ========================================================================= #


def test_unanimous_members_are_confident():
    members = np.tile([[1.0, 0.0]], (10, 1, 1))
    mean = mean_probabilities(members)
    for tau in [0.51, 0.7, 0.8, 1.0]:
        assert threshold_labels(mean, tau).tolist() == [PredictionLabel.HEALTHY]


def test_split_members_are_unknown():
    members = np.array([[[0.99, 0.01]]] * 5 + [[[0.01, 0.99]]] * 5)
    mean = mean_probabilities(members)
    assert np.allclose(mean, 0.5)
    assert threshold_labels(mean, 0.7).tolist() == [PredictionLabel.UNKNOWN]


def test_unknown_sets_are_nested():
    rng = np.random.default_rng(0)
    p = rng.uniform(size=(500, 7, 1))
    mean = mean_probabilities(np.concatenate([1 - p, p], axis=2).transpose(1, 0, 2))
    assert np.allclose(mean.sum(axis=1), 1, atol=1e-9)
    taus = [0.55, 0.6, 0.7, 0.8, 0.9, 1.0]
    unknown = [threshold_labels(mean, t) == PredictionLabel.UNKNOWN for t in taus]
    for lo, hi in zip(unknown[:-1], unknown[1:]):
        assert np.all(hi[lo])
    # confident labels never change with the threshold
    for tau in taus:
        labels = threshold_labels(mean, tau)
        keep = labels != PredictionLabel.UNKNOWN
        assert np.array_equal(labels[keep], mean.argmax(axis=1)[keep])


def test_threshold_errors():
    probs = np.array([[0.3, 0.7]])
    for tau in [0.5, 0.0, 1.01, -1]:
        with pytest.raises(ValueError):
            threshold_labels(probs, tau)
    with pytest.raises(ValueError):
        threshold_labels(np.ones((3, 3)) / 3, 0.7)
    assert threshold_labels(probs, 0.7).tolist() == [PredictionLabel.LGG]


def test_mean_is_member_order_invariant():
    rng = np.random.default_rng(1)
    p = rng.uniform(size=(6, 50))
    members = np.stack([1 - p, p], axis=2)
    expected = mean_probabilities(members)
    for _ in range(5):
        assert np.array_equal(mean_probabilities(members[rng.permutation(6)]), expected)


# ========================================================================= #
# ENSEMBLES                                                                 #
# ========================================================================= #


def test_train_ensemble_seeds_and_determinism():
    a, b = _ensemble(master_seed=5), _ensemble(master_seed=5)
    assert a.member_seeds == [derive_seed(5, i) for i in range(3)]
    assert all(_state_equal(x, y) for x, y in zip(a.members, b.members))
    assert not _state_equal(a.members[0], a.members[1])
    assert a.name == 'ensemble_mlp_x3'


def test_forced_identical_seeds_give_identical_members():
    ensemble = _ensemble(k=2, member_seeds=[11, 11])
    assert _state_equal(ensemble.members[0], ensemble.members[1])
    pred = predict_thresholded(ensemble, _patch_set(seed=3), 0.7)
    assert np.array_equal(pred.members[0], pred.members[1])
    assert np.allclose(pred.mean, pred.members[0])


def test_train_ensemble_errors():
    with pytest.raises(ValueError):
        _ensemble(k=1)
    with pytest.raises(ValueError):
        _ensemble(k=2, member_seeds=[1, 2, 3])
    bad = TrainConfig(epochs=1, optimizer='not_an_optimizer', val_fraction=0)
    with pytest.raises(EnsembleMemberError, match='member 0') as info:
        train_ensemble(MlpSpec(in_channels=4, hidden_units=8), _patch_set(), bad, k=2)
    assert info.value.member == 0


def test_ensemble_requires_matching_members():
    a = _ensemble(k=2)
    other = train_ensemble(MlpSpec(in_channels=4, hidden_units=16), _patch_set(), _CONFIG, k=2)
    with pytest.raises(ValueError):
        Ensemble(members=[a.members[0], other.members[0]])
    with pytest.raises(ValueError):
        Ensemble(members=[])


def test_predict_thresholded():
    ensemble = _ensemble()
    test = _patch_set(seed=9)
    pred = predict_thresholded(ensemble, test, 0.7)
    assert pred.members.shape == (3, len(test), 2)
    assert np.allclose(pred.mean.sum(axis=1), 1, atol=1e-9)
    assert np.array_equal(pred.labels, threshold_labels(pred.mean, 0.7))
    # reversing the members does not change anything
    reversed_pred = predict_thresholded(Ensemble(members=ensemble.members[::-1]), test, 0.7)
    assert np.array_equal(reversed_pred.mean, pred.mean)
    assert np.array_equal(reversed_pred.labels, pred.labels)
    with pytest.raises(ValueError):
        predict_thresholded(ensemble, test, 0.5)


def test_ensemble_directory(tmp_path):
    ensemble = _ensemble()
    path = ensemble.save(tmp_path / 'ensemble')
    assert sorted(p.name for p in path.iterdir()) == ['manifest.json', 'member_00.pt', 'member_01.pt', 'member_02.pt']
    loaded = load_ensemble(path)
    assert loaded.member_seeds == ensemble.member_seeds
    test = _patch_set(seed=4)
    assert np.array_equal(loaded.predict_patch_set(test), ensemble.predict_patch_set(test))


# ========================================================================= #
# COVERAGE                                                                  #
# ========================================================================= #


def test_coverage_report():
    ensemble = _ensemble()
    class_ids = np.array([1, 6] * 10 + [3, 3, 0, -1])
    tiles = _patch_set(class_ids=class_ids)
    report = coverage_report(ensemble, tiles, [0.9, 0.6, 0.8, 0.7])
    assert [r['tau'] for r in report.rows] == [0.6, 0.7, 0.8, 0.9]
    assert (report.tile_count, report.in_distribution_count, report.ood_count) == (24, 20, 2)
    fractions = [r['unknown_fraction'] for r in report.rows]
    assert fractions == sorted(fractions)
    for r in report.rows:
        assert r['healthy_count'] + r['lgg_count'] + r['unknown_count'] == 24
    assert report.row(0.8)['tau'] == 0.8
    with pytest.raises(ValueError):
        coverage_report(ensemble, tiles.subset([]), [0.7])


@pytest.mark.slow
def test_ood_tiles_are_flagged_more_often():
    scenes = [generate_scene(make_phantom_config('ood', seed=100 + i, size=192, patient_id=f'P{i}')).as_scene() for i in range(4)]
    data = build_dataset(scenes[:3], SplitSpec(train_fraction=0.8, seed=0), slic=TEST_SLIC, filt=TEST_FILTER)
    train, _, normalization = standardize(data.train, data.test)
    spec = NetworkSpec(in_channels=train.channel_count, compress_to=12, features=(8, 16))
    ensemble = train_ensemble(spec, train, TrainConfig(epochs=10, batch_size=16, val_fraction=0), k=3, normalization=normalization)
    report = scene_coverage(ensemble, scenes[3], [0.7], slic=TEST_SLIC)
    row = report.row(0.7)
    assert report.ood_count > 0
    assert row['ood_unknown_fraction'] > row['in_distribution_unknown_fraction']


@pytest.mark.slow
def test_confident_tiles_are_more_accurate():
    all_accuracy, confident_accuracy = [], []
    for seed in range(5):
        scenes = [generate_scene(make_phantom_config('standard', seed=200 + 10 * seed + i, size=160, patient_id=f'P{i}')).as_scene() for i in range(2)]
        data = build_dataset(scenes, SplitSpec(train_fraction=0.7, seed=seed), slic=TEST_SLIC, filt=TEST_FILTER)
        train, test, normalization = standardize(data.train, data.test)
        spec = NetworkSpec(in_channels=train.channel_count, compress_to=12, features=(8, 16))
        ensemble = train_ensemble(spec, train, TrainConfig(epochs=6, batch_size=16, val_fraction=0), k=3, master_seed=seed, normalization=normalization)
        pred = predict_thresholded(ensemble, test, 0.8)
        labels = np.asarray(test.labels)
        confident = pred.labels != PredictionLabel.UNKNOWN
        if np.any(confident):
            all_accuracy.append(np.mean(pred.mean.argmax(axis=1) == labels))
            confident_accuracy.append(np.mean(pred.labels[confident] == labels[confident]))
    assert len(confident_accuracy) >= 3
    assert np.mean(confident_accuracy) >= np.mean(all_accuracy)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
