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
from torch import nn

from hyperglio.attribution import AttributionReport
from hyperglio.attribution import ChannelSubset
from hyperglio.attribution import aggregate_importance
from hyperglio.attribution import attribute_networks
from hyperglio.attribution import expected_gradients
from hyperglio.attribution import make_baselines
from hyperglio.attribution import retrain_on_subset
from hyperglio.attribution import select_top_k
from hyperglio.cube import SpectralAxis
from hyperglio.dataset import SplitSpec
from hyperglio.frameworks import TrainConfig
from hyperglio.frameworks import train_network
from hyperglio.model import NetworkSpec
from tests.util import TEST_FILTER
from tests.util import TEST_SLIC
from tests.util import phantom_dataset
from tests.util import phantom_scenes


# ========================================================================= #
# HELPERS                                                                   #
# ========================================================================= #


class _LinearProbe(nn.Module):
    """logits (-s, s) with s = sum_chw w_c x_chw"""

    def __init__(self, weights):
        super().__init__()
        self.weight = nn.Parameter(torch.as_tensor(weights, dtype=torch.float64))

    def forward(self, x):
        s = torch.einsum('bchw,c->b', x, self.weight)
        return torch.stack([-s, s], dim=1)


def _report(mean, channels=None, report_id='r'):
    mean = np.asarray(mean, dtype='float64')
    channels = np.arange(len(mean)) if channels is None else np.asarray(channels)
    return AttributionReport(channels=channels, wavelengths_nm=500.0 + 3 * channels, mean=mean, std=np.zeros_like(mean), model_ids=['m0'], report_id=report_id)


# ========================================================================= #
# EXPECTED GRADIENTS                                                        #
# ========================================================================= #


def test_input_equal_to_baseline_has_zero_attribution():
    probe = _LinearProbe([0.5, -1.0, 2.0])
    x = np.random.default_rng(0).normal(size=(1, 3, 4, 4))
    scores = expected_gradients(probe, x, x.copy(), n_samples=8, seed=0, target=1)
    assert np.all(scores == 0)


def test_linear_model_attribution_is_exact():
    w = np.array([0.5, -1.0, 2.0, 0.0])
    probe = _LinearProbe(w)
    rng = np.random.default_rng(1)
    x, b = rng.normal(size=(3, 4, 5, 5)), rng.normal(size=(1, 4, 5, 5))
    scores = expected_gradients(probe, x, b, n_samples=16, seed=2, target=1)
    expected = w[None, :] * (x - b).sum(axis=(2, 3))
    assert np.allclose(scores, expected, rtol=0, atol=1e-9)
    # the other logit mirrors the sign
    scores_0 = expected_gradients(probe, x, b, n_samples=16, seed=2, target=0)
    assert np.allclose(scores_0, -expected, rtol=0, atol=1e-9)


def test_attribution_is_deterministic():
    torch.manual_seed(0)
    model = nn.Sequential(nn.Conv2d(3, 2, 1), nn.Tanh(), nn.AdaptiveAvgPool2d(1), nn.Flatten(), nn.Softmax(dim=1)).double()
    rng = np.random.default_rng(2)
    x, b = rng.normal(size=(4, 3, 6, 6)), rng.normal(size=(5, 3, 6, 6))
    a1 = expected_gradients(model, x, b, n_samples=10, seed=7)
    a2 = expected_gradients(model, x, b, n_samples=10, seed=7)
    assert np.array_equal(a1, a2)
    assert a1.shape == (4, 3)


def test_attribution_errors():
    probe = _LinearProbe([1.0, 1.0])
    x = np.zeros((1, 2, 3, 3))
    with pytest.raises(ValueError):
        expected_gradients(probe, x, np.zeros((0, 2, 3, 3)))
    with pytest.raises(ValueError):
        expected_gradients(probe, x, np.zeros((1, 2, 4, 4)))
    with pytest.raises(ValueError):
        expected_gradients(probe, x, x, n_samples=0)


def test_make_baselines():
    raw, _ = phantom_dataset('standard')
    baselines = make_baselines(raw.train, per_class=5, seed=0)
    n, s, _, c = raw.train.patches.shape
    assert baselines.shape == (11, c, s, s)
    assert np.all(baselines[-1] == 0)
    assert np.array_equal(baselines, make_baselines(raw.train, per_class=5, seed=0))


# ========================================================================= #
# AGGREGATION                                                               #
# ========================================================================= #


def test_aggregate_single_model():
    report = aggregate_importance({'a': (np.array([1.0, -3.0, 0.0, 4.0]), 0.9)}, channels=range(4), wavelengths_nm=[500, 510, 520, 530])
    assert np.allclose(report.mean, [0.125, 0.375, 0.0, 0.5])
    assert np.all(report.std == 0)
    assert report.model_ids == ['a']


def test_aggregate_identical_and_rescaled_models():
    s = np.array([0.2, 0.5, 0.3])
    report = aggregate_importance({'a': (s, 0.9), 'b': (s * 7.5, 0.95)}, channels=range(3), wavelengths_nm=[1, 2, 3])
    assert np.allclose(report.mean, s / s.sum())
    assert np.allclose(report.std, 0, atol=1e-15)


def test_aggregate_accuracy_filter():
    scores = {'a': (np.array([1.0, 0.0]), 0.80), 'b': (np.array([0.0, 1.0]), 0.81), 'c': (np.array([1.0, 1.0]), 0.5)}
    report = aggregate_importance(scores, channels=[0, 1], wavelengths_nm=[1, 2])
    assert report.model_ids == ['b']
    assert np.allclose(report.mean, [0.0, 1.0])
    two = aggregate_importance(scores, channels=[0, 1], wavelengths_nm=[1, 2], min_accuracy=0.7)
    assert np.allclose(two.mean, [0.5, 0.5]) and np.allclose(two.std, [0.5, 0.5])
    with pytest.raises(ValueError):
        aggregate_importance({'a': (np.array([1.0]), 0.6)}, channels=[0], wavelengths_nm=[1])


def test_report_file_and_plot(tmp_path):
    report = aggregate_importance({'a': (np.array([1.0, 2.0, 3.0]), 0.9), 'b': (np.array([3.0, 2.0, 1.0]), 0.9)}, channels=[4, 5, 6], wavelengths_nm=[500, 503, 506])
    loaded = AttributionReport.load_json(report.save_json(tmp_path / 'attribution.json'))
    assert np.allclose(loaded.mean, report.mean) and np.allclose(loaded.std, report.std)
    assert np.array_equal(loaded.channels, report.channels)
    png = report.plot(tmp_path / 'attribution.png')
    assert png.read_bytes()[:8] == b'\x89PNG\r\n\x1a\n'


# ========================================================================= #
# SELECTION                                                                 #
# ========================================================================= #


def test_select_top_k():
    report = _report([0.4, 0.3, 0.2, 0.1])
    assert select_top_k(report, 2).indices == (0, 1)
    assert sorted(select_top_k(report, 4).indices) == [0, 1, 2, 3]
    # ties go to the lower index
    assert select_top_k(_report([0.1, 0.3, 0.3, 0.3]), 2).indices == (1, 2)
    with pytest.raises(ValueError):
        select_top_k(report, 0)
    with pytest.raises(ValueError):
        select_top_k(report, 5)


def test_select_top_k_permutation_invariant():
    rng = np.random.default_rng(0)
    mean = rng.integers(0, 5, size=20).astype('float64')
    channels = np.arange(20)
    expected = select_top_k(_report(mean, channels), 6)
    for _ in range(10):
        perm = rng.permutation(20)
        assert select_top_k(_report(mean[perm], channels[perm]), 6) == expected


def test_channel_subset_file(tmp_path):
    subset = ChannelSubset(indices=(70, 3, 41), source='attribution')
    loaded = ChannelSubset.load(subset.save(tmp_path / 'channels.txt'))
    assert loaded == subset
    assert subset.sorted().tolist() == [3, 41, 70]
    with pytest.raises(ValueError):
        ChannelSubset(indices=(1, 1))


# ========================================================================= #
# PHANTOM                                                                   #
# ========================================================================= #


@pytest.mark.slow
def test_planted_band_is_recovered():
    _, data = phantom_dataset('single_band')
    networks = {}
    for seed in range(2):
        spec = NetworkSpec(in_channels=data.train.channel_count, compress_to=12, features=(8, 16))
        networks[f'cnn_{seed}'] = train_network(spec, data.train, TrainConfig(epochs=15, batch_size=16, seed=seed, val_fraction=0))
    baselines = make_baselines(data.train, per_class=8, seed=0)
    scores = attribute_networks(networks, data.test.subset(np.arange(min(20, len(data.test)))), baselines, n_samples=16, seed=0)
    axis = SpectralAxis.default()
    report = aggregate_importance(scores, channels=data.train.channels, wavelengths_nm=axis.wavelengths_nm[data.train.channels])
    planted = axis.band_index(700.0)
    assert abs(select_top_k(report, 1).indices[0] - planted) <= 2


@pytest.mark.slow
def test_retrain_on_subset_uses_same_split():
    raw, _ = phantom_dataset('single_band')
    scenes = phantom_scenes('single_band')
    subset = ChannelSubset(indices=(70, 10, 40), source='test')
    result = retrain_on_subset(
        subset, scenes, SplitSpec(train_fraction=0.7, seed=0), TrainConfig(epochs=5, batch_size=16, val_fraction=0),
        slic=TEST_SLIC, filt=TEST_FILTER, tile_maps=raw.tile_maps, reference_metrics={'accuracy': 1.0}, features=(8, 16),
    )
    assert result.network.channels.tolist() == [10, 40, 70]
    assert result.counts.total == len(raw.test)
    assert result.delta['accuracy'] == pytest.approx(result.metrics['accuracy'] - 1.0)
    assert set(result.to_dict()) == {'channels', 'counts', 'metrics', 'delta'}


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
