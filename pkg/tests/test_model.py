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

from hyperglio.dataset import PatchSet
from hyperglio.frameworks import TrainConfig
from hyperglio.frameworks import TrainedNetwork
from hyperglio.frameworks import TrainingDivergedError
from hyperglio.frameworks import evaluate_network
from hyperglio.frameworks import fit
from hyperglio.frameworks import load_network
from hyperglio.frameworks import save_network
from hyperglio.metrics import evaluate
from hyperglio.model import ChannelCompress
from hyperglio.model import MlpSpec
from hyperglio.model import NetworkSpec
from hyperglio.model import TileCNN
from hyperglio.model import TileMLP
from hyperglio.model import make_network
from hyperglio.nn import group_average_weights
from hyperglio.nn import inverse_frequency_weights
from hyperglio.nn import weighted_cross_entropy
from hyperglio import registry


# ========================================================================= #
# HELPERS                                                                   #
# ========================================================================= #


def _tiny_spec(in_channels=4, compress_to=2, features=(3,), patch_size=8):
    return NetworkSpec(in_channels=in_channels, compress_to=compress_to, features=features, patch_size=patch_size)


def _randn(*shape, seed=0):
    return torch.randn(*shape, generator=torch.Generator().manual_seed(seed), dtype=torch.float64)


def _separable_features(n=40, c=3, seed=0):
    rng = np.random.default_rng(seed)
    y = np.arange(n) % 2
    x = rng.normal(0, 0.1, size=(n, c)) + np.where(y[:, None] == 1, 1.0, -1.0)
    return x, y


def _gradcheck(fn, *inputs):
    return torch.autograd.gradcheck(fn, inputs, eps=1e-5, atol=1e-7, rtol=1e-4)


# ========================================================================= #
# FORWARD                                                                   #
# ========================================================================= #


def test_probabilities_sum_to_one():
    torch.manual_seed(0)
    net = make_network(_tiny_spec(features=(4, 5)))
    for seed in range(5):
        probs = net(_randn(6, 4, 8, 8, seed=seed) * 3)
        assert probs.shape == (6, 2)
        assert torch.all((probs > 0) & (probs < 1))
        assert torch.allclose(probs.sum(dim=1), torch.ones(6, dtype=torch.float64), rtol=0, atol=1e-9)


def test_zero_readout_gives_uniform_probabilities():
    net = make_network(_tiny_spec())
    with torch.no_grad():
        net.readout.weight.zero_()
        net.readout.bias.zero_()
    probs = net(_randn(3, 4, 8, 8))
    assert torch.allclose(probs, torch.full((3, 2), 0.5, dtype=torch.float64), rtol=0, atol=1e-12)


def test_identity_compress_equals_bypass():
    torch.manual_seed(1)
    with_compress = make_network(_tiny_spec(compress_to=4)).eval()
    without = make_network(_tiny_spec(compress_to=None)).eval()
    assert torch.equal(with_compress.compress.weight, torch.eye(4, dtype=torch.float64))
    without.load_state_dict({k: v for k, v in with_compress.state_dict().items() if not k.startswith('compress.')})
    x = _randn(3, 4, 8, 8)
    assert torch.allclose(with_compress(x), without(x), rtol=0, atol=1e-12)


def test_compress_is_linear_group_average():
    layer = ChannelCompress(7, 3).double()
    expected = group_average_weights(3, 7)
    assert np.allclose(layer.weight.detach().numpy(), expected)
    assert np.allclose(expected.sum(axis=1), 1.0)
    assert np.array_equal(expected > 0, np.array([[1, 1, 1, 0, 0, 0, 0], [0, 0, 0, 1, 1, 0, 0], [0, 0, 0, 0, 0, 1, 1]], dtype=bool))
    with torch.no_grad():
        layer.weight.copy_(_randn(3, 7, seed=3))
    x, y = _randn(2, 7, 5, 5, seed=4), _randn(2, 7, 5, 5, seed=5)
    a, b = 0.3, -1.7
    assert torch.allclose(layer(a * x + b * y), a * layer(x) + b * layer(y), rtol=0, atol=1e-9)


def test_input_shape_mismatch():
    net = make_network(_tiny_spec())
    with pytest.raises(ValueError):
        net(_randn(2, 3, 8, 8))
    with pytest.raises(ValueError):
        net(_randn(2, 4, 9, 9))


def test_spec_errors():
    with pytest.raises(ValueError):
        NetworkSpec(in_channels=4, compress_to=5)
    with pytest.raises(ValueError):
        NetworkSpec(in_channels=4, features=(8, 8, 8, 8), patch_size=8)
    with pytest.raises(ValueError):
        MlpSpec(in_channels=0)


def test_default_architecture():
    net = TileCNN(NetworkSpec(in_channels=104, compress_to=12))
    assert isinstance(net.compress, ChannelCompress)
    assert net.compress.weight.shape == (12, 104)
    assert [block[0].out_channels for block in net.encoder] == [16, 32, 64]
    assert [type(layer) for layer in net.encoder[0]] == [nn.Conv2d, nn.ReLU, nn.MaxPool2d, nn.BatchNorm2d]
    assert net.readout.in_features == 64 and net.readout.out_features == 2
    assert net.x_shape == (104, 40, 40)


def test_batchnorm_eval_is_deterministic_affine():
    net = make_network(_tiny_spec())
    net.train()
    net(_randn(8, 4, 8, 8, seed=1))  # update running statistics
    net.eval()
    bn = net.encoder[0][3]
    x = _randn(5, 3, 4, 4, seed=2)
    assert torch.equal(bn(x), bn(x))
    expected = (x - bn.running_mean[None, :, None, None]) / torch.sqrt(bn.running_var[None, :, None, None] + bn.eps)
    expected = expected * bn.weight[None, :, None, None] + bn.bias[None, :, None, None]
    assert torch.allclose(bn(x), expected, atol=1e-12)


def test_batch_size_one_rejected_in_training_mode():
    net = make_network(_tiny_spec())
    net.train()
    with pytest.raises(ValueError, match='batch size 1'):
        net(_randn(1, 4, 8, 8))
    net.eval()
    assert net(_randn(1, 4, 8, 8)).shape == (1, 2)
    # no batchnorm in the mlp
    mlp = make_network(MlpSpec(in_channels=3)).train()
    assert mlp(_randn(1, 3)).shape == (1, 2)


# ========================================================================= #
# GRADIENTS                                                                 #
# ========================================================================= #


@pytest.mark.parametrize('layer_fn', [
    lambda: ChannelCompress(4, 2),
    lambda: nn.Conv2d(4, 3, kernel_size=3, padding=1),
    lambda: nn.MaxPool2d(2),
    lambda: nn.BatchNorm2d(4),
    lambda: nn.ReLU(),
])
def test_layer_gradients_match_finite_differences(layer_fn):
    torch.manual_seed(0)
    layer = layer_fn().double().train()
    x = _randn(3, 4, 6, 6, seed=7).requires_grad_(True)
    assert _gradcheck(layer, x)
    # parameter gradients too
    for name, param in layer.named_parameters():
        assert _gradcheck(lambda p: torch.func.functional_call(layer, {name: p}, (x.detach(),)), param.detach().clone().requires_grad_(True))


def test_dense_and_softmax_gradients():
    torch.manual_seed(0)
    dense = nn.Linear(5, 2).double()
    x = _randn(4, 5).requires_grad_(True)
    assert _gradcheck(lambda v: torch.softmax(dense(v), dim=1), x)


def test_maxpool_routes_each_gradient_once():
    x = _randn(2, 3, 6, 6, seed=11).requires_grad_(True)
    nn.MaxPool2d(2)(x).sum().backward()
    windows = x.grad.reshape(2, 3, 3, 2, 3, 2).permute(0, 1, 2, 4, 3, 5).reshape(2, 3, 3, 3, 4)
    assert torch.all(windows.sum(dim=-1) == 1)
    assert torch.all((windows == 0) | (windows == 1))


@pytest.mark.parametrize(['in_channels', 'compress_to', 'features'], [
    (4, 2, (3,)),
    (12, 3, (3, 4)),
    (12, 6, (3, 4)),
    (12, 12, (3, 4)),
])
def test_network_gradients_match_finite_differences(in_channels, compress_to, features):
    torch.manual_seed(2)
    net = make_network(_tiny_spec(in_channels=in_channels, compress_to=compress_to, features=features)).train()
    x = _randn(3, in_channels, 8, 8, seed=3).requires_grad_(True)
    y = torch.tensor([0, 1, 1])
    weights = torch.tensor([1.0, 2.0], dtype=torch.float64)
    # input gradients
    assert _gradcheck(lambda v: weighted_cross_entropy(net.logits(v), y, weights), x)
    # parameter gradients, central differences
    loss = weighted_cross_entropy(net.logits(x.detach()), y, weights)
    grads = torch.autograd.grad(loss, list(net.parameters()))
    eps, max_err = 1e-5, 0.0
    with torch.no_grad():
        for param, grad in zip(net.parameters(), grads):
            flat, flat_grad = param.view(-1), grad.reshape(-1)
            for i in range(0, flat.numel(), max(1, flat.numel() // 5)):
                orig = flat[i].item()
                flat[i] = orig + eps
                up = weighted_cross_entropy(net.logits(x.detach()), y, weights).item()
                flat[i] = orig - eps
                down = weighted_cross_entropy(net.logits(x.detach()), y, weights).item()
                flat[i] = orig
                numeric = (up - down) / (2 * eps)
                max_err = max(max_err, abs(numeric - flat_grad[i].item()) / max(1e-6, abs(numeric), abs(flat_grad[i].item())))
    assert max_err < 1e-4


# ========================================================================= #
# LOSS                                                                      #
# ========================================================================= #


def test_perfect_prediction_has_zero_loss():
    logits = torch.tensor([[60.0, -60.0], [-60.0, 60.0]], dtype=torch.float64)
    assert weighted_cross_entropy(logits, torch.tensor([0, 1])) < 1e-40


def test_class_weights_are_linear():
    logits = _randn(10, 2, seed=5)
    y = torch.tensor([0, 1] * 5)
    base = weighted_cross_entropy(logits, y, torch.tensor([1.0, 1.0], dtype=torch.float64))
    doubled = weighted_cross_entropy(logits, y, torch.tensor([1.0, 2.0], dtype=torch.float64))
    lgg_term = weighted_cross_entropy(logits, y, torch.tensor([0.0, 1.0], dtype=torch.float64))
    assert torch.allclose(doubled - base, lgg_term, atol=1e-12)
    assert torch.allclose(base, nn.functional.cross_entropy(logits, y), atol=1e-12)


def test_inverse_frequency_weights():
    weights = inverse_frequency_weights([0, 0, 0, 1])
    assert np.allclose(weights, [4 / 6, 4 / 2])
    with pytest.raises(ValueError):
        inverse_frequency_weights([1, 1, 1])


# ========================================================================= #
# TRAINING                                                                  #
# ========================================================================= #


def test_optimizer_registry():
    assert registry.OPTIMIZERS['adam'] is torch.optim.Adam
    assert registry.OPTIMIZERS['sgd_momentum'].keywords == {'momentum': 0.9}
    assert registry.resolve(registry.OPTIMIZERS, 'torch.optim.AdamW') is torch.optim.AdamW
    with pytest.raises(KeyError):
        registry.resolve(registry.OPTIMIZERS, 'not_an_optimizer')
    with pytest.raises(KeyError):
        TrainConfig(class_weights='balanced')
    with pytest.raises(ValueError):
        TrainConfig(epochs=0)


def test_zero_learning_rate_keeps_parameters():
    x, y = _separable_features()
    config = TrainConfig(epochs=3, batch_size=8, lr=0.0, val_fraction=0, seed=3)
    torch.manual_seed(0)
    initial = make_network(MlpSpec(in_channels=3))
    before = {k: v.clone() for k, v in initial.state_dict().items()}
    model, history, _ = fit(MlpSpec(in_channels=3), x, y, config, model=initial)
    assert len(history) == 3
    for k, v in model.state_dict().items():
        assert torch.equal(v, before[k])


def test_zero_learning_rate_keeps_cnn_parameters():
    rng = np.random.default_rng(0)
    x, y = rng.normal(size=(10, 4, 8, 8)), np.arange(10) % 2
    net = make_network(_tiny_spec())
    before = {k: v.clone() for k, v in net.named_parameters()}
    model, _, _ = fit(net.spec, x, y, TrainConfig(epochs=2, batch_size=3, lr=0.0, val_fraction=0), model=net)
    for k, v in model.named_parameters():
        assert torch.equal(v, before[k])


def test_training_is_deterministic():
    x, y = _separable_features(seed=1)
    config = TrainConfig(epochs=4, batch_size=8, lr=1e-2, val_fraction=0, seed=5)
    a, hist_a, _ = fit(MlpSpec(in_channels=3, hidden_units=8), x, y, config)
    b, hist_b, _ = fit(MlpSpec(in_channels=3, hidden_units=8), x, y, config)
    for (ka, va), (kb, vb) in zip(a.state_dict().items(), b.state_dict().items()):
        assert ka == kb and torch.equal(va, vb)
    assert hist_a == hist_b
    c, _, _ = fit(MlpSpec(in_channels=3, hidden_units=8), x, y, TrainConfig(epochs=4, batch_size=8, lr=1e-2, val_fraction=0, seed=6))
    assert not torch.equal(a.model[0].weight, c.model[0].weight)


def test_training_learns_separable_set():
    x, y = _separable_features(n=60, seed=2)
    model, history, best_epoch = fit(MlpSpec(in_channels=3, hidden_units=8), x, y, TrainConfig(epochs=30, batch_size=10, lr=1e-2, val_fraction=0))
    assert history[-1]['loss'] < history[0]['loss']
    assert 1 <= best_epoch <= 30
    probs = model(torch.as_tensor(x))
    assert (probs.argmax(dim=1).numpy() == y).mean() == 1.0


def test_best_epoch_uses_validation_loss():
    x, y = _separable_features(n=40, seed=3)
    xv, yv = _separable_features(n=20, seed=4)
    _, history, best_epoch = fit(MlpSpec(in_channels=3), x, y, TrainConfig(epochs=5, batch_size=8, lr=1e-2), x_val=xv, y_val=yv)
    val_losses = [h['val_loss'] for h in history]
    assert best_epoch == int(np.argmin(val_losses)) + 1
    assert all({'loss', 'accuracy', 'val_loss', 'val_accuracy'} <= set(h) for h in history)


def test_nan_loss_aborts_training():
    x, y = _separable_features()
    x[3, 1] = np.nan
    with pytest.raises(TrainingDivergedError):
        fit(MlpSpec(in_channels=3), x, y, TrainConfig(epochs=2, batch_size=64, val_fraction=0))


def test_empty_training_set():
    with pytest.raises(ValueError):
        fit(MlpSpec(in_channels=3), np.zeros((0, 3)), np.zeros(0), TrainConfig())


# ========================================================================= #
# EVALUATION & FILES                                                        #
# ========================================================================= #


def _feature_patch_set(features: np.ndarray, labels: np.ndarray) -> PatchSet:
    n, c = features.shape
    return PatchSet(
        patches=features.reshape(n, 1, 1, c), masks=np.ones((n, 1, 1), dtype=bool),
        labels=labels, tile_ids=np.arange(n), class_ids=np.where(labels == 1, 6, 1),
        scene_ids=np.array(['s'] * n), patient_ids=np.array(['p'] * n), channels=np.arange(c),
    )


def test_constant_lgg_network_metrics():
    labels = np.array([1] * 1528 + [0] * 523)
    model = TileMLP(MlpSpec(in_channels=2)).double()
    with torch.no_grad():
        model.model[2].weight.zero_()
        model.model[2].bias.copy_(torch.tensor([0.0, 1.0]))
    network = TrainedNetwork(spec=model.spec, model=model, channels=np.arange(2))
    test_set = _feature_patch_set(np.random.default_rng(0).normal(size=(2051, 2)), labels)
    counts, metrics = evaluate_network(network, test_set)
    assert (counts.tp, counts.fp, counts.tn, counts.fn) == (1528, 523, 0, 0)
    assert metrics['recall'] == 1.0
    assert metrics['precision'] == pytest.approx(1528 / 2051)
    # shared oracle with the classical evaluation
    assert evaluate(np.ones(2051, dtype=int), labels)[0] == counts
    with pytest.raises(ValueError):
        evaluate_network(network, test_set.subset([]))


def test_network_file_round_trip(tmp_path):
    torch.manual_seed(0)
    model = make_network(_tiny_spec()).eval()
    network = TrainedNetwork(spec=model.spec, model=model, channels=np.array([3, 5, 7, 9]), history=[{'epoch': 1, 'loss': 0.5}], best_epoch=1, seed=2)
    loaded = load_network(save_network(network, tmp_path / 'cnn.pt'))
    assert loaded.spec == network.spec
    assert np.array_equal(loaded.channels, network.channels)
    assert loaded.history == network.history
    x = _randn(4, 4, 8, 8).numpy()
    assert np.array_equal(loaded.predict_proba(x), network.predict_proba(x))
    with pytest.raises(FileExistsError):
        save_network(network, tmp_path / 'cnn.pt', overwrite=False)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
