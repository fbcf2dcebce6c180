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
from typing import Optional
from typing import Union

import numpy as np
import torch
from captum.attr import GradientShap
from tqdm import tqdm

from hyperglio.dataset import BinaryLabel
from hyperglio.dataset import PatchSet
from hyperglio.frameworks import TrainedNetwork
from hyperglio.frameworks import evaluate_network
from hyperglio.util.seeds import derive_seed
from hyperglio.util.seeds import make_rng
from hyperglio.util.seeds import temp_seed


log = logging.getLogger(__name__)


# ========================================================================= #
# Baselines                                                                 #
# ========================================================================= #


def make_baselines(train_set: PatchSet, per_class: int = 32, seed: int = 0, include_zeros: bool = True) -> np.ndarray:
    """
    Random training patches of each class plus the all zero patch,
    as (B, C, H, W) model inputs.
    """
    if per_class < 0:
        raise ValueError(f'per_class must be non-negative, got: {per_class}')
    rng = make_rng(seed, 21)
    chosen = []
    for label in BinaryLabel:
        idx = np.flatnonzero(train_set.labels == label)
        chosen.append(np.sort(rng.permutation(idx)[:per_class]))
    patches = train_set.subset(np.concatenate(chosen)).patches.transpose(0, 3, 1, 2).astype('float64')
    if include_zeros:
        patches = np.concatenate([patches, np.zeros((1, *patches.shape[1:]))], axis=0)
    if len(patches) == 0:
        raise ValueError('the baseline set is empty')
    return patches


# ========================================================================= #
# Expected Gradients                                                        #
# ========================================================================= #


def expected_gradients(
    model: torch.nn.Module,
    inputs: Union[np.ndarray, torch.Tensor],
    baselines: Union[np.ndarray, torch.Tensor],
    n_samples: int = 64,
    seed: int = 0,
    target: Optional[Union[int, np.ndarray]] = None,
    progress: bool = False,
) -> np.ndarray:
    """
    Per-channel attribution of each input (N, C, H, W) -> (N, C).

    For every sample a baseline b and a mix a ~ U(0, 1) are drawn and
    (x - b) * grad f_target(b + a (x - b)) is accumulated, the average over
    samples is summed over the spatial dimensions. The target defaults to the
    predicted class. Each example is seeded separately from `seed`.
    """
    if n_samples < 1:
        raise ValueError(f'n_samples must be >= 1, got: {n_samples}')
    baselines = torch.as_tensor(np.asarray(baselines) if not torch.is_tensor(baselines) else baselines)
    if len(baselines) == 0:
        raise ValueError('at least one baseline is required')
    dtype = next(model.parameters()).dtype
    inputs = torch.as_tensor(np.asarray(inputs) if not torch.is_tensor(inputs) else inputs).to(dtype)
    baselines = baselines.to(dtype)
    if inputs.shape[1:] != baselines.shape[1:]:
        raise ValueError(f'baseline shape {tuple(baselines.shape[1:])} does not match input shape {tuple(inputs.shape[1:])}')
    was_training = model.training
    model.eval()
    try:
        if target is None:
            with torch.no_grad():
                target = model(inputs).argmax(dim=1).numpy()
        targets = np.broadcast_to(np.asarray(target, dtype='int64'), (len(inputs),))
        explainer = GradientShap(model)
        scores = np.zeros(inputs.shape[:2], dtype='float64')
        for i in tqdm(range(len(inputs)), desc='attribution', disable=not progress):
            # captum draws from the global numpy and torch generators
            with temp_seed(derive_seed(seed, i)):
                attr = explainer.attribute(
                    inputs[i:i+1],
                    baselines=baselines,
                    n_samples=n_samples,
                    stdevs=0.0,
                    target=int(targets[i]),
                )
            scores[i] = attr.detach().sum(dim=(2, 3)).numpy()[0]
    finally:
        model.train(was_training)
    return scores


def model_channel_scores(
    network: TrainedNetwork,
    test_set: PatchSet,
    baselines: np.ndarray,
    n_samples: int = 64,
    seed: int = 0,
    progress: bool = False,
) -> np.ndarray:
    """
    Importance of each input channel for one network over a whole test set,
    the absolute signed channel sum of every example averaged over examples.
    """
    if network.kind != 'cnn':
        raise ValueError(f'channel attribution needs a tile cnn, got: {network.kind}')
    if not network.history:
        raise ValueError('the network has not been trained')
    if len(test_set) == 0:
        raise ValueError('cannot attribute an empty test set')
    scores = expected_gradients(network.model, network.inputs(test_set), baselines, n_samples=n_samples, seed=seed, progress=progress)
    return np.abs(scores).mean(axis=0)


def attribute_networks(
    networks: dict,
    test_set: PatchSet,
    baselines: np.ndarray,
    n_samples: int = 64,
    seed: int = 0,
    progress: bool = False,
) -> dict:
    """{model_id: (channel scores, test accuracy)} for each network."""
    results = {}
    for i, (model_id, network) in enumerate(networks.items()):
        _, metrics = evaluate_network(network, test_set)
        scores = model_channel_scores(network, test_set, baselines, n_samples=n_samples, seed=derive_seed(seed, i), progress=progress)
        results[model_id] = (scores, metrics['accuracy'])
        log.info(f'attributed {model_id}: accuracy={metrics["accuracy"]:.4f} top channel={int(np.argmax(scores))}')
    return results


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
