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

from dataclasses import replace

import numpy as np
import pytest
import torch

from hyperglio.dataset import BinaryLabel
from hyperglio.dataset import NormalizationParams
from hyperglio.dataset import PatchSet
from hyperglio.dataset import SplitSpec
from hyperglio.dataset import TileDataset
from hyperglio.dataset import build_dataset
from hyperglio.dataset import split_indices
from hyperglio.dataset import standardize
from hyperglio.dataset import to_binary_label
from hyperglio.dataset.data import ClassModel
from hyperglio.dataset.data import PhantomConfig
from hyperglio.dataset.data import generate_scene
from hyperglio.dataset.data import make_phantom_config
from hyperglio.dataset.util import load_patch_set
from hyperglio.dataset.util import save_patch_set


# ========================================================================= #
# HELPERS                                                                   #
# ========================================================================= #


def _scenes(count=3, size=128):
    return [
        generate_scene(make_phantom_config('standard', seed=i, size=size, patient_id=f'P{i}')).as_scene()
        for i in range(count)
    ]


def _random_patch_set(n=20, c=5, size=8, seed=0, dtype='float64') -> PatchSet:
    rng = np.random.default_rng(seed)
    masks = np.zeros((n, size, size), dtype='bool')
    masks[:, 2:6, 1:7] = True
    patches = rng.normal(3.0, 2.0, size=(n, size, size, c)).astype(dtype)
    patches[~masks] = 0
    return PatchSet(
        patches=patches, masks=masks,
        labels=np.arange(n) % 2, tile_ids=np.arange(n), class_ids=np.where(np.arange(n) % 2, 6, 1),
        scene_ids=np.array(['s0'] * n), patient_ids=np.array(['p0'] * n), channels=np.arange(c),
    )


# ========================================================================= #
# LABELS & SPLITS                                                           #
# ========================================================================= #


def test_binary_label_mapping():
    assert to_binary_label(1) == BinaryLabel.HEALTHY
    assert to_binary_label(13) == BinaryLabel.HEALTHY
    assert to_binary_label(6) == BinaryLabel.LGG
    assert to_binary_label(8) == BinaryLabel.LGG
    for c in [0, 2, 3, 4, 5, 7, 9, 10, 11, 12]:
        with pytest.raises(ValueError):
            to_binary_label(c)


def test_split_sizes_match_reference_counts():
    labels = np.arange(8671) % 3 == 0
    train, test = split_indices(labels, SplitSpec(train_fraction=6620 / 8671, seed=0))
    assert (len(train), len(test)) == (6620, 2051)
    assert len(np.intersect1d(train, test)) == 0
    assert np.array_equal(np.union1d(train, test), np.arange(8671))


def test_split_determinism():
    labels = np.arange(100) % 2
    a = split_indices(labels, SplitSpec(train_fraction=0.7, seed=4))
    b = split_indices(labels, SplitSpec(train_fraction=0.7, seed=4))
    c = split_indices(labels, SplitSpec(train_fraction=0.7, seed=5))
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert not np.array_equal(a[0], c[0])


def test_split_errors():
    with pytest.raises(ValueError):
        SplitSpec(train_fraction=1.0)
    with pytest.raises(ValueError):
        SplitSpec(train_fraction=0.0)
    with pytest.raises(KeyError):
        SplitSpec(mode='stratified')
    # only one positive example, one partition lacks it
    with pytest.raises(ValueError, match='partition has no'):
        split_indices([0] * 50 + [1], SplitSpec(train_fraction=0.5))
    # a single patient cannot be split
    with pytest.raises(ValueError):
        split_indices([0, 1, 0, 1], SplitSpec(mode='by-patient', train_fraction=0.5), patient_ids=['a'] * 4)


def test_split_by_patient_holds_out_patients():
    labels = np.array([0, 1] * 20)
    patients = np.repeat([f'p{i}' for i in range(4)], 10)
    train, test = split_indices(labels, SplitSpec(mode='by-patient', train_fraction=0.5, seed=1), patient_ids=patients)
    assert len(train) + len(test) == 40
    assert not set(patients[train]) & set(patients[test])
    assert len(set(patients[train])) == 2


# ========================================================================= #
# BUILD                                                                     #
# ========================================================================= #


@pytest.fixture(scope='module')
def phantom_scenes():
    return _scenes()


def test_build_dataset(phantom_scenes):
    split = SplitSpec(train_fraction=0.75, seed=2)
    data = build_dataset(phantom_scenes, split)
    assert len(data.train) > 0 and len(data.test) > 0
    total = len(data.train) + len(data.test)
    assert len(data.train) == int(round(0.75 * total))
    assert set(data.train.labels.tolist()) == {0, 1}
    assert set(data.train.class_ids.tolist()) <= {1, 6, 8, 13}
    assert data.train.patch_shape == (40, 40, 104)
    assert np.all(data.train.patches[~data.train.masks] == 0)
    assert not set(data.train.example_keys()) & set(data.test.example_keys())
    assert set(data.tile_maps) == {s.scene_id for s in phantom_scenes}
    # labels agree with the tiles they came from
    for key, class_id in zip(data.train.example_keys(), data.train.class_ids):
        scene_id, tile_id = key.split(':')
        tile = data.tile_maps[scene_id].tiles[int(tile_id)]
        assert tile.quality and tile.label == class_id
    # deterministic membership, segmentation can be reused
    again = build_dataset(phantom_scenes, split, tile_maps=data.tile_maps)
    assert again.train.example_keys() == data.train.example_keys()
    assert np.array_equal(again.test.patches, data.test.patches)


def test_build_dataset_channel_subset(phantom_scenes):
    split = SplitSpec(train_fraction=0.75, seed=2)
    full = build_dataset(phantom_scenes, split)
    channels = [10, 40, 80]
    sub = build_dataset(phantom_scenes, split, channels=channels, tile_maps=full.tile_maps)
    assert sub.train.patch_shape == (40, 40, 3)
    assert np.array_equal(sub.train.patches, full.train.patches[..., channels])
    assert np.allclose(sub.train.features(), full.train.features()[:, channels])


def test_build_dataset_errors(phantom_scenes):
    with pytest.raises(ValueError):
        build_dataset([], SplitSpec())
    single = generate_scene(PhantomConfig(height=64, width=64, regions=[], class_models={0: ClassModel()})).as_scene()
    with pytest.raises(ValueError, match='both'):
        build_dataset([single], SplitSpec())


def test_features_are_member_means(phantom_scenes):
    data = build_dataset(phantom_scenes[:1], SplitSpec(train_fraction=0.5, seed=0))
    ps = data.train
    i = 0
    member = ps.patches[i][ps.masks[i]].astype('float64')
    assert np.allclose(ps.features()[i], member.mean(axis=0), rtol=0, atol=1e-12)
    tile = data.tile_maps[ps.scene_ids[i]].tiles[ps.tile_ids[i]]
    assert np.allclose(ps.features()[i], tile.mean_spectrum, atol=1e-6)


# ========================================================================= #
# NORMALIZATION                                                             #
# ========================================================================= #


def test_standardize_train_statistics():
    train, test = _random_patch_set(seed=0), _random_patch_set(seed=1)
    train_n, test_n, params = standardize(train, test)
    member = train_n.patches[train_n.masks]
    assert np.all(np.abs(member.mean(axis=0)) < 1e-9)
    assert np.allclose(member.std(axis=0), 1.0, atol=1e-9)
    assert np.all(train_n.patches[~train_n.masks] == 0)
    assert np.all(test_n.patches[~test_n.masks] == 0)
    assert train_n.normalized and test_n.normalized


def test_standardize_no_leakage():
    train = _random_patch_set(seed=0)
    _, _, a = standardize(train, _random_patch_set(seed=1))
    _, _, b = standardize(train, _random_patch_set(seed=2, n=7))
    assert np.array_equal(a.mean, b.mean) and np.array_equal(a.std, b.std)


def test_standardize_constant_channel():
    train = _random_patch_set()
    patches = train.patches.copy()
    patches[..., 2][train.masks] = 0.7
    train = replace(train, patches=patches)
    train_n, _, params = standardize(train, train)
    assert params.std[2] == 1.0
    assert not np.any(np.isnan(train_n.patches))


def test_standardize_not_idempotent():
    train = _random_patch_set()
    params = NormalizationParams.fit(train)
    once = params.apply(train)
    twice = params.apply(once)
    assert not np.allclose(once.patches, twice.patches)


def test_normalization_params_file(tmp_path):
    params = NormalizationParams.fit(_random_patch_set())
    loaded = NormalizationParams.load(params.save(tmp_path / 'norm.npz'))
    assert np.array_equal(loaded.mean, params.mean)
    assert np.array_equal(loaded.std, params.std)
    assert np.array_equal(loaded.channels, params.channels)
    with pytest.raises(ValueError):
        params.apply(_random_patch_set(c=4))


# ========================================================================= #
# CONTAINERS & TORCH                                                        #
# ========================================================================= #


def test_patch_container_file(tmp_path):
    ps = _random_patch_set(dtype='float32')
    loaded = load_patch_set(save_patch_set(ps, tmp_path / 'patches.h5'))
    assert np.array_equal(loaded.patches, ps.patches)
    assert np.array_equal(loaded.masks, ps.masks)
    assert np.array_equal(loaded.labels, ps.labels)
    assert loaded.scene_ids.tolist() == ps.scene_ids.tolist()
    assert np.array_equal(loaded.channels, ps.channels)
    with pytest.raises(FileExistsError):
        save_patch_set(ps, tmp_path / 'patches.h5', overwrite=False)


def test_tile_dataset_items():
    ps = _random_patch_set(c=3, size=8)
    dataset = TileDataset(ps)
    item = dataset[3]
    assert item['x'].shape == (3, 8, 8)
    assert item['x'].dtype == torch.float64
    assert int(item['y']) == 1
    assert torch.equal(item['x'].permute(1, 2, 0), torch.from_numpy(ps.patches[3]))
    x, y = dataset.tensors()
    assert x.shape == (20, 3, 8, 8)
    assert torch.equal(y, torch.from_numpy(ps.labels))


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
