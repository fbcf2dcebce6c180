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
from dataclasses import dataclass
from pathlib import Path
from typing import Optional
from typing import Union

import joblib
import numpy as np
from sklearn.ensemble import RandomForestClassifier

from hyperglio.dataset import NormalizationParams
from hyperglio.dataset import PatchSet
from hyperglio.metrics import predict_labels
from hyperglio.util.inout.files import AtomicSaveFile
from hyperglio.util.profiling import Timer


log = logging.getLogger(__name__)


CLASSICAL_FILE_VERSION = 1


# ========================================================================= #
# Forest                                                                    #
# ========================================================================= #


def _check_training_labels(labels: np.ndarray):
    present = np.unique(labels)
    if len(present) < 2:
        raise ValueError(f'training requires examples of both classes, got only: {present.tolist()}')


def fit_forest(
    features: np.ndarray,
    labels: np.ndarray,
    trees: int = 100,
    seed: int = 0,
    max_features: Union[str, int, float] = 'sqrt',
    min_samples_split: int = 2,
    n_jobs: int = 1,
) -> RandomForestClassifier:
    """
    Bagged gini trees grown to purity, `sqrt(C)` candidate features per split.
    The fitted trees only depend on the seed, not on `n_jobs`.
    """
    features = np.asarray(features, dtype='float64')
    labels = np.asarray(labels, dtype='int64')
    if features.ndim != 2 or len(features) != len(labels):
        raise ValueError(f'expected (N, C) features with N labels, got: {features.shape} and {labels.shape}')
    if trees < 1:
        raise ValueError(f'the forest needs at least one tree, got: {trees}')
    _check_training_labels(labels)
    forest = RandomForestClassifier(
        n_estimators=trees,
        criterion='gini',
        max_features=max_features,
        min_samples_split=min_samples_split,
        bootstrap=True,
        random_state=seed,
        n_jobs=n_jobs,
    )
    return forest.fit(features, labels)


def vote_fractions(forest: RandomForestClassifier, features: np.ndarray) -> np.ndarray:
    """Fraction of trees voting lgg, recounted from the individual trees."""
    features = np.asarray(features, dtype='float64')
    if features.ndim != 2 or features.shape[1] != forest.n_features_in_:
        raise ValueError(f'the forest was trained on {forest.n_features_in_} features, got input of shape: {features.shape}')
    votes = np.zeros(len(features), dtype='int64')
    for tree in forest.estimators_:
        votes += forest.classes_[tree.predict(features).astype('int64')] == 1
    return votes / len(forest.estimators_)


@dataclass(eq=False)
class ForestModel(object):
    """Random forest on the mean spectra of tiles."""

    forest: RandomForestClassifier
    channels: np.ndarray
    normalization: Optional[NormalizationParams] = None
    seed: Optional[int] = None

    kind = 'rf'
    name = 'rf'

    def prepare(self, patch_set: PatchSet) -> PatchSet:
        if not np.array_equal(patch_set.channels, self.channels):
            raise ValueError(f'model channels {self.channels.tolist()} do not match patch set channels {patch_set.channels.tolist()}')
        if (self.normalization is not None) and not patch_set.normalized:
            patch_set = self.normalization.apply(patch_set)
        return patch_set

    def inputs(self, patch_set: PatchSet) -> np.ndarray:
        return self.prepare(patch_set).features()

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        p = vote_fractions(self.forest, features)
        return np.stack([1 - p, p], axis=1)

    def predict(self, features: np.ndarray):
        """Labels at the operating point, a tied vote goes to lgg, and the lgg vote fraction."""
        probs = self.predict_proba(features)
        return predict_labels(probs), probs[:, 1]

    def predict_patch_set(self, patch_set: PatchSet) -> np.ndarray:
        return self.predict_proba(self.inputs(patch_set))

    def save(self, path: Union[str, Path], overwrite: bool = True) -> Path:
        data = dict(
            version=CLASSICAL_FILE_VERSION,
            kind=self.kind,
            model=self.forest,
            channels=self.channels.tolist(),
            normalization=None if (self.normalization is None) else self.normalization.to_dict(),
            seed=self.seed,
        )
        with AtomicSaveFile(path, open_mode='wb', overwrite=overwrite) as (_, fp):
            joblib.dump(data, fp)
        return Path(path)

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'ForestModel':
        data = joblib.load(path)
        if data.get('version') != CLASSICAL_FILE_VERSION or data.get('kind') != cls.kind:
            raise ValueError(f'not a version {CLASSICAL_FILE_VERSION} random forest file: {path}')
        return cls(
            forest=data['model'],
            channels=np.asarray(data['channels'], dtype='int64'),
            normalization=None if (data['normalization'] is None) else NormalizationParams.from_dict(data['normalization']),
            seed=data['seed'],
        )


def rf_train(
    train_set: PatchSet,
    trees: int = 100,
    seed: int = 0,
    normalization: Optional[NormalizationParams] = None,
    n_jobs: int = 1,
    **forest_kwargs,
) -> ForestModel:
    if len(train_set) == 0:
        raise ValueError('cannot train on an empty training set')
    with Timer(f'rf ({trees} trees)', log_level=logging.DEBUG):
        forest = fit_forest(train_set.features(), train_set.labels, trees=trees, seed=seed, n_jobs=n_jobs, **forest_kwargs)
    return ForestModel(forest=forest, channels=np.asarray(train_set.channels, dtype='int64'), normalization=normalization, seed=seed)


def rf_predict(model: ForestModel, features: np.ndarray):
    return model.predict(features)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
