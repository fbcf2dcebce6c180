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
from dataclasses import field
from dataclasses import replace
from pathlib import Path
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence
from typing import Union

import numpy as np
from joblib import Parallel
from joblib import delayed
from tqdm import tqdm

from hyperglio.dataset import FOCUS_CLASSES
from hyperglio.dataset import NormalizationParams
from hyperglio.dataset import PatchSet
from hyperglio.dataset import Scene
from hyperglio.dataset import segment_cube
from hyperglio.dataset import tile_patch_set
from hyperglio.ensemble._threshold import PredictionLabel
from hyperglio.ensemble._threshold import ThresholdedPrediction
from hyperglio.ensemble._threshold import check_threshold
from hyperglio.ensemble._threshold import threshold_labels
from hyperglio.frameworks import TrainConfig
from hyperglio.frameworks import TrainedNetwork
from hyperglio.frameworks import load_network
from hyperglio.frameworks import train_network
from hyperglio.model import NetworkSpec
from hyperglio.model import spec_to_dict
from hyperglio.superpixel import SlicParams
from hyperglio.superpixel import TileMap
from hyperglio.util.inout.files import ensure_dir
from hyperglio.util.inout.files import read_json
from hyperglio.util.inout.files import write_json
from hyperglio.util.profiling import Timer
from hyperglio.util.seeds import derive_seed


log = logging.getLogger(__name__)


ENSEMBLE_FILE_VERSION = 1
MANIFEST_NAME = 'manifest.json'
DEFAULT_TAUS = (0.6, 0.7, 0.8, 0.9)


class EnsembleMemberError(RuntimeError):
    """Raised when training an ensemble member fails, carries the member index."""

    def __init__(self, message: str, member: Optional[int] = None):
        super().__init__(message)
        self.member = member

    def __reduce__(self):
        return self.__class__, (self.args[0], self.member)


# ========================================================================= #
# Ensemble                                                                  #
# ========================================================================= #


def _norm_dict(normalization: Optional[NormalizationParams]):
    return None if (normalization is None) else normalization.to_dict()


@dataclass(eq=False)
class Ensemble(object):
    """
    Networks with the same spec, channels and normalization that differ
    only in their initialization. Class probabilities are averaged over
    the members.
    """

    members: List[TrainedNetwork]
    master_seed: Optional[int] = None
    meta: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.members) == 0:
            raise ValueError('an ensemble needs at least one member')
        first = self.members[0]
        for i, member in enumerate(self.members[1:], start=1):
            if spec_to_dict(member.spec) != spec_to_dict(first.spec):
                raise ValueError(f'member {i} has spec {member.spec}, expected: {first.spec}')
            if not np.array_equal(member.channels, first.channels):
                raise ValueError(f'member {i} uses channels {member.channels.tolist()}, expected: {first.channels.tolist()}')
            if _norm_dict(member.normalization) != _norm_dict(first.normalization):
                raise ValueError(f'member {i} uses different normalization parameters')

    def __len__(self):
        return len(self.members)

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def kind(self) -> str:
        return 'ensemble'

    @property
    def spec(self):
        return self.members[0].spec

    @property
    def name(self) -> str:
        return f'ensemble_{self.spec.name}_x{self.size}'

    @property
    def channels(self) -> np.ndarray:
        return self.members[0].channels

    @property
    def normalization(self) -> Optional[NormalizationParams]:
        return self.members[0].normalization

    @property
    def member_seeds(self) -> List[Optional[int]]:
        return [m.seed for m in self.members]

    def prepare(self, patch_set: PatchSet) -> PatchSet:
        return self.members[0].prepare(patch_set)

    def member_probabilities(self, patch_set: PatchSet) -> np.ndarray:
        """(K, N, 2) class probabilities of every member."""
        x = self.members[0].inputs(patch_set)
        return np.stack([m.predict_proba(x) for m in self.members])

    def predict_patch_set(self, patch_set: PatchSet) -> np.ndarray:
        return mean_probabilities(self.member_probabilities(patch_set))

    def predict_thresholded(self, patch_set: PatchSet, tau: float) -> ThresholdedPrediction:
        return predict_thresholded(self, patch_set, tau)

    def save(self, path: Union[str, Path], overwrite: bool = True) -> Path:
        return save_ensemble(self, path, overwrite=overwrite)

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'Ensemble':
        return load_ensemble(path)


def mean_probabilities(member_probs: np.ndarray) -> np.ndarray:
    """Average over the member axis, sorting first makes the sum independent of member order."""
    member_probs = np.asarray(member_probs, dtype='float64')
    return np.sort(member_probs, axis=0).mean(axis=0)


def predict_thresholded(ensemble: Ensemble, patch_set: PatchSet, tau: float) -> ThresholdedPrediction:
    tau = check_threshold(tau)
    members = ensemble.member_probabilities(patch_set)
    mean = mean_probabilities(members)
    return ThresholdedPrediction(labels=threshold_labels(mean, tau), mean=mean, members=members, tau=tau)


# ========================================================================= #
# Training                                                                  #
# ========================================================================= #


def _train_member(member, seed, spec, train_set, config, val_set, normalization):
    try:
        with Timer(f'ensemble member {member}'):
            return train_network(spec, train_set, replace(config, seed=seed, data_seed=config.shuffle_seed), val_set=val_set, normalization=normalization)
    except Exception as e:
        raise EnsembleMemberError(f'ensemble member {member} (seed={seed}) failed to train: {type(e).__name__}: {e}', member=member) from e


def train_ensemble(
    spec: NetworkSpec,
    train_set: PatchSet,
    config: TrainConfig,
    k: int = 10,
    master_seed: int = 0,
    val_set: Optional[PatchSet] = None,
    normalization: Optional[NormalizationParams] = None,
    member_seeds: Optional[Sequence[int]] = None,
    n_jobs: int = 1,
    progress: bool = False,
) -> Ensemble:
    """
    Train `k` networks whose initialization seeds are derived from the master
    seed. The validation split and batch order follow the data seed of
    `config` and are shared by all members.
    """
    if k < 2:
        raise ValueError(f'an ensemble needs at least 2 members, got: {k}')
    if member_seeds is None:
        member_seeds = [derive_seed(master_seed, i) for i in range(k)]
    elif len(member_seeds) != k:
        raise ValueError(f'got {len(member_seeds)} member seeds for {k} members')
    jobs = (
        delayed(_train_member)(i, int(s), spec, train_set, config, val_set, normalization)
        for i, s in enumerate(tqdm(member_seeds, desc='ensemble', disable=not progress))
    )
    members = Parallel(n_jobs=n_jobs)(jobs)
    log.info(f'trained ensemble of {k} {spec.name} members from master seed {master_seed}')
    return Ensemble(members=list(members), master_seed=master_seed)


# ========================================================================= #
# Coverage                                                                  #
# ========================================================================= #


@dataclass(frozen=True, eq=False)
class CoverageReport(object):
    """
    Per threshold unknown rates over all tiles, the in-distribution (focus
    class) tiles and the out-of-distribution (other annotated class) tiles,
    and the accuracy over the confident in-distribution tiles.
    """

    rows: List[dict]
    tile_count: int
    in_distribution_count: int
    ood_count: int
    report_id: str = 'coverage'

    def to_dict(self) -> dict:
        return dict(
            report_id=self.report_id,
            tile_count=self.tile_count,
            in_distribution_count=self.in_distribution_count,
            ood_count=self.ood_count,
            thresholds=self.rows,
        )

    def save_json(self, path: Union[str, Path]) -> Path:
        return write_json(path, self.to_dict())

    def row(self, tau: float) -> dict:
        for r in self.rows:
            if np.isclose(r['tau'], tau):
                return r
        raise KeyError(f'no coverage row for threshold: {tau}')


def _nan_to_none(value: float):
    return None if np.isnan(value) else float(value)


def coverage_report(ensemble: Ensemble, tiles: PatchSet, taus: Sequence[float] = DEFAULT_TAUS, report_id: str = 'coverage') -> CoverageReport:
    """
    Unknown fractions and selective accuracy of an ensemble for each threshold.
    Tiles of a focus class are in-distribution, tiles of any other annotated
    tissue class are out-of-distribution, background and mixed tiles only
    count towards the overall fraction.
    """
    if len(tiles) == 0:
        raise ValueError('cannot compute coverage over an empty tile set')
    taus = sorted(check_threshold(t) for t in taus)
    in_dist = np.isin(tiles.class_ids, list(FOCUS_CLASSES))
    ood = (~in_dist) & (tiles.class_ids > 0)
    members = ensemble.member_probabilities(tiles)
    mean = mean_probabilities(members)
    rows = []
    for tau in taus:
        pred = ThresholdedPrediction(labels=threshold_labels(mean, tau), mean=mean, members=members, tau=tau)
        rows.append(dict(
            tau=tau,
            unknown_fraction=pred.unknown_fraction(),
            in_distribution_unknown_fraction=_nan_to_none(pred.unknown_fraction(in_dist)),
            ood_unknown_fraction=_nan_to_none(pred.unknown_fraction(ood)),
            confident_accuracy=_nan_to_none(pred.confident_accuracy(tiles.labels, where=in_dist)),
            **{f'{k}_count': v for k, v in pred.label_counts().items()},
        ))
    all_acc = float(np.mean(np.argmax(mean[in_dist], axis=1) == tiles.labels[in_dist])) if np.any(in_dist) else float('nan')
    log.info(f'{report_id}: {len(tiles)} tiles, unknown fractions {[round(r["unknown_fraction"], 4) for r in rows]} for thresholds {taus}, accuracy over all in-distribution tiles {all_acc:.4f}')
    return CoverageReport(rows=rows, tile_count=len(tiles), in_distribution_count=int(in_dist.sum()), ood_count=int(ood.sum()), report_id=report_id)


def scene_coverage(
    ensemble: Ensemble,
    scene: Scene,
    taus: Sequence[float] = DEFAULT_TAUS,
    slic: Optional[SlicParams] = None,
    tile_map: Optional[TileMap] = None,
) -> CoverageReport:
    """Coverage over every fitting tile of a re-segmented annotated scene."""
    if tile_map is None:
        tile_map = segment_cube(scene.cube, slic=slic, mask=scene.mask)
    tiles, _ = tile_patch_set(scene.cube, tile_map, channels=ensemble.channels, scene_id=scene.scene_id, patient_id=scene.patient_id)
    return coverage_report(ensemble, tiles, taus, report_id=f'coverage_{scene.scene_id}')


# ========================================================================= #
# Ensemble Directories                                                      #
# ========================================================================= #


def _member_name(i: int) -> str:
    return f'member_{i:02d}.pt'


def save_ensemble(ensemble: Ensemble, path: Union[str, Path], overwrite: bool = True) -> Path:
    path = ensure_dir(path)
    files = []
    for i, member in enumerate(ensemble.members):
        member.save(path / _member_name(i), overwrite=overwrite)
        files.append(_member_name(i))
    write_json(path / MANIFEST_NAME, dict(
        version=ENSEMBLE_FILE_VERSION,
        size=ensemble.size,
        master_seed=ensemble.master_seed,
        member_seeds=ensemble.member_seeds,
        spec=spec_to_dict(ensemble.spec),
        channels=ensemble.channels.tolist(),
        members=files,
    ), overwrite=overwrite)
    return path


def load_ensemble(path: Union[str, Path]) -> Ensemble:
    path = Path(path)
    manifest = read_json(path / MANIFEST_NAME)
    if manifest.get('version') != ENSEMBLE_FILE_VERSION:
        raise ValueError(f'unsupported ensemble version: {manifest.get("version")}, expected: {ENSEMBLE_FILE_VERSION}')
    members = [load_network(path / name) for name in manifest['members']]
    if len(members) != manifest['size']:
        raise ValueError(f'ensemble manifest declares {manifest["size"]} members but lists {len(members)}')
    return Ensemble(members=members, master_seed=manifest['master_seed'])


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
