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
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field
from itertools import combinations
from pathlib import Path
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence
from typing import Union

import numpy as np
import pandas as pd
from scipy import stats

from hyperglio.cube import AnnotationMask
from hyperglio.cube import CLASS_NAMES
from hyperglio.cube import HsiCube
from hyperglio.spectral._distances import mean_pairwise_sam
from hyperglio.spectral._distances import mean_spectrum
from hyperglio.spectral._distances import sam_distance
from hyperglio.util.inout.files import AtomicSaveFile
from hyperglio.util.inout.files import write_json
from hyperglio.util.seeds import make_rng


log = logging.getLogger(__name__)


# maximum number of pixels per class used for the pairwise intra-cluster distance
DEFAULT_MAX_SAMPLES = 2000


# ========================================================================= #
# Report                                                                    #
# ========================================================================= #


@dataclass(frozen=True)
class ClassStats(object):
    class_id: int
    count: int
    sampled: int
    intra_sam: float


@dataclass(frozen=True)
class PairSeparability(object):
    class_a: int
    class_b: int
    intra_sam_a: float
    intra_sam_b: float
    centroid_sam: float
    chi2: float
    dof: int
    p_value: float

    @property
    def separated(self) -> bool:
        """Inter-cluster centroid distance exceeds both intra-cluster distances."""
        return self.centroid_sam > max(self.intra_sam_a, self.intra_sam_b)


@dataclass(frozen=True)
class SeparabilityReport(object):
    level: str
    classes: List[ClassStats] = field(default_factory=list)
    pairs: List[PairSeparability] = field(default_factory=list)

    def pair(self, class_a: int, class_b: int) -> PairSeparability:
        for p in self.pairs:
            if {p.class_a, p.class_b} == {class_a, class_b}:
                if p.class_a == class_a:
                    return p
                # symmetric view of the same pair
                return PairSeparability(
                    class_a=p.class_b, class_b=p.class_a,
                    intra_sam_a=p.intra_sam_b, intra_sam_b=p.intra_sam_a,
                    centroid_sam=p.centroid_sam, chi2=p.chi2, dof=p.dof, p_value=p.p_value,
                )
        raise KeyError(f'no separability entry for class pair: ({class_a}, {class_b})')

    def to_dict(self) -> dict:
        return {
            'level': self.level,
            'classes': [asdict(c) for c in self.classes],
            'pairs': [asdict(p) for p in self.pairs],
        }

    def to_dataframe(self) -> pd.DataFrame:
        rows = []
        for p in self.pairs:
            rows.append(dict(
                level=self.level,
                class_a=p.class_a,
                class_b=p.class_b,
                name_a=CLASS_NAMES.get(p.class_a, str(p.class_a)),
                name_b=CLASS_NAMES.get(p.class_b, str(p.class_b)),
                intra_sam_a=p.intra_sam_a,
                intra_sam_b=p.intra_sam_b,
                centroid_sam=p.centroid_sam,
                chi2=p.chi2,
                dof=p.dof,
                p_value=p.p_value,
            ))
        return pd.DataFrame(rows, columns=['level', 'class_a', 'class_b', 'name_a', 'name_b', 'intra_sam_a', 'intra_sam_b', 'centroid_sam', 'chi2', 'dof', 'p_value'])

    def save_tsv(self, path: Union[str, Path]) -> Path:
        with AtomicSaveFile(path, open_mode='w', overwrite=True) as (_, fp):
            self.to_dataframe().to_csv(fp, sep='\t', index=False, float_format='%.10g')
        return Path(path)

    def save_json(self, path: Union[str, Path]) -> Path:
        return write_json(path, self.to_dict())


# ========================================================================= #
# Statistics                                                                #
# ========================================================================= #


def chi2_mean_spectra(a: np.ndarray, b: np.ndarray):
    """
    Two-sample comparison of mean spectra, summed over bands:
        chi2 = sum_b (mu_a - mu_b)^2 / (var_a / n_a + var_b / n_b)
    with `bands` degrees of freedom. Bands with zero pooled variance contribute
    0 when the means agree and infinity otherwise.
    """
    a, b = np.asarray(a, dtype='float64'), np.asarray(b, dtype='float64')
    if a.shape[0] < 2 or b.shape[0] < 2:
        raise ValueError('chi2 comparison needs at least 2 samples per class')
    diff2 = (a.mean(axis=0) - b.mean(axis=0)) ** 2
    denom = a.var(axis=0, ddof=1) / a.shape[0] + b.var(axis=0, ddof=1) / b.shape[0]
    with np.errstate(divide='ignore', invalid='ignore'):
        terms = np.where(denom > 0, diff2 / np.where(denom > 0, denom, 1), np.where(diff2 > 0, np.inf, 0.0))
    chi2 = float(terms.sum())
    dof = int(a.shape[1])
    p_value = float(stats.chi2.sf(chi2, dof)) if np.isfinite(chi2) else 0.0
    return chi2, dof, float(np.clip(p_value, 0.0, 1.0))


def _subsample(pixels: np.ndarray, max_samples: Optional[int], rng: np.random.Generator) -> np.ndarray:
    if (max_samples is None) or (pixels.shape[0] <= max_samples):
        return pixels
    idxs = np.sort(rng.choice(pixels.shape[0], size=max_samples, replace=False))
    return pixels[idxs]


def separability_from_groups(
    groups: Dict[int, np.ndarray],
    max_samples: Optional[int] = DEFAULT_MAX_SAMPLES,
    seed: int = 0,
    level: str = 'pixel',
) -> SeparabilityReport:
    """
    Intra-cluster mean pairwise spectral angle per class, and per class pair the
    angle between class centroids with a chi2 comparison of the mean spectra.
    """
    if len(groups) < 2:
        raise ValueError(f'separability needs at least two classes, got: {sorted(groups)}')
    class_stats, sampled, centroids = {}, {}, {}
    for i, (class_id, pixels) in enumerate(sorted(groups.items())):
        pixels = np.asarray(pixels, dtype='float64')
        if pixels.ndim != 2 or pixels.shape[0] < 2:
            raise ValueError(f'class {class_id} is degenerate, at least 2 pixels are required, got: {pixels.shape[0] if pixels.ndim == 2 else 0}')
        # each class draws from its own stream so results do not depend on class order
        sampled[class_id] = _subsample(pixels, max_samples, make_rng(seed, int(class_id)))
        centroids[class_id] = mean_spectrum(pixels)
        class_stats[class_id] = ClassStats(
            class_id=int(class_id),
            count=int(pixels.shape[0]),
            sampled=int(sampled[class_id].shape[0]),
            intra_sam=mean_pairwise_sam(sampled[class_id]),
        )
    pairs = []
    for ca, cb in combinations(sorted(groups), 2):
        chi2, dof, p_value = chi2_mean_spectra(groups[ca], groups[cb])
        pairs.append(PairSeparability(
            class_a=int(ca),
            class_b=int(cb),
            intra_sam_a=class_stats[ca].intra_sam,
            intra_sam_b=class_stats[cb].intra_sam,
            centroid_sam=sam_distance(centroids[ca], centroids[cb]),
            chi2=chi2,
            dof=dof,
            p_value=p_value,
        ))
    return SeparabilityReport(level=level, classes=[class_stats[c] for c in sorted(class_stats)], pairs=pairs)


def cluster_separability(
    cube: HsiCube,
    mask: AnnotationMask,
    classes: Sequence[int],
    max_samples: Optional[int] = DEFAULT_MAX_SAMPLES,
    seed: int = 0,
) -> SeparabilityReport:
    """
    Pixel-level separability of annotated classes, only valid pixels are used.
    """
    mask.check_matches(cube)
    classes = sorted(set(int(c) for c in classes))
    groups = {}
    for c in classes:
        selected = cube.valid_mask & (mask.labels == c)
        if not np.any(selected):
            raise ValueError(f'class {c} ({CLASS_NAMES.get(c, "?")}) has no valid pixels in the scene')
        groups[c] = np.asarray(cube.data[selected], dtype='float64')
    report = separability_from_groups(groups, max_samples=max_samples, seed=seed, level='pixel')
    for p in report.pairs:
        log.debug(f'separability {p.class_a}-{p.class_b}: centroid={p.centroid_sam:.4g} intra=({p.intra_sam_a:.4g}, {p.intra_sam_b:.4g}) chi2={p.chi2:.4g} p={p.p_value:.3g}')
    return report


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
