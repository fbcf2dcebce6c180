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
from pathlib import Path
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import numpy as np

from hyperglio.util.inout.files import AtomicSaveFile
from hyperglio.util.inout.files import read_json
from hyperglio.util.inout.files import write_json
from hyperglio.util.inout.files import write_text


log = logging.getLogger(__name__)


# only networks above this test accuracy contribute to the importance scores
MIN_MODEL_ACCURACY = 0.80


# ========================================================================= #
# Report                                                                    #
# ========================================================================= #


@dataclass(frozen=True, eq=False)
class AttributionReport(object):
    """Mean and spread of the normalized channel importance across networks."""

    channels: np.ndarray
    wavelengths_nm: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    model_ids: List[str]
    accuracies: Dict[str, float] = field(default_factory=dict)
    report_id: str = 'attribution'

    def __post_init__(self):
        n = len(self.channels)
        assert len(self.wavelengths_nm) == n and len(self.mean) == n and len(self.std) == n, 'one report entry per channel is required'
        assert np.all(self.std >= 0), 'standard deviations must be non-negative'

    @property
    def channel_count(self) -> int:
        return len(self.channels)

    def to_dict(self) -> dict:
        return dict(
            report_id=self.report_id,
            model_ids=list(self.model_ids),
            accuracies={k: float(v) for k, v in self.accuracies.items()},
            channels=[
                dict(channel=int(c), wavelength_nm=float(w), mean=float(m), std=float(s))
                for c, w, m, s in zip(self.channels, self.wavelengths_nm, self.mean, self.std)
            ],
        )

    @classmethod
    def from_dict(cls, d: dict) -> 'AttributionReport':
        entries = d['channels']
        return cls(
            channels=np.array([e['channel'] for e in entries], dtype='int64'),
            wavelengths_nm=np.array([e['wavelength_nm'] for e in entries], dtype='float64'),
            mean=np.array([e['mean'] for e in entries], dtype='float64'),
            std=np.array([e['std'] for e in entries], dtype='float64'),
            model_ids=list(d['model_ids']),
            accuracies=dict(d.get('accuracies', {})),
            report_id=d.get('report_id', 'attribution'),
        )

    def save_json(self, path: Union[str, Path]) -> Path:
        return write_json(path, self.to_dict())

    @classmethod
    def load_json(cls, path: Union[str, Path]) -> 'AttributionReport':
        return cls.from_dict(read_json(path))

    def plot(self, path: Union[str, Path], title: Optional[str] = None) -> Path:
        """Bar chart of the mean importance per wavelength with std error bars."""
        import matplotlib
        matplotlib.use('Agg')
        import matplotlib.pyplot as plt
        order = np.argsort(self.wavelengths_nm, kind='stable')
        wl = self.wavelengths_nm[order]
        width = float(np.min(np.diff(wl))) * 0.8 if len(wl) > 1 else 1.0
        fig, ax = plt.subplots(figsize=(12, 4))
        ax.bar(wl, self.mean[order], width=width, color='tab:blue')
        ax.errorbar(wl, self.mean[order], yerr=self.std[order], fmt='none', ecolor='tab:red', elinewidth=1)
        ax.set_xlabel('wavelength (nm)')
        ax.set_ylabel('importance')
        ax.set_title(title if title else f'channel importance over {len(self.model_ids)} models')
        fig.tight_layout()
        with AtomicSaveFile(path, open_mode='wb', overwrite=True) as (_, fp):
            fig.savefig(fp, format='png', dpi=100)
        plt.close(fig)
        return Path(path)


def aggregate_importance(
    scores: Dict[str, Tuple[np.ndarray, float]],
    channels: Sequence[int],
    wavelengths_nm: Sequence[float],
    min_accuracy: float = MIN_MODEL_ACCURACY,
    report_id: str = 'attribution',
) -> AttributionReport:
    """
    Combine per model channel scores `{model_id: (scores, accuracy)}`. Only
    models with accuracy strictly above `min_accuracy` are used, each score
    vector is normalized to unit L1 norm of its absolute values first.
    """
    channels = np.asarray(channels, dtype='int64')
    passing = {k: v for k, v in scores.items() if v[1] > min_accuracy}
    if not passing:
        raise ValueError(f'no model has a test accuracy above {min_accuracy}, accuracies: {({k: round(float(v[1]), 4) for k, v in scores.items()})}')
    skipped = sorted(set(scores) - set(passing))
    if skipped:
        log.warning(f'excluded models with test accuracy <= {min_accuracy}: {skipped}')
    normalized = []
    for model_id, (s, _) in passing.items():
        s = np.abs(np.asarray(s, dtype='float64'))
        if s.shape != channels.shape:
            raise ValueError(f'{model_id} has {s.shape} scores, expected one per channel: {channels.shape}')
        total = s.sum()
        normalized.append(s / total if total > 0 else s)
    normalized = np.stack(normalized)
    return AttributionReport(
        channels=channels,
        wavelengths_nm=np.asarray(wavelengths_nm, dtype='float64'),
        mean=normalized.mean(axis=0),
        std=normalized.std(axis=0, ddof=0),
        model_ids=list(passing),
        accuracies={k: float(v[1]) for k, v in scores.items()},
        report_id=report_id,
    )


# ========================================================================= #
# Channel Subsets                                                           #
# ========================================================================= #


@dataclass(frozen=True)
class ChannelSubset(object):
    """Band indices ordered by descending importance, then ascending index."""

    indices: Tuple[int, ...]
    source: str = 'attribution'

    def __post_init__(self):
        object.__setattr__(self, 'indices', tuple(int(i) for i in self.indices))
        if len(self.indices) == 0:
            raise ValueError('a channel subset needs at least one channel')
        if len(set(self.indices)) != len(self.indices) or min(self.indices) < 0:
            raise ValueError(f'channel subset indices must be unique and non-negative, got: {self.indices}')

    def __len__(self):
        return len(self.indices)

    @property
    def k(self) -> int:
        return len(self.indices)

    def sorted(self) -> np.ndarray:
        return np.sort(np.asarray(self.indices, dtype='int64'))

    def save(self, path: Union[str, Path]) -> Path:
        lines = [f'# source: {self.source}'] + [str(i) for i in self.indices]
        return write_text(path, '\n'.join(lines) + '\n')

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'ChannelSubset':
        source, indices = 'attribution', []
        with open(path, 'r') as fp:
            for line in map(str.strip, fp):
                if line.startswith('# source:'):
                    source = line[len('# source:'):].strip()
                elif line and not line.startswith('#'):
                    indices.append(int(line))
        return cls(indices=tuple(indices), source=source)


def select_top_k(report: AttributionReport, k: int) -> ChannelSubset:
    if k <= 0:
        raise ValueError(f'k must be positive, got: {k}')
    if k > report.channel_count:
        raise ValueError(f'cannot select {k} channels from a report of {report.channel_count}')
    # lexsort uses the last key as the primary key
    order = np.lexsort((report.channels, -report.mean))
    return ChannelSubset(indices=tuple(report.channels[order[:k]].tolist()), source=report.report_id)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
