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
from typing import Dict
from typing import Optional
from typing import Sequence

from hyperglio.attribution._report import ChannelSubset
from hyperglio.dataset import Scene
from hyperglio.dataset import SplitSpec
from hyperglio.dataset import build_dataset
from hyperglio.dataset import standardize
from hyperglio.frameworks import TrainConfig
from hyperglio.frameworks import TrainedNetwork
from hyperglio.frameworks import evaluate_network
from hyperglio.frameworks import train_network
from hyperglio.metrics import ConfusionCounts
from hyperglio.model import NetworkSpec
from hyperglio.superpixel import FilterParams
from hyperglio.superpixel import SlicParams
from hyperglio.superpixel import TileMap


log = logging.getLogger(__name__)


@dataclass(eq=False)
class RetrainResult(object):
    network: TrainedNetwork
    counts: ConfusionCounts
    metrics: Dict[str, float]
    # metric minus the full spectrum reference, when given
    delta: Optional[Dict[str, float]] = None

    def to_dict(self) -> dict:
        return dict(
            channels=self.network.channels.tolist(),
            counts=self.counts.to_dict(),
            metrics=self.metrics,
            delta=self.delta,
        )


def retrain_on_subset(
    subset: ChannelSubset,
    scenes: Sequence[Scene],
    split: SplitSpec,
    config: TrainConfig,
    slic: Optional[SlicParams] = None,
    filt: Optional[FilterParams] = None,
    tile_maps: Optional[Dict[str, TileMap]] = None,
    reference_metrics: Optional[Dict[str, float]] = None,
    features: Sequence[int] = (16, 32, 64),
) -> RetrainResult:
    """
    Rebuild the patches with only the subset channels and train a network
    without a compression layer on them. The split is the same as for the
    full spectrum dataset when the same scenes, split and tiles are used.
    """
    channels = subset.sorted()
    data = build_dataset(scenes, split, channels=channels, slic=slic, filt=filt, tile_maps=tile_maps)
    train, test, normalization = standardize(data.train, data.test)
    spec = NetworkSpec(in_channels=len(channels), compress_to=None, features=tuple(features), patch_size=train.patch_shape[0])
    network = train_network(spec, train, config, normalization=normalization)
    counts, metrics = evaluate_network(network, test)
    delta = None if (reference_metrics is None) else {k: metrics[k] - reference_metrics[k] for k in metrics if k in reference_metrics}
    log.info(f'retrained on {len(channels)} channels {channels.tolist()}: accuracy={metrics["accuracy"]:.4f}' + (f' (delta {delta["accuracy"]:+.4f})' if delta else ''))
    return RetrainResult(network=network, counts=counts, metrics=metrics, delta=delta)
