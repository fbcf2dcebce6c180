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

from hyperglio.dataset import SplitSpec
from hyperglio.dataset import build_dataset
from hyperglio.dataset import standardize
from hyperglio.dataset.data import generate_scene
from hyperglio.dataset.data import make_phantom_config
from hyperglio.frameworks import TrainConfig
from hyperglio.frameworks import evaluate_network
from hyperglio.frameworks import train_network
from hyperglio.model import NetworkSpec
from hyperglio.util import is_test_run  # you can ignore and remove this
from hyperglio.util.strings import fmt_metrics


# prepare the tiles of a few phantom scenes, one patient per scene
scenes = [
    generate_scene(make_phantom_config('standard', seed=i, size=192, patient_id=f'P{i}')).as_scene()
    for i in range(4)
]
data = build_dataset(scenes, SplitSpec(mode='random-tile', train_fraction=0.7, seed=0))
train, test, normalization = standardize(data.train, data.test)

# a CNN that first compresses the spectrum to 12 channels
spec = NetworkSpec(in_channels=train.channel_count, compress_to=12)
network = train_network(spec, train, TrainConfig(epochs=1 if is_test_run() else 50, seed=0), normalization=normalization)

# evaluate on the held out tiles
counts, metrics = evaluate_network(network, test)
print(counts, fmt_metrics(metrics))
