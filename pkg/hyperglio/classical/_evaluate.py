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

from typing import Dict
from typing import Tuple
from typing import Union

from hyperglio.classical._forest import ForestModel
from hyperglio.dataset import PatchSet
from hyperglio.frameworks import TrainedNetwork
from hyperglio.frameworks import load_network
from hyperglio.metrics import ConfusionCounts
from hyperglio.metrics import evaluate
from hyperglio.metrics import predict_labels


TileModel = Union[ForestModel, TrainedNetwork]


def evaluate_model(model: TileModel, test_set: PatchSet) -> Tuple[ConfusionCounts, Dict[str, float]]:
    if len(test_set) == 0:
        raise ValueError('cannot evaluate on an empty test set')
    counts, _, _, _ = evaluate(predict_labels(model.predict_patch_set(test_set)), test_set.labels)
    return counts, counts.metrics()


def load_model(path) -> TileModel:
    """Random forests are joblib files, networks torch files."""
    if str(path).endswith('.joblib'):
        return ForestModel.load(path)
    return load_network(path)
