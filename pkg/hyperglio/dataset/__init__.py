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

# examples
from hyperglio.dataset._examples import BinaryLabel
from hyperglio.dataset._examples import BINARY_NAMES
from hyperglio.dataset._examples import FOCUS_CLASSES
from hyperglio.dataset._examples import to_binary_label
from hyperglio.dataset._examples import Scene
from hyperglio.dataset._examples import LabeledExample
from hyperglio.dataset._examples import PatchSet
from hyperglio.dataset._examples import TileDataset

# splits
from hyperglio.dataset._split import SplitSpec
from hyperglio.dataset._split import split_indices

# assembly
from hyperglio.dataset._build import DatasetSplit
from hyperglio.dataset._build import build_dataset
from hyperglio.dataset._build import build_patch_set
from hyperglio.dataset._build import scene_examples
from hyperglio.dataset._build import segment_cube
from hyperglio.dataset._build import segment_scene
from hyperglio.dataset._build import tile_patch_set
from hyperglio.dataset._build import UNLABELED

# normalization
from hyperglio.dataset._normalize import NormalizationParams
from hyperglio.dataset._normalize import standardize
