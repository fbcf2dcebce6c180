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

import contextlib
import functools
import os
import sys
from typing import Optional
from typing import Tuple

from hyperglio.dataset import DatasetSplit
from hyperglio.dataset import SplitSpec
from hyperglio.dataset import build_dataset
from hyperglio.dataset import standardize
from hyperglio.dataset.data import generate_scene
from hyperglio.dataset.data import make_phantom_config
from hyperglio.superpixel import FilterParams
from hyperglio.superpixel import SlicParams


# ========================================================================= #
# TEST UTILS                                                                #
# ========================================================================= #


@contextlib.contextmanager
def no_stdout():
    old_stdout = sys.stdout
    sys.stdout = open(os.devnull, 'w')
    try:
        yield
    finally:
        sys.stdout.close()
        sys.stdout = old_stdout


@contextlib.contextmanager
def temp_sys_args(new_argv):
    old_argv = sys.argv
    sys.argv = new_argv
    try:
        yield
    finally:
        sys.argv = old_argv


# ========================================================================= #
# PHANTOM DATA                                                              #
# ========================================================================= #


# small scenes with every unmixed focus tile kept, fast enough for tests
TEST_SLIC = SlicParams(target_pixels_per_tile=100, compactness=0.5, max_iters=6)
TEST_FILTER = FilterParams(sam_pctl=100, l2_pctl=100, intensity_lo=0, intensity_hi=100)


@functools.lru_cache(maxsize=None)
def phantom_scenes(preset: str = 'standard', count: int = 4, size: int = 128, seed: int = 0, **kwargs) -> tuple:
    return tuple(
        generate_scene(make_phantom_config(preset, seed=seed * 1000 + i, size=size, patient_id=f'P{i}', **kwargs)).as_scene()
        for i in range(count)
    )


@functools.lru_cache(maxsize=None)
def phantom_dataset(preset: str = 'standard', count: int = 4, size: int = 128, seed: int = 0, channels: Optional[Tuple[int, ...]] = None) -> Tuple[DatasetSplit, DatasetSplit]:
    """(raw, standardized) splits of a set of phantom scenes."""
    data = build_dataset(
        phantom_scenes(preset, count=count, size=size, seed=seed),
        SplitSpec(train_fraction=0.7, seed=seed),
        channels=channels, slic=TEST_SLIC, filt=TEST_FILTER,
    )
    train, test, _ = standardize(data.train, data.test)
    return data, DatasetSplit(train=train, test=test, tile_maps=data.tile_maps)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
