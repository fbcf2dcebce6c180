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
import logging
import random
from typing import Optional

import numpy as np
import torch


log = logging.getLogger(__name__)


# ========================================================================= #
# seeds                                                                     #
# ========================================================================= #


def seed(long: Optional[int] = 777):
    """
    Seed the global python, numpy and torch generators.
    https://pytorch.org/docs/stable/notes/randomness.html
    """
    if long is None:
        log.warning(f'[SEEDING]: no seed was specified. Seeding skipped!')
        return
    random.seed(long)
    np.random.seed(long)
    torch.backends.cudnn.deterministic = True
    torch.backends.cudnn.benchmark = False
    torch.manual_seed(long)
    log.info(f'[SEEDED]: {long}')


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """
    Platform-stable generator (PCG64) for the given seed. Extra integers select
    an independent stream, eg. `make_rng(seed, scene_idx, row)`.
    """
    if seed is None:
        raise ValueError('a seed is required for reproducible generation, got: None')
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, stream)])))


def derive_seed(seed: int, *stream: int) -> int:
    """Derive a child seed in the range [0, 2**31) from a master seed and stream indices."""
    return int(make_rng(seed, *stream).integers(0, 2**31 - 1))


# ========================================================================= #
# temporary seeds                                                           #
# ========================================================================= #


@contextlib.contextmanager
def temp_seed(seed: Optional[int]):
    """
    Seed numpy and torch within the context, restoring both afterwards.
    Libraries that draw from the global generators (eg. captum) become
    deterministic within this block.
    """
    if seed is None:
        yield
        return
    np_state = np.random.get_state()
    try:
        with torch.random.fork_rng(devices=[]):
            np.random.seed(int(seed))
            torch.manual_seed(int(seed))
            yield
    finally:
        np.random.set_state(np_state)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
