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
import time
from contextlib import ContextDecorator
from math import log10
from typing import Optional


log = logging.getLogger(__name__)


# ========================================================================= #
# Context Manager Timer                                                     #
# ========================================================================= #


class Timer(ContextDecorator):
    """
    Measure the wall time of a block, logging it on exit when named.

    ```
    with Timer('slic') as t:
        segment(...)
    print(t.elapsed)
    ```
    """

    def __init__(self, name: Optional[str] = None, log_level: int = logging.INFO):
        self.name = name
        self._log_level = log_level
        self._start_time: Optional[int] = None
        self._total_time = 0

    def __enter__(self):
        self._start_time = time.time_ns()
        return self

    def __exit__(self, *args, **kwargs):
        self._total_time += time.time_ns() - self._start_time
        self._start_time = None
        if self.name:
            log.log(self._log_level, f'{self.name}: {self.pretty}')

    @property
    def elapsed_ns(self) -> int:
        if self._start_time is not None:
            return self._total_time + (time.time_ns() - self._start_time)
        return self._total_time

    @property
    def elapsed(self) -> float:
        return self.elapsed_ns / 1_000_000_000

    @property
    def pretty(self) -> str:
        return prettify_time(self.elapsed_ns)

    def __str__(self):
        return self.pretty


def prettify_time(ns: int) -> str:
    if ns <= 0:
        return 'N/A'
    power = min(3, int(log10(ns) // 3))
    value = ns / 1000**power
    if power < 3 or value < 60:
        return f'{value:.3f}{["ns", "µs", "ms", "s"][power]}'
    m, s = divmod(int(value), 60)
    h, m = divmod(m, 60)
    return f'{h}h:{m}m:{s}s' if h else f'{m}m:{s}s'


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
