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

from dataclasses import dataclass
from typing import Optional
from typing import Sequence

import numpy as np

from hyperglio.cube import HsiCube
from hyperglio.superpixel._tiles import Tile


PATCH_SIZE = 40


class PatchOverflowError(ValueError):
    """Raised when a tile bounding box does not fit inside the patch."""


@dataclass(frozen=True, eq=False)
class PaddedPatch(object):
    """
    Zero padded (size, size, C) copy of the selected channels of a tile. Pixels
    outside the tile are exactly zero, `mask` marks the member pixels.
    """

    data: np.ndarray
    mask: np.ndarray
    tile_id: int
    label: Optional[int] = None

    @property
    def channel_count(self) -> int:
        return int(self.data.shape[-1])


def _check_channels(channels: Optional[Sequence[int]], band_count: int) -> np.ndarray:
    if channels is None:
        return np.arange(band_count)
    channels = np.asarray(channels, dtype='int64').reshape(-1)
    if len(channels) == 0:
        raise ValueError('channel list must not be empty')
    if np.any(channels < 0) or np.any(channels >= band_count):
        raise ValueError(f'channel indices must be in [0, {band_count}), got: {channels.tolist()}')
    return channels


def extract_patch(
    cube: HsiCube,
    tile: Tile,
    channels: Optional[Sequence[int]] = None,
    size: int = PATCH_SIZE,
) -> PaddedPatch:
    """
    Copy the selected channels of the member pixels of a tile into a zero
    padded patch, centered on the bounding box center. For odd slack the extra
    row/column of padding goes after the tile.
    """
    channels = _check_channels(channels, cube.band_count)
    h, w = tile.bbox_shape
    if (h > size) or (w > size):
        raise PatchOverflowError(f'tile {tile.tile_id} bounding box {h}x{w} exceeds the {size}x{size} patch')
    r0, c0 = tile.bbox[0], tile.bbox[1]
    pr, pc = (size - h) // 2, (size - w) // 2
    rows = tile.coords[:, 0] - r0 + pr
    cols = tile.coords[:, 1] - c0 + pc
    data = np.zeros((size, size, len(channels)), dtype='float32')
    mask = np.zeros((size, size), dtype='bool')
    data[rows, cols] = cube.data[tile.coords[:, 0], tile.coords[:, 1]][:, channels]
    mask[rows, cols] = True
    label = tile.label if (tile.label is None or tile.label >= 0) else None
    return PaddedPatch(data=data, mask=mask, tile_id=tile.tile_id, label=label)
