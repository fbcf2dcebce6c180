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
from dataclasses import replace
from typing import Optional
from typing import Sequence

import numpy as np

from hyperglio.superpixel._tiles import MIXED_LABEL
from hyperglio.superpixel._tiles import TileMap


log = logging.getLogger(__name__)


# ========================================================================= #
# Filtration                                                                #
# ========================================================================= #


@dataclass
class FilterParams(object):
    sam_pctl: float = 50.0
    l2_pctl: float = 50.0
    intensity_lo: float = 10.0
    intensity_hi: float = 90.0

    def __post_init__(self):
        for name in ['sam_pctl', 'l2_pctl', 'intensity_lo', 'intensity_hi']:
            value = getattr(self, name)
            if not (0 <= value <= 100):
                raise ValueError(f'{name} must be a percentage in [0, 100], got: {value}')
        if self.intensity_lo > self.intensity_hi:
            raise ValueError(f'intensity percentile bounds are inverted: {self.intensity_lo} > {self.intensity_hi}')


def filter_tiles(
    tile_map: TileMap,
    sam_pctl: float = 50.0,
    l2_pctl: float = 50.0,
    intensity_lo: float = 10.0,
    intensity_hi: float = 90.0,
    classes: Optional[Sequence[int]] = None,
) -> TileMap:
    """
    Mark the tiles that are spectrally uniform and normally illuminated.

    Mixed tiles (and tiles outside `classes` if given) are discarded first. The
    three cuts are then computed jointly over the same candidate set of this
    image, and a tile passes when it lies within all of them:
        - mean SAM uniformity <= the `sam_pctl` percentile
        - mean L2 uniformity <= the `l2_pctl` percentile
        - mean intensity within [`intensity_lo`, `intensity_hi`] percentiles
    Thresholds are inclusive, so ties at a threshold pass.
    """
    params = FilterParams(sam_pctl, l2_pctl, intensity_lo, intensity_hi)
    if tile_map.num_tiles == 0:
        raise ValueError('cannot filter an empty tile list')
    allowed = None if (classes is None) else set(int(c) for c in classes)
    candidates = np.array([
        (t.label != MIXED_LABEL) and (allowed is None or t.label in allowed)
        for t in tile_map.tiles
    ], dtype='bool')
    passed = np.zeros(tile_map.num_tiles, dtype='bool')
    if candidates.any():
        sam = np.array([t.mean_sam_uniformity for t in tile_map.tiles])
        l2 = np.array([t.mean_l2_uniformity for t in tile_map.tiles])
        intensity = np.array([t.mean_intensity for t in tile_map.tiles])
        sam_thresh = np.percentile(sam[candidates], params.sam_pctl)
        l2_thresh = np.percentile(l2[candidates], params.l2_pctl)
        lo, hi = np.percentile(intensity[candidates], [params.intensity_lo, params.intensity_hi])
        passed = candidates & (sam <= sam_thresh) & (l2 <= l2_thresh) & (intensity >= lo) & (intensity <= hi)
    else:
        log.warning('no candidate tiles to filter, every tile fails')
    log.debug(f'filtration kept {int(passed.sum())} of {int(candidates.sum())} candidate tiles ({tile_map.num_tiles} total)')
    return tile_map.with_tiles([replace(t, quality=bool(p)) for t, p in zip(tile_map.tiles, passed)])


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
