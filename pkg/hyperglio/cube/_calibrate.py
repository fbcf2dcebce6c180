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

import numpy as np

from hyperglio.cube._cube import HsiCube
from hyperglio.cube._cube import SATURATION_CAP
from hyperglio.cube._cube import WhiteReference


log = logging.getLogger(__name__)


# ========================================================================= #
# Reflectance Calibration                                                   #
# ========================================================================= #


def calibrate_reflectance(raw: HsiCube, white: WhiteReference, saturation_cap: float = SATURATION_CAP) -> HsiCube:
    """
    Convert raw intensities to absolute reflectance using a white reference scan:
        out[p, b] = raw[p, b] / white[b] * target_reflectance

    Computed in float64. Values are never clipped, pixels with any band above
    the saturation cap are flagged invalid instead. Invalid pixels stay invalid.
    """
    if raw.band_count != white.band_count:
        raise ValueError(f'band count mismatch: cube has {raw.band_count} bands, white reference has {white.band_count}')
    reflectance = np.asarray(raw.data, dtype='float64') / white.spectrum[None, None, :] * float(white.target_reflectance)
    saturated = np.any(reflectance > saturation_cap, axis=-1)
    valid_mask = raw.valid_mask & ~saturated
    num_flagged = int((raw.valid_mask & saturated).sum())
    if num_flagged:
        log.info(f'calibration flagged {num_flagged} saturated pixels as invalid (cap={saturation_cap})')
    return HsiCube(data=reflectance, axis=raw.axis, valid_mask=valid_mask)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
