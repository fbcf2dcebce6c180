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
from typing import Tuple

import numpy as np


log = logging.getLogger(__name__)


# ========================================================================= #
# Helper                                                                    #
# ========================================================================= #


def _as_spectrum(x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype='float64')
    if x.ndim != 1:
        raise ValueError(f'{name} must be a 1D spectrum, got shape: {x.shape}')
    if not np.all(np.isfinite(x)):
        raise ValueError(f'{name} contains non-finite values')
    return x


def _check_lengths(a: np.ndarray, b: np.ndarray):
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f'spectrum length mismatch: {a.shape[-1]} != {b.shape[-1]}')


# ========================================================================= #
# Distances                                                                 #
# ========================================================================= #


def unit_angle(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """
    Angle in radians between unit vectors along the last axis, broadcasting
    over the leading axes. Uses the half-angle form 2*atan2(|u - v|, |u + v|),
    which equals the clamped arccos of their dot product but is exactly zero
    for identical directions and never NaN. A zero vector is at pi/2 from any
    unit vector.
    """
    return 2 * np.arctan2(np.linalg.norm(u - v, axis=-1), np.linalg.norm(u + v, axis=-1))


def _unit_rows(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(x, axis=-1, keepdims=True)
    return np.divide(x, norms, out=np.zeros_like(x), where=norms > 0), norms[..., 0]


def sam_distance(a, b) -> float:
    """
    Spectral angle (radians, in [0, pi]) between two non-zero spectra:
        arccos( <a, b> / (|a| |b|) )
    """
    a, b = _as_spectrum(a, 'a'), _as_spectrum(b, 'b')
    _check_lengths(a, b)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError('spectral angle is undefined for zero-norm spectra')
    return float(unit_angle(a / na, b / nb))


def l2_distance(a, b) -> float:
    a, b = _as_spectrum(a, 'a'), _as_spectrum(b, 'b')
    _check_lengths(a, b)
    return float(np.linalg.norm(a - b))


def mean_spectrum(pixels) -> np.ndarray:
    """Per-band arithmetic mean of a set of spectra with shape (N, bands)."""
    pixels = np.asarray(pixels, dtype='float64')
    if pixels.ndim == 1:
        pixels = pixels[None, :]
    if pixels.ndim != 2:
        raise ValueError(f'pixels must have shape (N, bands), got: {pixels.shape}')
    if pixels.shape[0] == 0:
        raise ValueError('mean spectrum of an empty pixel set is undefined')
    return pixels.mean(axis=0)


# ========================================================================= #
# Vectorised Distances                                                      #
# ========================================================================= #


def sam_to_reference(pixels, reference) -> np.ndarray:
    """
    Spectral angle of every row of `pixels` (N, bands) to a single reference
    spectrum. Zero-norm rows have no defined direction and are assigned pi/2.
    """
    pixels = np.asarray(pixels, dtype='float64')
    reference = _as_spectrum(reference, 'reference')
    _check_lengths(pixels, reference)
    ref_norm = np.linalg.norm(reference)
    if ref_norm == 0:
        raise ValueError('spectral angle is undefined for a zero-norm reference')
    u, _ = _unit_rows(pixels)
    return unit_angle(u, reference / ref_norm)


def sam_to_centers(pixels, centers) -> np.ndarray:
    """
    Spectral angles between every pixel (N, bands) and every center (K, bands),
    returns (N, K). Pairs involving a zero-norm spectrum are assigned pi/2.
    """
    pixels = np.asarray(pixels, dtype='float64')
    centers = np.asarray(centers, dtype='float64')
    _check_lengths(pixels, centers)
    u, pn = _unit_rows(pixels)
    v, cn = _unit_rows(centers)
    angles = np.empty((len(u), len(v)), dtype='float64')
    for k in range(len(v)):
        angles[:, k] = unit_angle(u, v[k])
    angles[pn == 0, :] = np.pi / 2
    angles[:, cn == 0] = np.pi / 2
    return angles


def mean_pairwise_sam(pixels) -> float:
    """Mean spectral angle over all unordered pairs of distinct rows."""
    pixels = np.asarray(pixels, dtype='float64')
    n = pixels.shape[0]
    if n < 2:
        raise ValueError(f'mean pairwise distance needs at least 2 spectra, got: {n}')
    angles = sam_to_centers(pixels, pixels)
    iu = np.triu_indices(n, k=1)
    return float(angles[iu].mean())


def l2_to_reference(pixels, reference) -> np.ndarray:
    pixels = np.asarray(pixels, dtype='float64')
    reference = _as_spectrum(reference, 'reference')
    _check_lengths(pixels, reference)
    return np.linalg.norm(pixels - reference, axis=-1)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
