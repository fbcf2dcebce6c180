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

"""
Binary containers for cubes and annotations.

Cube file (little-endian):
    magic b'HSIC' | version u16 | height u32 | width u32 | bands u32
    wavelengths (bands x f32, nm)
    valid_mask: run_count u32 | run_count x u32 run lengths
                (alternating invalid/valid runs over the row-major mask, starting invalid)
    payload: band-sequential f32, ie. (bands, height, width)

Annotation file (little-endian):
    magic b'HSIA' | version u16 | height u32 | width u32 | payload u8 row-major labels
"""

import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np

from hyperglio.cube._axis import SpectralAxis
from hyperglio.cube._cube import AnnotationMask
from hyperglio.cube._cube import CubeFormatError
from hyperglio.cube._cube import HsiCube
from hyperglio.util.inout.files import AtomicSaveFile


log = logging.getLogger(__name__)


# ========================================================================= #
# Format                                                                    #
# ========================================================================= #


CUBE_MAGIC = b'HSIC'
ANNOTATION_MAGIC = b'HSIA'
FORMAT_VERSION = 1

_CUBE_HEADER = struct.Struct('<4sHIII')
_ANNOTATION_HEADER = struct.Struct('<4sHII')
_U32 = struct.Struct('<I')


# ========================================================================= #
# Run Length Encoding                                                       #
# ========================================================================= #


def encode_mask_rle(mask: np.ndarray) -> np.ndarray:
    """Run lengths over the flattened mask, alternating invalid/valid, starting with an invalid run."""
    flat = np.asarray(mask, dtype='bool').reshape(-1)
    if flat.size == 0:
        return np.zeros(0, dtype='<u4')
    # indices where the value changes
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate([[0], change, [flat.size]])
    runs = np.diff(bounds)
    if flat[0]:
        runs = np.concatenate([[0], runs])
    return runs.astype('<u4')


def decode_mask_rle(runs: np.ndarray, height: int, width: int) -> np.ndarray:
    runs = np.asarray(runs, dtype='int64')
    if runs.sum() != height * width:
        raise CubeFormatError(f'valid_mask runs cover {int(runs.sum())} pixels, expected {height * width}')
    values = (np.arange(len(runs)) % 2).astype('bool')
    return np.repeat(values, runs).reshape(height, width)


# ========================================================================= #
# Reading helpers                                                           #
# ========================================================================= #


def _read_exact(fp, num_bytes: int, what: str) -> bytes:
    data = fp.read(num_bytes)
    if len(data) != num_bytes:
        raise CubeFormatError(f'truncated file: expected {num_bytes} bytes for {what}, got {len(data)}')
    return data


def _check_magic(magic: bytes, expected: bytes, version: int):
    if magic != expected:
        raise CubeFormatError(f'invalid magic bytes: {magic!r}, expected: {expected!r}')
    if version != FORMAT_VERSION:
        raise CubeFormatError(f'unsupported format version: {version}, expected: {FORMAT_VERSION}')


# ========================================================================= #
# Cube IO                                                                   #
# ========================================================================= #


def save_cube(cube: HsiCube, path: Union[str, Path], overwrite: bool = True) -> Path:
    if not isinstance(cube, HsiCube):
        raise TypeError(f'expected {HsiCube.__name__}, got: {type(cube)}')
    data = np.asarray(cube.data)
    if data.dtype != np.float32:
        raise CubeFormatError(f'cube files store float32 data, got: {data.dtype}, convert first with `cube.as_float32()`')
    payload = np.ascontiguousarray(np.moveaxis(data, -1, 0), dtype='<f4')
    runs = encode_mask_rle(cube.valid_mask)
    # write everything to a temp file first
    with AtomicSaveFile(path, open_mode='wb', overwrite=overwrite) as (_, fp):
        fp.write(_CUBE_HEADER.pack(CUBE_MAGIC, FORMAT_VERSION, cube.height, cube.width, cube.band_count))
        fp.write(np.asarray(cube.axis.wavelengths_nm, dtype='<f4').tobytes())
        fp.write(_U32.pack(len(runs)))
        fp.write(runs.tobytes())
        fp.write(payload.tobytes())
    return Path(path)


def load_cube(path: Union[str, Path]) -> HsiCube:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f'cube file does not exist: {path}')
    with open(path, 'rb') as fp:
        magic, version, height, width, bands = _CUBE_HEADER.unpack(_read_exact(fp, _CUBE_HEADER.size, 'header'))
        _check_magic(magic, CUBE_MAGIC, version)
        if bands < 1:
            raise CubeFormatError(f'cube declares {bands} bands')
        wavelengths = np.frombuffer(_read_exact(fp, 4 * bands, 'wavelength table'), dtype='<f4')
        (run_count,) = _U32.unpack(_read_exact(fp, _U32.size, 'mask run count'))
        runs = np.frombuffer(_read_exact(fp, 4 * run_count, 'mask runs'), dtype='<u4')
        valid_mask = decode_mask_rle(runs, height, width)
        payload_size = 4 * bands * height * width
        payload = fp.read(payload_size)
        if len(payload) != payload_size:
            raise CubeFormatError(f'shape/payload size mismatch: header declares {height}x{width}x{bands} ({payload_size} bytes), payload has {len(payload)} bytes')
        if fp.read(1):
            raise CubeFormatError('shape/payload size mismatch: trailing bytes after payload')
    data = np.frombuffer(payload, dtype='<f4').reshape(bands, height, width)
    data = np.moveaxis(data, 0, -1).astype('float32')
    if not np.all(np.isfinite(data)):
        raise CubeFormatError(f'cube payload contains non-finite values: {path}')
    try:
        axis = SpectralAxis(wavelengths.astype('float64'))
    except ValueError as e:
        raise CubeFormatError(f'invalid wavelength table: {e}') from e
    return HsiCube(data=data, axis=axis, valid_mask=valid_mask)


# ========================================================================= #
# Annotation IO                                                             #
# ========================================================================= #


def save_annotation(mask: AnnotationMask, path: Union[str, Path], overwrite: bool = True) -> Path:
    with AtomicSaveFile(path, open_mode='wb', overwrite=overwrite) as (_, fp):
        fp.write(_ANNOTATION_HEADER.pack(ANNOTATION_MAGIC, FORMAT_VERSION, mask.height, mask.width))
        fp.write(np.ascontiguousarray(mask.labels, dtype='u1').tobytes())
    return Path(path)


def load_annotation(path: Union[str, Path]) -> AnnotationMask:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f'annotation file does not exist: {path}')
    with open(path, 'rb') as fp:
        magic, version, height, width = _ANNOTATION_HEADER.unpack(_read_exact(fp, _ANNOTATION_HEADER.size, 'header'))
        _check_magic(magic, ANNOTATION_MAGIC, version)
        payload = fp.read(height * width)
        if len(payload) != height * width or fp.read(1):
            raise CubeFormatError(f'shape/payload size mismatch: header declares {height}x{width} labels')
    return AnnotationMask(np.frombuffer(payload, dtype='u1').reshape(height, width))


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
