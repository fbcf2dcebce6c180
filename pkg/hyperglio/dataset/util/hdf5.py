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
Patch container files.

HDF5 layout:
    patches      (N, S, S, C) float32
    masks        (N, S, S)    bool
    labels       (N,)         int64
    class_ids    (N,)         int64
    tile_ids     (N,)         int64
    scene_ids    (N,)         utf-8 strings
    patient_ids  (N,)         utf-8 strings
    attrs: version, count, patch_size, channels, label_map (json), normalized
"""

import contextlib
import json
import logging
from pathlib import Path
from typing import Union

import h5py
import numpy as np

from hyperglio.dataset._examples import BINARY_NAMES
from hyperglio.dataset._examples import PatchSet
from hyperglio.util.inout.files import AtomicSaveFile


log = logging.getLogger(__name__)


CONTAINER_VERSION = 1


# ========================================================================= #
# hdf5 - helper                                                             #
# ========================================================================= #


@contextlib.contextmanager
def h5_open(path: Union[str, Path], mode: str = 'r') -> h5py.File:
    """
    MODES:
        atomic_w Create temp file, then move and overwrite existing when done
        atomic_x Create temp file, then try move or fail if existing when done
        r        Readonly, file must exist (default)
    """
    path = str(path)
    assert path.endswith('.h5') or path.endswith('.hdf5'), f'hdf5 file path does not end with extension: `.h5` or `.hdf5`, got: {path}'
    if mode == 'atomic_w':
        save_context, mode = AtomicSaveFile(path, open_mode=None, overwrite=True), 'w'
    elif mode == 'atomic_x':
        save_context, mode = AtomicSaveFile(path, open_mode=None, overwrite=False), 'x'
    elif mode == 'r':
        save_context = contextlib.nullcontext(path)
    else:
        raise KeyError(f'invalid h5 mode: {repr(mode)}')
    with save_context as tmp_h5_path:
        # earliest libver and no time tracking keep repeated saves byte-identical
        with h5py.File(tmp_h5_path, mode, libver='earliest', track_order=False) as h5_file:
            yield h5_file


def _add_dataset(h5_file: h5py.File, name: str, data: np.ndarray, chunked: bool = False):
    h5_file.create_dataset(
        name=name,
        data=data,
        chunks=(1, *data.shape[1:]) if (chunked and len(data) > 0) else None,
        compression='gzip' if (chunked and len(data) > 0) else None,
        compression_opts=4 if (chunked and len(data) > 0) else None,
        track_times=False,
    )


# ========================================================================= #
# patch containers                                                          #
# ========================================================================= #


def save_patch_set(patch_set: PatchSet, path: Union[str, Path], overwrite: bool = True) -> Path:
    str_type = h5py.string_dtype(encoding='utf-8')
    with h5_open(path, 'atomic_w' if overwrite else 'atomic_x') as h5_file:
        _add_dataset(h5_file, 'patches', np.asarray(patch_set.patches, dtype='float32'), chunked=True)
        _add_dataset(h5_file, 'masks', np.asarray(patch_set.masks, dtype='bool'), chunked=True)
        _add_dataset(h5_file, 'labels', np.asarray(patch_set.labels, dtype='int64'))
        _add_dataset(h5_file, 'class_ids', np.asarray(patch_set.class_ids, dtype='int64'))
        _add_dataset(h5_file, 'tile_ids', np.asarray(patch_set.tile_ids, dtype='int64'))
        _add_dataset(h5_file, 'scene_ids', np.array(patch_set.scene_ids.tolist(), dtype=str_type))
        _add_dataset(h5_file, 'patient_ids', np.array(patch_set.patient_ids.tolist(), dtype=str_type))
        h5_file.attrs['version'] = CONTAINER_VERSION
        h5_file.attrs['count'] = len(patch_set)
        h5_file.attrs['patch_size'] = int(patch_set.patches.shape[1])
        h5_file.attrs['channels'] = np.asarray(patch_set.channels, dtype='int64')
        h5_file.attrs['label_map'] = json.dumps({str(int(k)): v for k, v in BINARY_NAMES.items()}, sort_keys=True)
        h5_file.attrs['normalized'] = bool(patch_set.normalized)
    log.debug(f'saved {len(patch_set)} patches to: {path}')
    return Path(path)


def load_patch_set(path: Union[str, Path]) -> PatchSet:
    with h5_open(path, 'r') as h5_file:
        version = int(h5_file.attrs['version'])
        if version != CONTAINER_VERSION:
            raise ValueError(f'unsupported patch container version: {version}, expected: {CONTAINER_VERSION}')
        patch_set = PatchSet(
            patches=h5_file['patches'][...],
            masks=h5_file['masks'][...],
            labels=h5_file['labels'][...],
            class_ids=h5_file['class_ids'][...],
            tile_ids=h5_file['tile_ids'][...],
            scene_ids=np.array([s.decode('utf-8') if isinstance(s, bytes) else s for s in h5_file['scene_ids'][...]], dtype='U'),
            patient_ids=np.array([s.decode('utf-8') if isinstance(s, bytes) else s for s in h5_file['patient_ids'][...]], dtype='U'),
            channels=np.asarray(h5_file.attrs['channels'], dtype='int64'),
            normalized=bool(h5_file.attrs['normalized']),
        )
        if int(h5_file.attrs['count']) != len(patch_set):
            raise ValueError(f'patch container declares {int(h5_file.attrs["count"])} patches but holds {len(patch_set)}')
    return patch_set


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
