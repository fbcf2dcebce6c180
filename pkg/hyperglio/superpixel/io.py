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
Tile maps are stored as two files sharing a stem:
    <stem>.npz  u32 tile index image (invalid pixels are 0xFFFFFFFF) + objective history
    <stem>.tsv  one row per tile with its bounding box, label and statistics
Tile statistics are recomputed from the cube on load, labels and quality are
read back from the table.
"""

import logging
from dataclasses import replace
from pathlib import Path
from typing import Tuple
from typing import Union

import numpy as np
import pandas as pd

from hyperglio.cube import CLASS_NAMES
from hyperglio.cube import HsiCube
from hyperglio.superpixel._tiles import MIXED_LABEL
from hyperglio.superpixel._tiles import NO_TILE
from hyperglio.superpixel._tiles import TileMap
from hyperglio.superpixel._tiles import tiles_from_assignment
from hyperglio.util.inout.files import AtomicSaveFile


log = logging.getLogger(__name__)


INVALID_INDEX = 0xFFFFFFFF


def _tile_map_paths(path: Union[str, Path]) -> Tuple[Path, Path]:
    path = Path(path)
    if path.suffix in ('.npz', '.tsv'):
        path = path.with_suffix('')
    return path.with_name(path.name + '.npz'), path.with_name(path.name + '.tsv')


def tile_table(tile_map: TileMap) -> pd.DataFrame:
    rows = []
    for t in tile_map.tiles:
        r0, c0, r1, c1 = t.bbox
        rows.append(dict(
            tile_id=t.tile_id,
            size=t.size,
            row_start=r0, col_start=c0, row_stop=r1, col_stop=c1,
            label=t.label,
            name='' if t.label is None else ('mixed' if t.label == MIXED_LABEL else CLASS_NAMES[t.label]),
            mean_sam_uniformity=t.mean_sam_uniformity,
            mean_l2_uniformity=t.mean_l2_uniformity,
            mean_intensity=t.mean_intensity,
            quality=t.quality,
        ))
    df = pd.DataFrame(rows)
    df['label'] = df['label'].astype('Int64')
    df['quality'] = df['quality'].astype('boolean')
    return df


def save_tile_map(tile_map: TileMap, path: Union[str, Path]) -> Tuple[Path, Path]:
    npz_path, tsv_path = _tile_map_paths(path)
    index = np.where(tile_map.assignment == NO_TILE, INVALID_INDEX, tile_map.assignment).astype('<u4')
    with AtomicSaveFile(npz_path, open_mode='wb', overwrite=True) as (_, fp):
        np.savez(
            fp,
            index=index,
            objective_history=np.asarray(tile_map.objective_history, dtype='float64'),
            iterations=np.int64(tile_map.iterations),
            converged=np.bool_(tile_map.converged),
        )
    with AtomicSaveFile(tsv_path, open_mode='w', overwrite=True) as (_, fp):
        tile_table(tile_map).to_csv(fp, sep='\t', index=False, float_format='%.10g')
    return npz_path, tsv_path


def load_tile_map(path: Union[str, Path], cube: HsiCube) -> TileMap:
    npz_path, tsv_path = _tile_map_paths(path)
    with np.load(npz_path) as data:
        index = data['index'].astype('int64')
        history = data['objective_history'].tolist()
        iterations = int(data['iterations'])
        converged = bool(data['converged'])
    assignment = np.where(index == INVALID_INDEX, NO_TILE, index)
    tiles = tiles_from_assignment(cube, assignment)
    df = pd.read_csv(tsv_path, sep='\t', dtype={'label': 'Int64', 'quality': 'boolean'}, keep_default_na=True)
    if len(df) != len(tiles):
        raise ValueError(f'tile table has {len(df)} rows but the index image holds {len(tiles)} tiles')
    tiles = [
        replace(
            t,
            label=None if pd.isna(row.label) else int(row.label),
            quality=None if pd.isna(row.quality) else bool(row.quality),
        )
        for t, row in zip(tiles, df.itertuples(index=False))
    ]
    return TileMap(assignment=assignment, tiles=tiles, objective_history=history, iterations=iterations, converged=converged)
