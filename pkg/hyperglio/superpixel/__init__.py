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

# tiles
from hyperglio.superpixel._tiles import Tile
from hyperglio.superpixel._tiles import TileMap
from hyperglio.superpixel._tiles import MIXED_LABEL
from hyperglio.superpixel._tiles import NO_TILE
from hyperglio.superpixel._tiles import compute_tile
from hyperglio.superpixel._tiles import tiles_from_assignment
from hyperglio.superpixel._tiles import annotate_tiles
from hyperglio.superpixel._tiles import tile_separability

# segmentation
from hyperglio.superpixel._slic import SlicParams
from hyperglio.superpixel._slic import slic_segment
from hyperglio.superpixel._slic import enforce_connectivity

# filtration
from hyperglio.superpixel._filter import FilterParams
from hyperglio.superpixel._filter import filter_tiles

# patches
from hyperglio.superpixel._patch import PATCH_SIZE
from hyperglio.superpixel._patch import PaddedPatch
from hyperglio.superpixel._patch import PatchOverflowError
from hyperglio.superpixel._patch import extract_patch

# io
from hyperglio.superpixel.io import save_tile_map
from hyperglio.superpixel.io import load_tile_map
from hyperglio.superpixel.io import tile_table
