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

from hyperglio.dataset import FOCUS_CLASSES
from hyperglio.dataset import segment_scene
from hyperglio.dataset.data import generate_scene
from hyperglio.dataset.data import make_phantom_config
from hyperglio.spectral import cluster_separability
from hyperglio.superpixel import SlicParams
from hyperglio.superpixel import tile_separability
from hyperglio.util import is_test_run  # you can ignore and remove this


# generate an annotated phantom scene
scene = generate_scene(make_phantom_config('standard', seed=42, size=96 if is_test_run() else 256)).as_scene()
classes = [c for c in scene.mask.present_classes() if c in FOCUS_CLASSES]
print(scene.cube, classes)

# tile the scene into superpixels and keep the high quality tiles
tile_map = segment_scene(scene, slic=SlicParams(target_pixels_per_tile=200))
print(f'{tile_map.num_tiles} tiles, {len(tile_map.passing())} passing')

# compare class separation before and after tiling
print(cluster_separability(scene.cube, scene.mask, classes).to_dataframe())
print(tile_separability(tile_map, classes).to_dataframe())
