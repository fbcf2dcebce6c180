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

# synthetic scenes
from hyperglio.dataset.data._phantom import BandBoost
from hyperglio.dataset.data._phantom import ClassModel
from hyperglio.dataset.data._phantom import RegionSpec
from hyperglio.dataset.data._phantom import PhantomConfig
from hyperglio.dataset.data._phantom import PhantomScene
from hyperglio.dataset.data._phantom import hemoglobin_like_spectrum
from hyperglio.dataset.data._phantom import band_boost
from hyperglio.dataset.data._phantom import generate_scene
from hyperglio.dataset.data._phantom import illumination
from hyperglio.dataset.data._phantom import rasterize_regions

# presets
from hyperglio.dataset.data._phantom import PHANTOM_PRESETS
from hyperglio.dataset.data._phantom import make_phantom_config
from hyperglio.dataset.data._phantom import standard_phantom_config
from hyperglio.dataset.data._phantom import single_band_phantom_config
from hyperglio.dataset.data._phantom import multi_band_phantom_config
from hyperglio.dataset.data._phantom import ood_phantom_config
