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

# axis
from hyperglio.cube._axis import SpectralAxis
from hyperglio.cube._axis import band_index

# cube & annotations
from hyperglio.cube._cube import HsiCube
from hyperglio.cube._cube import AnnotationMask
from hyperglio.cube._cube import WhiteReference
from hyperglio.cube._cube import TissueClass
from hyperglio.cube._cube import CubeFormatError
from hyperglio.cube._cube import CLASS_NAMES
from hyperglio.cube._cube import NUM_TISSUE_CLASSES
from hyperglio.cube._cube import SATURATION_CAP

# calibration
from hyperglio.cube._calibrate import calibrate_reflectance

# io
from hyperglio.cube.io import load_cube
from hyperglio.cube.io import save_cube
from hyperglio.cube.io import load_annotation
from hyperglio.cube.io import save_annotation
