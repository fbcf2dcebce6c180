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


# config
from hyperglio.pipeline._config import ConfigValidationError
from hyperglio.pipeline._config import PipelineConfig
from hyperglio.pipeline._config import SettingsSection
from hyperglio.pipeline._config import PhantomSection
from hyperglio.pipeline._config import TilingSection
from hyperglio.pipeline._config import DatasetSection
from hyperglio.pipeline._config import TrainSection
from hyperglio.pipeline._config import NetworksSection
from hyperglio.pipeline._config import ClassicalSection
from hyperglio.pipeline._config import AttributionSection
from hyperglio.pipeline._config import EnsembleSection
from hyperglio.pipeline._config import InferenceSection
from hyperglio.pipeline._config import config_to_yaml
from hyperglio.pipeline._config import validate_config

# inference
from hyperglio.pipeline._inference import PredictionMap
from hyperglio.pipeline._inference import annotation_labels
from hyperglio.pipeline._inference import infer_full_image
from hyperglio.pipeline._inference import pixel_accuracy

# render
from hyperglio.pipeline._render import BASE_BAND_NM
from hyperglio.pipeline._render import OVERLAY_ALPHA
from hyperglio.pipeline._render import OVERLAY_COLORS
from hyperglio.pipeline._render import grayscale_base
from hyperglio.pipeline._render import overlay_image
from hyperglio.pipeline._render import render_annotation
from hyperglio.pipeline._render import render_overlay
from hyperglio.pipeline._render import save_png

# stages
from hyperglio.pipeline._stages import RunDirectory
from hyperglio.pipeline._stages import STAGES
from hyperglio.pipeline._stages import StageError
from hyperglio.pipeline._stages import load_dataset
from hyperglio.pipeline._stages import load_scenes
from hyperglio.pipeline._stages import load_tile_maps
from hyperglio.pipeline._stages import log_to_file
from hyperglio.pipeline._stages import run_pipeline
from hyperglio.pipeline._stages import run_stage
from hyperglio.pipeline._stages import run_stages
