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

# labels
from hyperglio.ensemble._threshold import PredictionLabel
from hyperglio.ensemble._threshold import PREDICTION_NAMES
from hyperglio.ensemble._threshold import ThresholdedPrediction
from hyperglio.ensemble._threshold import check_threshold
from hyperglio.ensemble._threshold import threshold_labels

# ensembles
from hyperglio.ensemble._ensemble import DEFAULT_TAUS
from hyperglio.ensemble._ensemble import Ensemble
from hyperglio.ensemble._ensemble import EnsembleMemberError
from hyperglio.ensemble._ensemble import mean_probabilities
from hyperglio.ensemble._ensemble import predict_thresholded
from hyperglio.ensemble._ensemble import train_ensemble

# coverage
from hyperglio.ensemble._ensemble import CoverageReport
from hyperglio.ensemble._ensemble import coverage_report
from hyperglio.ensemble._ensemble import scene_coverage

# files
from hyperglio.ensemble._ensemble import save_ensemble
from hyperglio.ensemble._ensemble import load_ensemble
