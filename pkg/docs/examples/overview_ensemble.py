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

import tempfile
from pathlib import Path

from hyperglio.dataset import SplitSpec
from hyperglio.dataset import build_dataset
from hyperglio.dataset import standardize
from hyperglio.dataset.data import generate_scene
from hyperglio.dataset.data import make_phantom_config
from hyperglio.ensemble import train_ensemble
from hyperglio.frameworks import TrainConfig
from hyperglio.model import NetworkSpec
from hyperglio.pipeline import infer_full_image
from hyperglio.pipeline import render_overlay
from hyperglio.util import is_test_run  # you can ignore and remove this


# the ood phantom contains tissue that never appears in training
scenes = [
    generate_scene(make_phantom_config('ood', seed=i, size=192, patient_id=f'P{i}')).as_scene()
    for i in range(4)
]
data = build_dataset(scenes, SplitSpec(mode='random-tile', train_fraction=0.7, seed=0))
train, _, normalization = standardize(data.train, data.test)

# members differ only in their initialisation seed
ensemble = train_ensemble(
    NetworkSpec(in_channels=train.channel_count, compress_to=12),
    train,
    TrainConfig(epochs=1 if is_test_run() else 50),
    k=2 if is_test_run() else 10,
    master_seed=0,
    normalization=normalization,
)

# tiles whose mean winning probability is below tau are marked unknown
scene = scenes[0]
pmap = infer_full_image(ensemble, scene.cube, tau=0.7, mask=scene.mask, tile_map=data.tile_maps[scene.scene_id], scene_id=scene.scene_id)
print(pmap.summary())

with tempfile.TemporaryDirectory() as temp_dir:
    render_overlay(pmap, scene.cube, Path(temp_dir) / f'{scene.scene_id}_tau0.7.png')
