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

import numpy as np
import pytest
from scipy import ndimage

from hyperglio.cube import AnnotationMask
from hyperglio.cube import HsiCube
from hyperglio.cube import SpectralAxis
from hyperglio.dataset.data import ClassModel
from hyperglio.dataset.data import PhantomConfig
from hyperglio.dataset.data import generate_scene
from hyperglio.dataset.data import make_phantom_config
from hyperglio.superpixel import MIXED_LABEL
from hyperglio.superpixel import NO_TILE
from hyperglio.superpixel import PatchOverflowError
from hyperglio.superpixel import Tile
from hyperglio.superpixel import TileMap
from hyperglio.superpixel import annotate_tiles
from hyperglio.superpixel import compute_tile
from hyperglio.superpixel import enforce_connectivity
from hyperglio.superpixel import extract_patch
from hyperglio.superpixel import filter_tiles
from hyperglio.superpixel import load_tile_map
from hyperglio.superpixel import save_tile_map
from hyperglio.superpixel import slic_segment
from hyperglio.superpixel import tile_separability


FOUR = ndimage.generate_binary_structure(2, 1)


# ========================================================================= #
# HELPERS                                                                   #
# ========================================================================= #


def _check_partition(cube: HsiCube, tile_map: TileMap):
    assignment = tile_map.assignment
    assert np.all((assignment >= 0) == cube.valid_mask)
    assert np.all(assignment[~cube.valid_mask] == NO_TILE)
    assert int(tile_map.tile_sizes().sum()) == cube.valid_count
    assert sorted(np.unique(assignment[assignment >= 0]).tolist()) == list(range(tile_map.num_tiles))
    for tile in tile_map.tiles:
        assert np.all(assignment[tile.coords[:, 0], tile.coords[:, 1]] == tile.tile_id)
        _, n = ndimage.label(assignment == tile.tile_id, structure=FOUR)
        assert n == 1, f'tile {tile.tile_id} is not 4-connected'


def _uniform_cube(h, w, spectrum=(0.2, 0.5, 0.4, 0.7)):
    data = np.broadcast_to(np.asarray(spectrum, dtype='float32'), (h, w, len(spectrum))).copy()
    return HsiCube(data, axis=SpectralAxis.linspace(500, 700, len(spectrum)))


def _synthetic_map(stats, labels=None) -> TileMap:
    tiles = []
    for i, (sam, l2, intensity) in enumerate(stats):
        tiles.append(Tile(
            tile_id=i, coords=np.array([[0, i]]), bbox=(0, i, 1, i + 1), mean_spectrum=np.ones(3),
            mean_sam_uniformity=float(sam), mean_l2_uniformity=float(l2), mean_intensity=float(intensity),
            label=None if labels is None else labels[i],
        ))
    return TileMap(assignment=np.arange(len(tiles))[None, :], tiles=tiles)


# ========================================================================= #
# SEGMENTATION                                                              #
# ========================================================================= #


def test_slic_uniform_grid():
    cube = _uniform_cube(100, 100)
    tile_map = slic_segment(cube, target_pixels_per_tile=100, compactness=0.5)
    _check_partition(cube, tile_map)
    mean_size = cube.valid_count / tile_map.num_tiles
    assert 70 <= mean_size <= 130


def test_slic_two_halves_do_not_mix():
    data = np.zeros((40, 80, 4), dtype='float32')
    data[:, :40] = [0.8, 0.2, 0.2, 0.2]
    data[:, 40:] = [0.2, 0.2, 0.2, 0.8]
    labels = np.ones((40, 80), dtype='uint8')
    labels[:, 40:] = 6
    cube = HsiCube(data, axis=SpectralAxis.linspace(500, 700, 4))
    tile_map = annotate_tiles(slic_segment(cube, target_pixels_per_tile=100, compactness=0.01), AnnotationMask(labels))
    _check_partition(cube, tile_map)
    assert not any(t.is_mixed for t in tile_map.tiles)
    assert {t.label for t in tile_map.tiles} == {1, 6}


@pytest.mark.parametrize('seed', [0, 1, 2])
def test_slic_phantom_invariants(seed):
    scene = generate_scene(make_phantom_config('standard', seed=seed, size=96))
    tile_map = slic_segment(scene.cube, target_pixels_per_tile=100)
    _check_partition(scene.cube, tile_map)
    history = np.asarray(tile_map.objective_history)
    assert len(history) == tile_map.iterations + 1
    assert np.all(np.diff(history) <= 0)
    # purity after filtration
    filtered = filter_tiles(annotate_tiles(tile_map, scene.mask))
    assert filtered.is_filtered
    assert not any(t.quality and t.is_mixed for t in filtered.tiles)


def test_slic_deterministic():
    scene = generate_scene(make_phantom_config('standard', seed=3, size=64))
    a = slic_segment(scene.cube, target_pixels_per_tile=64)
    b = slic_segment(scene.cube, target_pixels_per_tile=64)
    assert np.array_equal(a.assignment, b.assignment)
    assert a.objective_history == b.objective_history


def test_slic_errors():
    cube = _uniform_cube(10, 10)
    with pytest.raises(ValueError):
        slic_segment(cube, target_pixels_per_tile=15)
    invalid = HsiCube(cube.data, axis=cube.axis, valid_mask=np.zeros((10, 10), dtype='bool'))
    with pytest.raises(ValueError):
        slic_segment(invalid)


def test_enforce_connectivity():
    labels = np.array([
        [0, 0, 1, 1],
        [0, 0, 1, 0],
        [2, 2, 1, 1],
        [2, 2, 2, 2],
    ])
    valid = np.ones_like(labels, dtype='bool')
    out = enforce_connectivity(labels, valid)
    # the orphan pixel of cluster 0 joins its largest neighbour (cluster 1 has 5 pixels)
    assert out[1, 3] == out[0, 2]
    assert len(np.unique(out)) == 3
    # an isolated fragment surrounded by invalid pixels becomes its own tile
    labels = np.array([[0, 0, -1, 0]])
    out = enforce_connectivity(labels, labels >= 0)
    assert out.tolist() == [[0, 0, -1, 1]]


# ========================================================================= #
# ANNOTATION & FILTRATION                                                   #
# ========================================================================= #


def test_annotate_mixed_label():
    cube = _uniform_cube(4, 4)
    assignment = np.zeros((4, 4), dtype='int64')
    assignment[:, 2:] = 1
    tile_map = TileMap(assignment=assignment, tiles=[compute_tile(cube, 0, np.argwhere(assignment == 0)), compute_tile(cube, 1, np.argwhere(assignment == 1))])
    labels = np.ones((4, 4), dtype='uint8')
    labels[0, 3] = 6
    annotated = annotate_tiles(tile_map, AnnotationMask(labels))
    assert annotated.tiles[0].label == 1
    assert annotated.tiles[1].label == MIXED_LABEL


def test_filter_pass_fraction_bound():
    rng = np.random.default_rng(42)
    tile_map = _synthetic_map(rng.uniform(size=(2000, 3)))
    passed = filter_tiles(tile_map).passing()
    assert len(passed) <= 0.25 * tile_map.num_tiles


def test_filter_identical_statistics_all_pass():
    tile_map = _synthetic_map([(0.1, 0.2, 0.5)] * 25)
    assert len(filter_tiles(tile_map).passing()) == 25


def test_filter_monotonicity():
    rng = np.random.default_rng(7)
    tile_map = _synthetic_map(rng.uniform(size=(300, 3)))
    base = {t.tile_id for t in filter_tiles(tile_map, 50, 50, 10, 90).passing()}
    for params in [(40, 50, 10, 90), (50, 30, 10, 90), (50, 50, 20, 90), (50, 50, 10, 70), (10, 10, 40, 60)]:
        tight = {t.tile_id for t in filter_tiles(tile_map, *params).passing()}
        assert tight <= base


def test_filter_discards_mixed_and_other_classes():
    stats = [(0.1, 0.1, 0.5)] * 6
    tile_map = _synthetic_map(stats, labels=[1, 1, MIXED_LABEL, 6, 3, 6])
    result = filter_tiles(tile_map, classes=[1, 6])
    assert [t.quality for t in result.tiles] == [True, True, False, True, False, True]


def test_filter_errors():
    tile_map = _synthetic_map([(0.1, 0.1, 0.5)] * 4)
    with pytest.raises(ValueError):
        filter_tiles(tile_map, intensity_lo=90, intensity_hi=10)
    with pytest.raises(ValueError):
        filter_tiles(tile_map, sam_pctl=101)
    with pytest.raises(ValueError):
        filter_tiles(TileMap(assignment=np.full((2, 2), NO_TILE), tiles=[]))


def test_filter_saturated_patch_fails_intensity():
    config = PhantomConfig(
        seed=4, height=160, width=160, regions=[],
        class_models={0: ClassModel(oxygenation=0.4, baseline=0.8)},
        noise_sigma=0.001, vignette_strength=0.0, saturation_patches=1, saturation_size=8,
    )
    scene = generate_scene(config)
    tile_map = filter_tiles(annotate_tiles(slic_segment(scene.cube, target_pixels_per_tile=200), scene.mask))
    saturated = scene.saturation_mask()
    touching = [t for t in tile_map.tiles if saturated[t.coords[:, 0], t.coords[:, 1]].any()]
    assert len(touching) > 0
    assert not any(t.quality for t in touching)


# ========================================================================= #
# PATCHES                                                                   #
# ========================================================================= #


def test_patch_single_pixel():
    cube = _uniform_cube(8, 8)
    patch = extract_patch(cube, compute_tile(cube, 0, [[3, 5]]))
    assert patch.data.shape == (40, 40, 4)
    nonzero = np.argwhere(np.any(patch.data != 0, axis=-1))
    assert nonzero.tolist() == [[19, 19]]
    assert np.array_equal(patch.data[19, 19], cube.data[3, 5])
    assert patch.mask.sum() == 1


def test_patch_identity_subset_and_sum():
    scene = generate_scene(make_phantom_config('standard', seed=1, size=64))
    tile_map = slic_segment(scene.cube, target_pixels_per_tile=100)
    tile = max((t for t in tile_map.tiles if t.fits(40)), key=lambda t: t.size)
    full = extract_patch(scene.cube, tile)
    subset = extract_patch(scene.cube, tile, channels=list(range(104)))
    assert np.array_equal(full.data, subset.data)
    assert np.all(full.data[~full.mask] == 0)
    channels = [3, 50, 99]
    picked = extract_patch(scene.cube, tile, channels=channels)
    oracle = scene.cube.data[tile.coords[:, 0], tile.coords[:, 1]][:, channels].astype('float64').sum()
    assert picked.data.astype('float64').sum() == pytest.approx(oracle, rel=1e-12)


def test_patch_errors():
    cube = _uniform_cube(50, 4)
    tall = compute_tile(cube, 0, [[r, 0] for r in range(41)])
    with pytest.raises(PatchOverflowError):
        extract_patch(cube, tall)
    with pytest.raises(ValueError):
        extract_patch(cube, compute_tile(cube, 1, [[0, 0]]), channels=[])
    with pytest.raises(ValueError):
        extract_patch(cube, compute_tile(cube, 1, [[0, 0]]), channels=[4])


# ========================================================================= #
# IO & SEPARABILITY                                                         #
# ========================================================================= #


def test_tile_map_file_roundtrip(tmp_path):
    scene = generate_scene(make_phantom_config('standard', seed=2, size=64))
    tile_map = filter_tiles(annotate_tiles(slic_segment(scene.cube, target_pixels_per_tile=100), scene.mask))
    npz_path, tsv_path = save_tile_map(tile_map, tmp_path / 'tiles')
    assert npz_path.exists() and tsv_path.exists()
    loaded = load_tile_map(tmp_path / 'tiles', scene.cube)
    assert np.array_equal(loaded.assignment, tile_map.assignment)
    assert loaded.objective_history == tile_map.objective_history
    for a, b in zip(loaded.tiles, tile_map.tiles):
        assert a.label == b.label
        assert a.quality == b.quality
        assert a.bbox == b.bbox
        assert a.mean_intensity == b.mean_intensity


def test_tile_separability():
    scene = generate_scene(make_phantom_config('single_band', seed=0, size=128))
    tile_map = annotate_tiles(slic_segment(scene.cube, target_pixels_per_tile=64), scene.mask)
    report = tile_separability(tile_map, [1, 6], passing_only=False)
    assert report.level == 'tile'
    assert 0 <= report.pair(1, 6).p_value <= 1
    with pytest.raises(ValueError):
        tile_separability(slic_segment(scene.cube, target_pixels_per_tile=100), [1, 6])


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
