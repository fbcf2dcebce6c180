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

import logging
from dataclasses import dataclass
from dataclasses import field
from typing import Dict
from typing import List
from typing import Optional
from typing import Tuple

import numpy as np
from omegaconf import DictConfig
from omegaconf import OmegaConf

from hyperglio.cube import AnnotationMask
from hyperglio.cube import HsiCube
from hyperglio.cube import NUM_TISSUE_CLASSES
from hyperglio.cube import SATURATION_CAP
from hyperglio.cube import SpectralAxis
from hyperglio.dataset._examples import Scene
from hyperglio.util.seeds import make_rng


log = logging.getLogger(__name__)


# ========================================================================= #
# Spectral Model                                                            #
# ========================================================================= #


# absorption dips are gaussians with this full width at half maximum
DIP_FWHM_NM = 15.0
DIP_SIGMA_NM = DIP_FWHM_NM / (2 * np.sqrt(2 * np.log(2)))

DEOXY_DIP_NM = 560.0
OXY_DIP_NM = (540.0, 580.0)


def _gaussian(wavelengths: np.ndarray, center_nm: float, sigma_nm: float) -> np.ndarray:
    return np.exp(-0.5 * ((wavelengths - center_nm) / sigma_nm) ** 2)


def hemoglobin_like_spectrum(
    axis: SpectralAxis,
    oxygenation: float,
    level: float = 0.55,
    dip_depth: float = 0.25,
    red_rise: float = 0.3,
    red_rise_nm: float = 620.0,
    red_rise_width_nm: float = 15.0,
) -> np.ndarray:
    """
    Smooth tissue-like reflectance curve. Deoxygenated blood gives a single
    absorption dip at 560 nm, oxygenated blood a double dip at 540 and 580 nm,
    intermediate oxygenation linearly blends the two. A sigmoid rise toward the
    red end is shared by all oxygenations.

    Parameters:
    - oxygenation: fraction in [0, 1]
    - level: reflectance away from the dips
    - dip_depth: depth of each absorption dip
    - red_rise: height of the red sigmoid, centered at `red_rise_nm`
    """
    if not (0.0 <= oxygenation <= 1.0):
        raise ValueError(f'oxygenation must be in range [0, 1], got: {oxygenation}')
    wl = axis.wavelengths_nm
    deoxy = -dip_depth * _gaussian(wl, DEOXY_DIP_NM, DIP_SIGMA_NM)
    oxy = -dip_depth * (_gaussian(wl, OXY_DIP_NM[0], DIP_SIGMA_NM) + _gaussian(wl, OXY_DIP_NM[1], DIP_SIGMA_NM))
    rise = red_rise / (1.0 + np.exp(-(wl - red_rise_nm) / red_rise_width_nm))
    return level + rise + (1.0 - oxygenation) * deoxy + oxygenation * oxy


def band_boost(axis: SpectralAxis, wavelength_nm: float, amplitude: float) -> np.ndarray:
    """Narrow additive peak, about one band wide, centered on the band nearest `wavelength_nm`."""
    idx = axis.band_index(wavelength_nm)
    spacing = float(np.median(np.diff(axis.wavelengths_nm))) if axis.band_count > 1 else 1.0
    return amplitude * _gaussian(axis.wavelengths_nm, axis.wavelengths_nm[idx], spacing / 2)


# ========================================================================= #
# Config                                                                    #
# ========================================================================= #


@dataclass
class BandBoost(object):
    wavelength_nm: float = 700.0
    amplitude: float = 0.1


@dataclass
class ClassModel(object):
    """
    Generating spectrum of one tissue class:
        baseline * hemoglobin_like_spectrum(oxygenation) + sum(boosts)
    """
    oxygenation: float = 0.5
    baseline: float = 1.0
    boosts: List[BandBoost] = field(default_factory=list)

    def spectrum(self, axis: SpectralAxis) -> np.ndarray:
        spectrum = self.baseline * hemoglobin_like_spectrum(axis, self.oxygenation)
        for boost in self.boosts:
            spectrum = spectrum + band_boost(axis, boost.wavelength_nm, boost.amplitude)
        return spectrum


@dataclass
class RegionSpec(object):
    """
    A labeled region, coordinates are fractions of the image height/width.
    - ellipse: `size` holds the (row, col) radii
    - rect: `size` holds the (row, col) half extents
    """
    class_id: int = 1
    shape: str = 'ellipse'
    center: List[float] = field(default_factory=lambda: [0.5, 0.5])
    size: List[float] = field(default_factory=lambda: [0.2, 0.2])

    def rasterize(self, height: int, width: int) -> np.ndarray:
        rows = (np.arange(height) + 0.5) / height
        cols = (np.arange(width) + 0.5) / width
        dr = (rows[:, None] - self.center[0]) / self.size[0]
        dc = (cols[None, :] - self.center[1]) / self.size[1]
        if self.shape == 'ellipse':
            return (dr ** 2 + dc ** 2) <= 1.0
        elif self.shape == 'rect':
            return (np.abs(dr) <= 1.0) & (np.abs(dc) <= 1.0)
        raise KeyError(f'invalid region shape: {repr(self.shape)}, must be one of: ["ellipse", "rect"]')


@dataclass
class PhantomConfig(object):
    """
    Parameters of a synthetic scene. The seed fully determines the output.
    Pixels outside every region are background (class 0).
    """
    seed: int = 0
    height: int = 256
    width: int = 256
    regions: List[RegionSpec] = field(default_factory=list)
    class_models: Dict[int, ClassModel] = field(default_factory=dict)
    noise_sigma: float = 0.01
    vignette_strength: float = 0.3
    # illuminated circle, radius as a fraction of min(height, width) / 2
    illumination_radius: float = 1.0
    saturation_patches: int = 0
    saturation_size: int = 6
    # bookkeeping
    patient_id: str = 'P0'
    scene_id: Optional[str] = None

    @classmethod
    def from_config(cls, cfg) -> 'PhantomConfig':
        """Build from a dict or OmegaConf node, validated against the dataclass schema."""
        if isinstance(cfg, PhantomConfig):
            return cfg
        if not isinstance(cfg, DictConfig):
            cfg = OmegaConf.create(cfg)
        return OmegaConf.to_object(OmegaConf.merge(OmegaConf.structured(cls), cfg))

    def get_scene_id(self) -> str:
        return self.scene_id if self.scene_id else f'phantom_{self.seed:04d}'


@dataclass
class PhantomScene(object):
    cube: HsiCube
    mask: AnnotationMask
    truth: Dict[int, np.ndarray]
    config: PhantomConfig
    # (row, col, size) of each saturated square
    saturation_patches: List[Tuple[int, int, int]] = field(default_factory=list)

    @property
    def scene_id(self) -> str:
        return self.config.get_scene_id()

    @property
    def patient_id(self) -> str:
        return self.config.patient_id

    def saturation_mask(self) -> np.ndarray:
        sat = np.zeros(self.mask.shape, dtype='bool')
        for r, c, s in self.saturation_patches:
            sat[r:r+s, c:c+s] = True
        return sat

    def as_scene(self) -> Scene:
        return Scene(cube=self.cube, mask=self.mask, scene_id=self.scene_id, patient_id=self.patient_id)


# ========================================================================= #
# Generation                                                                #
# ========================================================================= #


_STREAM_NOISE = 1
_STREAM_SATURATION = 2


def _check_config(config: PhantomConfig):
    if config.height < 1 or config.width < 1:
        raise ValueError(f'phantom size must be positive, got: {config.height}x{config.width}')
    if not (0.0 <= config.vignette_strength < 1.0):
        raise ValueError(f'vignette_strength must be in range [0, 1), got: {config.vignette_strength}')
    if config.noise_sigma < 0:
        raise ValueError(f'noise_sigma must be non-negative, got: {config.noise_sigma}')
    if config.saturation_patches < 0 or config.saturation_size < 1:
        raise ValueError(f'invalid saturation patches: count={config.saturation_patches}, size={config.saturation_size}')
    for region in config.regions:
        if not (0 <= region.class_id < NUM_TISSUE_CLASSES):
            raise ValueError(f'region class id {region.class_id} is outside the tissue class schema [0, {NUM_TISSUE_CLASSES - 1}]')


def rasterize_regions(config: PhantomConfig) -> np.ndarray:
    """Label image of the configured regions, overlapping regions must agree on their label."""
    labels = np.zeros((config.height, config.width), dtype='uint8')
    owner = np.full((config.height, config.width), -1, dtype='int64')
    for i, region in enumerate(config.regions):
        area = region.rasterize(config.height, config.width)
        if not np.any(area):
            raise ValueError(f'region {i} (class {region.class_id}) has zero area at {config.height}x{config.width}')
        conflict = area & (owner >= 0) & (labels != region.class_id)
        if np.any(conflict):
            j = int(owner[conflict][0])
            raise ValueError(f'region {i} (class {region.class_id}) overlaps region {j} (class {config.regions[j].class_id}) with a conflicting label')
        labels[area] = region.class_id
        owner[area & (owner < 0)] = i
    return labels


def illumination(config: PhantomConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Returns the (vignette multiplier, illuminated mask) for the scene."""
    rows = np.arange(config.height) + 0.5 - config.height / 2
    cols = np.arange(config.width) + 0.5 - config.width / 2
    r = np.sqrt(rows[:, None] ** 2 + cols[None, :] ** 2) / (min(config.height, config.width) / 2)
    inside = r <= config.illumination_radius
    vignette = 1.0 - config.vignette_strength * np.minimum(r, 1.0) ** 2
    return vignette, inside


def _place_saturation(config: PhantomConfig, inside: np.ndarray) -> List[Tuple[int, int, int]]:
    s = config.saturation_size
    if config.saturation_patches == 0:
        return []
    # top-left corners whose whole square is illuminated
    h, w = config.height - s + 1, config.width - s + 1
    if h < 1 or w < 1:
        raise ValueError(f'saturation_size={s} does not fit in a {config.height}x{config.width} scene')
    fits = np.ones((h, w), dtype='bool')
    for dr in range(s):
        for dc in range(s):
            fits &= inside[dr:dr+h, dc:dc+w]
    candidates = np.argwhere(fits)
    if len(candidates) == 0:
        raise ValueError('no illuminated location fits a saturation patch')
    rng = make_rng(config.seed, _STREAM_SATURATION)
    picks = rng.choice(len(candidates), size=config.saturation_patches, replace=len(candidates) < config.saturation_patches)
    return [(int(candidates[i][0]), int(candidates[i][1]), int(s)) for i in picks]


def generate_scene(config: PhantomConfig, axis: Optional[SpectralAxis] = None) -> PhantomScene:
    """
    Deterministic synthetic scene. Each row draws its noise from an independent
    PCG64 stream derived from (seed, row), so rows can be generated in any order.
    """
    config = PhantomConfig.from_config(config)
    axis = SpectralAxis.default() if (axis is None) else axis
    _check_config(config)
    labels = rasterize_regions(config)
    # generating spectra of every class present
    present = sorted(int(c) for c in np.unique(labels))
    missing = [c for c in present if c not in config.class_models]
    if missing:
        raise ValueError(f'no class model for classes present in the scene: {missing}')
    truth = {c: config.class_models[c].spectrum(axis) for c in present}
    table = np.zeros((NUM_TISSUE_CLASSES, axis.band_count), dtype='float64')
    for c, spectrum in truth.items():
        table[c] = spectrum
    # illumination
    vignette, inside = illumination(config)
    # generate row by row
    data = np.zeros((config.height, config.width, axis.band_count), dtype='float32')
    for row in range(config.height):
        spectra = table[labels[row]]
        if config.noise_sigma > 0:
            rng = make_rng(config.seed, _STREAM_NOISE, row)
            spectra = spectra + rng.normal(0.0, config.noise_sigma, size=spectra.shape)
        spectra = spectra * vignette[row][:, None]
        spectra[~inside[row]] = 0.0
        data[row] = spectra
    # saturated specular patches, kept valid so that filtration has to remove them
    patches = _place_saturation(config, inside)
    for r, c, s in patches:
        data[r:r+s, c:c+s, :] = SATURATION_CAP
    cube = HsiCube(data=data, axis=axis, valid_mask=inside)
    log.debug(f'generated phantom {config.get_scene_id()}: {cube}, classes={present}, saturation_patches={len(patches)}')
    return PhantomScene(cube=cube, mask=AnnotationMask(labels), truth=truth, config=config, saturation_patches=patches)


# ========================================================================= #
# Presets                                                                   #
# ========================================================================= #


def _focus_layout() -> List[RegionSpec]:
    return [
        RegionSpec(class_id=1,  shape='rect',    center=[0.40, 0.30], size=[0.22, 0.16]),
        RegionSpec(class_id=13, shape='ellipse', center=[0.76, 0.30], size=[0.09, 0.12]),
        RegionSpec(class_id=6,  shape='rect',    center=[0.40, 0.70], size=[0.22, 0.16]),
        RegionSpec(class_id=8,  shape='ellipse', center=[0.76, 0.70], size=[0.09, 0.12]),
    ]


def _focus_models(healthy: ClassModel, lgg: ClassModel) -> Dict[int, ClassModel]:
    return {
        0: ClassModel(oxygenation=0.5, baseline=0.8),
        1: healthy,
        13: ClassModel(oxygenation=healthy.oxygenation, baseline=healthy.baseline, boosts=list(healthy.boosts)),
        6: lgg,
        8: ClassModel(oxygenation=lgg.oxygenation, baseline=lgg.baseline, boosts=list(lgg.boosts)),
    }


def standard_phantom_config(seed: int = 0, size: int = 256, **kwargs) -> PhantomConfig:
    """Healthy and LGG differ in oxygenation and in four planted red/NIR bands."""
    lgg = ClassModel(oxygenation=0.35, baseline=0.95, boosts=[
        BandBoost(650.0, 0.06), BandBoost(690.0, 0.08), BandBoost(720.0, 0.06), BandBoost(760.0, 0.05),
    ])
    return PhantomConfig(
        seed=seed, height=size, width=size,
        regions=_focus_layout(),
        class_models=_focus_models(ClassModel(oxygenation=0.7, baseline=1.0), lgg),
        **{**dict(noise_sigma=0.02, vignette_strength=0.3, saturation_patches=2), **kwargs},
    )


def single_band_phantom_config(seed: int = 0, size: int = 256, wavelength_nm: float = 700.0, amplitude: float = 0.15, **kwargs) -> PhantomConfig:
    """Healthy and LGG share their base spectrum and differ only by one planted band."""
    base = ClassModel(oxygenation=0.6, baseline=1.0)
    lgg = ClassModel(oxygenation=0.6, baseline=1.0, boosts=[BandBoost(wavelength_nm, amplitude)])
    return PhantomConfig(
        seed=seed, height=size, width=size,
        regions=_focus_layout(),
        class_models=_focus_models(base, lgg),
        **{**dict(noise_sigma=0.01, vignette_strength=0.0, saturation_patches=0), **kwargs},
    )


def multi_band_phantom_config(seed: int = 0, size: int = 256, wavelengths_nm: Tuple[float, ...] = (600.0, 650.0, 700.0, 740.0, 770.0), amplitude: float = 0.06, **kwargs) -> PhantomConfig:
    """Several weak planted bands, informative jointly more than individually."""
    base = ClassModel(oxygenation=0.6, baseline=1.0)
    lgg = ClassModel(oxygenation=0.6, baseline=1.0, boosts=[BandBoost(float(wl), amplitude) for wl in wavelengths_nm])
    return PhantomConfig(
        seed=seed, height=size, width=size,
        regions=_focus_layout(),
        class_models=_focus_models(base, lgg),
        **{**dict(noise_sigma=0.02, vignette_strength=0.1, saturation_patches=0), **kwargs},
    )


def ood_phantom_config(seed: int = 0, size: int = 256, ood_class: int = 3, **kwargs) -> PhantomConfig:
    """Standard phantom with an additional non-focus class never seen in training."""
    config = standard_phantom_config(seed=seed, size=size, **kwargs)
    config.regions = config.regions + [RegionSpec(class_id=ood_class, shape='ellipse', center=[0.10, 0.50], size=[0.06, 0.12])]
    config.class_models[ood_class] = ClassModel(oxygenation=0.0, baseline=0.55, boosts=[BandBoost(500.0, 0.15), BandBoost(610.0, -0.08)])
    return config


PHANTOM_PRESETS = {
    'standard': standard_phantom_config,
    'single_band': single_band_phantom_config,
    'multi_band': multi_band_phantom_config,
    'ood': ood_phantom_config,
}


def make_phantom_config(preset: str, seed: int = 0, size: int = 256, **kwargs) -> PhantomConfig:
    if preset not in PHANTOM_PRESETS:
        raise KeyError(f'invalid phantom preset: {repr(preset)}, valid presets are: {sorted(PHANTOM_PRESETS)}')
    return PHANTOM_PRESETS[preset](seed=seed, size=size, **kwargs)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
