"""Spatio-spectral biphoton wavefunctions of cw-pumped type-II SPDC."""

from .analysis import (
    TemporalWavefunction,
    WidthReport,
    asymmetry,
    compute_spectrum,
    from_temporal,
    l2_distance,
    spectral_width,
    sweep_widths,
    temporal_width,
    to_temporal,
)
from .dispersion import DispersionModel, default_ktp_dispersion, equal_index_dispersion, ktp_dispersion
from .hom import HomMap, hom_dip, hom_map, recover_spectral_intensity, visibility, walkoff_compensation
from .physics import CrystalConfig, DetectionConfig, MomentumPair, PumpConfig, calibrate_poling, mode_function
from .projection import QuadratureSpec, SpectralWavefunction, normalize, project_spectrum
from .toymodel import toy_constants, toy_spectrum, toy_wavefunction

__version__ = "0.1.0"
