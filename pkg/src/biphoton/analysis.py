"""Temporal transform, width metrics and waist sweeps.

FFT convention: on a grid with ``Omega = 0`` at bin ``N // 2``,

    Phi(t_m) = dOmega / sqrt(2 pi) * sum_k Phi(Omega_k) exp(-i Omega_k t_m)

with ``t_m = (m - N // 2) dt`` and ``dt = 2 pi / (N dOmega)``.  This is
``fftshift(fft(ifftshift(.)))`` with a scale that makes the pair unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import PUMP_WAVELENGTH, SPEED_OF_LIGHT
from .hom import mirror
from .physics import DetectionConfig, PumpConfig
from .projection import (
    ConvergenceError,
    SpectralWavefunction,
    ZeroNormError,
    normalize,
    project_spectrum,
    tail_covering_grid,
)
from .toymodel import toy_constants, toy_wavefunction

MODELS = ("toy", "numeric-approx", "numeric-exact")

# fraction of bins counted as "outermost" and the intensity they may carry
TAIL_BIN_FRACTION = 0.01
TAIL_TOLERANCE = 1e-4


@dataclass
class TemporalWavefunction:
    time_grid: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def dt(self):
        t = self.time_grid
        return float((t[-1] - t[0]) / (t.size - 1))

    @property
    def intensity(self):
        return np.abs(self.values) ** 2


def _time_grid(n, d_omega):
    dt = 2 * math.pi / (n * d_omega)
    return (np.arange(n) - n // 2) * dt


def to_temporal(spectrum):
    n = spectrum.omega_grid.size
    dw = spectrum.d_omega
    vals = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(spectrum.values)))
    vals *= dw / math.sqrt(2 * math.pi)
    meta = {**spectrum.metadata, "omega_grid_start": float(spectrum.omega_grid[0]), "d_omega": dw}
    return TemporalWavefunction(_time_grid(n, dw), vals, meta)


def from_temporal(temporal, temperature=float("nan")):
    """Inverse of :func:`to_temporal`; the Omega grid is rebuilt from the time step."""
    n = temporal.time_grid.size
    dt = temporal.dt
    vals = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(temporal.values)))
    vals *= n * dt / math.sqrt(2 * math.pi)
    d_omega = 2 * math.pi / (n * dt)
    omega = (np.arange(n) - n // 2) * d_omega
    return SpectralWavefunction(omega, vals, temperature, dict(temporal.metadata))


def _weights(intensity):
    total = float(np.sum(intensity))
    if total == 0 or not np.isfinite(total):
        raise ZeroNormError("zero-norm intensity")
    return intensity / total


def _moments(x, w):
    mean = float(np.sum(w * x))
    return mean, math.sqrt(max(float(np.sum(w * (x - mean) ** 2)), 0.0))


def signal_wavelength(omega, pump_wavelength=PUMP_WAVELENGTH):
    omega_p = 2 * math.pi * SPEED_OF_LIGHT / pump_wavelength
    return 2 * math.pi * SPEED_OF_LIGHT / (omega_p / 2 + np.asarray(omega, dtype=float))


def spectral_width(spectrum, pump_wavelength=PUMP_WAVELENGTH):
    """Mean and standard deviation of the signal-wavelength distribution [m].

    The wavelength density is ``|Phi|^2 |dOmega/dlambda|``, so its moments are
    ``lambda(Omega)`` moments under the Omega-domain weights: no linearization.
    """
    w = _weights(spectrum.intensity)
    return _moments(signal_wavelength(spectrum.omega_grid, pump_wavelength), w)


def omega_width(spectrum):
    """RMS width in Omega [rad/s]."""
    return _moments(spectrum.omega_grid, _weights(spectrum.intensity))[1]


def temporal_width(temporal):
    """Standard deviation of ``|Phi(t)|^2`` about its mean time [s]."""
    return _moments(temporal.time_grid, _weights(temporal.intensity))[1]


def tail_fraction(intensity, fraction=TAIL_BIN_FRACTION):
    """Share of total intensity in the outermost ``fraction`` of bins (split over both ends)."""
    n = intensity.size
    k = max(1, int(math.ceil(fraction * n / 2)))
    total = float(np.sum(intensity))
    if total == 0:
        raise ZeroNormError("zero-norm intensity")
    return float(np.sum(intensity[:k]) + np.sum(intensity[-k:])) / total


def asymmetry(spectrum):
    """``sum |I(W) - I(-W)| / (2 sum I)``: 0 for an even intensity, 1 for disjoint halves."""
    I = spectrum.intensity
    Im = np.abs(mirror(spectrum)) ** 2
    total = float(np.sum(I))
    if total == 0:
        raise ZeroNormError("zero-norm intensity")
    return float(np.sum(np.abs(I - Im))) / (2 * total)


def l2_distance(a, b):
    """Relative L2 distance ``||a - b|| / ||b||`` of two normalized spectra on one grid."""
    va = normalize(a).values if isinstance(a, SpectralWavefunction) else np.asarray(a)
    vb = normalize(b).values if isinstance(b, SpectralWavefunction) else np.asarray(b)
    return float(np.linalg.norm(va - vb) / np.linalg.norm(vb))


@dataclass
class WidthReport:
    w_p: float
    w_d: float
    model: str
    mean_lambda: float = float("nan")
    delta_lambda: float = float("nan")
    delta_t: float = float("nan")
    delta_omega: float = float("nan")
    warnings: tuple = ()
    error: str | None = None

    @property
    def ok(self):
        return self.error is None


def compute_spectrum(model, pump, detection, crystal, dispersion, temperature=None, omega_grid=None, quad=None):
    """Normalized spectrum from one of the three models."""
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; choose from {', '.join(MODELS)}")
    T = dispersion.T0 if temperature is None else float(temperature)
    if omega_grid is None:
        omega_grid = tail_covering_grid(crystal, dispersion, detection)
    if model == "toy":
        k = toy_constants(pump, detection, crystal, dispersion)
        spec = toy_wavefunction(omega_grid, k, T, dispersion)
    elif model == "numeric-approx":
        spec = project_spectrum(omega_grid, T, pump, detection, crystal, dispersion, quad)
    else:
        disp = dispersion if dispersion.mode == "exact" else dispersion.with_mode("exact")
        spec = project_spectrum(omega_grid, T, pump, detection, crystal, disp, quad, integrand="exact")
    return normalize(spec)


def width_report(spectrum, pump, detection, model, pump_wavelength=None):
    lam_p = pump.wavelength if pump_wavelength is None else pump_wavelength
    mean, dlam = spectral_width(spectrum, lam_p)
    temporal = to_temporal(spectrum)
    notes = []
    if tail_fraction(spectrum.intensity) > TAIL_TOLERANCE:
        notes.append("spectral-tail")
    if tail_fraction(temporal.intensity) > TAIL_TOLERANCE:
        notes.append("temporal-tail")
    return WidthReport(
        pump.waist, detection.waist, model, mean, dlam, temporal_width(temporal), omega_width(spectrum), tuple(notes)
    )


def sweep_widths(w_d_list, w_p_list, model, crystal, dispersion, pump_wavelength=PUMP_WAVELENGTH,
                 temperature=None, quad=None, n_points=2048):
    """Width metrics for every ``(w_p, w_d)`` pair, ordered by ``(w_p, w_d)``.

    A point whose model raises is recorded with ``error`` set and the sweep
    continues.
    """
    w_d_list = sorted(float(w) for w in w_d_list)
    w_p_list = sorted(float(w) for w in w_p_list)
    if not w_d_list or not w_p_list:
        raise ValueError("waist lists must be non-empty")
    if min(w_d_list + w_p_list) <= 0:
        raise ValueError("waists must be positive")
    reports = []
    for w_p in w_p_list:
        pump = PumpConfig(w_p, pump_wavelength)
        for w_d in w_d_list:
            det = DetectionConfig(w_d)
            try:
                grid = tail_covering_grid(crystal, dispersion, det, n_points)
                spec = compute_spectrum(model, pump, det, crystal, dispersion, temperature, grid, quad)
                reports.append(width_report(spec, pump, det, model))
            except (ConvergenceError, ZeroNormError, ValueError, FloatingPointError) as exc:
                reports.append(WidthReport(w_p, w_d, model, error=f"{type(exc).__name__}: {exc}"))
    return reports


def tuning_ratio(reports, attr="delta_lambda"):
    vals = [getattr(r, attr) for r in reports if r.ok]
    if not vals:
        return float("nan")
    return max(vals) / min(vals)
