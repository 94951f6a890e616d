"""Hong-Ou-Mandel coincidence maps over (delay, temperature) and their inversion.

For a cw pump the coincidence probability at delay ``tau`` is

    C(tau, T) = 1/2 [1 - Re int g_T(W) exp(-2i W (tau - tau_c)) dW / int |Phi_T|^2 dW]

with ``g_T(W) = Phi_T(W) Phi_T*(-W)`` and ``tau_c`` the delay added by the
walk-off compensator.  ``g_T`` is Hermitian, so ``K = 1 - 2C`` is its real
Fourier transform in the variable ``2 tau``; integrating ``K`` over ``tau``
returns ``pi g_T(0) / N = pi |Phi_T(0)|^2 / N``.  Scanning ``T`` slides the
spectrum across ``W = 0``, which is how the intensity is read back.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .constants import TAU_POINTS, TAU_SPAN, TEMPERATURE_RANGE, TEMPERATURE_STEP
from .projection import ZeroNormError


class NyquistError(ValueError):
    pass


class CalibrationError(ValueError):
    pass


class CoverageWarning(RuntimeWarning):
    pass


def scan_tau_grid():
    """52 delays spanning +-3.05 ps (step ~0.12 ps) [s]."""
    return np.linspace(-TAU_SPAN, TAU_SPAN, TAU_POINTS)


def scan_temperature_grid():
    """45..60 degC in 0.2 degC steps (76 points)."""
    lo, hi = TEMPERATURE_RANGE
    return np.linspace(lo, hi, int(round((hi - lo) / TEMPERATURE_STEP)) + 1)


def walkoff_compensation(crystal, dispersion):
    """Delay that re-centres the dip: half the signal-idler group delay, ``L F / 2``."""
    return crystal.length * dispersion.F / 2


@dataclass
class HomMap:
    """Coincidence probabilities; ``values[i, j]`` is at ``tau_grid[i]``, ``temperature_grid[j]``."""

    tau_grid: np.ndarray
    temperature_grid: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.tau_grid = np.asarray(self.tau_grid, dtype=float)
        self.temperature_grid = np.asarray(self.temperature_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.tau_grid.size, self.temperature_grid.size):
            raise ValueError("map shape does not match its grids")

    @property
    def shape(self):
        return self.values.shape


def mirror(spectrum):
    """``Phi(-Omega)`` on the same centred grid; the unmatched end bin gets 0."""
    om = spectrum.omega_grid
    n = om.size
    c = n // 2
    if abs(om[c]) > 1e-9 * spectrum.d_omega:
        raise ValueError("HOM overlap needs a grid with Omega = 0 on bin n // 2")
    out = np.zeros_like(spectrum.values)
    if n % 2:
        out[:] = spectrum.values[::-1]
    else:
        out[1:] = spectrum.values[:0:-1]
    return out


def _overlap_row(spectrum, tau_grid, delay_offset, backend):
    phi = spectrum.values
    norm = float(np.sum(np.abs(phi) ** 2)) * spectrum.d_omega
    if norm == 0:
        raise ZeroNormError("all-zero spectrum")
    g = phi * np.conj(mirror(spectrum))
    K = _kernels.hom_overlap(spectrum.omega_grid, g, tau_grid, delay_offset, spectrum.d_omega, backend) / norm
    return np.clip(0.5 * (1 - K), 0.0, 1.0)


def hom_dip(spectrum, tau_grid, delay_offset=0.0, backend=None):
    """Coincidence probability versus delay for a single spectrum."""
    return _overlap_row(spectrum, np.asarray(tau_grid, dtype=float), delay_offset, backend)


def visibility(dip):
    return 1.0 - 2.0 * float(np.min(dip))


def hom_map(spectrum_provider, tau_grid, temperature_grid, delay_offset=0.0, metadata=None, backend=None):
    """Fill a coincidence map; ``spectrum_provider(T)`` returns the spectrum at ``T``."""
    taus = np.asarray(tau_grid, dtype=float)
    temps = np.asarray(temperature_grid, dtype=float)
    values = np.empty((taus.size, temps.size))
    for j, T in enumerate(temps):
        values[:, j] = _overlap_row(spectrum_provider(float(T)), taus, delay_offset, backend)
    meta = dict(metadata or {})
    meta.setdefault("delay_offset_s", float(delay_offset))
    return HomMap(taus, temps, values, meta)


def add_poisson_noise(hmap, mean_counts, rng=None):
    """Shot-noise hook for robustness tests; ``C = 1/2`` maps to ``mean_counts``."""
    rng = np.random.default_rng(rng)
    lam = 2.0 * mean_counts * hmap.values
    noisy = rng.poisson(lam) / (2.0 * mean_counts)
    return HomMap(hmap.tau_grid, hmap.temperature_grid, noisy, {**hmap.metadata, "noise_mean_counts": mean_counts})


def raised_cosine_window(tau_grid, flat_fraction=0.8):
    """Unity over the central ``flat_fraction`` of the span, cosine taper to 0 at the ends."""
    t = np.asarray(tau_grid, dtype=float)
    mid = 0.5 * (t[0] + t[-1])
    half = 0.5 * (t[-1] - t[0])
    x = np.abs(t - mid) / half
    w = np.ones_like(x)
    if flat_fraction < 1:
        edge = x > flat_fraction
        w[edge] = 0.5 * (1 + np.cos(np.pi * (x[edge] - flat_fraction) / (1 - flat_fraction)))
    return w


def _trapz_weights(t):
    w = np.empty_like(t)
    d = np.diff(t)
    w[0] = d[0] / 2
    w[-1] = d[-1] / 2
    w[1:-1] = (d[:-1] + d[1:]) / 2
    return w


def spectral_autocorrelation(hmap, omegas, delay_offset=None, flat_fraction=0.8):
    """Estimate ``g_T(Omega) / N`` for each temperature by inverse transform along tau.

    Returns an array of shape ``(len(omegas), n_T)``.
    """
    if delay_offset is None:
        delay_offset = float(hmap.metadata.get("delay_offset_s", 0.0))
    t = hmap.tau_grid
    K = 1.0 - 2.0 * hmap.values
    w = raised_cosine_window(t, flat_fraction) * _trapz_weights(t)
    om = np.atleast_1d(np.asarray(omegas, dtype=float))
    kernel = np.exp(2j * np.outer(om, t - delay_offset)) * w[None, :]
    return kernel @ K / np.pi


@dataclass
class RecoveredIntensity:
    temperature: np.ndarray
    omega0: np.ndarray  # -b (T - T0) / F
    omega: np.ndarray  # detuning actually probed, -omega0
    intensity: np.ndarray  # unit area over omega
    warnings: list = field(default_factory=list)


def recover_spectral_intensity(hmap, b_over_F=None, T0=None, flat_fraction=0.8):
    """Read ``|Phi(Omega)|^2`` off the ``Omega = 0`` slice of the autocorrelation.

    ``b_over_F`` [rad/(s K)] converts temperature to detuning; it falls back
    to the map metadata.
    """
    if b_over_F is None:
        b_over_F = hmap.metadata.get("b_over_F")
    if b_over_F is None:
        raise CalibrationError("b/F calibration missing: pass b_over_F or provide map metadata")
    b_over_F = float(b_over_F)
    if not b_over_F > 0:
        raise CalibrationError(f"b/F must be positive, got {b_over_F!r}")
    if T0 is None:
        T0 = float(hmap.metadata.get("T0", 54.0))
    t = hmap.tau_grid
    if t.size < 2 or hmap.temperature_grid.size < 2:
        raise ValueError("map needs at least two delays and two temperatures")
    dtau = float(np.max(np.diff(t)))
    temps = hmap.temperature_grid
    omega0 = -b_over_F * (temps - T0)
    omega_max = float(np.max(np.abs(omega0)))
    if 2 * omega_max * dtau >= math.pi:
        raise NyquistError(
            f"delay step {dtau:.3e} s cannot resolve detuning {omega_max:.3e} rad/s (2 W dtau >= pi)"
        )
    g0 = spectral_autocorrelation(hmap, [0.0], flat_fraction=flat_fraction)[0].real
    g0 = np.clip(g0, 0.0, None)
    omega = -omega0
    order = np.argsort(omega)
    d_omega = abs(b_over_F * float(np.mean(np.diff(temps))))
    area = float(np.sum(g0)) * d_omega
    if area <= 0:
        raise ZeroNormError("recovered intensity vanishes")
    intensity = g0 / area
    notes = []
    mean = float(np.sum(omega * intensity) * d_omega)
    std = math.sqrt(max(float(np.sum((omega - mean) ** 2 * intensity) * d_omega), 0.0))
    edge = min(abs(omega0[0]), abs(omega0[-1]))
    if edge < 3 * std:
        msg = (
            f"temperature scan covers |Omega0| <= {edge:.3e} rad/s at its nearer edge, "
            f"less than 3 spectral std ({3 * std:.3e} rad/s); intensity is truncated"
        )
        warnings.warn(msg, CoverageWarning, stacklevel=2)
        notes.append("coverage")
    return RecoveredIntensity(temps[order], omega0[order], omega[order], intensity[order], notes)
