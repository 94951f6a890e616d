"""Closed-form spectral wavefunction of the equal-index, paraxial model.

For ``Omega >= 0`` the spectrum is a single complex exponential
``A exp(-alpha Omega)``.  For ``Omega < 0`` transverse momenta can cancel
the longitudinal mismatch and a second exponential appears whose rate is
set by the detection waist; at ``w_d = w_opt`` its coefficient has a
removable pole which is evaluated through ``expm1(x)/x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import SINC_EXP_FACTOR, SPEED_OF_LIGHT
from .projection import SpectralWavefunction

# relative distance |w_d^2 - w_opt^2| / w_opt^2 below which the series is used
SERIES_THRESHOLD = 1e-6


@dataclass(frozen=True)
class ToyModelConstants:
    A: complex
    alpha: complex
    w_opt: float
    F: float
    k_0p: float
    L: float
    w_p: float
    w_d: float
    # True when the dispersion gave F < 0 and signal/idler were swapped
    relabeled: bool = False

    @property
    def decay_rate(self):
        """Amplitude decay rate ``Re(alpha)`` of the Omega >= 0 branch [s]."""
        return self.alpha.real


def toy_constants(pump, detection, crystal, dispersion):
    L = crystal.length
    F = dispersion.F
    relabeled = F < 0
    F = abs(F)
    k0p = dispersion.k_0p
    w_p, w_d = pump.waist, detection.waist
    w_opt2 = 2 * SINC_EXP_FACTOR * L * SPEED_OF_LIGHT / (pump.omega * dispersion.n_0p)
    A = 4 * w_p * w_d**2 / (
        math.sqrt(2 * math.pi) * (2 * w_p**2 + w_d**2 - 1j * w_opt2 / SINC_EXP_FACTOR) * (w_d**2 + w_opt2)
    )
    alpha = (L * F / 2) * (SINC_EXP_FACTOR + 1j)
    return ToyModelConstants(A, alpha, math.sqrt(w_opt2), F, k0p, L, w_p, w_d, relabeled)


def _expm1_ratio(x, series):
    if series:
        return 1 + x / 2 + x * x / 6
    out = np.ones_like(x)
    nz = x != 0
    out[nz] = np.expm1(x[nz]) / x[nz]
    return out


def toy_spectrum(Omega, k):
    """Toy-model spectral wavefunction at detuning ``Omega`` [rad/s]."""
    Omega = np.asarray(Omega, dtype=float)
    om = -Omega if k.relabeled else Omega
    scalar = om.ndim == 0
    om = np.atleast_1d(om)
    out = np.empty(om.shape, dtype=complex)
    neg = om < 0
    out[~neg] = k.A * np.exp(-k.alpha * om[~neg])
    if np.any(neg):
        o = om[neg]
        wd2, wo2 = k.w_d**2, k.w_opt**2
        c = k.F * k.k_0p / 4
        first = np.exp(-k.alpha * o + (wd2 + wo2) * c * o)
        x = (wd2 - wo2) * c * o
        series = abs(wd2 - wo2) < SERIES_THRESHOLD * wo2
        # exp(Re(alpha) o) * expm1(x) / x, arranged so nothing overflows
        re_a = k.alpha.real
        pos = x > 0
        mag = np.empty_like(o)
        if series:
            mag = np.exp(re_a * o) * _expm1_ratio(x, True)
        else:
            mag[~pos] = np.exp(re_a * o[~pos]) * _expm1_ratio(x[~pos], False)
            xp = x[pos]
            mag[pos] = np.exp(re_a * o[pos] + xp) * (-np.expm1(-xp) / xp)
        second = (wd2 + wo2) * c * o * np.exp(-1j * k.alpha.imag * o) * mag
        out[neg] = k.A * (first - second)
    return out[0] if scalar else out


def toy_spectrum_at_temperature(Omega, T, k, dispersion):
    """Toy model away from ``T0``: the spectrum translated by ``-b (T - T0) / F``."""
    shift = dispersion.thermal_detuning_b * (T - dispersion.T0) / dispersion.F
    return toy_spectrum(np.asarray(Omega, dtype=float) + shift, k)


def toy_wavefunction(omega_grid, k, T=None, dispersion=None):
    """Sample the toy model on a grid as a :class:`SpectralWavefunction`."""
    if T is None or dispersion is None:
        T = dispersion.T0 if dispersion is not None else float("nan")
        values = toy_spectrum(omega_grid, k)
    else:
        values = toy_spectrum_at_temperature(omega_grid, T, k, dispersion)
    meta = {"model": "toy", "w_p": k.w_p, "w_d": k.w_d, "w_opt": k.w_opt, "relabeled": k.relabeled}
    return SpectralWavefunction(omega_grid, values, float(T), meta)
