"""Configuration types and the unprojected two-photon mode function.

Transverse wavevectors are passed component-first: ``p = (p_x, p_y)`` where
each component may be a scalar or an array; everything broadcasts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import (
    CRYSTAL_LENGTH,
    DEGENERACY_TEMPERATURE,
    POLING_EXPANSION,
    PUMP_WAVELENGTH,
    SINC_EXP_FACTOR,
    SPEED_OF_LIGHT,
    SUPPORTED_TEMPERATURES,
)


class EvanescentError(ValueError):
    """Transverse momentum exceeds the total wavenumber."""


class PolingError(ValueError):
    """No finite positive poling period phase-matches the process."""


@dataclass(frozen=True)
class CrystalConfig:
    length: float = CRYSTAL_LENGTH
    # None: calibrate against the dispersion model when needed
    poling_period_at_T0: float | None = None
    T0: float = DEGENERACY_TEMPERATURE
    thermal_poling_coefficient: float = POLING_EXPANSION

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError("crystal length must be positive")
        if self.poling_period_at_T0 is not None:
            if not self.poling_period_at_T0 > 0:
                raise ValueError("poling period must be positive")
            lo, hi = SUPPORTED_TEMPERATURES
            for T in (lo, hi):
                if not 1 + self.thermal_poling_coefficient * (T - self.T0) > 0:
                    raise ValueError("poling period becomes non-positive in the supported temperature range")

    def poling_period(self, T):
        if self.poling_period_at_T0 is None:
            raise PolingError("poling period not set; calibrate it first")
        return self.poling_period_at_T0 * (1 + self.thermal_poling_coefficient * (np.asarray(T) - self.T0))


@dataclass(frozen=True)
class PumpConfig:
    """Monochromatic Gaussian pump."""

    waist: float
    wavelength: float = PUMP_WAVELENGTH

    def __post_init__(self):
        if not (self.waist > 0 and self.wavelength > 0):
            raise ValueError("pump waist and wavelength must be positive")

    @property
    def omega(self):
        return 2 * math.pi * SPEED_OF_LIGHT / self.wavelength


@dataclass(frozen=True)
class DetectionConfig:
    """Gaussian collection mode, identical for signal and idler."""

    waist: float

    def __post_init__(self):
        if not self.waist > 0:
            raise ValueError("detection waist must be positive")


@dataclass(frozen=True)
class MomentumPair:
    p: np.ndarray = field(default_factory=lambda: np.zeros(2))
    q: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float))
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))
        if self.p.shape[0] != 2 or self.q.shape[0] != 2:
            raise ValueError("transverse vectors need two components")
        if not (np.all(np.isfinite(self.p)) and np.all(np.isfinite(self.q))):
            raise ValueError("transverse momenta must be finite")

    @property
    def total(self):
        return self.p + self.q

    @property
    def difference(self):
        return self.p - self.q


def _sq(t):
    t = np.asarray(t, dtype=float)
    return t[0] ** 2 + t[1] ** 2


def _longitudinal_deficit(k, t2):
    # k - sqrt(k^2 - t2), without cancellation
    rad = k**2 - t2
    if np.any(rad <= 0):
        raise EvanescentError("transverse momentum exceeds total momentum")
    return t2 / (k + np.sqrt(rad))


def wavenumber(branch, Omega, transverse, T, model):
    """Longitudinal wavenumber ``sqrt((omega n / c)^2 - |t|^2)`` [rad/m].

    For the pump, ``transverse`` is the summed vector ``p + q``.
    """
    k = model.axial_k(branch, Omega, T)
    t2 = _sq(transverse)
    return k - _longitudinal_deficit(k, t2)


def calibrate_poling(model, crystal=None):
    """Poling period that phase-matches degenerate collinear emission at ``T0``."""
    T0 = model.T0 if crystal is None else crystal.T0
    k0 = [float(model.axial_k(b, 0.0, T0)) for b in ("pump", "signal", "idler")]
    grating = k0[0] - k0[1] - k0[2]
    if grating <= 1e-12 * k0[0]:
        raise PolingError(
            f"k_p - k_s - k_i = {grating:.3e} rad/m at degeneracy; no finite positive poling period exists"
        )
    return 2 * math.pi / grating


def _grating(model, crystal, T):
    """Grating vector 2 pi / Lambda(T) for Sellmeier-backed exact mode."""
    if crystal is None or crystal.poling_period_at_T0 is None:
        period0 = calibrate_poling(model, crystal)
    else:
        period0 = crystal.poling_period_at_T0
    if math.isinf(period0):
        return 0.0
    a = model.poling_expansion if crystal is None else crystal.thermal_poling_coefficient
    return 2 * math.pi / (period0 * (1 + a * (np.asarray(T) - model.T0)))


def axial_mismatch(Omega, T, model, crystal=None):
    """On-axis ``Delta k_z`` at ``p = q = 0`` [rad/m]."""
    Omega = np.asarray(Omega, dtype=float)
    if model.mode == "linearized":
        return model.thermal_detuning_b * (np.asarray(T) - model.T0) + model.F * Omega
    if model.exact_sellmeier:
        return (
            model.axial_k("pump", Omega, T)
            - model.axial_k("signal", Omega, T)
            - model.axial_k("idler", Omega, T)
            - _grating(model, crystal, T)
        )
    if crystal is None or crystal.poling_period_at_T0 is None:
        # calibrated grating cancels the constant exactly
        base = 0.0
    else:
        k0 = [float(model.axial_k(b, 0.0)) for b in ("pump", "signal", "idler")]
        g = 0.0 if math.isinf(crystal.poling_period_at_T0) else 2 * math.pi / crystal.poling_period_at_T0
        base = k0[0] - k0[1] - k0[2] - g
    return base + model.F * Omega + model.thermal_detuning_b * (np.asarray(T) - model.T0)


def phase_mismatch(Omega, pair, T, model, crystal=None):
    """Longitudinal phase mismatch ``k_p - k_s - k_i - 2 pi / Lambda(T)`` [rad/m].

    Linearized mode returns ``b (T - T0) + F Omega + |p - q|^2 / (2 k_0p)``.
    """
    if model.mode == "linearized":
        return axial_mismatch(Omega, T, model) + _sq(pair.difference) / (2 * model.k_0p)
    kp = model.axial_k("pump", Omega, T)
    ks = model.axial_k("signal", Omega, T)
    ki = model.axial_k("idler", Omega, T)
    return (
        axial_mismatch(Omega, T, model, crystal)
        - _longitudinal_deficit(kp, _sq(pair.total))
        + _longitudinal_deficit(ks, _sq(pair.p))
        + _longitudinal_deficit(ki, _sq(pair.q))
    )


def pump_envelope(u, w_p):
    """Peak-normalized Gaussian pump amplitude in momentum space."""
    return np.exp(-(w_p**2) * _sq(u) / 4)


def mode_function(Omega, pair, T, pump, crystal, model):
    """Unprojected mode function ``E_p(p+q) sinc(Dk L/2) exp(-i Dk L/2)``."""
    x = phase_mismatch(Omega, pair, T, model, crystal) * crystal.length / 2
    return pump_envelope(pair.total, pump.waist) * np.sinc(x / np.pi) * np.exp(-1j * x)


def sinc_approx(x):
    return np.exp(-SINC_EXP_FACTOR * np.abs(x))


def detection_mode(q, w_d):
    """Gaussian collection mode in momentum space, peak 1."""
    if not w_d > 0:
        raise ValueError("detection waist must be positive")
    return np.exp(-(w_d**2) * _sq(q) / 4)
