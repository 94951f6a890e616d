"""Refractive-index models for the pump, signal and idler branches.

Two flavours share one type.  The *linearized* model keeps the on-axis
wavenumbers to first order in the detuning ``Omega = omega_s - omega_p/2``
and folds every thermal effect (thermo-optic shifts and poling expansion)
into the single coefficient ``thermal_detuning_b``.  The *exact* model
evaluates square-root wavenumbers; its indices come either from the same
linear expansion or, when a :class:`KTPSellmeier` is attached, from
temperature-dependent Sellmeier fits.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .constants import (
    DEGENERACY_TEMPERATURE,
    KTP_DEFAULTS,
    POLING_EXPANSION,
    PUMP_WAVELENGTH,
    SPEED_OF_LIGHT,
)

BRANCHES = ("pump", "signal", "idler")
MODES = ("linearized", "exact")


class DispersionError(ValueError):
    pass


def _sellmeier_y(lam_um):
    # Koenig & Wong, APL 84, 1644 (2004)
    l2 = lam_um**2
    return np.sqrt(2.09930 + 0.922683 / (1 - 0.0467695 / l2) - 0.0138408 * l2)


def _sellmeier_z(lam_um):
    # Fradkin et al., APL 74, 914 (1999)
    l2 = lam_um**2
    return np.sqrt(2.12725 + 1.18431 / (1 - 0.0514852 / l2) + 0.6603 / (1 - 100.00507 / l2) - 9.68956e-3 * l2)


# Emanueli & Arie, Appl. Opt. 42, 6661 (2003): dn = n1 dT + n2 dT^2, dT = T - 25
_THERMAL = {
    "y": ((6.2897e-6, 6.3061e-6, -6.0629e-6, 2.6486e-6), (-0.14445e-8, 2.2244e-8, -3.5770e-8, 1.3470e-8)),
    "z": ((9.9587e-6, 9.9228e-6, -8.9603e-6, 4.1010e-6), (-1.1882e-8, 1.0459e-7, -9.8136e-8, 3.1481e-8)),
}


def ktp_index(axis, wavelength, temperature):
    """Refractive index of KTP along ``axis`` ('y' or 'z').

    ``wavelength`` in metres, ``temperature`` in degC.
    """
    lam_um = np.asarray(wavelength, dtype=float) * 1e6
    if axis == "y":
        n = _sellmeier_y(lam_um)
    elif axis == "z":
        n = _sellmeier_z(lam_um)
    else:
        raise ValueError(f"unsupported KTP axis {axis!r}")
    a, b = _THERMAL[axis]
    dT = np.asarray(temperature, dtype=float) - 25.0
    n1 = sum(ai / lam_um**i for i, ai in enumerate(a))
    n2 = sum(bi / lam_um**i for i, bi in enumerate(b))
    return n + n1 * dT + n2 * dT**2


@dataclass(frozen=True)
class KTPSellmeier:
    """Polarization assignment of a type-II KTP process."""

    pump_axis: str = "y"
    signal_axis: str = "y"
    idler_axis: str = "z"

    def index(self, branch, omega, temperature):
        axis = {"pump": self.pump_axis, "signal": self.signal_axis, "idler": self.idler_axis}[branch]
        return ktp_index(axis, 2 * np.pi * SPEED_OF_LIGHT / np.asarray(omega, dtype=float), temperature)


@dataclass(frozen=True)
class DispersionModel:
    """Indices and group slownesses around the degenerate operating point.

    Attributes
    ----------
    omega_p : float
        Pump angular frequency [rad/s]; signal and idler are centred on
        ``omega_p / 2``.
    n_0p, n_0s, n_0i : float
        Indices at degeneracy and ``T0``.
    group_slowness_s, group_slowness_i : float
        ``dk/domega`` of signal and idler at degeneracy [s/m].
    thermal_detuning_b : float
        ``d(Delta k_z)/dT`` on axis at ``Omega = 0`` [1/(m K)].
    mode : {'linearized', 'exact'}
    sellmeier : KTPSellmeier, optional
        Only consulted in exact mode.
    """

    omega_p: float
    n_0p: float
    n_0s: float
    n_0i: float
    group_slowness_s: float
    group_slowness_i: float
    thermal_detuning_b: float
    T0: float = DEGENERACY_TEMPERATURE
    mode: str = "linearized"
    sellmeier: KTPSellmeier | None = field(default=None, compare=False)
    poling_expansion: float = POLING_EXPANSION

    def __post_init__(self):
        if self.mode not in MODES:
            raise DispersionError(f"unknown dispersion mode {self.mode!r}")
        for name in ("n_0p", "n_0s", "n_0i"):
            n = getattr(self, name)
            if not 1.0 < n < 3.0:
                raise DispersionError(f"{name}={n} outside (1, 3)")
        if self.F == 0.0:
            raise DispersionError("signal and idler group slownesses coincide (F = 0)")
        if self.omega_p <= 0:
            raise DispersionError("omega_p must be positive")

    @property
    def F(self):
        """Group-slowness mismatch ``k'_i - k'_s`` [s/m]."""
        return self.group_slowness_i - self.group_slowness_s

    @property
    def k_0p(self):
        return self.omega_p * self.n_0p / SPEED_OF_LIGHT

    @property
    def exact_sellmeier(self):
        return self.mode == "exact" and self.sellmeier is not None

    def with_mode(self, mode):
        return replace(self, mode=mode)

    def branch_omega(self, branch, Omega):
        if branch == "pump":
            return np.full_like(np.asarray(Omega, dtype=float), self.omega_p)
        if branch == "signal":
            return self.omega_p / 2 + np.asarray(Omega, dtype=float)
        if branch == "idler":
            return self.omega_p / 2 - np.asarray(Omega, dtype=float)
        raise ValueError(f"unknown branch {branch!r}")

    def axial_k(self, branch, Omega, T=None):
        """On-axis wavenumber ``omega n / c`` of ``branch`` [rad/m]."""
        T = self.T0 if T is None else T
        if self.exact_sellmeier:
            w = self.branch_omega(branch, Omega)
            return w * self.sellmeier.index(branch, w, T) / SPEED_OF_LIGHT
        Omega = np.asarray(Omega, dtype=float)
        half = self.omega_p / 2 / SPEED_OF_LIGHT
        if branch == "pump":
            return np.full_like(Omega, self.k_0p)
        if branch == "signal":
            return half * self.n_0s + self.group_slowness_s * Omega
        if branch == "idler":
            return half * self.n_0i - self.group_slowness_i * Omega
        raise ValueError(f"unknown branch {branch!r}")

    def index(self, branch, Omega, T=None):
        return self.axial_k(branch, Omega, T) * SPEED_OF_LIGHT / self.branch_omega(branch, Omega)


def equal_index_dispersion(omega_p, n=1.8, group_slowness_s=6.0e-9, group_slowness_i=6.35e-9, b=0.0, mode="exact"):
    """Dispersion with ``n_p = n_s = n_i``: collinear emission is phase matched without poling."""
    return DispersionModel(
        omega_p=omega_p,
        n_0p=n,
        n_0s=n,
        n_0i=n,
        group_slowness_s=group_slowness_s,
        group_slowness_i=group_slowness_i,
        thermal_detuning_b=b,
        mode=mode,
    )


def default_ktp_dispersion(pump_wavelength=PUMP_WAVELENGTH, mode="linearized"):
    """Frozen linearized KTP constants (see ``constants.KTP_DEFAULTS``)."""
    if not np.isclose(pump_wavelength, PUMP_WAVELENGTH, rtol=0, atol=1e-15):
        return ktp_dispersion(pump_wavelength, mode=mode)
    omega_p = 2 * np.pi * SPEED_OF_LIGHT / pump_wavelength
    sm = KTPSellmeier() if mode == "exact" else None
    return DispersionModel(omega_p=omega_p, mode=mode, sellmeier=sm, **KTP_DEFAULTS)


def ktp_dispersion(
    pump_wavelength=PUMP_WAVELENGTH,
    T0=DEGENERACY_TEMPERATURE,
    mode="linearized",
    poling_expansion=POLING_EXPANSION,
    sellmeier=None,
):
    """Linearize the KTP Sellmeier fits around degeneracy by central differences."""
    sm = sellmeier or KTPSellmeier()
    omega_p = 2 * np.pi * SPEED_OF_LIGHT / pump_wavelength
    ws = omega_p / 2
    h = 1e-6 * ws

    def k(branch, w, T):
        return w * sm.index(branch, w, T) / SPEED_OF_LIGHT

    gs = (k("signal", ws + h, T0) - k("signal", ws - h, T0)) / (2 * h)
    gi = (k("idler", ws + h, T0) - k("idler", ws - h, T0)) / (2 * h)

    def on_axis(T):
        return k("pump", omega_p, T) - k("signal", ws, T) - k("idler", ws, T)

    grating = on_axis(T0)
    dT = 1e-2
    # d/dT of -2 pi / (Lambda0 (1 + a (T - T0))) at T0 is +grating * a
    b = (on_axis(T0 + dT) - on_axis(T0 - dT)) / (2 * dT) + grating * poling_expansion
    return DispersionModel(
        omega_p=omega_p,
        n_0p=float(sm.index("pump", omega_p, T0)),
        n_0s=float(sm.index("signal", ws, T0)),
        n_0i=float(sm.index("idler", ws, T0)),
        group_slowness_s=float(gs),
        group_slowness_i=float(gi),
        thermal_detuning_b=float(b),
        T0=T0,
        mode=mode,
        sellmeier=sm if mode == "exact" else None,
        poling_expansion=poling_expansion,
    )
