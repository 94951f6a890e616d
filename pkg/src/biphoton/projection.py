"""Projection of the mode function onto Gaussian collection modes.

The transverse integral runs in sum/difference coordinates ``u = p + q``,
``v = p - q`` (``d^2p d^2q = d^2u d^2v / 4``), with radial nodes placed in
``s = |u|^2`` and ``s = |v|^2``.  In the approximated integrand the pump
only sees ``u`` and the phase matching only ``v``, so the 4-D integral is a
product of an Omega-independent ``u`` integral and one cheap ``v`` integral
per Omega.  The exact integrand couples both through the angle between
``u`` and ``v`` and goes through :mod:`biphoton._kernels`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate

from . import _kernels
from .constants import SINC_EXP_FACTOR
from .physics import axial_mismatch

SCHEMES = ("tensor-gauss", "adaptive")
REDUCTIONS = ("azimuthal-3d", "full-4d")
INTEGRANDS = ("approximated", "exact")

# Gaussian weights are cut where they fall below exp(-ENVELOPE_EFOLDS)
ENVELOPE_EFOLDS = 18.0


class ConvergenceError(RuntimeError):
    def __init__(self, message, omega=None, change=None):
        super().__init__(message)
        self.omega = omega
        self.change = change


class ZeroNormError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature settings.

    ``k_max`` bounds ``|p|`` and ``|q|``; the sum and difference radii are cut
    at ``2 k_max`` (or earlier, once the Gaussian envelope is below
    ``exp(-18)``).  ``None`` picks ``6 max(1/w_d, 1/w_p)``.  ``tolerance`` is
    the allowed change, relative to the peak modulus, when
    ``nodes_per_axis`` is doubled; ``None`` skips that check.
    """

    scheme: str = "tensor-gauss"
    nodes_per_axis: int = 16
    k_max: float | None = None
    reduction: str = "azimuthal-3d"
    tolerance: float | None = 1e-4

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if self.reduction not in REDUCTIONS:
            raise ValueError(f"unknown reduction {self.reduction!r}")
        if int(self.nodes_per_axis) < 8:
            raise ValueError("nodes_per_axis must be at least 8")

    def resolve_k_max(self, w_p, w_d):
        floor = 6 * max(1 / w_d, 1 / w_p)
        if self.k_max is None:
            return floor
        if self.k_max < floor * (1 - 1e-12):
            raise ValueError(f"k_max={self.k_max:.4g} rad/m below 6 max(1/w_d, 1/w_p) = {floor:.4g}")
        return self.k_max


@dataclass
class SpectralWavefunction:
    omega_grid: np.ndarray
    values: np.ndarray
    temperature: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.omega_grid = np.asarray(self.omega_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.omega_grid.ndim != 1 or self.omega_grid.shape != self.values.shape:
            raise ValueError("omega grid and values must be 1-D of equal length")
        if self.omega_grid.size > 1:
            d = np.diff(self.omega_grid)
            if np.any(d <= 0):
                raise ValueError("omega grid must be strictly increasing")
            if not np.allclose(d, d[0], rtol=1e-9, atol=0):
                raise ValueError("omega grid must be uniform")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("spectral values must be finite")

    @property
    def d_omega(self):
        g = self.omega_grid
        return float((g[-1] - g[0]) / (g.size - 1)) if g.size > 1 else 1.0

    @property
    def intensity(self):
        return np.abs(self.values) ** 2

    def norm(self):
        return math.sqrt(float(np.sum(self.intensity)) * self.d_omega)

    def with_values(self, values, **meta):
        return SpectralWavefunction(self.omega_grid, values, self.temperature, {**self.metadata, **meta})


def normalize(spectrum):
    """Rescale so that ``sum |Phi|^2 dOmega = 1``; the global phase is kept."""
    n = spectrum.norm()
    if n == 0 or not np.isfinite(n):
        raise ZeroNormError("spectrum has zero norm")
    return spectrum.with_values(spectrum.values / n, normalized=True)


def centered_grid(n_points, half_span):
    """Uniform grid with Omega = 0 on bin ``n_points // 2`` (FFT centring)."""
    n = int(n_points)
    return (np.arange(n) - n // 2) * (2.0 * half_span / n)


def default_half_span(crystal, dispersion, efolds=12.0):
    """Twelve amplitude e-foldings of the Omega >= 0 decay."""
    return efolds / (SINC_EXP_FACTOR * crystal.length * abs(dispersion.F) / 2)


def default_omega_grid(crystal, dispersion, n_points=2048):
    return centered_grid(n_points, default_half_span(crystal, dispersion))


def tail_covering_grid(crystal, dispersion, detection, n_points=2048, efolds=12.0, max_points=2**17):
    """Grid wide enough for the slow Omega < 0 tail of tightly focused collection.

    The negative-detuning tail decays at ``(w_d / w_opt)^2`` times the
    positive-side rate, so the span (and point count, to keep the
    positive side resolved) scale by ``max(1, (w_opt / w_d)^2)``.
    """
    w_opt2 = 2 * SINC_EXP_FACTOR * crystal.length / dispersion.k_0p
    ratio = max(1.0, w_opt2 / detection.waist**2)
    n = int(n_points)
    while n < n_points * ratio and n < max_points:
        n *= 2
    return centered_grid(n, ratio * default_half_span(crystal, dispersion, efolds))


# ----------------------------------------------------------------------------
# node construction
# ----------------------------------------------------------------------------


def _gl_reference(n):
    x, w = np.polynomial.legendre.leggauss(int(n))
    return 0.5 * (x + 1), 0.5 * w


def panel_nodes(a, b, n, n_panels):
    """Composite Gauss-Legendre on ``[a, b]`` with ``n_panels`` equal panels."""
    x, w = _gl_reference(n)
    edges = np.linspace(a, b, int(n_panels) + 1)
    h = np.diff(edges)
    nodes = (edges[:-1, None] + h[:, None] * x[None, :]).ravel()
    weights = (h[:, None] * w[None, :]).ravel()
    return nodes, weights


def _panel_count(efolds, phase):
    # at most ~4 e-folds and one phase cycle per panel
    return int(min(4000, max(1, math.ceil(efolds / 4.0), math.ceil(phase / (2 * math.pi)))))


def _angular_nodes(m, reduction):
    theta = 2 * math.pi * np.arange(m) / m
    if reduction == "azimuthal-3d":
        # theta_u integrates out to 2 pi
        return np.cos(theta), np.full(m, (2 * math.pi / m) * 2 * math.pi)
    du, dv = np.meshgrid(theta, theta, indexing="ij")
    return np.cos(dv - du).ravel(), np.full(m * m, (2 * math.pi / m) ** 2)


def _radial_scalar(s, w, m, reduction):
    # isotropic 2-D integral: d^2u = ds dtheta / 2
    ang = 2 * math.pi if reduction == "azimuthal-3d" else float(np.sum(np.full(m, 2 * math.pi / m)))
    return s, w * ang / 2


# ----------------------------------------------------------------------------
# approximated integrand
# ----------------------------------------------------------------------------


def _approx_u_integral(w_p, w_d, k0p, length, s_max, n, reduction):
    gamma_re = (2 * w_p**2 + w_d**2) / 8
    phase_rate = length / (4 * k0p)
    s_hi = min(s_max, ENVELOPE_EFOLDS / gamma_re)
    s, w = panel_nodes(0.0, s_hi, n, _panel_count(gamma_re * s_hi, phase_rate * s_hi))
    s, w = _radial_scalar(s, w, n, reduction)
    # pump envelope, u part of both detection modes, u part of the exit phase
    f = np.exp(-(w_p**2) * s / 4 - w_d**2 * s / 8 + 1j * length * s / (4 * k0p))
    return np.sum(w * f)


def _approx_v_integrand(s, d0, w_d, k0p, length):
    x = 0.5 * length * (d0 + s / (2 * k0p))
    exit_phase = length * s / (4 * k0p)
    return np.exp(-(w_d**2) * s / 8 - SINC_EXP_FACTOR * np.abs(x) - 1j * x + 1j * exit_phase)


def _approx_v_integrals(d0, w_d, k0p, length, s_max, n, reduction, chunk=512):
    """v integral for every on-axis mismatch in ``d0``, split at the |x| kink."""
    a = w_d**2 / 8
    bk = SINC_EXP_FACTOR * length / (4 * k0p)
    kink = np.clip(-2 * k0p * d0, 0.0, s_max)
    tail_end = np.minimum(s_max, kink + ENVELOPE_EFOLDS / (a + bk))
    p1 = _panel_count(np.max(np.abs(a - bk) * kink), 0.0)
    p2 = _panel_count(np.max((a + bk) * (tail_end - kink)), 0.0)
    x1, w1 = panel_nodes(0.0, 1.0, n, p1)
    x2, w2 = panel_nodes(0.0, 1.0, n, p2)
    _, scale = _radial_scalar(np.zeros(1), np.ones(1), n, reduction)
    out = np.empty(d0.shape, dtype=complex)
    for lo in range(0, d0.size, chunk):
        sl = slice(lo, lo + chunk)
        k = kink[sl, None]
        e = tail_end[sl, None]
        s1 = k * x1[None, :]
        s2 = k + (e - k) * x2[None, :]
        dd = d0[sl, None]
        v1 = (k * w1[None, :] * _approx_v_integrand(s1, dd, w_d, k0p, length)).sum(axis=1)
        v2 = ((e - k) * w2[None, :] * _approx_v_integrand(s2, dd, w_d, k0p, length)).sum(axis=1)
        out[sl] = (v1 + v2) * scale[0]
    return out


def _approx_adaptive(d0, w_p, w_d, k0p, length, s_max):
    def cquad(f, a, b):
        # absolute floor so a vanishing real or imaginary part still terminates
        floor = 1e-13 * (b - a) * max(abs(f(a)), abs(f(0.5 * (a + b))))
        kw = dict(limit=400, epsabs=floor, epsrel=1e-11)
        re = integrate.quad(lambda s: f(s).real, a, b, **kw)[0]
        im = integrate.quad(lambda s: f(s).imag, a, b, **kw)[0]
        return re + 1j * im

    gamma_re = (2 * w_p**2 + w_d**2) / 8
    s_hi = min(s_max, ENVELOPE_EFOLDS / gamma_re)
    fu = lambda s: np.exp(-(w_p**2) * s / 4 - w_d**2 * s / 8 + 1j * length * s / (4 * k0p))
    # split the oscillatory u integrand into cycles for quad
    cycles = max(1, int(length * s_hi / (4 * k0p) / (2 * math.pi)))
    edges = np.linspace(0, s_hi, cycles + 1)
    U = math.pi * sum(cquad(fu, edges[i], edges[i + 1]) for i in range(cycles))
    a = w_d**2 / 8
    bk = SINC_EXP_FACTOR * length / (4 * k0p)
    out = np.empty(d0.shape, dtype=complex)
    for j, dj in enumerate(d0):
        fv = lambda s: _approx_v_integrand(s, dj, w_d, k0p, length)
        kink = min(max(-2 * k0p * dj, 0.0), s_max)
        end = min(s_max, kink + ENVELOPE_EFOLDS / (a + bk))
        val = cquad(fv, kink, end)
        if kink > 0:
            val += cquad(fv, 0.0, kink)
        out[j] = math.pi * val
    return 0.25 * U * out


def _project_approx(omega, T, pump, detection, crystal, dispersion, quad, n):
    k0p = dispersion.k_0p
    L = crystal.length
    kmax = quad.resolve_k_max(pump.waist, detection.waist)
    s_max = (2 * kmax) ** 2
    d0 = dispersion.thermal_detuning_b * (T - dispersion.T0) + dispersion.F * omega
    if quad.scheme == "adaptive":
        return _approx_adaptive(d0, pump.waist, detection.waist, k0p, L, s_max)
    U = _approx_u_integral(pump.waist, detection.waist, k0p, L, s_max, n, quad.reduction)
    V = _approx_v_integrals(d0, detection.waist, k0p, L, s_max, n, quad.reduction)
    return 0.25 * U * V


# ----------------------------------------------------------------------------
# exact integrand
# ----------------------------------------------------------------------------


def _project_exact(omega, T, pump, detection, crystal, dispersion, quad, n, pm_function, backend):
    if quad.scheme != "tensor-gauss":
        raise ValueError("the adaptive scheme supports the approximated integrand only")
    w_p, w_d = pump.waist, detection.waist
    L = crystal.length
    k0p = dispersion.k_0p
    kmax = quad.resolve_k_max(w_p, w_d)
    gamma_u = (2 * w_p**2 + w_d**2) / 8
    su_hi = min((2 * kmax) ** 2, ENVELOPE_EFOLDS / gamma_u)
    sv_hi = min((2 * kmax) ** 2, ENVELOPE_EFOLDS / (w_d**2 / 8))
    rate = L / (4 * k0p)
    su, wu = panel_nodes(0.0, su_hi, n, _panel_count(gamma_u * su_hi, rate * su_hi))
    sv, wv = panel_nodes(0.0, sv_hi, n, _panel_count(w_d**2 / 8 * sv_hi, 2 * rate * sv_hi))
    cphi, wphi = _angular_nodes(n, quad.reduction)
    d0 = np.asarray(axial_mismatch(omega, T, dispersion, crystal), dtype=float) * np.ones_like(omega)
    kp = np.asarray(dispersion.axial_k("pump", omega, T), dtype=float) * np.ones_like(omega)
    ks = np.asarray(dispersion.axial_k("signal", omega, T), dtype=float)
    ki = np.asarray(dispersion.axial_k("idler", omega, T), dtype=float)
    return _kernels.exact_projection(
        d0, kp, ks, ki, su, wu, sv, wv, cphi, wphi,
        float(w_p), float(w_d), float(L), pm_function == "exponential", backend=backend,
    )


def project_spectrum(
    omega_grid,
    T,
    pump,
    detection,
    crystal,
    dispersion,
    quad=None,
    integrand="approximated",
    pm_function="sinc",
    backend=None,
):
    """Project the mode function onto the two collection modes.

    Returns the spectral wavefunction ``int dp dq Phi(Omega, p, q, T) G*(p) G*(q)``
    sampled on ``omega_grid`` (unnormalized; envelopes have peak 1).

    Parameters
    ----------
    integrand : {'approximated', 'exact'}
        'approximated' uses the equal-index paraxial mismatch, the exponential
        phase-matching stand-in and the exit-face phase.  'exact' uses
        square-root wavenumbers from ``dispersion``.
    pm_function : {'sinc', 'exponential'}
        Phase-matching function for the exact integrand.

    Raises
    ------
    ConvergenceError
        Doubling ``nodes_per_axis`` moved some sample by more than
        ``quad.tolerance`` of the peak modulus.
    """
    quad = quad or QuadratureSpec()
    if integrand not in INTEGRANDS:
        raise ValueError(f"unknown integrand {integrand!r}")
    if pm_function not in ("sinc", "exponential"):
        raise ValueError(f"unknown phase-matching function {pm_function!r}")
    omega = np.asarray(omega_grid, dtype=float)
    if omega.size == 0:
        raise ValueError("empty Omega grid")

    def run(n):
        if integrand == "approximated":
            return _project_approx(omega, T, pump, detection, crystal, dispersion, quad, n)
        return _project_exact(omega, T, pump, detection, crystal, dispersion, quad, n, pm_function, backend)

    n = int(quad.nodes_per_axis)
    values = run(n)
    if quad.tolerance is not None and quad.scheme == "tensor-gauss":
        finer = run(2 * n)
        scale = np.max(np.abs(finer))
        change = np.abs(finer - values) / (scale if scale > 0 else 1.0)
        worst = int(np.argmax(change))
        if change[worst] > quad.tolerance:
            raise ConvergenceError(
                f"quadrature not converged at Omega={omega[worst]:.6e} rad/s "
                f"(change {change[worst]:.2e} > {quad.tolerance:.1e})",
                omega=float(omega[worst]),
                change=float(change[worst]),
            )
    meta = {
        "model": "numeric-approx" if integrand == "approximated" else "numeric-exact",
        "integrand": integrand,
        "pm_function": pm_function if integrand == "exact" else "exponential",
        "w_p": pump.waist,
        "w_d": detection.waist,
        "dispersion_mode": dispersion.mode,
        "quadrature": {
            "scheme": quad.scheme,
            "nodes_per_axis": n,
            "reduction": quad.reduction,
            "k_max": quad.resolve_k_max(pump.waist, detection.waist),
        },
    }
    return SpectralWavefunction(omega, values, float(T), meta)


def with_nodes(quad, n):
    return replace(quad, nodes_per_axis=int(n))
