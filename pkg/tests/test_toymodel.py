import math
from dataclasses import replace

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biphoton.constants import SINC_EXP_FACTOR
from biphoton.projection import default_omega_grid, normalize
from biphoton.toymodel import toy_constants, toy_spectrum, toy_spectrum_at_temperature, toy_wavefunction

from conftest import setup

mp.mp.dps = 40


def oracle(Omega, k):
    """Direct high-precision evaluation of the two-branch closed form."""
    A = mp.mpc(k.A.real, k.A.imag)
    al = mp.mpc(k.alpha.real, k.alpha.imag)
    o = mp.mpf(Omega)
    if o >= 0:
        return complex(A * mp.exp(-al * o))
    wd2, wo2 = mp.mpf(k.w_d) ** 2, mp.mpf(k.w_opt) ** 2
    c = mp.mpf(k.F) * mp.mpf(k.k_0p) / 4
    R = (wd2 + wo2) / (wd2 - wo2)
    val = mp.exp(-al * o) * mp.exp((wd2 + wo2) * c * o) - R * mp.exp(mp.conj(al) * o) * (mp.exp((wd2 - wo2) * c * o) - 1)
    return complex(A * val)


@pytest.fixture(scope="module")
def grid(ktp, crystal):
    return default_omega_grid(crystal, ktp, 512)


@pytest.mark.parametrize("w_d", [5, 10, 20, 40, 200])
def test_matches_high_precision_oracle(ktp, crystal, w_d):
    pump, det = setup(7.6, w_d)
    k = toy_constants(pump, det, crystal, ktp)
    om = np.linspace(-3e13, 2e13, 41)
    ref = np.array([oracle(o, k) for o in om])
    got = toy_spectrum(om, k)
    assert np.max(np.abs(got - ref)) <= 1e-12 * np.max(np.abs(ref))


def test_continuity_at_zero(ktp, crystal):
    for w_d in (5, 21.87, 40):
        k = toy_constants(*setup(7.6, w_d), crystal, ktp)
        left = toy_spectrum(-1e-3, k)
        assert abs(left - toy_spectrum(0.0, k)) <= 1e-8 * abs(k.A)


def test_removable_singularity_is_smooth(ktp, crystal, grid):
    pump, det = setup(7.6, 20)
    w_opt = toy_constants(pump, det, crystal, ktp).w_opt
    vals = {}
    for eps in (-1e-4, -1e-7, -1e-9, 0.0, 1e-9, 1e-7, 1e-4):
        d = replace(det, waist=w_opt * (1 + eps))
        vals[eps] = normalize(toy_wavefunction(grid, toy_constants(pump, d, crystal, ktp))).values
    peak = np.max(np.abs(vals[0.0]))
    assert all(np.all(np.isfinite(v)) for v in vals.values())
    for eps in (-1e-7, -1e-9, 1e-9, 1e-7):
        assert np.max(np.abs(vals[eps] - vals[0.0])) / peak < 1e-6
    # no kink: symmetric second difference across the pole is O(h^2)
    second = vals[1e-4] - 2 * vals[0.0] + vals[-1e-4]
    assert np.max(np.abs(second)) / peak < 1e-6


def test_positive_branch_is_pure_exponential(ktp, crystal):
    k = toy_constants(*setup(7.6, 10), crystal, ktp)
    om = np.linspace(0, 2e13, 101)
    expected = abs(k.A) * np.exp(-SINC_EXP_FACTOR * crystal.length * ktp.F * om / 2)
    assert np.allclose(np.abs(toy_spectrum(om, k)), expected, rtol=4 * np.finfo(float).eps, atol=0)


def test_w_opt_definition(ktp, crystal):
    k = toy_constants(*setup(7.6, 10), crystal, ktp)
    assert k.w_opt**2 == pytest.approx(2 * SINC_EXP_FACTOR * crystal.length / ktp.k_0p, rel=1e-14)
    assert k.alpha == pytest.approx(crystal.length * ktp.F / 2 * (SINC_EXP_FACTOR + 1j))


@given(st.floats(0.5, 100), st.floats(0.5, 100), st.floats(2, 100))
def test_pump_waist_only_scales_amplitude(w_p1, w_p2, w_d):
    from biphoton.dispersion import default_ktp_dispersion
    from biphoton.physics import CrystalConfig

    d, c = default_ktp_dispersion(), CrystalConfig()
    om = np.linspace(-2e13, 1e13, 64)
    a = toy_spectrum(om, toy_constants(*setup(w_p1, w_d), c, d))
    b = toy_spectrum(om, toy_constants(*setup(w_p2, w_d), c, d))
    a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
    # global phase of A differs; compare after removing it
    phase = np.vdot(b, a) / abs(np.vdot(b, a))
    assert np.max(np.abs(a - phase * b)) < 1e-9


@given(st.floats(-1e17, 1e17), st.floats(0.5, 500))
def test_finite_everywhere(om, w_d):
    from biphoton.dispersion import default_ktp_dispersion
    from biphoton.physics import CrystalConfig

    k = toy_constants(*setup(7.6, w_d), CrystalConfig(), default_ktp_dispersion())
    assert np.isfinite(toy_spectrum(om, k))


def test_negative_F_relabels_signal_and_idler(ktp, crystal):
    flipped = replace(ktp, group_slowness_s=ktp.group_slowness_i, group_slowness_i=ktp.group_slowness_s)
    pump, det = setup(7.6, 10)
    k, kf = toy_constants(pump, det, crystal, ktp), toy_constants(pump, det, crystal, flipped)
    assert kf.relabeled and not k.relabeled
    om = np.linspace(-1e13, 1e13, 33)
    assert np.allclose(toy_spectrum(om, kf), toy_spectrum(-om, k), rtol=1e-14)


def test_temperature_shifts_detuning(ktp, crystal):
    k = toy_constants(*setup(7.6, 10), crystal, ktp)
    om = np.linspace(-1e13, 1e13, 11)
    shift = ktp.thermal_detuning_b * 2.0 / ktp.F
    assert np.allclose(toy_spectrum_at_temperature(om, ktp.T0 + 2.0, k, ktp), toy_spectrum(om + shift, k))


def test_negative_tail_ratio_approaches_pole_residue(ktp, crystal):
    # far from Omega = 0 the Omega < 0 branch is R exp(conj(alpha) Omega), R = (w_d^2 + w_opt^2)/(w_d^2 - w_opt^2)
    for ratio in (3.0, 30.0):
        k = toy_constants(*setup(7.6, ratio * 21.87), crystal, ktp)
        R = (k.w_d**2 + k.w_opt**2) / (k.w_d**2 - k.w_opt**2)
        om = 5e12
        assert abs(toy_spectrum(-om, k)) / abs(toy_spectrum(om, k)) == pytest.approx(R, rel=1e-9)


def test_very_large_detection_waist_is_symmetric(ktp, crystal, grid):
    k = toy_constants(*setup(7.6, 1000 * 21.87), crystal, ktp)
    I = np.abs(toy_spectrum(grid, k))
    mirror = np.zeros_like(I)
    mirror[1:] = I[:0:-1]
    inner = slice(1, None)
    assert np.linalg.norm((I - mirror)[inner]) / np.linalg.norm(I) < 1e-5


def test_scalar_input(ktp, crystal):
    k = toy_constants(*setup(7.6, 10), crystal, ktp)
    assert np.ndim(toy_spectrum(-1e12, k)) == 0
    assert toy_spectrum(-1e12, k) == toy_spectrum(np.array([-1e12]), k)[0]
