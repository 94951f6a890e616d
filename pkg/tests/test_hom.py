import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import integrate

from biphoton import _kernels
from biphoton.hom import (
    CalibrationError,
    CoverageWarning,
    HomMap,
    NyquistError,
    add_poisson_noise,
    hom_dip,
    hom_map,
    mirror,
    scan_tau_grid,
    scan_temperature_grid,
    raised_cosine_window,
    recover_spectral_intensity,
    spectral_autocorrelation,
    visibility,
    walkoff_compensation,
)
from biphoton.projection import SpectralWavefunction, ZeroNormError, centered_grid, tail_covering_grid
from biphoton.toymodel import toy_constants, toy_spectrum, toy_wavefunction

from conftest import setup

GRID = centered_grid(1024, 2e13)


def gaussian(sigma, center=0.0, phase_slope=0.0):
    return SpectralWavefunction(GRID, np.exp(-((GRID - center) ** 2) / (4 * sigma**2) - 1j * phase_slope * GRID), 54.0)


def test_scan_grid_dimensions():
    taus, temps = scan_tau_grid(), scan_temperature_grid()
    assert taus.size == 52 and temps.size == 76
    assert taus[0] == pytest.approx(-3.05e-12) and taus[-1] == pytest.approx(3.05e-12)
    assert np.diff(taus)[0] == pytest.approx(0.12e-12, rel=0.005)
    assert np.allclose(np.diff(temps), 0.2)


def test_symmetric_spectrum_gives_perfect_dip():
    dip = hom_dip(gaussian(1e12), np.array([-1e-12, 0.0, 1e-12]))
    assert dip[1] == pytest.approx(0.0, abs=1e-12)
    assert visibility(dip) == pytest.approx(1.0, abs=1e-12)


def test_disjoint_support_is_distinguishable():
    s = SpectralWavefunction(GRID, np.where(GRID > 5e12, 1.0, 0.0), 54.0)
    assert np.allclose(hom_dip(s, scan_tau_grid()), 0.5, atol=1e-14)


def test_dip_width_scales_inversely_with_bandwidth():
    taus = np.linspace(-1e-12, 1e-12, 21)
    a = hom_dip(gaussian(1e12), 2 * taus)
    b = hom_dip(gaussian(2e12), taus)
    assert np.allclose(a, b, atol=1e-12)


def test_gaussian_dip_matches_analytic():
    sigma = 1.5e12
    taus = np.linspace(-2e-12, 2e-12, 41)
    # |Phi|^2 Gaussian of rms sigma: K(tau) = exp(-2 sigma^2 tau^2)
    expected = 0.5 * (1 - np.exp(-2 * sigma**2 * taus**2))
    assert np.allclose(hom_dip(gaussian(sigma), taus), expected, atol=1e-12)


def test_dip_even_for_even_modulus_even_phase():
    taus = np.linspace(-2e-12, 2e-12, 31)
    s = gaussian(1e12)
    s = s.with_values(s.values * np.exp(1j * 4e-25 * GRID**2))
    dip = hom_dip(s, taus)
    assert np.allclose(dip, dip[::-1], atol=1e-13)


def test_linear_phase_shifts_dip_centre():
    # odd phase -a Omega: g picks up exp(-2i a Omega), which a delay offset of a undoes
    a = 3e-13
    taus = np.linspace(-2e-12, 2e-12, 41)
    shifted = hom_dip(gaussian(1e12, phase_slope=a), taus, delay_offset=a)
    assert np.allclose(shifted, hom_dip(gaussian(1e12), taus), atol=1e-13)


def test_delay_offset_recentres_walkoff(ktp, crystal):
    k = toy_constants(*setup(7.6, 200), crystal, ktp)
    spec = toy_wavefunction(tail_covering_grid(crystal, ktp, setup(7.6, 200)[1]), k)
    taus = np.linspace(-1e-12, 1e-12, 201)
    dip = hom_dip(spec, taus, walkoff_compensation(crystal, ktp))
    assert abs(taus[np.argmin(dip)]) < 0.011e-12
    raw = hom_dip(spec, taus - walkoff_compensation(crystal, ktp))
    assert np.allclose(raw, dip, atol=1e-12)


def test_asymmetric_toy_dip_against_direct_integral(ktp, crystal):
    w_opt = 21.87
    pump, det = setup(7.6, w_opt / 2)
    k = toy_constants(pump, det, crystal, ktp)
    grid = tail_covering_grid(crystal, ktp, det)
    off = walkoff_compensation(crystal, ktp)
    taus = np.array([-0.5e-12, 0.0, 0.4e-12])
    dip = hom_dip(toy_wavefunction(grid, k), taus, off)
    assert visibility(dip) < 0.99

    lim = grid[-1]
    norm = integrate.quad(lambda w: abs(toy_spectrum(w, k)) ** 2, -lim, lim, points=[0.0], limit=500)[0]
    for t, c in zip(taus, dip):
        f = lambda w: (toy_spectrum(w, k) * np.conj(toy_spectrum(-w, k)) * np.exp(-2j * w * (t - off))).real
        ref = 0.5 * (1 - integrate.quad(f, -lim, lim, points=[0.0], limit=2000)[0] / norm)
        assert c == pytest.approx(ref, abs=2e-5)


def test_zero_spectrum_rejected():
    with pytest.raises(ZeroNormError):
        hom_dip(SpectralWavefunction(GRID, np.zeros(GRID.size), 54.0), [0.0])


def test_mirror_requires_centred_grid():
    with pytest.raises(ValueError):
        mirror(SpectralWavefunction(GRID + 0.3 * (GRID[1] - GRID[0]), np.ones(GRID.size), 54.0))
    odd = SpectralWavefunction(centered_grid(5, 1.0), np.arange(5.0), 54.0)
    assert np.array_equal(mirror(odd).real, np.arange(5.0)[::-1])


@given(arrays(np.float64, 64, elements=st.floats(-1, 1)), arrays(np.float64, 64, elements=st.floats(-1, 1)))
def test_coincidence_probability_bounded(re, im):
    vals = re + 1j * im
    if not np.any(np.abs(vals) > 1e-3):
        return
    s = SpectralWavefunction(centered_grid(64, 1e13), vals, 54.0)
    dip = hom_dip(s, np.linspace(-2e-12, 2e-12, 9))
    assert np.all((dip >= 0) & (dip <= 1))


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba unavailable")
def test_backends_agree():
    s = gaussian(1e12, center=3e11, phase_slope=1e-13)
    taus = np.linspace(-2e-12, 2e-12, 17)
    assert np.allclose(hom_dip(s, taus, backend="numba"), hom_dip(s, taus, backend="numpy"), atol=1e-13)


def shifted_gaussian_map(sigma, b_over_F, temps, taus, T0=54.0):
    prov = lambda T: gaussian(sigma, center=-b_over_F * (T - T0))
    return hom_map(prov, taus, temps, 0.0, {"b_over_F": b_over_F, "T0": T0})


def test_map_shape_and_metadata():
    m = shifted_gaussian_map(1e12, 5.9e11, np.linspace(52, 56, 5), scan_tau_grid())
    assert m.shape == (52, 5)
    assert m.metadata["delay_offset_s"] == 0.0
    with pytest.raises(ValueError):
        HomMap([0.0, 1.0], [54.0], np.zeros((3, 1)))


def test_map_edges_approach_one_half():
    m = shifted_gaussian_map(2e12, 5.9e11, np.linspace(50, 58, 9), scan_tau_grid())
    assert np.all(np.abs(m.values[[0, -1]] - 0.5) < 0.02)


def test_recovery_of_symmetric_spectrum_is_symmetric():
    temps = np.linspace(43, 65, 111)
    m = shifted_gaussian_map(2e12, 5.9e11, temps, scan_tau_grid())
    r = recover_spectral_intensity(m)
    assert np.allclose(r.intensity, r.intensity[::-1], rtol=1e-9)
    assert r.omega[np.argmax(r.intensity)] == pytest.approx(0.0, abs=1e-3)


def test_recovery_matches_gaussian():
    b_over_F, sigma = 5.9e11, 2e12
    temps = np.linspace(40, 68, 141)
    taus = np.linspace(-3e-12, 3e-12, 121)
    r = recover_spectral_intensity(shifted_gaussian_map(sigma, b_over_F, temps, taus))
    ref = np.exp(-(r.omega**2) / (2 * sigma**2))
    ref /= np.sum(ref) * abs(r.omega[1] - r.omega[0])
    assert np.linalg.norm(r.intensity - ref) / np.linalg.norm(ref) < 1e-3


def test_autocorrelation_off_zero():
    sigma = 2e12
    m = shifted_gaussian_map(sigma, 5.9e11, np.array([54.0, 54.2]), np.linspace(-3e-12, 3e-12, 121))
    om = np.array([0.0, 5e11, 1e12])
    g = spectral_autocorrelation(m, om)[:, 0].real
    # Phi Phi*(-W) / N for a centred Gaussian of amplitude rms sigma
    ref = np.exp(-(om**2) / (2 * sigma**2)) / (np.sqrt(2 * np.pi) * sigma)
    assert np.allclose(g, ref, rtol=2e-3)


def test_recovery_errors():
    m = shifted_gaussian_map(1e12, 5.9e11, np.linspace(52, 56, 5), scan_tau_grid())
    with pytest.raises(CalibrationError):
        recover_spectral_intensity(m, b_over_F=-1.0)
    bare = HomMap(m.tau_grid, m.temperature_grid, m.values, {})
    with pytest.raises(CalibrationError):
        recover_spectral_intensity(bare)
    coarse = HomMap(np.linspace(-3e-12, 3e-12, 6), m.temperature_grid, m.values[:6], m.metadata)
    with pytest.raises(NyquistError):
        recover_spectral_intensity(coarse, b_over_F=5.9e12)


def test_truncated_scan_warns():
    m = shifted_gaussian_map(3e12, 5.9e11, np.linspace(53, 55, 11), scan_tau_grid())
    with pytest.warns(CoverageWarning):
        r = recover_spectral_intensity(m)
    assert "coverage" in r.warnings


def test_window_shape():
    w = raised_cosine_window(np.linspace(-1, 1, 101))
    assert np.all(w[10:91] == 1.0)
    assert w[0] == pytest.approx(0.0, abs=1e-15) and w[-1] == pytest.approx(0.0, abs=1e-15)
    assert np.all(np.diff(w[:11]) >= 0)


def test_poisson_noise_hook_is_seeded():
    m = shifted_gaussian_map(1e12, 5.9e11, np.linspace(52, 56, 5), scan_tau_grid())
    a, b = add_poisson_noise(m, 1e4, rng=1), add_poisson_noise(m, 1e4, rng=1)
    assert np.array_equal(a.values, b.values)
    assert np.max(np.abs(a.values - m.values)) < 0.05
