import math

import numpy as np
import pytest

from biphoton.constants import KTP_DEFAULTS, KTP_POLING_PERIOD, SINC_EXP_FACTOR
from biphoton.dispersion import DispersionError, DispersionModel, KTPSellmeier, ktp_dispersion, ktp_index
from biphoton.physics import axial_mismatch, calibrate_poling

ktp_oracle = pytest.importorskip("ktp_oracle")


@pytest.fixture(scope="module")
def oracle():
    return ktp_oracle.compute()


def test_frozen_defaults_match_symbolic_oracle(oracle):
    for key in ("n_0p", "n_0s", "n_0i"):
        assert KTP_DEFAULTS[key] == pytest.approx(oracle[key], rel=1e-12)
    assert KTP_DEFAULTS["group_slowness_s"] == pytest.approx(oracle["group_slowness_s"], rel=1e-12)
    assert KTP_DEFAULTS["group_slowness_i"] == pytest.approx(oracle["group_slowness_i"], rel=1e-12)
    assert KTP_DEFAULTS["thermal_detuning_b"] == pytest.approx(oracle["thermal_detuning_b"], rel=1e-10)
    assert KTP_POLING_PERIOD == pytest.approx(oracle["poling_period"], rel=1e-12)


def test_finite_difference_linearization_matches_oracle(oracle):
    d = ktp_dispersion()
    assert d.n_0p == pytest.approx(oracle["n_0p"], rel=1e-12)
    assert d.group_slowness_s == pytest.approx(oracle["group_slowness_s"], rel=1e-7)
    assert d.group_slowness_i == pytest.approx(oracle["group_slowness_i"], rel=1e-7)
    assert d.F == pytest.approx(oracle["F"], rel=1e-6)
    assert d.thermal_detuning_b == pytest.approx(oracle["thermal_detuning_b"], rel=1e-6)


def test_derived_ktp_constants(ktp):
    # frozen from the symbolic oracle
    assert ktp.F == pytest.approx(3.5074e-10, rel=1e-4)
    assert ktp.thermal_detuning_b == pytest.approx(208.197, rel=1e-5)
    assert ktp.thermal_detuning_b / ktp.F == pytest.approx(5.936e11, rel=1e-3)
    assert KTP_POLING_PERIOD == pytest.approx(10.0233e-6, rel=1e-5)
    w_opt = math.sqrt(2 * SINC_EXP_FACTOR * 15e-3 / ktp.k_0p)
    assert w_opt == pytest.approx(21.87e-6, rel=1e-3)


def test_sellmeier_index_sanity():
    # KTP indices near 811 nm and 405 nm
    assert 1.74 < ktp_index("y", 811e-9, 25) < 1.77
    assert 1.83 < ktp_index("z", 811e-9, 25) < 1.86
    assert ktp_index("y", 405.5e-9, 54) > ktp_index("y", 811e-9, 54)
    with pytest.raises(ValueError):
        ktp_index("x", 811e-9, 25)


def test_linearized_on_axis_is_calibrated(ktp):
    assert axial_mismatch(0.0, ktp.T0, ktp) == 0.0


def test_calibrated_poling_period_exact_mode():
    ex = ktp_dispersion(mode="exact")
    assert isinstance(ex.sellmeier, KTPSellmeier)
    assert calibrate_poling(ex) == pytest.approx(KTP_POLING_PERIOD, rel=1e-10)


@pytest.mark.parametrize("bad", [0.9, 3.2])
def test_index_out_of_range_rejected(ktp, bad):
    kw = {f: getattr(ktp, f) for f in ("omega_p", "n_0s", "n_0i", "group_slowness_s", "group_slowness_i",
                                          "thermal_detuning_b")}
    with pytest.raises(DispersionError):
        DispersionModel(n_0p=bad, **kw)


def test_zero_group_mismatch_rejected(ktp):
    with pytest.raises(DispersionError):
        DispersionModel(ktp.omega_p, 1.8, 1.8, 1.8, 6e-9, 6e-9, 0.0)


def test_axial_k_linear_in_detuning(ktp):
    om = np.linspace(-1e13, 1e13, 5)
    ks = ktp.axial_k("signal", om)
    ki = ktp.axial_k("idler", om)
    assert np.allclose(np.diff(ks), ktp.group_slowness_s * np.diff(om), rtol=1e-9)
    assert np.allclose(np.diff(ki), -ktp.group_slowness_i * np.diff(om), rtol=1e-9)
