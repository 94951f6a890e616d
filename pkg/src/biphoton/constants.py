"""Shared physical constants and default apparatus values (SI units)."""

from scipy.constants import c as SPEED_OF_LIGHT

# exp(-0.455|x|) stand-in for sinc(x)
SINC_EXP_FACTOR = 0.455

# apparatus defaults
CRYSTAL_LENGTH = 15e-3
PUMP_WAVELENGTH = 405.5e-9
DEGENERACY_TEMPERATURE = 54.0
POLING_EXPANSION = 6.7e-6  # 1/K, KTP along x
SUPPORTED_TEMPERATURES = (40.0, 65.0)

# Linearized type-II KTP constants at 405.5 nm -> 2 x 811 nm, 54 degC.
# Frozen output of scripts/ktp_oracle.py; these are derived from published
# Sellmeier fits, not measured values.
KTP_DEFAULTS = {
    "n_0p": 1.8409839463919138,
    "n_0s": 1.7562753030844296,
    "n_0i": 1.8447810518063166,
    "group_slowness_s": 6.020434598402944e-09,
    "group_slowness_i": 6.3711719051540414e-09,
    "thermal_detuning_b": 208.19656448097842,
}
KTP_POLING_PERIOD = 1.002329236494895e-05

# HOM scan grid
TAU_SPAN = 3.05e-12
TAU_POINTS = 52
TEMPERATURE_RANGE = (45.0, 60.0)
TEMPERATURE_STEP = 0.2
