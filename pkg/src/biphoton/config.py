"""Run configuration: YAML with unit-suffixed keys.

Every key carries its unit in the name (``length_mm``, ``waist_um``) so a
bare number can never be read in the wrong unit.  Unknown keys are
rejected.  Missing sections fall back to the built-in apparatus defaults,
except that a config file must set both beam waists.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np
import yaml

from .constants import (
    CRYSTAL_LENGTH,
    DEGENERACY_TEMPERATURE,
    POLING_EXPANSION,
    PUMP_WAVELENGTH,
    TAU_POINTS,
    TAU_SPAN,
    TEMPERATURE_RANGE,
    TEMPERATURE_STEP,
)
from .dispersion import default_ktp_dispersion, ktp_dispersion
from .physics import CrystalConfig, DetectionConfig, PumpConfig
from .projection import QuadratureSpec, centered_grid, tail_covering_grid


class ConfigError(ValueError):
    pass


DEFAULTS = {
    "crystal": {
        "length_mm": round(CRYSTAL_LENGTH * 1e3, 9),
        "poling_period_um": None,
        "degeneracy_temperature_C": DEGENERACY_TEMPERATURE,
        "thermal_poling_coefficient_per_K": POLING_EXPANSION,
    },
    "pump": {"wavelength_nm": round(PUMP_WAVELENGTH * 1e9, 9), "waist_um": 7.6},
    "detection": {"waist_um": 30.0},
    # 'frozen': tabulated KTP constants; 'sellmeier': linearize the fits at load time
    "dispersion": {"source": "frozen", "mode": "linearized"},
    "quadrature": {
        "scheme": "tensor-gauss",
        "nodes_per_axis": 16,
        "k_max_per_um": None,
        "reduction": "azimuthal-3d",
        "tolerance": 1e-4,
    },
    "scan": {
        "tau_min_ps": -round(TAU_SPAN * 1e12, 12),
        "tau_max_ps": round(TAU_SPAN * 1e12, 12),
        "tau_points": TAU_POINTS,
        "temperature_min_C": TEMPERATURE_RANGE[0],
        "temperature_max_C": TEMPERATURE_RANGE[1],
        "temperature_step_C": TEMPERATURE_STEP,
        "temperature_C": None,
        # None: grid sized to the detection waist
        "omega_points": None,
        "omega_half_span_rad_s": None,
    },
}

REQUIRED_IN_FILE = ("pump.waist_um", "detection.waist_um")
CHOICES = {
    "dispersion.source": ("frozen", "sellmeier"),
    "dispersion.mode": ("linearized", "exact"),
    "quadrature.scheme": ("tensor-gauss", "adaptive"),
    "quadrature.reduction": ("azimuthal-3d", "full-4d"),
}
STRINGS = {"dispersion.source", "dispersion.mode", "quadrature.scheme", "quadrature.reduction"}
INTEGERS = {"quadrature.nodes_per_axis", "scan.tau_points", "scan.omega_points"}


def _merge(user, where=""):
    out = copy.deepcopy(DEFAULTS)
    if user is None:
        return out
    if not isinstance(user, dict):
        raise ConfigError(f"{where or 'config'}: top level must be a mapping")
    for section, body in user.items():
        if section not in DEFAULTS:
            raise ConfigError(f"unknown key {section!r}")
        if not isinstance(body, dict):
            raise ConfigError(f"section {section!r} must be a mapping")
        for key, value in body.items():
            name = f"{section}.{key}"
            if key not in DEFAULTS[section]:
                raise ConfigError(f"unknown key {name!r}")
            out[section][key] = _check(name, value)
    return out


def _check(name, value):
    if value is None:
        return None
    if name in STRINGS:
        if value not in CHOICES[name]:
            raise ConfigError(f"{name}: {value!r} not one of {', '.join(CHOICES[name])}")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name}: expected a number, got {value!r}")
    if name in INTEGERS:
        if int(value) != value:
            raise ConfigError(f"{name}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


def load_config(path=None, overrides=None):
    """Parse and validate; ``path=None`` gives the built-in defaults."""
    user = None
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                user = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            where = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
            raise ConfigError(f"{path}: YAML syntax error{where}: {getattr(exc, 'problem', exc)}") from None
        user = user or {}
        for key in REQUIRED_IN_FILE:
            section, name = key.split(".")
            if not isinstance(user.get(section), dict) or user[section].get(name) is None:
                raise ConfigError(f"{path}: missing required key {key!r}")
    raw = _merge(user, str(path) if path else "")
    for key, value in (overrides or {}).items():
        section, name = key.split(".")
        raw[section][name] = _check(key, value)
    return RunConfig.from_dict(raw)


@dataclass
class RunConfig:
    raw: dict
    crystal: CrystalConfig
    pump: PumpConfig
    detection: DetectionConfig
    quadrature: QuadratureSpec

    @classmethod
    def from_dict(cls, raw):
        c, p, d, q = raw["crystal"], raw["pump"], raw["detection"], raw["quadrature"]
        try:
            crystal = CrystalConfig(
                length=c["length_mm"] * 1e-3,
                poling_period_at_T0=None if c["poling_period_um"] is None else c["poling_period_um"] * 1e-6,
                T0=c["degeneracy_temperature_C"],
                thermal_poling_coefficient=c["thermal_poling_coefficient_per_K"],
            )
            pump = PumpConfig(waist=p["waist_um"] * 1e-6, wavelength=p["wavelength_nm"] * 1e-9)
            detection = DetectionConfig(waist=d["waist_um"] * 1e-6)
            quad = QuadratureSpec(
                scheme=q["scheme"],
                nodes_per_axis=q["nodes_per_axis"],
                k_max=None if q["k_max_per_um"] is None else q["k_max_per_um"] * 1e6,
                reduction=q["reduction"],
                tolerance=q["tolerance"],
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        s = raw["scan"]
        if s["tau_points"] is None or s["tau_points"] < 2 or not s["tau_max_ps"] > s["tau_min_ps"]:
            raise ConfigError("scan: need tau_points >= 2 and tau_max_ps > tau_min_ps")
        if not (s["temperature_step_C"] and s["temperature_step_C"] > 0):
            raise ConfigError("scan.temperature_step_C must be positive")
        if not s["temperature_max_C"] > s["temperature_min_C"]:
            raise ConfigError("scan: temperature_max_C must exceed temperature_min_C")
        return cls(raw, crystal, pump, detection, quad)

    def dispersion(self):
        d = self.raw["dispersion"]
        T0 = self.crystal.T0
        if d["source"] == "frozen" and T0 == DEGENERACY_TEMPERATURE:
            return default_ktp_dispersion(self.pump.wavelength, mode=d["mode"])
        return ktp_dispersion(self.pump.wavelength, T0=T0, mode=d["mode"],
                              poling_expansion=self.crystal.thermal_poling_coefficient)

    def tau_grid(self):
        s = self.raw["scan"]
        return np.linspace(s["tau_min_ps"], s["tau_max_ps"], s["tau_points"]) * 1e-12

    def temperature_grid(self):
        s = self.raw["scan"]
        lo, hi, step = s["temperature_min_C"], s["temperature_max_C"], s["temperature_step_C"]
        n = int(round((hi - lo) / step)) + 1
        return np.linspace(lo, lo + (n - 1) * step, n)

    def omega_grid(self, dispersion):
        s = self.raw["scan"]
        n = s["omega_points"] or 2048
        if s["omega_half_span_rad_s"] is not None:
            return centered_grid(n, s["omega_half_span_rad_s"])
        return tail_covering_grid(self.crystal, dispersion, self.detection, n)

    def to_dict(self):
        return copy.deepcopy(self.raw)
