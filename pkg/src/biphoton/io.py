"""CSV/JSON writers and readers.

Numbers go out as ``%.17g`` (C-locale formatting, '.' separator), so every
double survives a round trip bit-for-bit.  JSON is written with sorted keys
and no timestamps so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np

from .analysis import WidthReport, signal_wavelength
from .hom import HomMap

FMT = "%.17g"
HOM_CORNER = "tau_ps\\T_C"
WIDTH_COLUMNS = ("w_p_um", "w_d_um", "model", "mean_lambda_nm", "delta_lambda_nm", "delta_t_fs", "warnings")


class MalformedCSVError(ValueError):
    pass


def fmt(x):
    return FMT % x


def _jsonable(obj):
    if is_dataclass(obj):
        return asdict(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2, default=_jsonable, allow_nan=True) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def sidecar_path(path):
    return Path(path).with_suffix(".json")


def _write_rows(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_spectrum_csv(path, spectrum, pump_wavelength):
    om = spectrum.omega_grid
    lam = signal_wavelength(om, pump_wavelength) * 1e9
    v = spectrum.values
    I = np.abs(v) ** 2
    I = I / (np.sum(I) * spectrum.d_omega)
    rows = (
        (fmt(om[k]), fmt(lam[k]), fmt(v[k].real), fmt(v[k].imag), fmt(I[k]))
        for k in range(om.size)
    )
    _write_rows(path, ("omega_rad_s", "lambda_nm", "re", "im", "abs2_normalized"), rows)


def write_temporal_csv(path, temporal):
    t = temporal.time_grid
    v = temporal.values
    I = np.abs(v) ** 2
    I = I / (np.sum(I) * temporal.dt)
    rows = ((fmt(t[k] * 1e15), fmt(v[k].real), fmt(v[k].imag), fmt(I[k])) for k in range(t.size))
    _write_rows(path, ("t_fs", "re", "im", "abs2_normalized"), rows)


def read_table(path):
    """Header plus float columns of a plain numeric CSV."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise MalformedCSVError(f"{path}: no data rows")
    header = rows[0]
    try:
        data = np.array([[float(x) for x in r] for r in rows[1:]])
    except ValueError as exc:
        raise MalformedCSVError(f"{path}: {exc}") from None
    if data.shape[1] != len(header):
        raise MalformedCSVError(f"{path}: ragged rows")
    return header, data


def _report_row(r):
    scale = lambda x, s: fmt(x * s)  # noqa: E731
    notes = list(r.warnings)
    if r.error:
        notes.append("failed: " + r.error)
    return (
        scale(r.w_p, 1e6), scale(r.w_d, 1e6), r.model,
        scale(r.mean_lambda, 1e9), scale(r.delta_lambda, 1e9), scale(r.delta_t, 1e15),
        ";".join(notes),
    )


def write_width_csv(path, reports):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(WIDTH_COLUMNS)
        for r in reports:
            w.writerow(_report_row(r))


def read_width_csv(path):
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != WIDTH_COLUMNS:
        raise MalformedCSVError(f"{path}: unexpected header")
    for r in rows[1:]:
        notes = [n for n in r[6].split(";") if n]
        err = next((n[len("failed: "):] for n in notes if n.startswith("failed: ")), None)
        out.append(WidthReport(
            float(r[0]) * 1e-6, float(r[1]) * 1e-6, r[2],
            float(r[3]) * 1e-9, float(r[4]) * 1e-9, float(r[5]) * 1e-15,
            warnings=tuple(n for n in notes if not n.startswith("failed: ")), error=err,
        ))
    return out


def report_dict(r):
    return {
        "w_p_um": r.w_p * 1e6,
        "w_d_um": r.w_d * 1e6,
        "model": r.model,
        "mean_lambda_nm": r.mean_lambda * 1e9,
        "delta_lambda_nm": r.delta_lambda * 1e9,
        "delta_t_fs": r.delta_t * 1e15,
        "delta_omega_rad_s": r.delta_omega,
        "warnings": list(r.warnings),
        "error": r.error,
    }


def write_hom_csv(path, hmap, sidecar=True):
    """One row per delay, one column per temperature; header carries ps and degC."""
    taus = hmap.tau_grid * 1e12
    rows = (
        [fmt(taus[i])] + [fmt(x) for x in hmap.values[i]]
        for i in range(taus.size)
    )
    _write_rows(path, [HOM_CORNER] + [fmt(T) for T in hmap.temperature_grid], rows)
    if sidecar:
        meta = dict(hmap.metadata)
        meta["tau_grid_s"] = [float(x) for x in hmap.tau_grid]
        meta["temperature_grid_C"] = [float(x) for x in hmap.temperature_grid]
        write_json(sidecar_path(path), meta)


def read_hom_csv(path, require_sidecar=False):
    """Read a map; grids come from the sidecar when present (exact seconds)."""
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 3 or not rows[0] or rows[0][0] != HOM_CORNER:
        raise MalformedCSVError(f"{path}: not a HOM map (header must start with {HOM_CORNER!r})")
    try:
        temps = np.array([float(x) for x in rows[0][1:]])
        body = np.array([[float(x) for x in r] for r in rows[1:]])
    except ValueError as exc:
        raise MalformedCSVError(f"{path}: {exc}") from None
    if body.ndim != 2 or body.shape[1] != temps.size + 1:
        raise MalformedCSVError(f"{path}: ragged rows")
    taus = body[:, 0] * 1e-12
    values = body[:, 1:]
    if not np.all(np.isfinite(values)):
        raise MalformedCSVError(f"{path}: non-finite coincidence values")
    side = sidecar_path(path)
    meta = {}
    if side.exists():
        meta = read_json(side)
        exact_t = np.asarray(meta.pop("tau_grid_s", taus), dtype=float)
        exact_T = np.asarray(meta.pop("temperature_grid_C", temps), dtype=float)
        if exact_t.shape == taus.shape and np.allclose(exact_t, taus, rtol=1e-12, atol=0):
            taus = exact_t
        if exact_T.shape == temps.shape and np.array_equal(exact_T, temps):
            temps = exact_T
    elif require_sidecar:
        raise FileNotFoundError(side)
    return HomMap(taus, temps, values, meta)


def write_recovered_csv(path, recovered):
    rows = (
        (fmt(recovered.temperature[k]), fmt(recovered.omega0[k]), fmt(recovered.omega[k]), fmt(recovered.intensity[k]))
        for k in range(recovered.temperature.size)
    )
    _write_rows(path, ("temperature_C", "omega0_rad_s", "omega_rad_s", "abs2_normalized"), rows)

