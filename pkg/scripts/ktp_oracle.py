#!/usr/bin/env python3
"""Standalone KTP dispersion oracle.

Evaluates published temperature-dependent Sellmeier fits for KTP with
symbolic derivatives (sympy) and prints the linearized constants used as
library defaults for type-II (y -> y + z) down-conversion of a 405.5 nm
pump at 54 degC.

Sources of the fits:
    n_y: K. Koenig, F. Wong, Appl. Phys. Lett. 84, 1644 (2004)
    n_z: K. Fradkin et al., Appl. Phys. Lett. 74, 914 (1999)
    dn/dT: S. Emanueli, A. Arie, Appl. Opt. 42, 6661 (2003)
    poling expansion: 6.7e-6 / K along x

This file deliberately shares no code with the ``biphoton`` package.

    python scripts/ktp_oracle.py [--json]
"""
import argparse
import json

import sympy as sp

C = 299792458
LAMBDA_P = sp.Rational(4055, 10) * sp.Rational(1, 10**9)
T0 = 54
POLING_EXPANSION = sp.Rational(67, 10**7)

lam, T = sp.symbols("lam T", positive=True)  # lam in micrometres


def _thermal(a, b):
    dT = T - 25
    n1 = sum(sp.Float(ai) / lam**i for i, ai in enumerate(a))
    n2 = sum(sp.Float(bi) / lam**i for i, bi in enumerate(b))
    return n1 * dT + n2 * dT**2


n_y = sp.sqrt(2.09930 + 0.922683 / (1 - 0.0467695 / lam**2) - 0.0138408 * lam**2) + _thermal(
    [6.2897e-6, 6.3061e-6, -6.0629e-6, 2.6486e-6],
    [-0.14445e-8, 2.2244e-8, -3.5770e-8, 1.3470e-8],
)
n_z = sp.sqrt(
    2.12725 + 1.18431 / (1 - 0.0514852 / lam**2) + 0.6603 / (1 - 100.00507 / lam**2) - 9.68956e-3 * lam**2
) + _thermal(
    [9.9587e-6, 9.9228e-6, -8.9603e-6, 4.1010e-6],
    [-1.1882e-8, 1.0459e-7, -9.8136e-8, 3.1481e-8],
)


def group_slowness(n_expr, lam_um):
    # dk/domega = (n - lam dn/dlam) / c
    ng = n_expr - lam * sp.diff(n_expr, lam)
    return float(ng.subs({lam: lam_um, T: T0})) / C


def compute():
    lp_um = float(LAMBDA_P * 10**6)
    ls_um = 2 * lp_um
    n0p = float(n_y.subs({lam: lp_um, T: T0}))
    n0s = float(n_y.subs({lam: ls_um, T: T0}))
    n0i = float(n_z.subs({lam: ls_um, T: T0}))
    gs = group_slowness(n_y, ls_um)
    gi = group_slowness(n_z, ls_um)

    two_pi = 2 * sp.pi
    k_expr = two_pi * (n_y.subs(lam, lp_um) / lp_um - n_y.subs(lam, ls_um) / ls_um - n_z.subs(lam, ls_um) / ls_um) * 10**6
    grating0 = float(k_expr.subs(T, T0))
    poling = float(two_pi) / grating0
    # d/dT [k_p - k_s - k_i - 2 pi / (Lambda0 (1 + a (T - T0)))] at T0
    b = float(sp.diff(k_expr, T).subs(T, T0)) + grating0 * float(POLING_EXPANSION)
    return {
        "n_0p": n0p,
        "n_0s": n0s,
        "n_0i": n0i,
        "group_slowness_s": gs,
        "group_slowness_i": gi,
        "F": gi - gs,
        "thermal_detuning_b": b,
        "poling_period": poling,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    vals = compute()
    if args.json:
        print(json.dumps(vals, indent=2))
    else:
        for k, v in vals.items():
            print(f"{k:20s} {v!r}")


if __name__ == "__main__":
    main()
