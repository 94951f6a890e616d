"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 3] [--threads N]

Both backends are called in one process through the ``backend=`` argument;
setting ``BIPHOTON_DISABLE_NUMBA=1`` instead makes everything use numpy.
"""

import argparse
import time

import numpy as np

from biphoton import _kernels
from biphoton.dispersion import equal_index_dispersion
from biphoton.hom import mirror, scan_tau_grid, walkoff_compensation
from biphoton.physics import CrystalConfig, DetectionConfig, PumpConfig
from biphoton.projection import QuadratureSpec, default_omega_grid, project_spectrum
from biphoton.toymodel import toy_constants, toy_wavefunction


def best_of(fn, repeat):
    fn()  # warm-up (jit compile, caches)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--omega-points", type=int, default=64)
    ap.add_argument("--nodes", type=int, default=8)
    args = ap.parse_args()
    _kernels.set_threads(args.threads)

    pump, det, crystal = PumpConfig(7.6e-6), DetectionConfig(20e-6), CrystalConfig()
    disp = equal_index_dispersion(pump.omega)
    grid = default_omega_grid(crystal, disp, args.omega_points)
    quad = QuadratureSpec(nodes_per_axis=args.nodes, tolerance=None)
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])

    print(f"exact projection: {grid.size} Omega samples, {args.nodes} nodes per axis")
    ref = None
    for b in backends:
        t, out = best_of(lambda b=b: project_spectrum(grid, disp.T0, pump, det, crystal, disp, quad,
                                                      integrand="exact", backend=b).values, args.repeat)
        diff = "" if ref is None else f"  max |diff| / peak = {np.max(np.abs(out - ref)) / np.max(np.abs(ref)):.1e}"
        ref = out if ref is None else ref
        print(f"  {b:6s} {t * 1e3:9.1f} ms{diff}")

    k = toy_constants(pump, det, crystal, disp)
    spec = toy_wavefunction(default_omega_grid(crystal, disp, 2048), k)
    g = spec.values * np.conj(mirror(spec))
    taus = np.linspace(scan_tau_grid()[0], scan_tau_grid()[-1], 52 * 76)
    off = walkoff_compensation(crystal, disp)
    print(f"HOM overlap: {spec.values.size} Omega samples x {taus.size} delays")
    ref = None
    for b in backends:
        t, out = best_of(lambda b=b: _kernels.hom_overlap(spec.omega_grid, g, taus, off, spec.d_omega, b), args.repeat)
        diff = "" if ref is None else f"  max |diff| / peak = {np.max(np.abs(out - ref)) / np.max(np.abs(ref)):.1e}"
        ref = out if ref is None else ref
        print(f"  {b:6s} {t * 1e3:9.1f} ms{diff}")


if __name__ == "__main__":
    main()
