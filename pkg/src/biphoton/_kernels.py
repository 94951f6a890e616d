"""Hot loops: exact-integrand quadrature and the HOM overlap sum.

Each kernel has a numba implementation and a pure-numpy one with identical
signatures.  Set ``BIPHOTON_DISABLE_NUMBA=1`` (or run without numba
installed) to force the numpy path.  Both paths accumulate each output
sample serially in a fixed node order, so results do not depend on thread
count.
"""

import os

import numpy as np

from .constants import SINC_EXP_FACTOR

_DISABLED = os.environ.get("BIPHOTON_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError
    import numba
    from numba import njit, prange

    # the bundled TBB is often too old; prefer OpenMP without the warning
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag in CI
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def set_threads(n):
    if HAVE_NUMBA and n:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


# ----------------------------------------------------------------------------
# exact integrand
#
# Nodes live in sum/difference coordinates: su = |p+q|^2, sv = |p-q|^2 and
# the cosine of the angle between p+q and p-q.  Per-Omega inputs are the
# on-axis mismatch d0 and the axial wavenumbers of the three branches.
# ----------------------------------------------------------------------------


def _exact_numpy(d0, kp, ks, ki, su, wu, sv, wv, cphi, wphi, w_p, w_d, length, exponential):
    SU = su[:, None, None]
    SV = sv[None, :, None]
    UV = np.sqrt(SU * SV) * cphi[None, None, :]
    p2 = 0.25 * (SU + SV + 2 * UV)
    q2 = 0.25 * (SU + SV - 2 * UV)
    weight = (wu[:, None, None] * wv[None, :, None] * wphi[None, None, :]) / 16.0
    env = np.exp(-(w_p**2) * SU / 4 - w_d**2 * (SU + SV) / 8)
    out = np.empty(d0.shape[0], dtype=np.complex128)
    with np.errstate(invalid="ignore"):
        for j in range(d0.shape[0]):
            rp = kp[j] ** 2 - SU
            rs = ks[j] ** 2 - p2
            ri = ki[j] ** 2 - q2
            ok = (rp > 0) & (rs > 0) & (ri > 0)
            dp = SU / (kp[j] + np.sqrt(np.where(ok, rp, 1.0)))
            ds = p2 / (ks[j] + np.sqrt(np.where(ok, rs, 1.0)))
            di = q2 / (ki[j] + np.sqrt(np.where(ok, ri, 1.0)))
            x = 0.5 * length * (d0[j] - dp + ds + di)
            if exponential:
                pm = np.exp(-SINC_EXP_FACTOR * np.abs(x))
            else:
                pm = np.sinc(x / np.pi)
            # exit-face reference: each photon propagates L/2
            phase = -x + 0.5 * length * (ds + di)
            val = np.where(ok, weight * env * pm * np.exp(1j * phase), 0.0)
            out[j] = val.sum()
    return out


if HAVE_NUMBA:

    @njit(cache=True, parallel=True, fastmath=False)
    def _exact_numba(d0, kp, ks, ki, su, wu, sv, wv, cphi, wphi, w_p, w_d, length, exponential):
        n = d0.shape[0]
        out = np.empty(n, dtype=np.complex128)
        for j in prange(n):
            kpj = kp[j]
            ksj = ks[j]
            kij = ki[j]
            acc_re = 0.0
            acc_im = 0.0
            for a in range(su.shape[0]):
                sa = su[a]
                rp = kpj * kpj - sa
                if rp <= 0.0:
                    continue
                dp = sa / (kpj + np.sqrt(rp))
                for b in range(sv.shape[0]):
                    sb = sv[b]
                    env = np.exp(-w_p * w_p * sa / 4.0 - w_d * w_d * (sa + sb) / 8.0) * wu[a] * wv[b] / 16.0
                    root = np.sqrt(sa * sb)
                    for c in range(cphi.shape[0]):
                        uv = root * cphi[c]
                        p2 = 0.25 * (sa + sb + 2.0 * uv)
                        q2 = 0.25 * (sa + sb - 2.0 * uv)
                        rs = ksj * ksj - p2
                        ri = kij * kij - q2
                        if rs <= 0.0 or ri <= 0.0:
                            continue
                        ds = p2 / (ksj + np.sqrt(rs))
                        di = q2 / (kij + np.sqrt(ri))
                        x = 0.5 * length * (d0[j] - dp + ds + di)
                        if exponential:
                            pm = np.exp(-SINC_EXP_FACTOR * abs(x))
                        elif x == 0.0:
                            pm = 1.0
                        else:
                            pm = np.sin(x) / x
                        phase = -x + 0.5 * length * (ds + di)
                        amp = env * pm * wphi[c]
                        acc_re += amp * np.cos(phase)
                        acc_im += amp * np.sin(phase)
            out[j] = acc_re + 1j * acc_im
        return out

    @njit(cache=True, parallel=True)
    def _hom_numba(omega, g, taus, offset, d_omega):
        out = np.empty(taus.shape[0])
        for m in prange(taus.shape[0]):
            s = 0.0
            t = 2.0 * (taus[m] - offset)
            for k in range(omega.shape[0]):
                ph = omega[k] * t
                # Re(g e^{-i ph})
                s += g[k].real * np.cos(ph) + g[k].imag * np.sin(ph)
            out[m] = s * d_omega
        return out


def _hom_numpy(omega, g, taus, offset, d_omega):
    ph = np.exp(-2j * np.outer(taus - offset, omega))
    return (ph @ g).real * d_omega


def exact_projection(*args, backend=None):
    """Quadrature sum of the exact integrand for every Omega sample."""
    backend = backend or BACKEND
    args = [np.ascontiguousarray(a, dtype=np.float64) if isinstance(a, np.ndarray) else a for a in args]
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend unavailable")
        return _exact_numba(*args)
    return _exact_numpy(*args)


def hom_overlap(omega, g, taus, offset, d_omega, backend=None):
    """``Re sum_k g_k exp(-2 i Omega_k (tau - offset)) dOmega`` for each tau."""
    backend = backend or BACKEND
    omega = np.ascontiguousarray(omega, dtype=np.float64)
    g = np.ascontiguousarray(g, dtype=np.complex128)
    taus = np.ascontiguousarray(taus, dtype=np.float64)
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend unavailable")
        return _hom_numba(omega, g, taus, float(offset), float(d_omega))
    return _hom_numpy(omega, g, taus, float(offset), float(d_omega))
