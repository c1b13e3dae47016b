"""Hot numeric kernels: numba-compiled with a pure-numpy fallback.

Set FVFP_NUMBA=0 in the environment to force the numpy path (useful on
machines without a working numba, and for the benchmark comparison in
benchmarks/bench_kernels.py).
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


def numba_enabled():
    return HAVE_NUMBA and os.environ.get("FVFP_NUMBA", "1").lower() not in ("0", "false")


# ---------------------------------------------------------------------------
# Chambers-Mallows-Stuck transform: maps (uniform angle, exponential) pairs to
# symmetric alpha-stable variates with characteristic function exp(-|xi|^alpha).


def _cms_numpy(u, w, alpha):
    if alpha == 1.0:
        return np.tan(u)
    if alpha == 2.0:
        return 2.0 * np.sin(u) * np.sqrt(w)
    inv = 1.0 / alpha
    x = np.sin(alpha * u) / np.cos(u) ** inv
    x *= (np.cos((1.0 - alpha) * u) / w) ** ((1.0 - alpha) * inv)
    return x


@njit(cache=False)
def _cms_numba(u, w, alpha):  # pragma: no cover - exercised via dispatch
    n = u.shape[0]
    out = np.empty(n)
    if alpha == 1.0:
        for i in range(n):
            out[i] = np.tan(u[i])
        return out
    if alpha == 2.0:
        for i in range(n):
            out[i] = 2.0 * np.sin(u[i]) * np.sqrt(w[i])
        return out
    inv = 1.0 / alpha
    ex = (1.0 - alpha) * inv
    for i in range(n):
        out[i] = (
            np.sin(alpha * u[i])
            / np.cos(u[i]) ** inv
            * (np.cos((1.0 - alpha) * u[i]) / w[i]) ** ex
        )
    return out


def cms_transform(u, w, alpha):
    """Standard symmetric stable variates from uniform/exponential draws."""
    if numba_enabled():
        return _cms_numba(np.ascontiguousarray(u), np.ascontiguousarray(w), float(alpha))
    return _cms_numpy(u, w, alpha)


# ---------------------------------------------------------------------------
# Pairwise dissipation sum. For each x-node:
#   sum_{i != j} (g_i - g_j)^2 * 0.5*(F_i + F_j) * krow[(i-j) mod nv]
# which by the i<->j symmetry equals sum_{i != j} (g_i - g_j)^2 F_i krow[i-j].


def _circular_convolve(krow, arr):
    # arr: (..., n); krow: (n,) with krow[0] = 0
    kf = np.fft.rfft(krow)
    return np.fft.irfft(np.fft.rfft(arr, axis=-1) * kf, n=krow.shape[0], axis=-1)


def _dissipation_numpy(g, fvals, krow):
    s0 = krow.sum()
    kg = _circular_convolve(krow, g)
    kg2 = _circular_convolve(krow, g * g)
    per_node = fvals * (g * g * s0 - 2.0 * g * kg + kg2)
    return float(per_node.sum())


@njit(cache=False)
def _dissipation_numba(g, fvals, krow):  # pragma: no cover - exercised via dispatch
    nx, nv = g.shape
    total = 0.0
    for ix in range(nx):
        for i in range(nv):
            gi = g[ix, i]
            fi = fvals[ix, i]
            acc = 0.0
            for j in range(nv):
                if j == i:
                    continue
                d = gi - g[ix, j]
                acc += d * d * krow[(i - j) % nv]
            total += fi * acc
    return total


def dissipation_sum(g, fvals, krow):
    """Accumulate the quadratic-difference sum over all velocity pairs.

    g, fvals: (nx, nv); krow: periodized kernel sampled at node separations,
    with the diagonal entry zeroed (principal-value excision).
    """
    if numba_enabled():
        return _dissipation_numba(
            np.ascontiguousarray(g), np.ascontiguousarray(fvals), np.ascontiguousarray(krow)
        )
    return _dissipation_numpy(g, fvals, krow)


def pairwise_difference_apply(krow, values):
    """(f_i - f_j) pair sum against a circulant kernel row: f*S - krow (*) f."""
    s0 = krow.sum()
    return values * s0 - _circular_convolve(krow, values)
