"""Kernel backend selection.

The tensor-algebra inner loops (Christoffel assembly, the quadratic part of
the curvature tensor, pointwise tensor composition) dominate runtime on
64^3-class grids.  Each of them exists in two equivalent implementations:

* a numba ``@njit(parallel=True)`` kernel operating on node-flattened arrays,
* a pure-numpy einsum fallback.

The active path is chosen once at import time from the environment variable
``STATVAC_NUMBA``:

* ``auto`` (default): use numba when it is importable,
* ``1`` / ``true`` / ``yes`` / ``on``: require numba (raises if missing),
* ``0`` / anything else: force the numpy fallback.

``benchmarks/bench_kernels.py`` times both paths on identical inputs.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit, prange

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def wrap(func):
            return func

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return wrap

    prange = range


def _resolve_flag() -> bool:
    raw = os.environ.get("STATVAC_NUMBA", "auto").strip().lower()
    if raw in ("auto", ""):
        return NUMBA_AVAILABLE
    enabled = raw in ("1", "true", "yes", "on")
    if enabled and not NUMBA_AVAILABLE:
        raise RuntimeError("STATVAC_NUMBA requests numba but numba is not importable")
    return enabled


USE_NUMBA = _resolve_flag()


# ---------------------------------------------------------------------------
# numpy fallbacks
# ---------------------------------------------------------------------------

def christoffel_numpy(ginv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """Gamma^k_ij = 1/2 g^{kl} (d_i g_{lj} + d_j g_{li} - d_l g_{ij}).

    ginv: (N, n, n); dg: (N, n, n, n) with dg[p, k, i, j] = d_k g_ij.
    Returns (N, n, n, n) indexed [p, k, i, j].
    """
    t1 = np.einsum("pkl,pilj->pkij", ginv, dg)
    t2 = np.einsum("pkl,pjli->pkij", ginv, dg)
    t3 = np.einsum("pkl,plij->pkij", ginv, dg)
    return 0.5 * (t1 + t2 - t3)


def riemann_quadratic_numpy(gam: np.ndarray) -> np.ndarray:
    """Quadratic part Gamma^l_{am} Gamma^m_{bk} - Gamma^l_{bm} Gamma^m_{ak}.

    gam: (N, n, n, n) indexed [p, l, i, j].  Returns (N, n, n, n, n) indexed
    [p, l, k, a, b], matching the storage order of the curvature tensor.
    """
    q = np.einsum("plam,pmbk->plkab", gam, gam)
    return q - np.swapaxes(q, 3, 4)


def compose_sym_numpy(ginv: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(a o b)_ij = g^{kl} a_ik b_jl on node-flattened rank-2 tensors."""
    return np.einsum("pkl,pik,pjl->pij", ginv, a, b)


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------

if NUMBA_AVAILABLE:

    @njit(parallel=True, cache=True)
    def _christoffel_numba(ginv, dg):  # pragma: no cover - compiled
        npts, n = ginv.shape[0], ginv.shape[1]
        out = np.empty((npts, n, n, n), dtype=ginv.dtype)
        for p in prange(npts):
            for k in range(n):
                for i in range(n):
                    for j in range(n):
                        acc = 0.0
                        for l in range(n):
                            acc += ginv[p, k, l] * (
                                dg[p, i, l, j] + dg[p, j, l, i] - dg[p, l, i, j]
                            )
                        out[p, k, i, j] = 0.5 * acc
        return out

    @njit(parallel=True, cache=True)
    def _riemann_quadratic_numba(gam):  # pragma: no cover - compiled
        npts, n = gam.shape[0], gam.shape[1]
        out = np.empty((npts, n, n, n, n), dtype=gam.dtype)
        for p in prange(npts):
            for l in range(n):
                for k in range(n):
                    for a in range(n):
                        for b in range(n):
                            acc = 0.0
                            for m in range(n):
                                acc += (
                                    gam[p, l, a, m] * gam[p, m, b, k]
                                    - gam[p, l, b, m] * gam[p, m, a, k]
                                )
                            out[p, l, k, a, b] = acc
        return out

    @njit(parallel=True, cache=True)
    def _compose_sym_numba(ginv, a, b):  # pragma: no cover - compiled
        npts, n = ginv.shape[0], ginv.shape[1]
        out = np.empty((npts, n, n), dtype=a.dtype)
        for p in prange(npts):
            for i in range(n):
                for j in range(n):
                    acc = 0.0
                    for k in range(n):
                        for l in range(n):
                            acc += ginv[p, k, l] * a[p, i, k] * b[p, j, l]
                    out[p, i, j] = acc
        return out


def christoffel_core(ginv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    if USE_NUMBA:
        return _christoffel_numba(np.ascontiguousarray(ginv), np.ascontiguousarray(dg))
    return christoffel_numpy(ginv, dg)


def riemann_quadratic_core(gam: np.ndarray) -> np.ndarray:
    if USE_NUMBA:
        return _riemann_quadratic_numba(np.ascontiguousarray(gam))
    return riemann_quadratic_numpy(gam)


def compose_sym_core(ginv: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if USE_NUMBA:
        return _compose_sym_numba(
            np.ascontiguousarray(ginv),
            np.ascontiguousarray(a),
            np.ascontiguousarray(b),
        )
    return compose_sym_numpy(ginv, a, b)
