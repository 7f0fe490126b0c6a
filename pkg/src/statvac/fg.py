"""Radial boundary expansions of asymptotically AdS stationary metrics.

With ``rho`` a boundary defining coordinate the metric is
``rho^-2 (d rho^2 + G(rho))`` where ``G`` is a family of stationary
Lorentzian metrics on the boundary cylinder (time fiber + spatial boundary
chart).  Writing ``P(rho) = G_0 + G_2 rho^2 + ...`` and ``Q = P - rho P'/2``,
the tangential Einstein block in the Gauss gauge ``r = -ln(rho)`` multiplied
by ``rho^2`` is the pure power series

    E(P) = rho^2 Ric(P) - tr(P^-1 Q) Q - 2 Q + rho Q' + 2 Q P^-1 Q + n P.

The expansion coefficients are found order by order: the order-k
coefficient of ``E`` is affine in the trial ``G_k``; the linear part is
assembled numerically per boundary node by probing a symmetric basis, and
the small dense systems are solved at every node.  At order ``n`` the
system is rank deficient: the kernel (trace-free) part is supplied by the
caller, the determined part is solved in the least-squares sense.  For even
``n`` orders >= n are refused (logarithmic obstruction).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import LORENTZIAN, MetricField, TensorField
from .grid import ChartGrid


class FGError(ValueError):
    pass


class LogObstructionError(FGError):
    pass


# ---------------------------------------------------------------------------
# tensor-valued rho-series
# ---------------------------------------------------------------------------

def series_mul(spec: str, a: list, b: list, order: int) -> list:
    """Cauchy product of two coefficient lists under an einsum contraction."""
    out = []
    for k in range(order + 1):
        acc = None
        for i in range(k + 1):
            if i >= len(a) or (k - i) >= len(b):
                continue
            term = np.einsum(spec, a[i], b[k - i])
            acc = term if acc is None else acc + term
        out.append(acc if acc is not None else _zero_like_spec(spec, a, b))
    return out


def _zero_like_spec(spec, a, b):
    probe = np.einsum(spec, a[0], b[0])
    return np.zeros_like(probe)


def series_add(a: list, b: list, order: int) -> list:
    out = []
    for k in range(order + 1):
        x = a[k] if k < len(a) else 0.0
        y = b[k] if k < len(b) else 0.0
        out.append(x + y)
    return out


def series_scale(a: list, c: float) -> list:
    return [c * x for x in a]


def series_shift(a: list, j: int, order: int) -> list:
    """Multiply by rho^j."""
    out = [np.zeros_like(a[0]) for _ in range(min(j, order + 1))]
    for k in range(order + 1 - j):
        if k < len(a):
            out.append(a[k])
        else:
            out.append(np.zeros_like(a[0]))
    return out[: order + 1]


def series_rho_derivative(a: list) -> list:
    """d/d rho: coefficient k of a' is (k+1) a_{k+1}."""
    if len(a) <= 1:
        return [np.zeros_like(a[0])]
    return [(k + 1) * a[k + 1] for k in range(len(a) - 1)]


def series_rho_times_derivative(a: list, order: int) -> list:
    """rho * d/d rho: coefficient k is k a_k."""
    return [k * a[k] if k < len(a) else None for k in range(order + 1)][: order + 1]


def series_inverse(p: list, order: int) -> list:
    """Matrix-series inverse, p[0] invertible."""
    x0 = np.linalg.inv(p[0])
    out = [x0]
    for k in range(1, order + 1):
        acc = np.zeros_like(x0)
        for j in range(1, k + 1):
            if j < len(p):
                acc = acc + np.einsum("...ij,...jk->...ik", p[j], out[k - j])
        out.append(-np.einsum("...ij,...jk->...ik", x0, acc))
    return out


def series_ricci(p: list, grid: ChartGrid, order: int) -> list:
    """Ricci tensor of the series metric over the boundary chart."""
    m = grid.dim
    pinv = series_inverse(p, order)
    dp = [grid.gradient_stack(c) for c in p]  # [..., k, i, j]
    combo = [
        np.einsum("...imj->...mij", c) + np.einsum("...jmi->...mij", c) - c
        for c in dp
    ]
    gam = series_mul("...lm,...mij->...lij", pinv, combo, order)
    gam = series_scale(gam, 0.5)
    dgam = [grid.gradient_stack(c) for c in gam]  # [..., d, l, i, j]
    lin = [
        np.einsum("...aabk->...kb", c) - np.einsum("...baak->...kb", c)
        for c in dgam
    ]
    q1 = series_mul("...aam,...mbk->...kb", gam, gam, order)
    q2 = series_mul("...abm,...mak->...kb", gam, gam, order)
    out = []
    for k in range(order + 1):
        val = lin[k] + q1[k] - q2[k]
        out.append(0.5 * (val + np.swapaxes(val, -1, -2)))
    return out


def einstein_tangential_series(p: list, grid: ChartGrid, order: int) -> list:
    """The series E(P) described in the module docstring (n = grid.dim)."""
    n = grid.dim
    q = [(1.0 - 0.5 * k) * p[k] if k < len(p) else None for k in range(order + 1)]
    q = [c for c in q if c is not None]
    pinv = series_inverse(p, order)
    ric = series_ricci(p, grid, max(order - 2, 0))
    rho2_ric = series_shift(ric, 2, order)
    pinv_q_tr = series_mul("...ij,...ji->...", pinv, q, order)
    trq = series_mul("...,...ij->...ij", pinv_q_tr, q, order)
    qpinvq = series_mul(
        "...ij,...jk->...ik", q, series_mul("...ij,...jk->...ik", pinv, q, order), order
    )
    rqp = [k * q[k] if k < len(q) else np.zeros_like(p[0]) for k in range(order + 1)]
    out = []
    for k in range(order + 1):
        val = (
            rho2_ric[k]
            - trq[k]
            - 2.0 * (q[k] if k < len(q) else 0.0)
            + rqp[k]
            + 2.0 * qpinvq[k]
            + n * (p[k] if k < len(p) else 0.0)
        )
        out.append(0.5 * (val + np.swapaxes(val, -1, -2)))
    return out


# ---------------------------------------------------------------------------
# expansion data
# ---------------------------------------------------------------------------

@dataclass
class FGData:
    """Ordered expansion coefficients of the boundary family G(rho)."""

    boundary: ChartGrid
    n: int
    coefficients: list[np.ndarray]      # G_0 ... G_order
    undetermined_order: int             # = n
    log_obstructed: bool = False

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def coefficient(self, k: int) -> np.ndarray:
        return self.coefficients[k]

    def evaluate(self, rho: np.ndarray, derivatives: int = 0):
        """G(rho) (and d/d rho terms) at the given rho values; rho is
        broadcast against a new leading axis."""
        rho = np.atleast_1d(np.asarray(rho, float))
        shape = (len(rho),) + self.coefficients[0].shape
        outs = [np.zeros(shape) for _ in range(derivatives + 1)]
        for k, c in enumerate(self.coefficients):
            outs[0] += rho.reshape(-1, *([1] * c.ndim)) ** k * c
            if derivatives >= 1 and k >= 1:
                outs[1] += k * rho.reshape(-1, *([1] * c.ndim)) ** (k - 1) * c
            if derivatives >= 2 and k >= 2:
                outs[2] += k * (k - 1) * rho.reshape(-1, *([1] * c.ndim)) ** (k - 2) * c
        return outs[0] if derivatives == 0 else tuple(outs)


def _sym_basis(m: int) -> list[np.ndarray]:
    out = []
    for a in range(m):
        for b in range(a, m):
            e = np.zeros((m, m))
            e[a, b] = e[b, a] = 1.0
            out.append(e)
    return out


def _sym_coords(t: np.ndarray, m: int) -> np.ndarray:
    idx = [(a, b) for a in range(m) for b in range(a, m)]
    return np.stack([t[..., a, b] for a, b in idx], axis=-1)


def _sym_from_coords(v: np.ndarray, m: int) -> np.ndarray:
    idx = [(a, b) for a in range(m) for b in range(a, m)]
    out = np.zeros(v.shape[:-1] + (m, m))
    for pos, (a, b) in enumerate(idx):
        out[..., a, b] = v[..., pos]
        out[..., b, a] = v[..., pos]
    return out


def fg_expand(g0: MetricField, gn: TensorField | np.ndarray | None = None,
              order: int | None = None, kernel_tol: float = 1e-8) -> FGData:
    """Compute the expansion coefficients of G(rho) from the conformal
    representative ``g0`` and the undetermined order-n term ``gn``.

    ``order`` defaults to n; it may not exceed n+2, and for even n it must
    stay below n (logarithmic obstruction).
    """
    grid = g0.grid
    n = grid.dim
    if not (2 <= n <= 5):
        raise FGError("boundary dimension must be between 2 and 5")
    order = n if order is None else order
    if order > n + 2:
        raise FGError(f"order {order} exceeds n+2 = {n + 2}")
    if n % 2 == 0 and order >= n:
        raise LogObstructionError(
            f"even boundary dimension n={n}: the order-{n} system is rank "
            "deficient with a logarithmic obstruction; request order < n"
        )
    gn_arr = None
    if gn is not None:
        gn_arr = gn.comps if isinstance(gn, TensorField) else np.asarray(gn, float)
        gn_arr = np.broadcast_to(gn_arr, grid.shape + (n, n)).copy()

    coeffs = [g0.comps.copy()]
    basis = _sym_basis(n)
    nsym = len(basis)
    for k in range(1, order + 1):
        trial = coeffs + [np.zeros_like(coeffs[0])]
        source = einstein_tangential_series(trial, grid, k)[k]
        responses = []
        for e in basis:
            trial[k] = np.broadcast_to(e, grid.shape + (n, n)).copy()
            ek = einstein_tangential_series(trial, grid, k)[k]
            responses.append(_sym_coords(ek - source, n))
        lmat = np.stack(responses, axis=-1)  # (*shape, nsym, nsym)
        svec = _sym_coords(source, n)

        if k == n:
            u, sig, vt = np.linalg.svd(lmat)
            cut = kernel_tol * sig[..., :1]
            inv_sig = np.where(sig > cut, 1.0 / np.where(sig > cut, sig, 1.0), 0.0)
            particular = -np.einsum(
                "...ji,...j->...i", u, svec
            )
            particular = np.einsum("...i,...i->...i", inv_sig, particular)
            particular = np.einsum("...ij,...i->...j", vt, particular)
            gk = _sym_from_coords(particular, n)
            if gn_arr is not None:
                gn_coords = _sym_coords(gn_arr, n)
                kernel_mask = (sig <= cut)
                ker_part = np.einsum("...ij,...j->...i", vt, gn_coords)
                ker_part = np.where(kernel_mask, ker_part, 0.0)
                gk = gk + _sym_from_coords(
                    np.einsum("...ji,...j->...i", vt, ker_part), n
                )
            # incompatibility of the source with the range (log obstruction)
            resid = np.einsum("...ij,...j->...i", lmat, _sym_coords(gk, n)) + svec
            if float(np.max(np.abs(resid))) > 1e-6 * (1.0 + float(np.max(np.abs(svec)))):
                raise LogObstructionError(
                    "order-n system inconsistent: obstruction norm "
                    f"{float(np.max(np.abs(resid))):.3e}"
                )
        else:
            try:
                sol = np.linalg.solve(lmat, -svec[..., None])[..., 0]
            except np.linalg.LinAlgError as exc:
                raise FGError(f"singular order-{k} linear system: {exc}") from exc
            conds = np.linalg.cond(lmat)
            if np.any(~np.isfinite(conds)) or np.any(conds > 1e12):
                raise FGError(f"singular order-{k} linear system (condition number)")
            gk = _sym_from_coords(sol, n)
        coeffs.append(gk)
    return FGData(grid, n, coeffs, undetermined_order=n)


@dataclass
class FGCompareReport:
    per_order: list[float]
    first_differing_order: int | None     # None: agree to computed order
    tol: float

    def agree(self) -> bool:
        return self.first_differing_order is None


def fg_compare(a: FGData, b: FGData, tol: float = 1e-10) -> FGCompareReport:
    """Per-order difference norms; reports the first differing order."""
    if a.boundary != b.boundary or a.n != b.n:
        raise FGError("expansions live on different boundary charts")
    kmax = min(a.order, b.order)
    diffs = []
    first = None
    for k in range(kmax + 1):
        scale = max(np.max(np.abs(a.coefficients[k])), np.max(np.abs(b.coefficients[k])), 1.0)
        d = float(np.max(np.abs(a.coefficients[k] - b.coefficients[k])))
        diffs.append(d)
        if first is None and d > tol * scale:
            first = k
    return FGCompareReport(diffs, first, tol)


def residual_decay(data: FGData, rho_values: np.ndarray,
                   cosmological: float | None = None) -> dict[str, np.ndarray]:
    """Sup norms of the three Gauss Einstein blocks of the reconstructed
    metric per rho slice, weighted to their natural boundary orders
    (AB block times rho^2; the others unweighted).

    Radial derivatives are taken analytically from the series, so the decay
    rate measured here reflects the truncation order, not stencil error.
    """
    from .foliation import RadialFoliation, slice_einstein_residual
    from .grid import Axis

    n = data.n
    lam_cc = cosmological if cosmological is not None else -0.5 * n * (n - 1)
    lam = 2.0 * lam_cc / (n - 1)  # Ric(g_minus) = lam g_minus
    rho = np.sort(np.asarray(rho_values, float))[::-1]  # decreasing rho = increasing r
    rvals = -np.log(rho)
    if not np.all(np.diff(rvals) > 0):
        raise FGError("rho values must be strictly monotone")
    # uniform r grid required by the foliation axis; resample
    r0, r1 = rvals[0], rvals[-1]
    nr = max(len(rho), 5)
    axis = Axis("r", nr, (r1 - r0) / (nr - 1), periodic=False, start=r0, radial=True)
    rr = axis.coords
    rho_grid = np.exp(-rr)
    G, Gp, Gpp = data.evaluate(rho_grid, derivatives=2)
    e2r = np.exp(2 * rr).reshape(-1, *([1] * G[0].ndim))
    rho_col = rho_grid.reshape(-1, *([1] * G[0].ndim))
    ghat = e2r * G
    ghat_p = e2r * (2.0 * G - rho_col * Gp)
    ghat_pp = e2r * (4.0 * G - 3.0 * rho_col * Gp + rho_col**2 * Gpp)
    f = RadialFoliation(axis, data.boundary, ghat, cosmological=lam_cc,
                        flavor="asymptotically-hyperbolic",
                        slice_signature=LORENTZIAN)
    blocks = slice_einstein_residual(f, lam, g_prime=ghat_p, g_second=ghat_pp)
    flat = lambda a: a.reshape(a.shape[0], -1)
    return {
        "rho": rho_grid,
        "AB": np.max(np.abs(flat(blocks.AB)), axis=1) * rho_grid**2,
        "xA": np.max(np.abs(flat(blocks.xA)), axis=1),
        "xx": np.max(np.abs(flat(blocks.xx)), axis=1),
    }


def decay_slope(rho: np.ndarray, norms: np.ndarray, floor: float = 1e-13) -> float:
    """Log-log slope of norms against rho (least squares over usable points)."""
    mask = norms > floor
    if np.sum(mask) < 3:
        return np.inf
    x = np.log(rho[mask])
    y = np.log(norms[mask])
    return float(np.polyfit(x, y, 1)[0])
