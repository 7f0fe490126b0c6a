"""Tensor calculus on coordinate charts.

Connection coefficients, curvature, the Lichnerowicz Laplacian, the
divergence and symmetrized-gradient pair, Lie derivatives, and the
linearization of the Ricci operator.  Sign conventions:

* ``(div h)_j   = -grad^i h_ij``
* ``(symgrad w)_ij = (grad_i w_j + grad_j w_i) / 2``
* ``codiff w    = -grad^i w_i``
* curvature ``R^l_{kab}`` normalized so the unit round sphere has
  ``Ric = +metric`` (pinned by a test),
* ``lich(h)_ij = -grad^k grad_k h_ij + R_ik h^k_j + R_jk h^k_i
  - 2 R_ikjl h^kl``, which annihilates every metric.

All operations are pure functions of immutable inputs.
"""

from __future__ import annotations

import numpy as np

from . import backend
from .fields import (
    FieldError,
    MetricField,
    TensorField,
    inner,
    one_form,
    raise_form,
    raise_sym2,
    scalar_field,
    sym2_field,
    symmetrize,
    trace_g,
    vector_field,
)
from .grid import ChartGrid


class Connection:
    """Connection coefficients of a metric together with their analytic
    first derivatives.

    ``dgamma[..., a, l, i, j] = d_a Gamma^l_ij`` is assembled from first and
    second metric derivatives by the product rule rather than by
    re-differencing the computed coefficients; this keeps curvature at the
    full stencil order.
    """

    def __init__(self, m: MetricField):
        grid = m.grid
        n = grid.dim
        self.metric = m
        dg = grid.gradient_stack(m.comps)  # [..., k, i, j] = d_k g_ij
        flat = grid.size
        self.gamma = TensorField(
            grid, 2, 1,
            backend.christoffel_core(
                m.inv.reshape(flat, n, n), dg.reshape(flat, n, n, n)
            ).reshape(grid.shape + (n, n, n)),
        )
        d2g = np.empty(grid.shape + (n, n, n, n))  # [..., a, b, i, j]
        for a in range(n):
            for b in range(a, n):
                d2g[..., a, b, :, :] = grid.partial2(m.comps, a, b)
                d2g[..., b, a, :, :] = d2g[..., a, b, :, :]
        # combo_{mij} = d_i g_mj + d_j g_mi - d_m g_ij  (2 Gamma with index down)
        combo = (
            np.einsum("...imj->...mij", dg)
            + np.einsum("...jmi->...mij", dg)
            - dg
        )
        dcombo = (
            np.einsum("...aimj->...amij", d2g)
            + np.einsum("...ajmi->...amij", d2g)
            - np.einsum("...amij->...amij", d2g)
        )
        dginv = -np.einsum("...lk,...aks,...sm->...alm", m.inv, dg, m.inv)
        self.dgamma = 0.5 * (
            np.einsum("...alm,...mij->...alij", dginv, combo)
            + np.einsum("...lm,...amij->...alij", m.inv, dcombo)
        )


def christoffel(m: MetricField, conn: Connection | None = None) -> TensorField:
    """Connection coefficients Gamma^k_ij of a metric, rank (1,2)."""
    return (conn or Connection(m)).gamma


def riemann(m: MetricField, conn: Connection | None = None) -> TensorField:
    """Curvature tensor R^l_{kab}, rank (3,1), stored as comps[...,l,k,a,b]."""
    conn = conn or Connection(m)
    grid = m.grid
    n = grid.dim
    dgam = conn.dgamma
    lin = np.einsum("...albk->...lkab", dgam) - np.einsum("...blak->...lkab", dgam)
    quad = backend.riemann_quadratic_core(conn.gamma.comps.reshape(grid.size, n, n, n))
    quad = quad.reshape(grid.shape + (n, n, n, n))
    return TensorField(grid, 3, 1, lin + quad)


def ricci(m: MetricField, riem: TensorField | None = None) -> TensorField:
    """Ricci tensor Ric_kb = R^a_{kab}."""
    r = (riem if riem is not None else riemann(m)).comps
    ric = np.einsum("...akab->...kb", r)
    return sym2_field(m.grid, symmetrize(ric))


def riemann_covariant(m: MetricField, riem: TensorField | None = None) -> TensorField:
    """Fully covariant curvature R_{lkab} = g_{lm} R^m_{kab}."""
    r = (riem if riem is not None else riemann(m)).comps
    rc = np.einsum("...lm,...mkab->...lkab", m.comps, r)
    return TensorField(m.grid, 4, 0, rc)


def scalar_curvature(m: MetricField, ric: TensorField | None = None) -> np.ndarray:
    return trace_g(m, (ric or ricci(m)).comps)


def _gamma_comps(m: MetricField, gamma) -> np.ndarray:
    if gamma is None:
        return Connection(m).gamma.comps
    if isinstance(gamma, Connection):
        return gamma.gamma.comps
    return gamma.comps


def covariant_derivative(m: MetricField, t: TensorField,
                         gamma: TensorField | Connection | None = None) -> TensorField:
    """Covariant derivative of a purely covariant tensor.

    The derivative index is prepended: ``(grad t)[..., d, i1..ip]``.
    """
    if t.q != 0:
        raise FieldError("covariant_derivative expects a purely covariant tensor")
    grid = m.grid
    gam = _gamma_comps(m, gamma)
    out = grid.gradient_stack(t.comps)
    letters = "abcdefgh"[: t.p]
    for slot in range(t.p):
        tspec = list(letters)
        tspec[slot] = "m"
        out -= np.einsum(
            f"...mk{letters[slot]},...{''.join(tspec)}->...k{letters}",
            gam, t.comps,
        )
    return TensorField(grid, t.p + 1, 0, out)


def second_covariant(m: MetricField, t: TensorField,
                     conn: Connection | None = None) -> TensorField:
    """grad_a grad_b t for purely covariant t of rank <= 2.

    Assembled from direct first/second partials of the components and the
    analytic connection derivative, so the result keeps full stencil order
    instead of re-differencing the first covariant derivative.
    """
    if t.q != 0 or t.p > 2:
        raise FieldError("second_covariant supports covariant rank <= 2")
    conn = conn or Connection(m)
    grid = m.grid
    n = grid.dim
    gam, dgam = conn.gamma.comps, conn.dgamma
    letters = "cd"[: t.p]
    first = covariant_derivative(m, t, conn).comps  # A[..., b, I]
    # dA[..., a, b, I] = d_a d_b t_I - d_a Gamma^m_{b i_s} t_..m.. - Gamma^m_{b i_s} d_a t_..m..
    d2t = np.empty(grid.shape + (n, n) + t.comps.shape[len(grid.shape):])
    for a in range(n):
        for b in range(a, n):
            val = grid.partial2(t.comps, a, b)
            d2t[(Ellipsis, a, b) + (slice(None),) * t.p] = val
            d2t[(Ellipsis, b, a) + (slice(None),) * t.p] = val
    dA = d2t.copy()
    dt = grid.gradient_stack(t.comps)
    for slot in range(t.p):
        tspec = list(letters)
        tspec[slot] = "m"
        ts = "".join(tspec)
        dA -= np.einsum(f"...amb{letters[slot]},...{ts}->...ab{letters}", dgam, t.comps)
        dA -= np.einsum(f"...mb{letters[slot]},...a{ts}->...ab{letters}", gam, dt)
    out = dA
    out -= np.einsum(f"...mab,...m{letters}->...ab{letters}", gam, first)
    for slot in range(t.p):
        tspec = list(letters)
        tspec[slot] = "m"
        ts = "".join(tspec)
        out -= np.einsum(f"...ma{letters[slot]},...b{ts}->...ab{letters}", gam, first)
    return TensorField(grid, t.p + 2, 0, out)


def rough_laplacian(m: MetricField, t: TensorField,
                    conn: Connection | None = None) -> TensorField:
    """grad^k grad_k t for purely covariant t."""
    dd = second_covariant(m, t, conn)
    letters = "cd"[: t.p]
    out = np.einsum(f"...kl,...kl{letters}->...{letters}", m.inv, dd.comps)
    return TensorField(m.grid, t.p, 0, out, symmetric=t.symmetric)


class CurvatureBundle:
    """Connection plus curvature tensors of one metric, computed once."""

    def __init__(self, m: MetricField):
        self.metric = m
        self.conn = Connection(m)
        self.riemann = riemann(m, self.conn)
        self.ricci = ricci(m, self.riemann)
        self.riemann_cov = riemann_covariant(m, self.riemann)


def lichnerowicz(m: MetricField, h: TensorField,
                 bundle: CurvatureBundle | None = None) -> TensorField:
    """Lichnerowicz Laplacian on symmetric two-tensors.

    lich(h)_ij = -grad^k grad_k h_ij + Ric_ik h^k_j + Ric_jk h^k_i
                 - 2 R_ikjl h^kl
    """
    if not h.symmetric:
        raise FieldError("lichnerowicz expects a symmetric two-tensor")
    b = bundle or CurvatureBundle(m)
    hup = raise_sym2(m, h.comps)
    out = -rough_laplacian(m, h, b.conn).comps
    mixed = np.einsum("...ik,...kl,...lj->...ij", b.ricci.comps, m.inv, h.comps)
    out += mixed + np.swapaxes(mixed, -1, -2)
    out -= 2.0 * np.einsum("...ikjl,...kl->...ij", b.riemann_cov.comps, hup)
    return sym2_field(m.grid, symmetrize(out))


def divergence(m: MetricField, h: TensorField,
               gamma: TensorField | Connection | None = None) -> TensorField:
    """(div h)_j = -grad^i h_ij for a covariant two-tensor."""
    if h.rank != (2, 0):
        raise FieldError("divergence expects a covariant two-tensor")
    dh = covariant_derivative(m, h, gamma).comps
    return one_form(m.grid, -np.einsum("...ki,...kij->...j", m.inv, dh))


def codifferential(m: MetricField, w: TensorField,
                   gamma: TensorField | Connection | None = None) -> np.ndarray:
    """Divergence of a one-form with the d* sign: -grad^i w_i."""
    if w.rank != (1, 0):
        raise FieldError("codifferential expects a one-form")
    dw = covariant_derivative(m, w, gamma).comps
    return -np.einsum("...ij,...ij->...", m.inv, dw)


def symmetrized_gradient(m: MetricField, w: TensorField,
                         gamma: TensorField | Connection | None = None) -> TensorField:
    """(symgrad w)_ij = (grad_i w_j + grad_j w_i)/2, the adjoint of div."""
    if w.rank != (1, 0):
        raise FieldError("symmetrized_gradient expects a one-form")
    dw = covariant_derivative(m, w, gamma).comps
    return sym2_field(m.grid, symmetrize(dw))


def hessian(m: MetricField, f: TensorField | np.ndarray,
            gamma: TensorField | Connection | None = None) -> TensorField:
    """Hess(f)_ij = d_i d_j f - Gamma^k_ij d_k f."""
    grid = m.grid
    vals = f.comps if isinstance(f, TensorField) else np.asarray(f, float)
    gam = _gamma_comps(m, gamma)
    n = grid.dim
    hess = np.empty(grid.shape + (n, n))
    for i in range(n):
        for j in range(i, n):
            hess[..., i, j] = grid.partial2(vals, i, j)
            hess[..., j, i] = hess[..., i, j]
    df = grid.gradient_stack(vals)
    hess -= np.einsum("...kij,...k->...ij", gam, df)
    return sym2_field(grid, symmetrize(hess))


def laplacian(m: MetricField, f, gamma: TensorField | Connection | None = None) -> np.ndarray:
    return trace_g(m, hessian(m, f, gamma).comps)


def exterior_derivative_form(grid: ChartGrid, w: np.ndarray) -> np.ndarray:
    """(dw)_ij = d_i w_j - d_j w_i for a one-form given as components."""
    dw = grid.gradient_stack(w)
    return dw - np.swapaxes(dw, -1, -2)


def lie_derivative(X: TensorField, t) -> TensorField:
    """Lie derivative along a vector field.

    Supports scalars, one-forms, vectors, and covariant two-tensors
    (metrics included; pass the MetricField or its tensor).
    """
    if X.rank != (0, 1):
        raise FieldError("lie_derivative expects a vector field")
    if isinstance(t, MetricField):
        t = t.as_tensor()
    grid = X.grid
    xv = X.comps
    dx = grid.gradient_stack(xv)  # [..., k, i] = d_k X^i
    if t.rank == (0, 0):
        out = np.einsum("...k,...k->...", xv, grid.gradient_stack(t.comps))
        return scalar_field(grid, out)
    if t.rank == (1, 0):
        dt = grid.gradient_stack(t.comps)
        out = np.einsum("...k,...ki->...i", xv, dt)
        out += np.einsum("...k,...ik->...i", t.comps, dx)
        return one_form(grid, out)
    if t.rank == (0, 1):
        dt = grid.gradient_stack(t.comps)
        out = np.einsum("...k,...ki->...i", xv, dt)
        out -= np.einsum("...k,...ki->...i", t.comps, dx)
        return vector_field(grid, out)
    if t.rank == (2, 0):
        dt = grid.gradient_stack(t.comps)
        out = np.einsum("...k,...kij->...ij", xv, dt)
        out += np.einsum("...kj,...ik->...ij", t.comps, dx)
        out += np.einsum("...ik,...jk->...ij", t.comps, dx)
        return TensorField(grid, 2, 0, out, symmetric=t.symmetric)
    raise FieldError(f"unsupported rank {t.rank} for lie_derivative")


# ---------------------------------------------------------------------------
# linearization building blocks
# ---------------------------------------------------------------------------

def christoffel_variation(m: MetricField, h: TensorField,
                          gamma: TensorField | Connection | None = None) -> TensorField:
    """First variation of the connection under g -> g + h.

    dGamma^k_ij = 1/2 g^{kl} (grad_i h_jl + grad_j h_il - grad_l h_ij)
    """
    dh = covariant_derivative(m, h, gamma).comps  # [..., d, i, j]
    combo = (
        np.einsum("...ijl->...lij", dh)
        + np.einsum("...jil->...lij", dh)
        - np.einsum("...lij->...lij", dh)
    )
    out = 0.5 * np.einsum("...kl,...lij->...kij", m.inv, combo)
    return TensorField(m.grid, 2, 1, out)


def ricci_linearization(m: MetricField, h: TensorField,
                        bundle: CurvatureBundle | None = None) -> TensorField:
    """DRic(g)[h] = 1/2 lich(h) - symgrad(div h) - 1/2 Hess(tr_g h)."""
    b = bundle or CurvatureBundle(m)
    out = 0.5 * lichnerowicz(m, h, b).comps
    out -= symmetrized_gradient(m, divergence(m, h, b.conn), b.conn).comps
    out -= 0.5 * hessian(m, trace_g(m, h.comps), b.conn).comps
    return sym2_field(m.grid, out)
