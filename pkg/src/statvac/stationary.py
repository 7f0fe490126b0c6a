"""Stationary space-time metrics and the reduced Einstein system.

A stationary metric is stored through its orbit decomposition: a positive
lapse ``V``, a connection one-form ``theta`` and a Riemannian metric
``gplus`` on the quotient chart ``M``.  The space-time metric

    g_minus = -V^2 (dt + theta)^2 + gplus

is reconstructed on demand as a Lorentzian metric whose chart carries ``t``
as a fiber direction (no ``t`` nodes; all fields are time independent).

With ``kappa = -2 Lambda / (n - 1)`` the Einstein condition
``Ric(g_minus) = (2 Lambda/(n-1)) g_minus`` is equivalent to the reduced
system on ``M``

    eq_tt : V (codiff(dV) + kappa V) - |w|^2 / 4                 = 0
    eq_ij : Ric(g+) + kappa g+ - Hess(V)/V + (w o w)/(2 V^2)     = 0
    eq_ti : div(V w)                                             = 0

where ``w = -V^2 d theta`` is the twist two-form, ``|w|^2`` its full
contraction and ``(a o b)_ij = g^{kl} a_ik b_jl``.  The sign of the twist
term in eq_ij is pinned by an exact twisted solution and by the block
correspondence with the full Ricci tensor (see ``cross_check_full_ricci``):

    eq_tt = -E(X,X),   eq_ij = E(Y_i,Y_j),   eq_ti = 2 V E(X,Y_i),

with ``E = Ric(g_minus) + kappa g_minus``, ``X = d_t`` and
``Y_i = d_i - theta_i X``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import (
    LORENTZIAN,
    FieldError,
    MetricField,
    TensorField,
    compose,
    inner,
    one_form,
    raise_sym2,
    sym2_field,
    trace_g,
)
from .grid import ChartGrid
from . import operators as ops


class StationaryError(ValueError):
    pass


@dataclass
class StationaryMetric:
    """Orbit data (V, theta, g+) of a stationary metric, with cosmological
    constant."""

    lapse: np.ndarray
    theta: TensorField
    gplus: MetricField
    cosmological: float = 0.0

    def __post_init__(self):
        grid = self.gplus.grid
        self.lapse = np.broadcast_to(np.asarray(self.lapse, float), grid.shape).copy()
        if np.any(self.lapse <= 0):
            bad = np.argwhere(self.lapse <= 0)[0]
            raise StationaryError(f"lapse not strictly positive at node {tuple(bad)}")
        if self.theta.rank != (1, 0):
            raise StationaryError("theta must be a one-form")
        rd = grid.radial_direction
        if rd is not None:
            radial_part = np.max(np.abs(self.theta.comps[..., rd]))
            if radial_part > 1e-12 * (1.0 + np.max(np.abs(self.theta.comps))):
                raise StationaryError(
                    "theta must be purely tangential on charts with a radial axis"
                )

    @property
    def grid(self) -> ChartGrid:
        return self.gplus.grid

    @property
    def dim(self) -> int:
        return self.gplus.dim

    @property
    def kappa(self) -> float:
        return -2.0 * self.cosmological / (self.dim - 1)


@dataclass
class TwistField:
    """Twist two-form w = -V^2 d theta, with its radial split when the
    chart carries a radial axis (w_rA = -V^2 xi'_A and the tangential
    block)."""

    field: TensorField
    radial_part: np.ndarray | None = None
    tangential: np.ndarray | None = None


@dataclass
class ReducedResiduals:
    tt: TensorField
    ij: TensorField
    ti: TensorField

    def sup_norms(self) -> dict[str, float]:
        return {"tt": self.tt.sup_norm(), "ij": self.ij.sup_norm(),
                "ti": self.ti.sup_norm()}

    def max_norm(self) -> float:
        return max(self.sup_norms().values())


def spacetime_chart(grid: ChartGrid) -> ChartGrid:
    """The chart of R x M: prepend the time fiber."""
    return ChartGrid(axes=grid.axes, fibers=("t",) + tuple(grid.fibers),
                     fd_order=grid.fd_order)


def assemble_spacetime(sm: StationaryMetric) -> MetricField:
    """Block assembly of g_minus = -V^2(dt+theta)^2 + g+ on the t-fibered
    chart: g_tt = -V^2, g_ti = -V^2 theta_i, g_ij = g+_ij - V^2 theta_i theta_j."""
    grid = sm.grid
    n = grid.dim
    chart = spacetime_chart(grid)
    v2 = sm.lapse**2
    th = sm.theta.comps
    comps = np.zeros(grid.shape + (n + 1, n + 1))
    comps[..., 0, 0] = -v2
    comps[..., 0, 1:] = -v2[..., None] * th
    comps[..., 1:, 0] = comps[..., 0, 1:]
    comps[..., 1:, 1:] = sm.gplus.comps - v2[..., None, None] * th[..., :, None] * th[..., None, :]
    return MetricField(chart, comps, signature=LORENTZIAN)


def spacetime_block_inverse(sm: StationaryMetric) -> np.ndarray:
    """Closed-form inverse of the slice metric G = -V^2(dt+theta)^2 + g:
    G^tt = |theta|^2 - V^-2, G^ti = -theta^i, G^ij = g^ij."""
    grid = sm.grid
    n = grid.dim
    th = sm.theta.comps
    th_up = np.einsum("...ij,...j->...i", sm.gplus.inv, th)
    out = np.zeros(grid.shape + (n + 1, n + 1))
    out[..., 0, 0] = inner(sm.gplus, th, th) - sm.lapse ** (-2.0)
    out[..., 0, 1:] = -th_up
    out[..., 1:, 0] = -th_up
    out[..., 1:, 1:] = sm.gplus.inv
    return out


def twist(sm: StationaryMetric) -> TwistField:
    """w = -V^2 d theta; radial charts also get the (xi', tangential) split."""
    grid = sm.grid
    dth = ops.exterior_derivative_form(grid, sm.theta.comps)
    w = -(sm.lapse**2)[..., None, None] * dth
    tf = TensorField(grid, 2, 0, w)
    rd = grid.radial_direction
    if rd is None:
        return TwistField(tf)
    mask = np.ones(grid.dim, dtype=bool)
    mask[rd] = False
    tang = w[..., mask, :][..., :, mask]
    return TwistField(tf, radial_part=w[..., rd, :][..., mask], tangential=tang)


def reduced_residuals(sm: StationaryMetric,
                      bundle: ops.CurvatureBundle | None = None) -> ReducedResiduals:
    """Left-hand sides of the reduced stationary Einstein system."""
    g = sm.gplus
    grid = sm.grid
    kappa = sm.kappa
    b = bundle or ops.CurvatureBundle(g)
    V = sm.lapse

    hessV = ops.hessian(g, V, b.conn)
    lapV = trace_g(g, hessV.comps)
    w = twist(sm).field.comps
    w_norm2 = inner(g, w, w)
    tt = V * (-lapV + kappa * V) - 0.25 * w_norm2

    ww = compose(g, w, w)
    ij = (
        b.ricci.comps
        + kappa * g.comps
        - hessV.comps / V[..., None, None]
        + 0.5 * ww / (V**2)[..., None, None]
    )

    tw = TensorField(grid, 2, 0, V[..., None, None] * w)
    ti = ops.divergence(g, tw, b.conn)

    from .fields import scalar_field

    return ReducedResiduals(scalar_field(grid, tt), sym2_field(grid, ij), ti)


def einstein_blocks(sm: StationaryMetric):
    """Horizontal-frame blocks of E = Ric(g_minus) + kappa g_minus computed
    independently on the t-fibered representation."""
    gm = assemble_spacetime(sm)
    E = ops.ricci(gm).comps + sm.kappa * gm.comps
    th = sm.theta.comps
    e_xx = E[..., 0, 0]
    e_xy = E[..., 0, 1:] - th * e_xx[..., None]
    e_yy = (
        E[..., 1:, 1:]
        - th[..., :, None] * E[..., 0, 1:][..., None, :]
        - th[..., None, :] * E[..., 1:, 0][..., :, None]
        + th[..., :, None] * th[..., None, :] * e_xx[..., None, None]
    )
    return e_xx, e_xy, e_yy


def cross_check_full_ricci(sm: StationaryMetric,
                           res: ReducedResiduals | None = None) -> dict[str, float]:
    """Mismatch norms of the exact block correspondence

        eq_tt = -E(X,X),  eq_ij = E(Y,Y),  eq_ti = 2 V E(X,Y).
    """
    res = res or reduced_residuals(sm)
    e_xx, e_xy, e_yy = einstein_blocks(sm)
    return {
        "tt": float(np.max(np.abs(res.tt.comps + e_xx))),
        "ti": float(np.max(np.abs(res.ti.comps - 2.0 * sm.lapse[..., None] * e_xy))),
        "ij": float(np.max(np.abs(res.ij.comps - e_yy))),
    }


# ---------------------------------------------------------------------------
# linearization
# ---------------------------------------------------------------------------

@dataclass
class Perturbation:
    """Direction (dV, dtheta, dg+) for linearizing the reduced system."""

    dV: np.ndarray
    dtheta: TensorField
    dg: TensorField

    def scaled(self, eps: float) -> "Perturbation":
        return Perturbation(eps * self.dV, eps * self.dtheta, eps * self.dg)


def perturbed(sm: StationaryMetric, pert: Perturbation, eps: float) -> StationaryMetric:
    V = sm.lapse + eps * pert.dV
    if np.any(V <= 0):
        raise StationaryError("perturbed lapse not positive")
    return StationaryMetric(
        V,
        one_form(sm.grid, sm.theta.comps + eps * pert.dtheta.comps),
        MetricField(sm.gplus.grid, sm.gplus.comps + eps * pert.dg.comps,
                    signature=sm.gplus.signature),
        sm.cosmological,
    )


def linearized_reduced_residuals(sm: StationaryMetric, pert: Perturbation,
                                 bundle: ops.CurvatureBundle | None = None) -> ReducedResiduals:
    """Analytic directional derivative of ``reduced_residuals`` at ``sm``.

    Built from the Lichnerowicz Laplacian, divergence, symmetrized gradient
    and the connection variation; no finite differencing in the direction.
    """
    g = sm.gplus
    grid = sm.grid
    kappa = sm.kappa
    b = bundle or ops.CurvatureBundle(g)
    V = sm.lapse
    phi = np.broadcast_to(np.asarray(pert.dV, float), grid.shape)
    h = pert.dg
    hup = raise_sym2(g, h.comps)

    hessV = ops.hessian(g, V, b.conn)
    lapV = trace_g(g, hessV.comps)
    dV_comps = grid.gradient_stack(V)

    dgam = ops.christoffel_variation(g, h, b.conn)
    hess_phi = ops.hessian(g, phi, b.conn)
    # d(lap V) = -<h, Hess V> + lap(phi) - g^{ij} dGamma^k_ij d_k V
    trace_dgam = np.einsum("...ij,...kij->...k", g.inv, dgam.comps)
    d_lapV = (
        -inner(g, h.comps, hessV.comps)
        + trace_g(g, hess_phi.comps)
        - np.einsum("...k,...k->...", trace_dgam, dV_comps)
    )

    w = twist(sm).field.comps
    F = ops.exterior_derivative_form(grid, sm.theta.comps)
    dw_form = ops.exterior_derivative_form(grid, pert.dtheta.comps)
    d_w = -2.0 * (V * phi)[..., None, None] * F - (V**2)[..., None, None] * dw_form

    ww = compose(g, w, w)
    d_wnorm2 = -2.0 * inner(g, h.comps, ww) + 2.0 * inner(g, d_w, w)
    d_tt = (
        phi * (-lapV + kappa * V)
        + V * (-d_lapV + kappa * phi)
        - 0.25 * d_wnorm2
    )

    # eq_ij variation
    dric = ops.ricci_linearization(g, h, b)
    dgam_dV = np.einsum("...kij,...k->...ij", dgam.comps, dV_comps)
    d_hessV = hess_phi.comps - dgam_dV
    sandwich = np.einsum("...kl,...ik,...jl->...ij", hup, w, w)
    mixed = np.einsum("...kl,...ik,...jl->...ij", g.inv, d_w, w)
    d_ww = -sandwich + mixed + np.swapaxes(mixed, -1, -2)
    v2 = (V**2)[..., None, None]
    d_ij = (
        dric.comps
        + kappa * h.comps
        + (phi / V**2)[..., None, None] * hessV.comps
        - d_hessV / V[..., None, None]
        - (phi / V**3)[..., None, None] * ww
        + 0.5 * d_ww / v2
    )

    # eq_ti variation
    T = V[..., None, None] * w
    dT = phi[..., None, None] * w + V[..., None, None] * d_w
    gradT = ops.covariant_derivative(g, TensorField(grid, 2, 0, T), b.conn).comps
    ti_metric_part = np.einsum("...ik,...kij->...j", raise_sym2(g, h.comps), gradT)
    ti_gamma_part = np.einsum(
        "...ik,...mki,...mj->...j", g.inv, dgam.comps, T
    ) + np.einsum("...ik,...mkj,...im->...j", g.inv, dgam.comps, T)
    d_ti = (
        ti_metric_part
        + ti_gamma_part
        + ops.divergence(g, TensorField(grid, 2, 0, dT), b.conn).comps
    )

    from .fields import scalar_field

    return ReducedResiduals(
        scalar_field(grid, d_tt),
        sym2_field(grid, 0.5 * (d_ij + np.swapaxes(d_ij, -1, -2))),
        one_form(grid, d_ti),
    )


@dataclass
class LinearizationReport:
    finite_difference: ReducedResiduals
    analytic: ReducedResiduals
    difference_norms: dict[str, float]
    eps: float


def linearized_residual(sm: StationaryMetric, pert: Perturbation,
                        eps: float) -> LinearizationReport:
    """Directional finite difference of the nonlinear residuals against the
    analytic linearization; the difference norm is expected O(eps)."""
    if eps <= 0:
        raise StationaryError("eps must be positive")
    base = reduced_residuals(sm)
    bumped = reduced_residuals(perturbed(sm, pert, eps))
    fd = ReducedResiduals(
        (1.0 / eps) * (bumped.tt - base.tt),
        (1.0 / eps) * (bumped.ij - base.ij),
        (1.0 / eps) * (bumped.ti - base.ti),
    )
    ana = linearized_reduced_residuals(sm, pert)
    diff = {
        "tt": (fd.tt - ana.tt).sup_norm(),
        "ij": (fd.ij - ana.ij).sup_norm(),
        "ti": (fd.ti - ana.ti).sup_norm(),
    }
    return LinearizationReport(fd, ana, diff, eps)


def lie_perturbation(sm: StationaryMetric, X: TensorField) -> Perturbation:
    """Gauge direction: Lie derivative of the data along a spatial vector
    field (a pure diffeomorphism direction)."""
    from .fields import scalar_field

    dV = ops.lie_derivative(X, scalar_field(sm.grid, sm.lapse)).comps
    dth = ops.lie_derivative(X, sm.theta)
    dg = ops.lie_derivative(X, sm.gplus)
    return Perturbation(dV, dth, dg)


def linearized_einstein(m: MetricField, h: TensorField, lam: float,
                        bundle: ops.CurvatureBundle | None = None) -> TensorField:
    """D[Ric - lam g](h) = DRic(h) - lam h, the linearized Einstein operator."""
    dric = ops.ricci_linearization(m, h, bundle)
    return sym2_field(m.grid, dric.comps - lam * h.comps)
