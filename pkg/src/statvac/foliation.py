"""Radial foliations near a boundary and the radial form of the Einstein
system.

A :class:`RadialFoliation` stores per-slice data on the product of a radial
interval axis with a fixed boundary chart: the slice metric family ``g(r)``
and, for stationary decompositions, the lapse family ``V(r)`` and the
tangential one-form family ``xi(r)``.  The ambient metric is

    dr^2 + G,      G = -V^2 (dt + xi)^2 + g          (stationary split)
    dr^2 + g                                          (slice-metric only)

with no dr-cross terms (Gauss gauge, validated by :func:`is_gauss`).

Radial derivatives use the same stencil order as spatial ones, one-sided at
the radial endpoints.  Slices are processed independently.

Twist-term signs in the radial system follow the full-Ricci cross-check
(see the stationary module); the rewritten forms ``Ar2``/``rr2`` are built
by algebraic rearrangement of the same stencil outputs so they agree with
``Ar``/``rr`` to round-off.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import (
    LORENTZIAN,
    RIEMANNIAN,
    FieldError,
    MetricField,
    TensorField,
    one_form,
    sym2_field,
)
from .grid import Axis, ChartGrid, GridError, _fd_matrix
from . import operators as ops


class FoliationError(ValueError):
    pass


FINITE = "finite-distance"
AH = "asymptotically-hyperbolic"


@dataclass
class RadialFoliation:
    """Radial family (V(r), xi(r), g(r)) over a fixed boundary chart.

    ``g`` has shape (Nr, *boundary.shape, bdim, bdim); ``V`` and ``xi`` may
    be None for slice-metric-only foliations.  ``flavor`` is one of
    ``finite-distance`` / ``asymptotically-hyperbolic``.
    """

    radial: Axis
    boundary: ChartGrid
    g: np.ndarray
    V: np.ndarray | None = None
    xi: np.ndarray | None = None
    cosmological: float = 0.0
    flavor: str = FINITE
    slice_signature: str = RIEMANNIAN

    def __post_init__(self):
        if self.radial.periodic:
            raise FoliationError("radial axis must be an interval axis")
        if self.flavor not in (FINITE, AH):
            raise FoliationError(f"unknown flavor {self.flavor!r}")
        bdim = self.boundary.dim
        want = (self.radial.size,) + self.boundary.shape + (bdim, bdim)
        self.g = np.asarray(self.g, float)
        if self.g.shape != want:
            raise FoliationError(f"slice metric family shape {self.g.shape} != {want}")
        if self.V is not None:
            self.V = np.broadcast_to(
                np.asarray(self.V, float), (self.radial.size,) + self.boundary.shape
            ).copy()
            if np.any(self.V <= 0):
                raise FoliationError("V must be positive on all slices")
        if self.xi is not None:
            self.xi = np.asarray(self.xi, float)
            if self.xi.shape != (self.radial.size,) + self.boundary.shape + (bdim,):
                raise FoliationError("xi family has wrong shape")

    # -- layout ----------------------------------------------------------

    @property
    def nr(self) -> int:
        return self.radial.size

    @property
    def bdim(self) -> int:
        return self.boundary.dim

    @property
    def ambient_dim(self) -> int:
        return self.bdim + 1

    @property
    def kappa(self) -> float:
        """-2 Lambda / (n-1) with n = 1 + spacetime slice dimension.

        For the stationary split the slices of the space-time are
        (1 + bdim)-dimensional, so n = 1 + bdim whether or not the t fiber
        is part of the boundary chart."""
        n = self.bdim + 1
        return -2.0 * self.cosmological / (n - 1)

    def rvals(self) -> np.ndarray:
        return self.radial.coords

    def outward_r(self) -> np.ndarray:
        """Radial coordinate used in exponential weights; -ln(rho) on rho axes."""
        c = self.radial.coords
        return -np.log(c) if self.radial.name == "rho" else c

    # -- radial differentiation -------------------------------------------

    def radial_derivative(self, values: np.ndarray, order: int = 1) -> np.ndarray:
        mat = _fd_matrix(self.radial.size, self.radial.spacing, order,
                         self.boundary.fd_order)
        flat = values.reshape(self.nr, -1)
        return (mat @ flat).reshape(values.shape)

    # -- slice and ambient views -------------------------------------------

    def slice_metric(self, i: int) -> MetricField:
        return MetricField(self.boundary, self.g[i], signature=self.slice_signature,
                           validate_signature=False)

    def ambient_chart(self) -> ChartGrid:
        """Chart of dr^2 + g: fibers of the boundary stay fibers, the radial
        axis precedes the boundary axes."""
        return ChartGrid(axes=(self.radial,) + tuple(self.boundary.axes),
                         fibers=tuple(self.boundary.fibers),
                         fd_order=self.boundary.fd_order)

    def _embed_indices(self) -> np.ndarray:
        """Map boundary index direction -> ambient index direction."""
        nf = self.boundary.nfib
        b = np.arange(self.bdim)
        return np.where(b < nf, b, b + 1)

    def ambient_metric(self) -> MetricField:
        """dr^2 + g as a MetricField on the ambient chart."""
        chart = self.ambient_chart()
        n = chart.dim
        rpos = self.boundary.nfib
        comps = np.zeros((self.nr,) + self.boundary.shape + (n, n))
        comps[..., rpos, rpos] = 1.0
        emb = self._embed_indices()
        comps[(Ellipsis,) + np.ix_(emb, emb)] = self.g
        return MetricField(chart, comps, signature=self.slice_signature,
                           validate_signature=False)

    def embed_slice_tensor(self, t: np.ndarray, rank: int = 2) -> np.ndarray:
        """Zero-extend a slice tensor family into ambient index space
        (the dr-components vanish)."""
        n = self.ambient_dim
        out = np.zeros(t.shape[: -rank] + (n,) * rank)
        emb = self._embed_indices()
        out[(Ellipsis,) + np.ix_(*([emb] * rank))] = t
        return out

    # -- stationary split helpers -------------------------------------------

    def require_stationary(self):
        if self.V is None:
            raise FoliationError("operation needs the stationary (V, xi, g) split")

    def xi_or_zero(self) -> np.ndarray:
        if self.xi is None:
            return np.zeros((self.nr,) + self.boundary.shape + (self.bdim,))
        return self.xi

    def time_extended_chart(self) -> ChartGrid:
        return ChartGrid(axes=self.boundary.axes,
                         fibers=("t",) + tuple(self.boundary.fibers),
                         fd_order=self.boundary.fd_order)

    def spacetime_slice_family(self) -> np.ndarray:
        """G = -V^2 (dt+xi)^2 + g on the t-extended boundary chart."""
        self.require_stationary()
        xi = self.xi_or_zero()
        m = self.bdim + 1
        out = np.zeros((self.nr,) + self.boundary.shape + (m, m))
        v2 = self.V**2
        out[..., 0, 0] = -v2
        out[..., 0, 1:] = -v2[..., None] * xi
        out[..., 1:, 0] = out[..., 0, 1:]
        out[..., 1:, 1:] = self.g - v2[..., None, None] * xi[..., :, None] * xi[..., None, :]
        return out

    def spacetime_foliation(self) -> "RadialFoliation":
        """Slice-metric-only view with Lorentzian slices G(r) on R x boundary."""
        return RadialFoliation(
            self.radial, self.time_extended_chart(), self.spacetime_slice_family(),
            cosmological=self.cosmological, flavor=self.flavor,
            slice_signature=LORENTZIAN,
        )


# ---------------------------------------------------------------------------
# shape data
# ---------------------------------------------------------------------------

@dataclass
class ShapeData:
    """Second fundamental forms and the aggregate elliptic unknown of a
    stationary radial foliation."""

    Pi: np.ndarray                  # (Nr, *b, bdim, bdim), = g'/2
    H: np.ndarray                   # trace of Pi in g
    Pi_minus: np.ndarray | None     # = G'/2 on the t-extended chart
    H_minus: np.ndarray | None      # V^-1 V' + H
    aggregate: np.ndarray | None    # VV' dt^2 + V^2/2 (xi' x dt + dt x xi') + Pi
    reference: np.ndarray | None    # V^2 dt^2 + g  (Riemannian)
    aggregate_norm2: np.ndarray | None
    aggregate_trace: np.ndarray | None


def shape_operators(f: RadialFoliation) -> ShapeData:
    """Pi = g'/2, traces, and the space-time aggregate quantities."""
    ginv = np.linalg.inv(f.g)
    Pi = 0.5 * f.radial_derivative(f.g)
    H = np.einsum("...ij,...ij->...", ginv, Pi)
    if f.V is None:
        return ShapeData(Pi, H, None, None, None, None, None, None)
    Vp = f.radial_derivative(f.V)
    H_minus = Vp / f.V + H
    G = f.spacetime_slice_family()
    Pi_minus = 0.5 * f.radial_derivative(G)
    xi = f.xi_or_zero()
    xip = f.radial_derivative(xi)
    m = f.bdim + 1
    agg = np.zeros((f.nr,) + f.boundary.shape + (m, m))
    agg[..., 0, 0] = f.V * Vp
    agg[..., 0, 1:] = 0.5 * (f.V**2)[..., None] * xip
    agg[..., 1:, 0] = agg[..., 0, 1:]
    agg[..., 1:, 1:] = Pi
    ref = np.zeros_like(agg)
    ref[..., 0, 0] = f.V**2
    ref[..., 1:, 1:] = f.g
    refinv = np.linalg.inv(ref)
    norm2 = np.einsum("...ik,...jl,...ij,...kl->...", refinv, refinv, agg, agg)
    trace = np.einsum("...ij,...ij->...", refinv, agg)
    return ShapeData(Pi, H, Pi_minus, H_minus, agg, ref, norm2, trace)


def aggregate_norm_decomposition(f: RadialFoliation, shape: ShapeData | None = None):
    """|A|^2_G = |Pi|^2_g + (V^-1 V')^2 + V^2 |xi'|^2 / 2, returned as
    (direct norm, decomposed sum)."""
    f.require_stationary()
    s = shape or shape_operators(f)
    ginv = np.linalg.inv(f.g)
    pi2 = np.einsum("...ik,...jl,...ij,...kl->...", ginv, ginv, s.Pi, s.Pi)
    Vp = f.radial_derivative(f.V)
    xip = f.radial_derivative(f.xi_or_zero())
    xip2 = np.einsum("...ij,...i,...j->...", ginv, xip, xip)
    decomposed = pi2 + (Vp / f.V) ** 2 + 0.5 * f.V**2 * xip2
    return s.aggregate_norm2, decomposed


# ---------------------------------------------------------------------------
# per-slice helpers
# ---------------------------------------------------------------------------

def _slice_loop(f: RadialFoliation, func) -> list:
    out = []
    for i in range(f.nr):
        m = f.slice_metric(i)
        out.append(func(i, m, ops.CurvatureBundle(m)))
    return out


def _stack(parts: list[np.ndarray]) -> np.ndarray:
    return np.stack(parts, axis=0)


# ---------------------------------------------------------------------------
# the radial Einstein system (stationary split)
# ---------------------------------------------------------------------------

@dataclass
class GaussResiduals:
    """Residuals of the five radial equations, their rewrites and the
    aggregate identity."""

    AB: np.ndarray
    Ar: np.ndarray
    rr: np.ndarray
    divr: np.ndarray
    divA: np.ndarray
    Ar2: np.ndarray
    rr2: np.ndarray
    rr3: np.ndarray

    def sup_norms(self) -> dict[str, float]:
        return {k: float(np.max(np.abs(getattr(self, k))))
                for k in ("AB", "Ar", "rr", "divr", "divA", "Ar2", "rr2", "rr3")}

    def max_equation_norm(self) -> float:
        return max(float(np.max(np.abs(getattr(self, k))))
                   for k in ("AB", "Ar", "rr", "divr", "divA"))


def gauss_residuals(f: RadialFoliation, cosmological: float | None = None) -> GaussResiduals:
    """Evaluate the radial Einstein system of a stationary foliation.

    Twist convention: lam_AB = -V^2 (d xi)_AB on each slice, and
    (a o b)_ij = g^{kl} a_ik b_jl.
    """
    f.require_stationary()
    lam_cc = f.cosmological if cosmological is None else cosmological
    n = f.bdim + 1
    kappa = -2.0 * lam_cc / (n - 1)

    V = f.V
    xi = f.xi_or_zero()
    ginv = np.linalg.inv(f.g)
    s = shape_operators(f)
    Pi, H = s.Pi, s.H
    Vp = f.radial_derivative(V)
    Vpp = f.radial_derivative(V, order=2)
    # Pi' and H' from the direct second radial stencil of g, not by
    # re-differencing Pi (keeps the full stencil order)
    Pip = 0.5 * f.radial_derivative(f.g, order=2)
    PiPi_for_Hp = np.einsum("...kl,...ik,...jl->...ij", ginv, Pi, Pi)
    Hp = np.einsum("...ij,...ij->...", ginv, Pip) - 2.0 * np.einsum(
        "...ij,...ij->...", ginv, PiPi_for_Hp)
    xip = f.radial_derivative(xi)
    xip_up = np.einsum("...ij,...j->...i", ginv, xip)
    xip2 = np.einsum("...i,...i->...", xip_up, xip)

    # slice quantities
    ric = np.empty_like(Pi)
    hessV = np.empty_like(Pi)
    dV = np.empty_like(xi)
    dVp = np.empty_like(xi)
    dH = np.empty_like(xi)
    divPi = np.empty_like(xi)
    lam = np.empty_like(Pi)
    div_vlam = np.empty_like(xi)
    divr = np.empty((f.nr,) + f.boundary.shape)

    for i in range(f.nr):
        m = f.slice_metric(i)
        b = ops.CurvatureBundle(m)
        ric[i] = b.ricci.comps
        hessV[i] = ops.hessian(m, V[i], b.conn).comps
        dV[i] = f.boundary.gradient_stack(V[i])
        dVp[i] = f.boundary.gradient_stack(Vp[i])
        dH[i] = f.boundary.gradient_stack(H[i])
        divPi[i] = ops.divergence(m, sym2_field(f.boundary, Pi[i]), b.conn).comps
        lam[i] = -(V[i] ** 2)[..., None, None] * ops.exterior_derivative_form(
            f.boundary, xi[i])
        u_i = TensorField(f.boundary, 1, 0, (V[i] ** 3)[..., None] * xip[i])
        divr[i] = ops.codifferential(m, u_i, b.conn)
        div_vlam[i] = ops.divergence(
            m, TensorField(f.boundary, 2, 0, V[i][..., None, None] * lam[i]), b.conn
        ).comps

    lamlam = np.einsum("...kl,...ik,...jl->...ij", ginv, lam, lam)
    lam_xip = np.einsum("...ab,...b->...a", lam, xip_up)
    Pi_gradV = np.einsum("...ab,...bc,...c->...a", Pi, ginv, dV)
    PiPi = np.einsum("...kl,...ik,...jl->...ij", ginv, Pi, Pi)
    Pi2 = np.einsum("...ij,...ij->...", np.einsum("...ik,...jl,...kl->...ij", ginv, ginv, Pi), Pi)

    AB = (
        ric
        - H[..., None, None] * Pi
        - Pip
        + 2.0 * PiPi
        + kappa * f.g
        - hessV / V[..., None, None]
        - (Vp / V)[..., None, None] * Pi
        + 0.5 * (V**2)[..., None, None] * xip[..., :, None] * xip[..., None, :]
        + 0.5 * lamlam / (V**2)[..., None, None]
    )
    Ar = -divPi - dH - (dVp - Pi_gradV) / V[..., None] - 0.5 * lam_xip
    rr = -Hp - Pi2 + kappa - Vpp / V + 0.5 * V**2 * xip2

    u = (V**3)[..., None] * xip
    up = f.radial_derivative(u)
    Pi_u = np.einsum("...ab,...bc,...c->...a", Pi, ginv, u)
    divA = up + H[..., None] * u - 2.0 * Pi_u + div_vlam

    # rewrites: assembled from the same stencil outputs (round-off equal)
    dH_minus = dVp / V[..., None] - (Vp / V**2)[..., None] * dV + dH
    Ar2 = (
        -divPi - dH_minus - (Vp / V**2)[..., None] * dV
        + Pi_gradV / V[..., None] - 0.5 * lam_xip
    )
    Hm_prime = Vpp / V - (Vp / V) ** 2 + Hp
    rr2 = kappa - Pi2 - (Vp / V) ** 2 + 0.5 * V**2 * xip2 - Hm_prime
    # aggregate identity, twist-corrected (reduces to kappa - |A|^2 when xi'=0)
    rr3 = kappa - s.aggregate_norm2 + V**2 * xip2 - Hm_prime

    return GaussResiduals(AB, Ar, rr, divr, divA, Ar2, rr2, rr3)


# ---------------------------------------------------------------------------
# slice-metric-only residuals (any signature)
# ---------------------------------------------------------------------------

@dataclass
class GaussRicciBlocks:
    AB: np.ndarray
    xA: np.ndarray
    xx: np.ndarray


def riemannian_gauss_ricci(f: RadialFoliation,
                           g_prime: np.ndarray | None = None,
                           g_second: np.ndarray | None = None) -> GaussRicciBlocks:
    """Ricci blocks of the ambient dr^2 + g from slice data:

    Ric_AB = Ric(g) - H Pi - Pi' + 2 Pi o Pi
    Ric_xA = -div_g Pi - dH
    Ric_xx = -H' - |Pi|^2

    Valid for either slice signature.  Radial derivatives may be supplied
    analytically (``g_prime``/``g_second``) instead of stencils.
    """
    ginv = np.linalg.inv(f.g)
    gp = g_prime if g_prime is not None else f.radial_derivative(f.g)
    Pi = 0.5 * gp
    if g_second is not None:
        Pip = 0.5 * g_second
    elif g_prime is not None:
        Pip = 0.5 * f.radial_derivative(g_prime)
    else:
        Pip = 0.5 * f.radial_derivative(f.g, order=2)
    H = np.einsum("...ij,...ij->...", ginv, Pi)
    # H' = tr(ginv Pi') - 2 tr(ginv Pi ginv Pi) since (g^-1)' = -g^-1 g' g^-1
    PiPi = np.einsum("...kl,...ik,...jl->...ij", ginv, Pi, Pi)
    Hp = np.einsum("...ij,...ij->...", ginv, Pip) - 2.0 * np.einsum(
        "...ij,...ij->...", ginv, PiPi
    )
    Pi2 = np.einsum("...ik,...jl,...ij,...kl->...", ginv, ginv, Pi, Pi)

    ric = np.empty_like(Pi)
    dH = np.empty((f.nr,) + f.boundary.shape + (f.bdim,))
    divPi = np.empty_like(dH)
    for i in range(f.nr):
        m = f.slice_metric(i)
        b = ops.CurvatureBundle(m)
        ric[i] = b.ricci.comps
        dH[i] = f.boundary.gradient_stack(H[i])
        divPi[i] = ops.divergence(m, sym2_field(f.boundary, Pi[i]), b.conn).comps

    AB = ric - H[..., None, None] * Pi - Pip + 2.0 * PiPi
    xA = -divPi - dH
    xx = -Hp - Pi2
    return GaussRicciBlocks(AB, xA, xx)


def slice_einstein_residual(f: RadialFoliation, einstein_constant: float,
                            g_prime: np.ndarray | None = None,
                            g_second: np.ndarray | None = None) -> GaussRicciBlocks:
    """Residual blocks of Ric(dr^2 + g) - lam (dr^2 + g) in the Gauss gauge,
    for a slice-metric-only foliation (Lorentzian slices included).

    ``einstein_constant`` is the lam in Ric(ambient) = lam * ambient."""
    blocks = riemannian_gauss_ricci(f, g_prime, g_second)
    return GaussRicciBlocks(
        blocks.AB - einstein_constant * f.g,
        blocks.xA,
        blocks.xx - einstein_constant,
    )


def is_gauss(m: MetricField, radial_direction: int | None = None) -> dict[str, float]:
    """Gauge diagnostic: max |g_rr - 1| and max |g_rA| for the tagged (or
    given) radial index direction."""
    rd = radial_direction if radial_direction is not None else m.grid.radial_direction
    if rd is None:
        raise FoliationError("no radial axis tagged and none given")
    grr = m.comps[..., rd, rd]
    cross = np.delete(m.comps[..., rd, :], rd, axis=-1)
    return {
        "max_grr_minus_one": float(np.max(np.abs(grr - 1.0))),
        "max_gross_cross": float(np.max(np.abs(cross))),
    }


def mean_curvature_identity_residual(f: RadialFoliation, f0: RadialFoliation) -> np.ndarray:
    """Residual of the Einstein-pair identity

        [H_- - (H_0)_-]' = |A_0|^2 - |A|^2 + V^2|xi'|^2 - V_0^2|xi_0'|^2

    (the twist correction vanishes for static pairs)."""
    s, s0 = shape_operators(f), shape_operators(f0)
    lhs = f.radial_derivative(s.H_minus - s0.H_minus)
    ginv = np.linalg.inv(f.g)
    g0inv = np.linalg.inv(f0.g)
    xip = f.radial_derivative(f.xi_or_zero())
    xi0p = f0.radial_derivative(f0.xi_or_zero())
    tw = f.V**2 * np.einsum("...ij,...i,...j->...", ginv, xip, xip)
    tw0 = f0.V**2 * np.einsum("...ij,...i,...j->...", g0inv, xi0p, xi0p)
    rhs = s0.aggregate_norm2 - s.aggregate_norm2 + tw - tw0
    return lhs - rhs
