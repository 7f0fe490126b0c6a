"""Killing initial data on a boundary and their radial extensions.

A boundary KID is a pair (alpha, nu) of a scalar and a tangential one-form
on the boundary chart satisfying the two equations a Killing one-form
``alpha dx + nu`` would satisfy there:

    kids0 :  L_{nu#} ghat + 2 alpha Pi                                   = 0
    kids1 :  2 L_{nu#} Pi - L_{grad alpha} ghat
             + 2 alpha [ Ric(ghat) - lam ghat - H Pi + 2 Pi o Pi ]       = 0

(the bare ``-lam`` term multiplies ghat; the only type-correct reading).

``extend_kid`` pushes a KID radially: alpha stays constant and the vector
``nu#`` solves ``(nu#)' = -grad_{g(x)} alpha``, which kills the mixed
components of the deformation tensor ``h = L_{omega#} (dx^2 + g)`` by
construction.  Lorentzian boundary data (a time fiber in the boundary
chart) goes through the same code paths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import (
    MetricField,
    TensorField,
    compose,
    one_form,
    raise_form,
    sym2_field,
    trace_g,
    vector_field,
)
from .foliation import RadialFoliation
from .grid import ChartGrid, fd_weights
from . import operators as ops
from .stationary import linearized_einstein


class KIDError(ValueError):
    pass


@dataclass
class BoundaryKID:
    """Lapse-like scalar and tangential one-form on the boundary, together
    with the boundary geometry they refer to."""

    boundary: ChartGrid
    alpha: np.ndarray
    nu: TensorField
    metric: MetricField            # induced metric ghat
    second_form: np.ndarray        # Pi(0) components
    einstein_constant: float = 0.0  # lam with Ric(ambient) = lam * ambient

    def __post_init__(self):
        self.alpha = np.broadcast_to(np.asarray(self.alpha, float),
                                     self.boundary.shape).copy()
        if self.nu.rank != (1, 0):
            raise KIDError("nu must be a one-form")
        self.second_form = np.asarray(self.second_form, float)


@dataclass
class CandidateKillingField:
    """Radial family omega = alpha dx + nu with the derivatives actually
    used in the construction (so the mixed deformation components vanish
    identically, not just to stencil accuracy)."""

    foliation: RadialFoliation
    alpha: np.ndarray              # (Nr, *b)
    nu: np.ndarray                 # (Nr, *b, bdim) one-form components
    nu_vec: np.ndarray             # (Nr, *b, bdim) vector components
    alpha_prime: np.ndarray | None = None
    nu_vec_prime: np.ndarray | None = None


@dataclass
class KillingVerifyReport:
    slice_sup: np.ndarray          # sup |h| per radial slice
    h0_norm: float
    h0_prime_norm: float
    linearized_norm: float


def kid_residual(k: BoundaryKID) -> tuple[TensorField, TensorField]:
    """The two KID equation left-hand sides (zero iff (alpha, nu) is a KID)."""
    ghat = k.metric
    grid = k.boundary
    b = ops.CurvatureBundle(ghat)
    nu_vec = vector_field(grid, raise_form(ghat, k.nu.comps))
    Pi = sym2_field(grid, k.second_form)
    H = trace_g(ghat, Pi.comps)

    kids0 = ops.lie_derivative(nu_vec, ghat).comps + 2.0 * k.alpha[..., None, None] * Pi.comps

    lie_pi = ops.lie_derivative(nu_vec, Pi).comps
    hess_alpha = ops.hessian(ghat, k.alpha, b.conn).comps
    bracket = (
        b.ricci.comps
        - k.einstein_constant * ghat.comps
        - H[..., None, None] * Pi.comps
        + 2.0 * compose(ghat, Pi.comps, Pi.comps)
    )
    kids1 = 2.0 * lie_pi - 2.0 * hess_alpha + 2.0 * k.alpha[..., None, None] * bracket
    return sym2_field(grid, kids0), sym2_field(grid, kids1)


def _midpoint_interp(values: np.ndarray) -> np.ndarray:
    """Cubic interpolation of a radial family at interval midpoints.

    values: (Nr, ...); returns (Nr-1, ...) midpoint samples."""
    nr = values.shape[0]
    out = np.empty((nr - 1,) + values.shape[1:])
    x = np.arange(nr, dtype=float)
    for i in range(nr - 1):
        lo = min(max(i - 1, 0), nr - 4)
        idx = np.arange(lo, lo + 4)
        w = fd_weights(i + 0.5, x[idx].copy(), 0)
        out[i] = np.tensordot(w, values[idx], axes=(0, 0))
    return out


def extend_kid(f: RadialFoliation, k: BoundaryKID) -> CandidateKillingField:
    """Radial extension: alpha(x) = alpha(0) and (nu#)' = -grad_{g(x)} alpha.

    The right-hand side is state independent, so the classical one-step
    fourth-order scheme reduces to Simpson steps with cubic midpoint
    interpolation of the slice gradients.
    """
    if k.boundary is not f.boundary and k.boundary != f.boundary:
        raise KIDError("KID and foliation boundary charts differ")
    grid = f.boundary
    dalpha = grid.gradient_stack(k.alpha)
    ginv = np.linalg.inv(f.g)
    rhs = -np.einsum("...ij,...j->...i", ginv, dalpha[None, ...])  # (Nr,*b,bdim)
    if not np.all(np.isfinite(rhs)):
        raise KIDError("radial integration failed: non-finite slice gradient")

    h = f.radial.spacing
    nu_vec = np.empty_like(rhs)
    nu_vec[0] = raise_form(f.slice_metric(0), k.nu.comps)
    mid = _midpoint_interp(rhs)
    for i in range(f.nr - 1):
        nu_vec[i + 1] = nu_vec[i] + (h / 6.0) * (rhs[i] + 4.0 * mid[i] + rhs[i + 1])
        if not np.all(np.isfinite(nu_vec[i + 1])):
            raise KIDError(f"radial integration failed at step {i}")

    nu = np.einsum("...ij,...j->...i", f.g, nu_vec)
    alpha = np.broadcast_to(k.alpha, (f.nr,) + grid.shape).copy()
    return CandidateKillingField(
        f, alpha, nu, nu_vec,
        alpha_prime=np.zeros_like(alpha),
        nu_vec_prime=rhs,
    )


@dataclass
class Deformation:
    """Components of h = L_{omega#}(dx^2 + g) in the Gauss gauge."""

    xx: np.ndarray                 # (Nr, *b)
    xA: np.ndarray                 # (Nr, *b, bdim)
    AB: np.ndarray                 # (Nr, *b, bdim, bdim)

    def sup_norm(self) -> float:
        return max(float(np.max(np.abs(self.xx))),
                   float(np.max(np.abs(self.xA))),
                   float(np.max(np.abs(self.AB))))

    def slice_sup(self) -> np.ndarray:
        flat = lambda a: a.reshape(a.shape[0], -1)
        return np.maximum.reduce([
            np.max(np.abs(flat(self.xx)), axis=1),
            np.max(np.abs(flat(self.xA)), axis=1),
            np.max(np.abs(flat(self.AB)), axis=1),
        ])

    def ambient(self, f: RadialFoliation) -> TensorField:
        """Embed into the ambient chart of dx^2 + g."""
        chart = f.ambient_chart()
        n = chart.dim
        rpos = f.boundary.nfib
        emb = f._embed_indices()
        comps = np.zeros((f.nr,) + f.boundary.shape + (n, n))
        comps[..., rpos, rpos] = self.xx
        comps[..., rpos, emb] = self.xA
        comps[..., emb, rpos] = self.xA
        comps[(Ellipsis,) + np.ix_(emb, emb)] = self.AB
        return sym2_field(chart, comps)


def deformation(f: RadialFoliation, omega: CandidateKillingField) -> Deformation:
    """h_xx = 2 alpha', h_xA = g_AB (nu^B)' + d_A alpha,
    h_AB = (L_{nu#} g + 2 alpha Pi)_AB.

    Uses the construction derivatives stored on ``omega`` when present,
    radial stencils otherwise."""
    if omega.foliation is not f and omega.foliation != f:
        raise KIDError("candidate field belongs to a different foliation")
    grid = f.boundary
    ap = (omega.alpha_prime if omega.alpha_prime is not None
          else f.radial_derivative(omega.alpha))
    nvp = (omega.nu_vec_prime if omega.nu_vec_prime is not None
           else f.radial_derivative(omega.nu_vec))
    dalpha = np.stack([grid.gradient_stack(omega.alpha[i]) for i in range(f.nr)])
    xx = 2.0 * ap
    xA = np.einsum("...ij,...j->...i", f.g, nvp) + dalpha

    Pi = 0.5 * f.radial_derivative(f.g)
    AB = np.empty_like(f.g)
    for i in range(f.nr):
        m = f.slice_metric(i)
        lie = ops.lie_derivative(vector_field(grid, omega.nu_vec[i]), m).comps
        AB[i] = lie + 2.0 * omega.alpha[i][..., None, None] * Pi[i]
    return Deformation(xx, xA, AB)


def ambient_killing_vector(f: RadialFoliation, omega: CandidateKillingField) -> TensorField:
    """omega# = alpha d_x + nu# as a vector field on the ambient chart."""
    chart = f.ambient_chart()
    n = chart.dim
    rpos = f.boundary.nfib
    emb = f._embed_indices()
    comps = np.zeros((f.nr,) + f.boundary.shape + (n,))
    comps[..., rpos] = omega.alpha
    comps[(Ellipsis,) + (emb,)] = omega.nu_vec
    return vector_field(chart, comps)


def killing_verify(f: RadialFoliation, omega: CandidateKillingField,
                   einstein_constant: float = 0.0) -> KillingVerifyReport:
    """Smallness report for the deformation tensor of a candidate Killing
    field: per-slice sup norms, the first two boundary orders, and the
    linearized-Einstein residual of h (expected at the level of the ambient
    Einstein residual plus the KID residual)."""
    h = deformation(f, omega)
    slice_sup = h.slice_sup()
    h_amb = h.ambient(f)
    h0 = float(slice_sup[0])
    hp = f.radial_derivative(h_amb.comps)
    h0p = float(np.max(np.abs(hp[0])))
    m = f.ambient_metric()
    lin = linearized_einstein(m, h_amb, einstein_constant)
    return KillingVerifyReport(slice_sup, h0, h0p, float(lin.sup_norm()))


def cc_kid_check(g0: MetricField, undetermined: TensorField,
                 X: TensorField) -> tuple[TensorField, TensorField]:
    """Invariance data for a conformal-boundary vector field: returns
    (L_X G0, L_X Gn); both vanish iff X is Killing for the representative
    and leaves the undetermined expansion term invariant."""
    if X.rank != (0, 1):
        raise KIDError("X must be a vector field on the boundary chart")
    lie_g0 = ops.lie_derivative(X, g0)
    lie_gn = ops.lie_derivative(X, undetermined)
    return lie_g0, lie_gn
