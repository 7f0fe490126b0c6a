"""Static axisymmetric vacuum metrics from axisymmetric harmonic potentials.

The potential ``u`` is an axisymmetric solution of the flat Laplace
equation, stored as a Legendre series

    u(rt, mu) = sum_l  a_l rt^l P_l(mu)            (interior, rt <= R)
    u(rt, mu) = sum_l  a_l rt^(-l-1) P_l(mu)       (exterior, rt >= R)

with ``rt`` the flat spherical radius and ``mu = cos(theta)``.  The metric
built from it is static with lapse ``V = e^u``:

    -e^{2u} dt^2 + e^{2(k-u)} (d rc^2 + dz^2) + rc^2 e^{-2u} d phi^2,

in cylindrical coordinates ``rc = rt sin(theta)``, ``z = rt cos(theta)``,
where the conformal potential ``k`` solves the first-order system

    dk/d rc = rc (u_rc^2 - u_z^2),      dk/dz = 2 rc u_rc u_z,

integrated from the symmetry axis (where k = 0).  The closed form of the
line element is standard relativity material not fixed by this toolkit's
own primitives, so every constructed metric is certified by running the
reduced vacuum residual evaluator on it; the k-system's integrability is
equivalent to harmonicity of u and is checked by a two-path quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import MetricField, one_form
from .grid import ChartGrid, interval_axis
from .stationary import StationaryMetric


class WeylError(ValueError):
    pass


@dataclass
class AxisymmetricHarmonic:
    """Legendre coefficients of an axisymmetric harmonic function."""

    coefficients: np.ndarray
    radius: float = 1.0
    exterior: bool = False

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, float)
        if self.coefficients.ndim != 1 or len(self.coefficients) == 0:
            raise WeylError("coefficients must be a non-empty 1-d array")
        if not np.all(np.isfinite(self.coefficients)):
            raise WeylError("non-finite coefficients")
        if self.radius <= 0:
            raise WeylError("domain radius must be positive")
        scale = self.coefficients * self.radius ** np.arange(len(self.coefficients))
        if not np.isfinite(np.sum(np.abs(scale))):
            raise WeylError("series does not converge on the closed ball")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1


def _legendre_all(mu: np.ndarray, lmax: int):
    """P_l(mu) and dP_l/dmu for l = 0..lmax by upward recurrence."""
    shape = (lmax + 1,) + mu.shape
    p = np.empty(shape)
    dp = np.empty(shape)
    p[0] = 1.0
    dp[0] = 0.0
    if lmax >= 1:
        p[1] = mu
        dp[1] = 1.0
    for l in range(1, lmax):
        p[l + 1] = ((2 * l + 1) * mu * p[l] - l * p[l - 1]) / (l + 1)
        dp[l + 1] = dp[l - 1] + (2 * l + 1) * p[l]
    return p, dp


def harmonic_eval(h: AxisymmetricHarmonic, rc: np.ndarray, z: np.ndarray):
    """u and its cylindrical gradient (u, u_rc, u_z) at the given points."""
    rc = np.asarray(rc, float)
    z = np.asarray(z, float)
    rt = np.hypot(rc, z)
    if np.any(rt == 0):
        raise WeylError("evaluation at the origin")
    mu = z / rt
    sin_t = rc / rt
    lmax = h.degree
    p, dp = _legendre_all(mu, lmax)
    ells = np.arange(lmax + 1).reshape((-1,) + (1,) * rt.ndim)
    if h.exterior:
        radial = rt[None] ** (-(ells + 1))
        radial_d = -(ells + 1) * rt[None] ** (-(ells + 2))
    else:
        radial = rt[None] ** ells
        radial_d = np.where(ells > 0, ells * rt[None] ** np.maximum(ells - 1, 0), 0.0)
    coeff = h.coefficients.reshape((-1,) + (1,) * rt.ndim)
    u = np.sum(coeff * radial * p, axis=0)
    u_rt = np.sum(coeff * radial_d * p, axis=0)
    u_mu = np.sum(coeff * radial * dp, axis=0)
    u_theta = -sin_t * u_mu
    u_rc = sin_t * u_rt + (mu / rt) * u_theta
    u_z = mu * u_rt - (sin_t / rt) * u_theta
    return u, u_rc, u_z


def solve_axisym_laplace(boundary_values: np.ndarray, radius: float,
                         degree: int, exterior: bool = False,
                         axisym_tol: float = 1e-10) -> AxisymmetricHarmonic:
    """Legendre projection of boundary data on the sphere of the given
    radius; interior (or exterior) solution by coefficient scaling.

    ``boundary_values``: samples of the data at the Gauss-Legendre nodes
    mu_j = cos(theta_j) with ``degree+1`` nodes, shaped (degree+1,) or
    (degree+1, n_phi) (the latter must be phi-independent)."""
    vals = np.asarray(boundary_values, float)
    if vals.ndim == 2:
        spread = np.max(np.abs(vals - vals.mean(axis=1, keepdims=True)))
        if spread > axisym_tol * (1.0 + np.max(np.abs(vals))):
            raise WeylError("boundary data is not axisymmetric")
        vals = vals.mean(axis=1)
    if vals.shape != (degree + 1,):
        raise WeylError(f"need {degree + 1} Gauss-node samples, got {vals.shape}")
    nodes, weights = np.polynomial.legendre.leggauss(degree + 1)
    p, _ = _legendre_all(nodes, degree)
    ells = np.arange(degree + 1)
    proj = (2 * ells + 1) / 2.0 * (p * (weights * vals)).sum(axis=1)
    if exterior:
        coeffs = proj * radius ** (ells + 1)
    else:
        coeffs = proj / radius**ells
    return AxisymmetricHarmonic(coeffs, radius, exterior)


def gauss_boundary_nodes(degree: int) -> np.ndarray:
    """The mu = cos(theta) sampling nodes used by solve_axisym_laplace."""
    return np.polynomial.legendre.leggauss(degree + 1)[0]


# ---------------------------------------------------------------------------
# the conformal potential k
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _k_integrand_rc(h: AxisymmetricHarmonic, s: np.ndarray, z: np.ndarray):
    _, u_rc, u_z = harmonic_eval(h, s, z)
    return s * (u_rc**2 - u_z**2)


def _panel_integral(func, a: float, b: float, z: np.ndarray) -> np.ndarray:
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    total = 0.0
    for node, wt in zip(_GL_NODES, _GL_WEIGHTS):
        total = total + wt * func(np.full_like(z, mid + half * node), z)
    return half * total


def conformal_potential(h: AxisymmetricHarmonic, rc_targets: np.ndarray,
                        z: np.ndarray, panels_per_unit: int = 48) -> np.ndarray:
    """k at the points (rc_i, z_j): radial quadrature of rc (u_rc^2 - u_z^2)
    from the axis, where k vanishes."""
    rc_targets = np.asarray(rc_targets, float)
    z = np.asarray(z, float)
    out = np.zeros((len(rc_targets),) + z.shape)
    cuts = np.concatenate([[0.0], rc_targets])
    acc = np.zeros_like(z, dtype=float)
    for i in range(len(rc_targets)):
        a, b = cuts[i], cuts[i + 1]
        npan = max(2, int(np.ceil((b - a) * panels_per_unit)))
        edges = np.linspace(a, b, npan + 1)
        for j in range(npan):
            acc = acc + _panel_integral(
                lambda s, zz: _k_integrand_rc(h, s, zz), edges[j], edges[j + 1], z)
        out[i] = acc
    return out


def conformal_potential_two_path(h: AxisymmetricHarmonic, rc: float, z0: float,
                                 z1: float, panels_per_unit: int = 48) -> float:
    """k(rc, z1) via the axis ray at height z0 followed by a vertical leg;
    path independence against ``conformal_potential`` checks integrability."""
    base = conformal_potential(h, np.array([rc]), np.array([z0]),
                               panels_per_unit)[0, 0]

    def vert(zz, _dummy):
        _, u_rc, u_z = harmonic_eval(h, np.full_like(zz, rc), zz)
        return 2.0 * rc * u_rc * u_z

    npan = max(2, int(np.ceil(abs(z1 - z0) * panels_per_unit)))
    edges = np.linspace(z0, z1, npan + 1)
    acc = base
    for j in range(npan):
        mid, half = 0.5 * (edges[j] + edges[j + 1]), 0.5 * (edges[j + 1] - edges[j])
        for node, wt in zip(_GL_NODES, _GL_WEIGHTS):
            acc += half * wt * vert(np.array(mid + half * node), None)
    return float(acc)


# ---------------------------------------------------------------------------
# metric assembly
# ---------------------------------------------------------------------------

@dataclass
class WeylMetric:
    """Static axisymmetric vacuum metric and its build ingredients."""

    metric: StationaryMetric
    potential: AxisymmetricHarmonic
    u: np.ndarray
    k: np.ndarray
    lapse_infimum: float


def weyl_metric(h: AxisymmetricHarmonic, rc_range: tuple[float, float],
                z_range: tuple[float, float], n_rc: int = 33, n_z: int = 33,
                fd_order: int = 4, panels_per_unit: int = 48) -> WeylMetric:
    """Assemble the static metric of the potential on a (rc, z) rectangle.

    The chart carries phi and t as fiber directions.  The rectangle must
    avoid the axis and stay inside the series' convergence domain (interior
    ball, or radially outside the source region for exterior series, so the
    axis quadrature path never leaves it)."""
    rc0, rc1 = rc_range
    z0, z1 = z_range
    if rc0 <= 0:
        raise WeylError("chart must stay off the symmetry axis (rc > 0)")
    corners = [np.hypot(a, b) for a in (rc0, rc1) for b in (z0, z1)]
    if h.exterior:
        path_min = min(abs(z0), abs(z1))
        if z0 * z1 <= 0:
            path_min = 0.0
        if path_min < h.radius:
            raise WeylError("axis quadrature path leaves the exterior domain")
    else:
        if max(corners) > h.radius:
            raise WeylError("chart leaves the interior ball of convergence")

    chart = ChartGrid(
        (interval_axis("x", rc0, rc1, n_rc), interval_axis("z", z0, z1, n_z)),
        fibers=("phi",), fd_order=fd_order,
    )
    rc, z = chart.mesh()
    u, _, _ = harmonic_eval(h, rc, z)
    k = conformal_potential(h, chart.axes[0].coords, chart.axes[1].coords,
                            panels_per_unit)
    if np.any(np.exp(u) <= 0) or not np.all(np.isfinite(np.exp(2 * (k - u)))):
        raise WeylError("lapse underflow on the chart")

    n = chart.dim
    comps = np.zeros(chart.shape + (n, n))
    comps[..., 0, 0] = rc**2 * np.exp(-2 * u)
    comps[..., 1, 1] = np.exp(2 * (k - u))
    comps[..., 2, 2] = comps[..., 1, 1]
    gplus = MetricField(chart, comps)
    sm = StationaryMetric(np.exp(u), one_form(chart, chart.zeros(n)), gplus, 0.0)
    return WeylMetric(sm, h, u, k, float(np.min(np.exp(u))))


# ---------------------------------------------------------------------------
# coefficient-decay classification
# ---------------------------------------------------------------------------

ANALYTIC = "analytic"
SMOOTH_NON_ANALYTIC = "smooth-non-analytic"
INSUFFICIENT = "insufficient-data"


@dataclass
class DecayVerdict:
    label: str
    rss: dict[str, float]
    fit_params: dict[str, tuple[float, float]]


def analyticity_classify(h: AxisymmetricHarmonic | np.ndarray,
                         floor: float = 1e-280) -> DecayVerdict:
    """Classify the decay law of the coefficients by model selection on
    log|a_l|: geometric decay (analytic boundary trace), exp(-c sqrt(l))
    (smooth but non-analytic), anything else insufficient.

    Requires at least 65 coefficients (degree >= 64)."""
    coeffs = h.coefficients if isinstance(h, AxisymmetricHarmonic) else np.asarray(h, float)
    if len(coeffs) < 65:
        raise WeylError("classification needs at least 65 coefficients")
    ells = np.arange(len(coeffs))
    mask = (ells >= 1) & (np.abs(coeffs) > floor)
    if np.sum(mask) < 16:
        return DecayVerdict(INSUFFICIENT, {}, {})
    x = ells[mask].astype(float)
    y = np.log(np.abs(coeffs[mask]))

    designs = {
        "geometric": -x,
        "root": -np.sqrt(x),
        "power": -np.log(x),
    }
    rss = {}
    params = {}
    for name, col in designs.items():
        a_mat = np.stack([col, np.ones_like(col)], axis=1)
        sol, res, *_ = np.linalg.lstsq(a_mat, y, rcond=None)
        pred = a_mat @ sol
        rss[name] = float(np.sum((y - pred) ** 2))
        params[name] = (float(sol[0]), float(sol[1]))
    best = min(rss, key=rss.get)
    if best == "geometric" and params["geometric"][0] > 0:
        label = ANALYTIC
    elif best == "root" and params["root"][0] > 0:
        label = SMOOTH_NON_ANALYTIC
    else:
        label = INSUFFICIENT
    return DecayVerdict(label, rss, params)
