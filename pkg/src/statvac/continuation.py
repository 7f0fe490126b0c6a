"""Weighted-inequality experiments and the symmetry-reduced continuation
sector.

Three groups of desk-scale experiments:

* Carleman-type weighted integral inequalities between radial-derivative
  differences and field differences of two stationary foliations, with the
  exponential weight ``exp(2 s r)`` (conformal-boundary flavor) or the
  power weight ``x^(-2s)`` (finite-distance flavor).  The constants are
  nowhere specified a priori; they are fitted and reported.
* The pointwise bound relating the aggregate-norm difference to the
  aggregate and reference-metric differences, with its three twist term
  groups checked individually, on randomly generated decay-conforming
  sample pairs.
* A cohomogeneity-one ODE sector in which the radial Einstein system is a
  well-posed ODE system: separation traces for pairs of Cauchy data.
  Full-PDE radial continuation is deliberately not integrated (sideways
  elliptic evolution is exponentially ill-posed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .fields import MetricField, TensorField, norm2, sym2_field
from .foliation import AH, FINITE, RadialFoliation, shape_operators
from .grid import Axis, ChartGrid
from . import operators as ops


class ContinuationError(ValueError):
    pass


class QuadratureDivergenceError(ContinuationError):
    pass


class DecayViolationError(ContinuationError):
    pass


UNDERFLOW_GUARD = 1e-300


# ---------------------------------------------------------------------------
# solution pairs and reference derivatives
# ---------------------------------------------------------------------------

class SolutionPair:
    """Two stationary foliations on one chart, with difference fields and
    their covariant derivatives with respect to the reference connection of
    ``dr^2 + Gref_0`` (slice tensors are identified with their zero radial
    extension)."""

    DIFF_KEYS = ("metric", "shape", "aggregate", "reference", "mean_curvature",
                 "lapse2")

    def __init__(self, f: RadialFoliation, f0: RadialFoliation):
        if f.boundary != f0.boundary or f.radial != f0.radial:
            raise ContinuationError("foliations live on different charts")
        f.require_stationary()
        f0.require_stationary()
        self.f = f
        self.f0 = f0
        self.shape = shape_operators(f)
        self.shape0 = shape_operators(f0)

        ext = f.spacetime_foliation()
        self._tfol = RadialFoliation(
            f.radial, ext.boundary,
            self._reference_family(f0), cosmological=f0.cosmological,
            flavor=f0.flavor,
        )
        self.ambient_ref = self._tfol.ambient_metric()
        self._conn = ops.Connection(self.ambient_ref)
        self._diff_cache: dict[tuple[str, int], np.ndarray] = {}

    def _reference_family(self, f0: RadialFoliation) -> np.ndarray:
        m = f0.bdim + 1
        ref = np.zeros((f0.nr,) + f0.boundary.shape + (m, m))
        ref[..., 0, 0] = f0.V**2
        ref[..., 1:, 1:] = f0.g
        return ref

    def difference(self, key: str) -> np.ndarray:
        """Difference field embedded in the ambient index space."""
        f, f0 = self.f, self.f0
        if key == "metric":
            slicewise = self._time_pad(f.g - f0.g)
        elif key == "shape":
            slicewise = self._time_pad(self.shape.Pi - self.shape0.Pi)
        elif key == "aggregate":
            slicewise = self.shape.aggregate - self.shape0.aggregate
        elif key == "reference":
            slicewise = self.shape.reference - self.shape0.reference
        elif key == "mean_curvature":
            return self.shape.H_minus - self.shape0.H_minus
        elif key == "lapse2":
            return f.V**2 - f0.V**2
        else:
            raise ContinuationError(f"unknown difference field {key!r}")
        return self._tfol.embed_slice_tensor(slicewise, rank=2)

    def _time_pad(self, t: np.ndarray) -> np.ndarray:
        m = self.f.bdim + 1
        out = np.zeros(t.shape[:-2] + (m, m))
        out[..., 1:, 1:] = t
        return out

    def derivative_norm2(self, key: str, order: int) -> np.ndarray:
        """Pointwise |D0^(order) diff|^2 with respect to the reference metric."""
        cache_key = (key, order)
        if cache_key not in self._diff_cache:
            base = self.difference(key)
            rank = base.ndim - 1 - len(self.f.boundary.shape)
            t = TensorField(self.ambient_ref.grid, rank, 0, base)
            for _ in range(order):
                t = ops.covariant_derivative(self.ambient_ref, t, self._conn)
            self._diff_cache[cache_key] = norm2(self.ambient_ref, t.comps)
        return self._diff_cache[cache_key]


# ---------------------------------------------------------------------------
# weighted quadrature
# ---------------------------------------------------------------------------

@dataclass
class CarlemanConfig:
    """Weight exponents and cutoff for the inequality sweep."""

    s_values: np.ndarray
    r0: float
    derivative_order: int = 2
    fitted_constant: float | None = None

    def __post_init__(self):
        self.s_values = np.asarray(self.s_values, float)
        if np.any(self.s_values <= 2):
            raise ContinuationError("weight exponents must satisfy s > 2")


def _radial_weights(f: RadialFoliation, r0: float) -> tuple[np.ndarray, np.ndarray]:
    """Simpson weights on the radial nodes with r >= r0 (finite flavor:
    0 < x <= r0 reversed role: integrate over (0, x0])."""
    r = f.outward_r()
    if f.flavor == AH:
        mask = r >= r0
    else:
        mask = (r > 0) & (r <= r0)
    idx = np.where(mask)[0]
    if len(idx) < 5:
        raise ContinuationError("cutoff leaves fewer than 5 radial nodes")
    sub = r[idx]
    w = np.zeros(len(idx))
    npts = len(idx) if len(idx) % 2 == 1 else len(idx) - 1
    h = abs(sub[1] - sub[0])
    w[0:npts][0::2] += 2.0
    w[0:npts][1::2] += 4.0
    w[0] = 1.0
    w[npts - 1] = 1.0
    w[:npts] *= h / 3.0
    if npts != len(idx):
        w[-1] += h / 2.0
        w[-2] += h / 2.0
    return idx, w


def _weighted_radial_integral(values: np.ndarray, weight: np.ndarray,
                              idx: np.ndarray, w: np.ndarray) -> float:
    """Boundary-averaged weighted integral along the radial axis."""
    integrand = values[idx] * weight[idx].reshape((-1,) + (1,) * (values.ndim - 1))
    if not np.all(np.isfinite(integrand)):
        raise QuadratureDivergenceError(
            "weighted integrand overflowed; decay hypothesis violated"
        )
    integrand = np.where(np.abs(integrand) < UNDERFLOW_GUARD, 0.0, integrand)
    per_node = np.tensordot(w, integrand, axes=(0, 0))
    return float(np.mean(per_node))


@dataclass
class InequalityTrace:
    name: str
    s: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray          # includes the s^2 (and finite-distance s-power) factors
    fitted_c: float
    scaling_exponent: float  # fitted power of rhs/lhs against s

    def holds_with(self, c: float) -> bool:
        return bool(np.all(self.lhs * c >= self.rhs))


@dataclass
class CarlemanReport:
    traces: dict[str, InequalityTrace]

    def fitted_constants(self) -> dict[str, float]:
        return {k: t.fitted_c for k, t in self.traces.items()}


def _fit_power(s: np.ndarray, ratio: np.ndarray) -> float:
    good = ratio > 0
    if np.sum(good) < 2:
        return np.nan
    return float(np.polyfit(np.log(s[good]), np.log(ratio[good]), 1)[0])


def carleman_check(pair: SolutionPair, cfg: CarlemanConfig) -> CarlemanReport:
    """Evaluate the weighted inequalities on a solution pair.

    Conformal-boundary flavor: the derivative-difference integral controls
    the field-difference integral with an s^2 gain,

        int |Pi - Pi0|^2 e^{2sr} >= C^-1 s^2 int |g - g0|^2 e^{2sr}

    plus the derivative-sum version (orders 0..k on both sides) and the
    lapse analogue with (V^2 - V0^2).  Finite-distance flavor: the weight
    is x^(-2s) and the right side carries the graded factors
    s^2 sum_i s^(4-2i) x^(2i-4).
    """
    f = pair.f
    r = f.outward_r()
    idx, w = _radial_weights(f, cfg.r0)
    traces = {}
    svals = cfg.s_values

    if f.flavor == AH:
        specs = {
            "IIg": (["shape"], ["metric"], 0),
            "IIgb": (["shape"], ["metric"], cfg.derivative_order),
            "V2": (None, None, 0),
        }
        for name, (lk, rk, kmax) in specs.items():
            lhs = np.empty(len(svals))
            rhs = np.empty(len(svals))
            if name == "V2":
                dv = pair.f.radial_derivative(pair.difference("lapse2"))
                lf = dv**2
                rf = pair.difference("lapse2") ** 2
            else:
                lf = sum(pair.derivative_norm2("shape", i) for i in range(kmax + 1))
                rf = sum(pair.derivative_norm2("metric", i) for i in range(kmax + 1))
            for j, s in enumerate(svals):
                weight = np.exp(2.0 * s * r)
                lhs[j] = _weighted_radial_integral(lf, weight, idx, w)
                rhs[j] = s**2 * _weighted_radial_integral(rf, weight, idx, w)
            ratio = rhs / lhs
            traces[name] = InequalityTrace(name, svals, lhs, rhs,
                                           float(np.max(ratio)),
                                           _fit_power(svals, ratio))
    else:
        x = r
        lf = pair.derivative_norm2("shape", 2)
        gfields = [pair.derivative_norm2("metric", i) for i in range(3)]
        lhs = np.empty(len(svals))
        rhs = np.empty(len(svals))
        xcol = x.reshape((-1,) + (1,) * (lf.ndim - 1))
        for j, s in enumerate(svals):
            weight = x ** (-2.0 * s)
            lhs[j] = _weighted_radial_integral(lf, weight, idx, w)
            graded = sum(
                s ** (4 - 2 * i) * np.where(xcol > 0, xcol, 1.0) ** (2 * i - 4) * gfields[i]
                for i in range(3)
            )
            rhs[j] = s**2 * _weighted_radial_integral(graded, weight, idx, w)
        ratio = rhs / lhs
        traces["IIgx"] = InequalityTrace("IIgx", svals, lhs, rhs,
                                         float(np.max(ratio)),
                                         _fit_power(svals, ratio))
    report = CarlemanReport(traces)
    cfg.fitted_constant = max(t.fitted_c for t in traces.values())
    return report


# ---------------------------------------------------------------------------
# aggregate-norm bound (appendix estimate)
# ---------------------------------------------------------------------------

@dataclass
class EstiaSampleResult:
    overall: float
    pi_group: float
    v_group: float
    xi_a: float
    xi_b: float
    xi_c: float
    accepted: bool
    reject_reason: str = ""


@dataclass
class EstiaReport:
    samples: list[EstiaSampleResult]

    @property
    def fitted_c(self) -> float:
        vals = [s.overall for s in self.samples if s.accepted]
        return max(vals) if vals else np.nan

    def group_maxima(self) -> dict[str, float]:
        out = {}
        for key in ("pi_group", "v_group", "xi_a", "xi_b", "xi_c"):
            vals = [getattr(s, key) for s in self.samples if s.accepted]
            out[key] = max(vals) if vals else np.nan
        return out

    @property
    def n_rejected(self) -> int:
        return sum(1 for s in self.samples if not s.accepted)


def check_ah_decay(f: RadialFoliation, bound: float = 50.0) -> str:
    """Validate the asymptotic decay table; returns '' or a reason string.

    Expected orders: V = O(e^r), g = O(e^{2r}), V' - V = O(e^{-r}),
    xi' = O(e^{-2r}), Pi - g = O(1)."""
    f.require_stationary()
    r = f.outward_r().reshape((-1,) + (1,) * (f.V.ndim - 1))
    er = np.exp(r)
    checks = [
        ("V/e^r out of range", np.abs(f.V) / er, (1.0 / bound, bound)),
        ("g/e^2r out of range",
         np.max(np.abs(f.g), axis=(-1, -2)) / er**2, (1.0 / bound, bound)),
        ("V'-V grows faster than e^-r",
         np.abs(f.radial_derivative(f.V) - f.V) * er, (0.0, bound)),
        ("xi' grows faster than e^-2r",
         np.max(np.abs(f.radial_derivative(f.xi_or_zero())), axis=-1) * er**2,
         (0.0, bound)),
    ]
    s = shape_operators(f)
    checks.append(("Pi - g unbounded", np.max(np.abs(s.Pi - f.g), axis=(-1, -2)),
                   (0.0, bound)))
    for reason, vals, (lo, hi) in checks:
        if np.max(vals) > hi or np.min(vals) < lo:
            return reason
    return ""


def estia_check(samples: list[SolutionPair], floor: float = 1e-12) -> EstiaReport:
    """Pointwise ratio of | |A0|^2 - |A|^2 | to |A - A0| + |Gref - Gref0|
    over decay-conforming samples; the three twist term groups of the bound
    are additionally checked one by one."""
    results = []
    for pair in samples:
        reason = check_ah_decay(pair.f) or check_ah_decay(pair.f0)
        if reason:
            results.append(EstiaSampleResult(*(np.nan,) * 6, accepted=False,
                                             reject_reason=reason))
            continue
        f, f0 = pair.f, pair.f0
        s, s0 = pair.shape, pair.shape0
        ref0 = s0.reference
        ref0_inv = np.linalg.inv(ref0)

        def ref0_norm(t):
            rank = t.ndim - ref0.ndim + 2
            if rank == 2:
                return np.sqrt(np.abs(np.einsum(
                    "...ik,...jl,...ij,...kl->...", ref0_inv, ref0_inv, t, t)))
            raise ContinuationError("unsupported rank")

        lhs = np.abs(s0.aggregate_norm2 - s.aggregate_norm2)
        den = ref0_norm(s.aggregate - s0.aggregate) + ref0_norm(s.reference - s0.reference)
        overall = float(np.max(lhs / np.maximum(den, floor)))

        ginv, g0inv = np.linalg.inv(f.g), np.linalg.inv(f0.g)

        def gnorm(t, inv):
            return np.sqrt(np.abs(np.einsum(
                "...ik,...jl,...ij,...kl->...", inv, inv, t, t)))

        def g0norm_vec(v):
            return np.sqrt(np.abs(np.einsum("...ij,...i,...j->...", g0inv, v, v)))

        pi2 = np.einsum("...ik,...jl,...ij,...kl->...", ginv, ginv, s.Pi, s.Pi)
        pi02 = np.einsum("...ik,...jl,...ij,...kl->...", g0inv, g0inv, s0.Pi, s0.Pi)
        pi_den = gnorm(f.g - f0.g, g0inv) + gnorm(s.Pi - s0.Pi, g0inv)
        pi_group = float(np.max(np.abs(pi2 - pi02) / np.maximum(pi_den, floor)))

        Vp, V0p = f.radial_derivative(f.V), f0.radial_derivative(f0.V)
        v_lhs = np.abs((Vp / f.V) ** 2 - (V0p / f0.V) ** 2)
        v_den = (np.abs(f.V * Vp - f0.V * V0p) + np.abs(f0.V**2 - f.V**2)) / f0.V**2
        v_group = float(np.max(v_lhs / np.maximum(v_den, floor)))

        xip = f.radial_derivative(f.xi_or_zero())
        xi0p = f0.radial_derivative(f0.xi_or_zero())
        q = (f.V**2)[..., None] * xip
        q0 = (f0.V**2)[..., None] * xi0p
        xip2_g = np.einsum("...ij,...i,...j->...", ginv, xip, xip)
        xip2_g0 = np.einsum("...ij,...i,...j->...", g0inv, xip, xip)
        xi0p2_g0 = np.einsum("...ij,...i,...j->...", g0inv, xi0p, xi0p)
        a_lhs = np.abs(g0norm_vec(q) ** 2 - g0norm_vec(q0) ** 2) / f0.V**2
        a_den = g0norm_vec(q - q0) / f0.V
        xi_a = float(np.max(a_lhs / np.maximum(a_den, floor)))
        b_lhs = f.V**4 * np.abs(xip2_g - xip2_g0) / f0.V**2
        b_den = gnorm(f.g - f0.g, g0inv)
        xi_b = float(np.max(b_lhs / np.maximum(b_den, floor)))
        c_lhs = np.abs(f0.V**2 - f.V**2) * f.V**2 * xip2_g / f0.V**2
        c_den = np.abs(f0.V**2 - f.V**2) / f0.V**2
        xi_c = float(np.max(c_lhs / np.maximum(c_den, floor)))

        results.append(EstiaSampleResult(overall, pi_group, v_group,
                                         xi_a, xi_b, xi_c, accepted=True))
    return EstiaReport(results)


# ---------------------------------------------------------------------------
# sample generation
# ---------------------------------------------------------------------------

def ads_base_foliation(radial: Axis, boundary: ChartGrid,
                       twist_amplitude: float = 0.0) -> RadialFoliation:
    """Exact-decay base data: V = e^r, g = e^{2r} delta, optional bounded
    twist with xi' = O(e^{-2r})."""
    nr = radial.size
    r = radial.coords.reshape((-1,) + (1,) * len(boundary.shape))
    shape = (nr,) + boundary.shape
    bdim = boundary.dim
    g = np.zeros(shape + (bdim, bdim))
    for a in range(bdim):
        g[..., a, a] = np.exp(2 * r)
    xi = np.zeros(shape + (bdim,))
    if twist_amplitude:
        xi[..., 0] = twist_amplitude * (1.0 - 0.5 * np.exp(-2 * r))
    n = bdim + 1
    return RadialFoliation(radial, boundary, g, V=np.exp(r) * np.ones(shape),
                           xi=xi, cosmological=-0.5 * n * (n - 1), flavor=AH)


def random_ah_pair(radial: Axis, boundary: ChartGrid, rng: np.random.Generator,
                   amplitude: float = 0.2) -> SolutionPair:
    """Random decay-conforming sample pair around the exact-decay base."""
    base = ads_base_foliation(radial, boundary,
                              twist_amplitude=0.1 * rng.uniform(0.0, 1.0))
    nr = radial.size
    r = radial.coords.reshape((-1,) + (1,) * len(boundary.shape))
    shape = (nr,) + boundary.shape
    bdim = boundary.dim

    def smooth_profile():
        out = np.ones(boundary.shape)
        for axpos, ax in enumerate(boundary.axes):
            c = ax.coords * 2 * np.pi / max(ax.length, 1e-12)
            mode = rng.integers(1, 3)
            phase = rng.uniform(0, 2 * np.pi)
            arr = 1.0 + 0.3 * np.cos(mode * c + phase)
            out = out * arr.reshape([-1 if k == axpos else 1
                                     for k in range(len(boundary.axes))])
        return out

    a_v = amplitude * rng.uniform(-1, 1)
    V = np.exp(r) * (1.0 + a_v * np.exp(-2 * r) * smooth_profile())
    g = base.g.copy()
    for a in range(bdim):
        for b in range(a, bdim):
            amp = amplitude * rng.uniform(-1, 1)
            bump = amp * smooth_profile() * (1.0 + 0.3 * np.exp(-r))
            g[..., a, b] += bump * (1.0 if a == b else 0.3)
            g[..., b, a] = g[..., a, b]
    xi = base.xi_or_zero().copy()
    xi[..., 0] += amplitude * rng.uniform(-1, 1) * np.exp(-2 * r) * smooth_profile()
    pert = RadialFoliation(base.radial, boundary, g, V=V, xi=xi,
                           cosmological=base.cosmological, flavor=AH)
    return SolutionPair(pert, base)


def manufactured_pair(radial: Axis, boundary: ChartGrid, rng: np.random.Generator,
                      decay_rate: float, flavor: str = AH,
                      power: float = 5.0, modulation: float = 0.1) -> SolutionPair:
    """Base foliation plus a single-profile difference: e^{-m r} T in the
    conformal-boundary flavor, x^p T in the finite-distance flavor."""
    bdim = boundary.dim
    nr = radial.size
    r = radial.coords.reshape((-1,) + (1,) * len(boundary.shape))
    shape = (nr,) + boundary.shape
    tmat = rng.uniform(-1, 1, size=(bdim, bdim))
    tmat = 0.5 * (tmat + tmat.T)
    prof = np.ones(boundary.shape)
    for axpos, ax in enumerate(boundary.axes):
        c = ax.coords * 2 * np.pi / max(ax.length, 1e-12)
        arr = 1.0 + modulation * np.cos(c + rng.uniform(0, 2 * np.pi))
        prof = prof * arr.reshape([-1 if k == axpos else 1
                                   for k in range(len(boundary.axes))])
    if flavor == AH:
        base = ads_base_foliation(radial, boundary)
        envelope = np.exp(-decay_rate * r)
    else:
        g = np.zeros(shape + (bdim, bdim))
        for a in range(bdim):
            g[..., a, a] = 1.0 + 0.3 * r
        base = RadialFoliation(radial, boundary, g, V=np.ones(shape),
                               xi=np.zeros(shape + (bdim,)), flavor=FINITE)
        envelope = r**power
    g_pert = base.g + envelope[..., None, None] * prof[None, ..., None, None] * tmat
    pert = RadialFoliation(base.radial, boundary, g_pert, V=base.V,
                           xi=base.xi_or_zero(), cosmological=base.cosmological,
                           flavor=base.flavor)
    return SolutionPair(pert, base)


# ---------------------------------------------------------------------------
# cohomogeneity-one continuation sector
# ---------------------------------------------------------------------------

@dataclass
class RadialProfile:
    """Cauchy data for the symmetry-reduced radial Einstein system.

    Slices are either flat tori with independent scale factors (optionally
    one twist channel on the first axis) or round spheres with one scale
    factor.  ``kappa = -2 Lambda/(n-1)``."""

    V: float
    V_prime: float
    scales: np.ndarray
    scale_primes: np.ndarray
    kappa: float = 0.0
    slice_curvature: int = 0       # 0: torus, 1: round sphere
    twist: float = 0.0             # u(0) = V^3 xi_1'(0); torus only

    def __post_init__(self):
        self.scales = np.atleast_1d(np.asarray(self.scales, float))
        self.scale_primes = np.atleast_1d(np.asarray(self.scale_primes, float))
        if self.slice_curvature == 1 and len(self.scales) != 1:
            raise ContinuationError("sphere slices take a single scale factor")
        if self.slice_curvature == 1 and self.twist != 0.0:
            raise ContinuationError("twist channel is torus-only")
        if self.V <= 0 or np.any(self.scales <= 0):
            raise ContinuationError("V and scale factors must be positive")

    @property
    def n_dim(self) -> int:
        """dim M: sphere slices are S^(n-1); torus slices list n-1 factors."""
        if self.slice_curvature == 1:
            raise ContinuationError("sphere profile needs explicit dimension")
        return len(self.scales) + 1

    def state(self) -> np.ndarray:
        return np.concatenate([[self.V, self.V_prime], self.scales,
                               self.scale_primes, [self.twist]])


def _slice_multiplicity(k_slice: int, m: int, ndim: int) -> np.ndarray:
    # a single sphere scale factor stands for all n-1 slice directions
    if k_slice == 1:
        return np.array([float(ndim - 1)])
    return np.ones(m)


def _profile_rhs(kappa: float, k_slice: int, m: int, ndim: int):
    mult = _slice_multiplicity(k_slice, m, ndim)

    def rhs(_x, y):
        V, Vp = y[0], y[1]
        b = y[2:2 + m]
        bp = y[2 + m:2 + 2 * m]
        u = y[-1]
        H = np.sum(mult * bp / b)
        twist_v = 0.5 * u**2 / (V**3 * b[0] ** 2)
        Vpp = kappa * V - H * Vp - twist_v
        bpp = -H * bp + bp**2 / b + kappa * b - (Vp / V) * bp
        if k_slice == 1:
            bpp = bpp + (ndim - 2) / b
        bpp[0] = bpp[0] + 0.5 * u**2 / (V**4 * b[0])
        up = -H * u + 2.0 * (bp[0] / b[0]) * u
        return np.concatenate([[Vp, Vpp], bp, bpp, [up]])
    return rhs


def constraint_residual(y: np.ndarray, kappa: float, m: int, ndim: int,
                        k_slice: int, rhs) -> float:
    """The radial Hamiltonian-type constraint, monitored along the flow."""
    V, Vp = y[0], y[1]
    b = y[2:2 + m]
    bp = y[2 + m:2 + 2 * m]
    u = y[-1]
    mult = _slice_multiplicity(k_slice, m, ndim)
    dy = rhs(0.0, y)
    Vpp = dy[1]
    bpp = dy[2 + m:2 + 2 * m]
    Hp = np.sum(mult * (bpp / b - (bp / b) ** 2))
    pi2 = np.sum(mult * (bp / b) ** 2)
    return float(-Hp - pi2 + kappa - Vpp / V + 0.5 * u**2 / (V**4 * b[0] ** 2))


@dataclass
class SeparationTrace:
    x: np.ndarray
    separation: np.ndarray
    states: tuple[np.ndarray, np.ndarray]
    truncated: bool
    diagnostic: str
    constraint_sup: float

    def max_separation(self, x_limit: float | None = None) -> float:
        if x_limit is None:
            return float(np.max(self.separation))
        mask = self.x <= x_limit
        return float(np.max(self.separation[mask])) if np.any(mask) else 0.0


def integrate_profile(p: RadialProfile, x_span: tuple[float, float],
                      x_eval: np.ndarray, ndim: int | None = None,
                      rtol: float = 1e-12, atol: float = 1e-12):
    m = len(p.scales)
    nd = ndim if ndim is not None else (m + 1)
    rhs = _profile_rhs(p.kappa, p.slice_curvature, m, nd)

    def floor_event(_x, y):
        return min(y[0], np.min(y[2:2 + m])) - 1e-8

    floor_event.terminal = True
    sol = solve_ivp(rhs, x_span, p.state(), t_eval=x_eval, rtol=rtol, atol=atol,
                    method="RK45", events=floor_event, dense_output=False)
    return sol, rhs


def continuation_ode(p0: RadialProfile, p1: RadialProfile,
                     x_max: float, n_eval: int = 201, ndim: int | None = None,
                     rtol: float = 1e-12, atol: float = 1e-12) -> SeparationTrace:
    """Integrate both Cauchy data sets and return the sup-norm separation of
    (V, scale factors, twist) as a function of the radial coordinate."""
    x_eval = np.linspace(0.0, x_max, n_eval)
    sol0, rhs0 = integrate_profile(p0, (0.0, x_max), x_eval, ndim, rtol, atol)
    sol1, rhs1 = integrate_profile(p1, (0.0, x_max), x_eval, ndim, rtol, atol)
    ncommon = min(sol0.y.shape[1], sol1.y.shape[1])
    truncated = ncommon < n_eval
    diag = ""
    if truncated:
        which = "first" if sol0.y.shape[1] < sol1.y.shape[1] else "second"
        diag = (f"integration truncated at x = {x_eval[ncommon - 1]:.6g} "
                f"({which} profile hit the positivity floor)")
    y0 = sol0.y[:, :ncommon]
    y1 = sol1.y[:, :ncommon]
    sep = np.max(np.abs(y0 - y1), axis=0)
    m = len(p0.scales)
    nd = ndim if ndim is not None else (m + 1)
    cons = max(
        max(abs(constraint_residual(y0[:, j], p0.kappa, m, nd,
                                    p0.slice_curvature, rhs0))
            for j in range(0, ncommon, max(1, ncommon // 16))),
        max(abs(constraint_residual(y1[:, j], p1.kappa, m, nd,
                                    p1.slice_curvature, rhs1))
            for j in range(0, ncommon, max(1, ncommon // 16))),
    )
    return SeparationTrace(x_eval[:ncommon], sep, (y0, y1), truncated, diag, cons)
