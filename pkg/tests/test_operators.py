"""Oracle tests for the chart tensor calculus.

Expected values are the classical closed forms of the test geometries
(flat, hyperbolic dr^2 + e^{2r} delta, unit round sphere), evaluated on
the grid from the exact expressions.
"""

import numpy as np
import pytest

from statvac import operators as ops
from statvac.fields import (
    MetricField,
    l2_inner,
    one_form,
    scalar_field,
    sym2_field,
    vector_field,
)
from statvac.grid import ChartGrid, interval_axis, periodic_axis

from geometries import (
    flat_torus,
    hyperbolic_metric,
    random_periodic_metric,
    round_sphere,
)


# -- christoffel ------------------------------------------------------------

def test_christoffel_flat_zero():
    _, m = flat_torus(3, 8)
    assert ops.christoffel(m).sup_norm() == 0.0


def test_christoffel_hyperbolic_closed_form():
    grid, m = hyperbolic_metric(3)
    r = grid.mesh()[0]
    gam = ops.christoffel(m).comps
    # Gamma^r_AB = -e^{2r} delta_AB, Gamma^A_rB = delta^A_B
    assert np.max(np.abs(gam[..., 0, 1, 1] + np.exp(2 * r))) < 2e-4
    assert np.max(np.abs(gam[..., 0, 2, 2] + np.exp(2 * r))) < 2e-4
    assert np.max(np.abs(gam[..., 1, 0, 1] - 1.0)) < 2e-5
    assert np.max(np.abs(gam[..., 2, 0, 2] - 1.0)) < 2e-5
    assert np.max(np.abs(gam[..., 0, 1, 2])) < 1e-10
    # symmetric in the lower pair
    assert np.max(np.abs(gam - np.swapaxes(gam, -1, -2))) < 1e-14


def test_christoffel_sphere_closed_form():
    grid, m = round_sphere()
    th = grid.mesh()[0]
    gam = ops.christoffel(m).comps
    assert np.max(np.abs(gam[..., 0, 1, 1] + np.sin(th) * np.cos(th))) < 1e-5
    assert np.max(np.abs(gam[..., 1, 0, 1] - np.cos(th) / np.sin(th))) < 2e-4


# -- ricci -------------------------------------------------------------------

def test_ricci_flat_zero():
    _, m = flat_torus(3, 8)
    assert ops.ricci(m).sup_norm() < 1e-13


def test_ricci_hyperbolic():
    n = 3
    _, m = hyperbolic_metric(n)
    res = ops.ricci(m).comps + (n - 1) * m.comps
    assert np.max(np.abs(res)) < 1e-3


def test_ricci_sphere_positive_convention():
    # pins the curvature sign convention: unit round sphere has Ric = +g
    _, m = round_sphere()
    assert np.max(np.abs(ops.ricci(m).comps - m.comps)) < 1e-4


def test_riemann_contraction_consistency(rng):
    grid, m = random_periodic_metric(rng)
    riem = ops.riemann(m)
    ric = ops.ricci(m, riem)
    rcov = ops.riemann_covariant(m, riem)
    alt = np.einsum("...kl,...kilj->...ij", m.inv, rcov.comps)
    assert np.max(np.abs(alt - ric.comps)) < 1e-9


# -- lichnerowicz -------------------------------------------------------------

def test_lichnerowicz_annihilates_metric(rng):
    for builder in (lambda: flat_torus(3, 8), lambda: hyperbolic_metric(3),
                    lambda: round_sphere()):
        _, m = builder()
        assert ops.lichnerowicz(m, m.as_tensor()).sup_norm() < 1e-10


def test_lichnerowicz_flat_cases():
    grid, m = flat_torus(2, 16)
    x, y = grid.mesh()
    const = sym2_field(grid, np.broadcast_to(np.eye(2), grid.shape + (2, 2)).copy())
    assert ops.lichnerowicz(m, const).sup_norm() < 1e-13
    # h = f delta -> -(lap f) delta
    f = np.sin(x) * np.cos(2 * y)
    h = sym2_field(grid, f[..., None, None] * np.eye(2))
    lich = ops.lichnerowicz(m, h).comps
    lap_f = -np.sin(x) * np.cos(2 * y) - 4 * np.sin(x) * np.cos(2 * y)
    expected = -lap_f[..., None, None] * np.eye(2)
    assert np.max(np.abs(lich - expected)) < 1e-10


def test_lichnerowicz_rejects_asymmetric():
    grid, m = flat_torus(2, 8)
    from statvac.fields import FieldError, TensorField
    bad = np.zeros(grid.shape + (2, 2))
    bad[..., 0, 1] = 1.0
    with pytest.raises(FieldError):
        ops.lichnerowicz(m, TensorField(grid, 2, 0, bad))


# -- divergence ----------------------------------------------------------------

def test_divergence_of_metric_zero(rng):
    grid, m = random_periodic_metric(rng)
    assert ops.divergence(m, m.as_tensor()).sup_norm() < 1e-12


def test_divergence_flat_example():
    # h = x dx (x) dx on a slab: (div h)_x = -d_x x = -1
    grid = ChartGrid((interval_axis("x", 0, 1, 17), periodic_axis("y", 8)))
    x = grid.mesh()[0]
    comps = np.zeros(grid.shape + (2, 2))
    comps[..., 0, 0] = 1.0
    comps[..., 1, 1] = 1.0
    m = MetricField(grid, comps)
    h = np.zeros(grid.shape + (2, 2))
    h[..., 0, 0] = x
    div = ops.divergence(m, sym2_field(grid, h)).comps
    assert np.max(np.abs(div[..., 0] + 1.0)) < 1e-10
    assert np.max(np.abs(div[..., 1])) < 1e-12


def test_divergence_hyperbolic_conformal():
    # h = f(r) g  ->  (div h)_j = -d_j f = -f'(r) dr
    grid, m = hyperbolic_metric(3)
    r = grid.mesh()[0]
    f = np.exp(-r)
    h = sym2_field(grid, f[..., None, None] * m.comps)
    div = ops.divergence(m, h).comps
    assert np.max(np.abs(div[..., 0] + (-np.exp(-r)))) < 1e-5
    assert np.max(np.abs(div[..., 1:])) < 1e-8


# -- symmetrized gradient -------------------------------------------------------

def test_symgrad_exact_form_is_hessian():
    grid, m = flat_torus(2, 16)
    x, y = grid.mesh()
    f = np.sin(x + y)
    w = one_form(grid, grid.gradient_stack(f))
    sg = ops.symmetrized_gradient(m, w)
    hess = ops.hessian(m, f)
    assert np.max(np.abs(sg.comps - hess.comps)) < 1e-11


def test_symgrad_kills_sphere_rotation():
    grid, m = round_sphere()
    th = grid.mesh()[0]
    # rotation generator d_phi lowered: sin^2(theta) dphi
    w = np.zeros(grid.shape + (2,))
    w[..., 1] = np.sin(th) ** 2
    assert ops.symmetrized_gradient(m, one_form(grid, w)).sup_norm() < 1e-6


def test_symgrad_constant_form_flat():
    grid, m = flat_torus(2, 8)
    w = one_form(grid, np.broadcast_to(np.array([1.0, -2.0]), grid.shape + (2,)).copy())
    assert ops.symmetrized_gradient(m, w).sup_norm() < 1e-14


def test_adjointness_divergence_symgrad(rng):
    # discrete <div h, w> = <h, symgrad w> on a periodic chart
    grid, m = random_periodic_metric(rng)
    h = rng.standard_normal((2, 2))
    h = h + h.T
    x, y = grid.mesh()
    hfield = sym2_field(grid, np.sin(x)[..., None, None] * h + 2.0 * np.eye(2))
    w = one_form(grid, np.stack([np.cos(y), np.sin(x + y)], axis=-1))
    lhs = l2_inner(m, ops.divergence(m, hfield).comps, w.comps)
    rhs = l2_inner(m, hfield.comps, ops.symmetrized_gradient(m, w).comps)
    assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-9)


# -- lie derivative ---------------------------------------------------------------

def test_lie_coordinate_vector_constant_tensor():
    grid, m = flat_torus(2, 8)
    X = vector_field(grid, np.broadcast_to(np.array([1.0, 0.0]),
                                           grid.shape + (2,)).copy())
    t = sym2_field(grid, np.broadcast_to(np.eye(2), grid.shape + (2, 2)).copy())
    assert ops.lie_derivative(X, t).sup_norm() == 0.0


def test_lie_rotation_kills_flat_metric():
    grid = ChartGrid((interval_axis("x", -1, 1, 17), interval_axis("z", -1, 1, 17)))
    x, z = grid.mesh()
    comps = np.broadcast_to(np.eye(2), grid.shape + (2, 2)).copy()
    m = MetricField(grid, comps)
    X = vector_field(grid, np.stack([-z, x], axis=-1))
    assert ops.lie_derivative(X, m).sup_norm() < 1e-12


def test_lie_scaling_vector():
    # X = x d_x on dx^2: L_X g = 2 dx^2
    grid = ChartGrid((interval_axis("x", 0.1, 1, 17), periodic_axis("y", 8)))
    x = grid.mesh()[0]
    comps = np.broadcast_to(np.eye(2), grid.shape + (2, 2)).copy()
    m = MetricField(grid, comps)
    X = vector_field(grid, np.stack([x, np.zeros_like(x)], axis=-1))
    lie = ops.lie_derivative(X, m).comps
    assert np.max(np.abs(lie[..., 0, 0] - 2.0)) < 1e-11
    assert np.max(np.abs(lie[..., 1, 1])) < 1e-12


def test_lie_metric_equals_twice_symgrad(rng):
    grid, m = random_periodic_metric(rng)
    x, y = grid.mesh()
    X = vector_field(grid, np.stack([np.sin(y), np.cos(x)], axis=-1))
    lie = ops.lie_derivative(X, m).comps
    w = one_form(grid, np.einsum("...ij,...j->...i", m.comps, X.comps))
    sg = 2.0 * ops.symmetrized_gradient(m, w).comps
    assert np.max(np.abs(lie - sg)) < 1e-9


def test_lie_unsupported_rank():
    grid, m = flat_torus(2, 8)
    from statvac.fields import FieldError, TensorField
    X = vector_field(grid, np.zeros(grid.shape + (2,)))
    with pytest.raises(FieldError):
        ops.lie_derivative(X, TensorField(grid, 3, 0, np.zeros(grid.shape + (2,) * 3)))


# -- hessian -----------------------------------------------------------------------

def test_hessian_constant_zero(rng):
    grid, m = random_periodic_metric(rng)
    assert ops.hessian(m, np.ones(grid.shape)).sup_norm() < 1e-12


def test_hessian_flat_quadratic():
    grid = ChartGrid((interval_axis("x", -1, 1, 17), periodic_axis("y", 8)))
    x = grid.mesh()[0]
    comps = np.broadcast_to(np.eye(2), grid.shape + (2, 2)).copy()
    m = MetricField(grid, comps)
    hess = ops.hessian(m, x**2).comps
    assert np.max(np.abs(hess[..., 0, 0] - 2.0)) < 1e-9
    assert np.max(np.abs(hess[..., 0, 1])) < 1e-10


def test_hessian_radial_function_foliated():
    # g+ = dr^2 + g: Hess_rr f = f'', Hess_rA f = 0, Hess_AB f = f' Pi_AB
    grid, m = hyperbolic_metric(3)
    r = grid.mesh()[0]
    f = np.sin(r)
    hess = ops.hessian(m, f).comps
    assert np.max(np.abs(hess[..., 0, 0] + np.sin(r))) < 5e-6
    assert np.max(np.abs(hess[..., 0, 1])) < 5e-6
    # Pi_AB = e^{2r} delta_AB for this metric
    assert np.max(np.abs(hess[..., 1, 1] - np.cos(r) * np.exp(2 * r))) < 2e-4


# -- pullback commutation -------------------------------------------------------------

def test_ricci_commutes_with_pullback():
    """Ricci of a pulled-back metric equals the pullback of Ricci, tested on
    an explicit periodic coordinate change y -> y + 0.2 sin(y)."""
    nodes = 48
    grid = ChartGrid((periodic_axis("x", nodes), periodic_axis("y", nodes)))
    x, y = grid.mesh()

    def metric_at(xv, yv):
        comps = np.zeros(xv.shape + (2, 2))
        comps[..., 0, 0] = 1.4 + 0.2 * np.sin(xv) * np.cos(yv)
        comps[..., 1, 1] = 1.2 + 0.15 * np.cos(yv)
        comps[..., 0, 1] = comps[..., 1, 0] = 0.1 * np.sin(xv + yv)
        return comps

    m = MetricField(grid, metric_at(x, y))
    ric = ops.ricci(m).comps

    # diffeomorphism phi(x, y) = (x, y + 0.2 sin y), jacobian J
    ynew = y + 0.2 * np.sin(y)
    jac = np.zeros(grid.shape + (2, 2))
    jac[..., 0, 0] = 1.0
    jac[..., 1, 1] = 1.0 + 0.2 * np.cos(y)
    pulled = np.einsum("...ai,...ab,...bj->...ij", jac, metric_at(x, ynew), jac)
    ric_pulled = ops.ricci(MetricField(grid, pulled)).comps

    # evaluate ric at the mapped points by trigonometric interpolation in y
    k = np.fft.rfftfreq(nodes, d=1.0 / nodes)
    ric_at = np.zeros_like(ric)
    for i in range(2):
        for j in range(2):
            coeff = np.fft.rfft(ric[..., i, j], axis=1)
            vals = np.real(
                coeff[:, None, :] * np.exp(
                    1j * np.outer(ynew[0], k))[None, :, :]
            )
            # inverse rfft normalization: sum with doubled interior modes
            scale = np.ones_like(k) * 2.0
            scale[0] = 1.0
            if nodes % 2 == 0:
                scale[-1] = 1.0
            ric_at[..., i, j] = (vals * scale).sum(axis=2) / nodes
    expected = np.einsum("...ai,...ab,...bj->...ij", jac, ric_at, jac)
    assert np.max(np.abs(ric_pulled - expected)) < 5e-5


# -- convergence at configured order ---------------------------------------------------

@pytest.mark.parametrize("order", [4])
def test_operator_convergence_order(order):
    def errors(nr):
        grid, m = hyperbolic_metric(3, nr=nr, nb=8, fd_order=order)
        r = grid.mesh()[0]
        gam_err = np.max(np.abs(ops.christoffel(m).comps[..., 0, 1, 1]
                                + np.exp(2 * r)))
        ric_err = np.max(np.abs(ops.ricci(m).comps + 2 * m.comps))
        h = sym2_field(grid, np.sin(r)[..., None, None] * m.comps)
        lich = ops.lichnerowicz(m, h)
        return gam_err, ric_err, lich

    g1, r1, l1 = errors(33)
    g2, r2, l2 = errors(65)
    assert 0.8 * 2**order <= g1 / g2 <= 1.2 * 2**order
    assert 0.8 * 2**order <= r1 / r2 <= 1.2 * 2**order
    # lichnerowicz of the same closed-form argument on two grids: compare
    # against the finer solution restricted (self-convergence at order p)
    fine_on_coarse = l2.comps[::2]  # only the radial axis refines
    coarse = l1.comps
    # both approximate the same smooth field; difference scales like h^p
    diff1 = np.max(np.abs(coarse - fine_on_coarse))
    grid3, m3 = hyperbolic_metric(3, nr=129, nb=8, fd_order=order)
    r3 = grid3.mesh()[0]
    h3 = sym2_field(grid3, np.sin(r3)[..., None, None] * m3.comps)
    l3 = ops.lichnerowicz(m3, h3).comps[::2]
    diff2 = np.max(np.abs(l2.comps - l3))
    ratio = diff1 / diff2
    assert 0.7 * 2**order <= ratio <= 1.35 * 2**order
