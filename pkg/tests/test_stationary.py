import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from statvac import operators as ops
from statvac import stationary as stn
from statvac.fields import MetricField, one_form, sym2_field, vector_field
from statvac.grid import ChartGrid, interval_axis, periodic_axis

from geometries import (
    ads_stationary,
    flat_torus,
    minkowski_stationary,
    rotating_minkowski_stationary,
    schwarzschild_stationary,
)


def random_twisted_data(rng, nodes=16, cosmological=0.7):
    """Smooth random (non-Einstein) stationary data on a 2-torus."""
    grid = ChartGrid((periodic_axis("x", nodes), periodic_axis("y", nodes)))
    x, y = grid.mesh()
    V = 2.0 + 0.3 * np.sin(x) * np.cos(y)
    th = np.stack([0.2 * np.sin(y), 0.1 * np.cos(x)], axis=-1)
    gp = np.zeros(grid.shape + (2, 2))
    gp[..., 0, 0] = 1.5 + 0.2 * np.cos(x + y)
    gp[..., 1, 1] = 1.8 + 0.15 * np.sin(x)
    gp[..., 0, 1] = gp[..., 1, 0] = 0.1 * np.sin(x) * np.sin(y)
    return stn.StationaryMetric(V, one_form(grid, th), MetricField(grid, gp),
                                cosmological)


# -- assembly ------------------------------------------------------------------

def test_assemble_minkowski_block():
    sm = minkowski_stationary()
    gm = stn.assemble_spacetime(sm)
    assert gm.signature == "lorentzian"
    assert np.max(np.abs(gm.comps[..., 0, 0] + 1.0)) == 0.0
    assert np.max(np.abs(gm.comps[..., 0, 1:])) == 0.0
    assert np.max(np.abs(gm.comps[..., 1:, 1:] - np.eye(3))) == 0.0


def test_assemble_ads_form():
    sm = ads_stationary()
    gm = stn.assemble_spacetime(sm)
    r = sm.grid.mesh()[0]
    # dr^2 + e^{2r} eta: g_tt = -e^{2r}, g_rr = 1, g_yy = e^{2r}
    assert np.max(np.abs(gm.comps[..., 0, 0] + np.exp(2 * r))) < 1e-12
    assert np.max(np.abs(gm.comps[..., 1, 1] - 1.0)) < 1e-13
    assert np.max(np.abs(gm.comps[..., 2, 2] - np.exp(2 * r))) < 1e-12


def test_assemble_constant_shift_block():
    # V = 1, theta = a dy: g_ty = -a, g_yy = 1 - a^2
    grid, m = flat_torus(2, 8)
    a = 0.4
    th = np.zeros(grid.shape + (2,))
    th[..., 1] = a
    sm = stn.StationaryMetric(np.ones(grid.shape), one_form(grid, th), m, 0.0)
    gm = stn.assemble_spacetime(sm)
    assert np.max(np.abs(gm.comps[..., 0, 2] + a)) < 1e-14
    assert np.max(np.abs(gm.comps[..., 2, 2] - (1 - a**2))) < 1e-14


def test_block_inverse_formula(rng):
    sm = random_twisted_data(rng)
    inv = stn.spacetime_block_inverse(sm)
    gm = stn.assemble_spacetime(sm)
    ident = np.einsum("...ij,...jk->...ik", gm.comps, inv)
    eye = np.broadcast_to(np.eye(3), ident.shape)
    assert np.max(np.abs(ident - eye)) < 1e-11


def test_lapse_positivity_enforced():
    grid, m = flat_torus(2, 8)
    with pytest.raises(stn.StationaryError):
        stn.StationaryMetric(np.zeros(grid.shape), one_form(grid, grid.zeros(2)),
                             m, 0.0)


def test_theta_tangential_enforced():
    grid = ChartGrid((interval_axis("r", 0, 1, 9, radial=True),
                      periodic_axis("y", 8)))
    comps = np.zeros(grid.shape + (2, 2))
    comps[..., 0, 0] = comps[..., 1, 1] = 1.0
    th = np.zeros(grid.shape + (2,))
    th[..., 0] = 0.1  # radial component forbidden
    with pytest.raises(stn.StationaryError):
        stn.StationaryMetric(np.ones(grid.shape), one_form(grid, th),
                             MetricField(grid, comps), 0.0)


# -- twist -----------------------------------------------------------------------

def test_twist_zero_for_exact_form():
    grid, m = flat_torus(2, 16)
    x, y = grid.mesh()
    f = np.sin(x) * np.cos(y)
    th = one_form(grid, grid.gradient_stack(f))
    sm = stn.StationaryMetric(1.0 + 0.2 * np.cos(x), th, m, 0.0)
    assert stn.twist(sm).field.sup_norm() < 1e-11


def test_twist_torus_example():
    # V = 1, theta = x dy on a slab chart: w_xy = -1
    grid = ChartGrid((interval_axis("x", 0, 1, 9), periodic_axis("y", 8)))
    x = grid.mesh()[0]
    comps = np.broadcast_to(np.eye(2), grid.shape + (2, 2)).copy()
    th = np.zeros(grid.shape + (2,))
    th[..., 1] = x
    sm = stn.StationaryMetric(np.ones(grid.shape), one_form(grid, th),
                              MetricField(grid, comps), 0.0)
    w = stn.twist(sm).field.comps
    assert np.max(np.abs(w[..., 0, 1] + 1.0)) < 1e-10
    assert np.max(np.abs(w[..., 1, 0] - 1.0)) < 1e-10


def test_twist_radial_split():
    sm = rotating_minkowski_stationary()
    tw = stn.twist(sm)
    assert tw.radial_part is not None
    rho = sm.grid.mesh()[0]
    v2 = sm.lapse**2
    xi_prime = np.gradient(-0.2 * rho[:, 0] ** 2 / v2[:, 0], rho[:, 0])
    expected = -v2[:, 0] * xi_prime  # w_rA = -V^2 xi'_A
    assert np.max(np.abs(tw.radial_part[..., 0] - expected[:, None])) < 1e-3
    # antisymmetry and zero diagonal
    w = tw.field.comps
    assert np.max(np.abs(w + np.swapaxes(w, -1, -2))) < 1e-14


@settings(max_examples=10, deadline=None)
@given(c=st.floats(min_value=0.2, max_value=3.0))
def test_twist_scaling_quadratic_in_lapse(c):
    rng = np.random.default_rng(7)
    sm = random_twisted_data(rng)
    w1 = stn.twist(sm).field.comps
    sm2 = stn.StationaryMetric(c * sm.lapse, sm.theta, sm.gplus, sm.cosmological)
    w2 = stn.twist(sm2).field.comps
    np.testing.assert_allclose(w2, c**2 * w1, rtol=1e-12, atol=1e-12)


def test_twist_sign_flip(rng):
    sm = random_twisted_data(rng)
    flipped = stn.StationaryMetric(
        sm.lapse, one_form(sm.grid, -sm.theta.comps), sm.gplus, sm.cosmological)
    np.testing.assert_allclose(stn.twist(flipped).field.comps,
                               -stn.twist(sm).field.comps, atol=1e-14)


# -- reduced residuals --------------------------------------------------------------

def test_minkowski_residuals_zero():
    res = stn.reduced_residuals(minkowski_stationary())
    assert res.max_norm() < 1e-12


def test_ads_residuals_truncation():
    res = stn.reduced_residuals(ads_stationary())
    assert res.max_norm() < 1e-3


def test_schwarzschild_residuals_truncation():
    res = stn.reduced_residuals(schwarzschild_stationary())
    assert res.max_norm() < 5e-4


def test_rotating_minkowski_residuals():
    res = stn.reduced_residuals(rotating_minkowski_stationary())
    assert res.max_norm() < 1e-4


def test_full_ricci_cross_check_on_generic_data(rng):
    """The exact block correspondence with E = Ric(g_-) + kappa g_- holds on
    arbitrary (non-Einstein) twisted data to round-off."""
    sm = random_twisted_data(rng)
    res = stn.reduced_residuals(sm)
    assert res.max_norm() > 0.1  # genuinely non-Einstein
    mismatch = stn.cross_check_full_ricci(sm, res)
    assert max(mismatch.values()) < 1e-11


def test_residual_invariant_under_relabeling():
    """eq_tt is a scalar: its values at corresponding points agree under an
    explicit periodic coordinate change y -> y + 0.2 sin(y)."""
    nodes = 48
    grid = ChartGrid((periodic_axis("x", nodes), periodic_axis("y", nodes)))
    x, y = grid.mesh()

    def data(xv, yv):
        V = 2.0 + 0.3 * np.sin(xv) * np.cos(yv)
        th = np.stack([0.1 * np.sin(yv), np.zeros_like(yv)], axis=-1)
        gp = np.zeros(xv.shape + (2, 2))
        gp[..., 0, 0] = 1.5 + 0.2 * np.cos(xv)
        gp[..., 1, 1] = 1.8 + 0.1 * np.sin(yv)
        return V, th, gp

    V, th, gp = data(x, y)
    sm1 = stn.StationaryMetric(V, one_form(grid, th), MetricField(grid, gp), 0.5)
    tt1 = stn.reduced_residuals(sm1).tt.comps

    ynew = y + 0.2 * np.sin(y)
    V2, th2, gp2 = data(x, ynew)
    jac = np.zeros(grid.shape + (2, 2))
    jac[..., 0, 0] = 1.0
    jac[..., 1, 1] = 1.0 + 0.2 * np.cos(y)
    th2 = np.einsum("...ai,...a->...i", jac, th2)
    gp2 = np.einsum("...ai,...ab,...bj->...ij", jac, gp2, jac)
    sm2 = stn.StationaryMetric(V2, one_form(grid, th2), MetricField(grid, gp2), 0.5)
    tt2 = stn.reduced_residuals(sm2).tt.comps

    # interpolate tt1 in y to the mapped points (trig interpolation)
    k = np.fft.rfftfreq(nodes, d=1.0 / nodes)
    coeff = np.fft.rfft(tt1, axis=1)
    scale = np.full(len(k), 2.0)
    scale[0] = 1.0
    if nodes % 2 == 0:
        scale[-1] = 1.0
    vals = np.real(coeff[:, None, :] * np.exp(1j * np.outer(ynew[0], k))[None, :, :])
    tt1_at = (vals * scale).sum(axis=2) / nodes
    assert np.max(np.abs(tt2 - tt1_at)) < 5e-4


# -- linearization ----------------------------------------------------------------

def _random_perturbation(grid, rng):
    x, y = grid.mesh()
    dV = 0.5 * np.cos(x) * np.sin(y)
    dth = np.stack([0.3 * np.sin(x + y), 0.2 * np.cos(y)], axis=-1)
    dg = np.zeros(grid.shape + (2, 2))
    dg[..., 0, 0] = 0.4 * np.sin(y)
    dg[..., 1, 1] = 0.3 * np.cos(x)
    dg[..., 0, 1] = dg[..., 1, 0] = 0.1 * np.cos(x) * np.cos(y)
    return stn.Perturbation(dV, one_form(grid, dth), sym2_field(grid, dg))


def test_linearization_zero_direction(rng):
    sm = random_twisted_data(rng)
    zero = stn.Perturbation(np.zeros(sm.grid.shape),
                            one_form(sm.grid, sm.grid.zeros(2)),
                            sym2_field(sm.grid, sm.grid.zeros(2, 2)))
    lin = stn.linearized_reduced_residuals(sm, zero)
    assert lin.max_norm() < 1e-14
    rep = stn.linearized_residual(sm, zero, 1e-3)
    assert max(rep.difference_norms.values()) < 1e-10


def test_linearization_slope_one(rng):
    sm = random_twisted_data(rng)
    pert = _random_perturbation(sm.grid, rng)
    diffs = []
    eps_values = (1e-2, 1e-3, 1e-4)
    for eps in eps_values:
        rep = stn.linearized_residual(sm, pert, eps)
        diffs.append(max(rep.difference_norms.values()))
    slope = np.polyfit(np.log(eps_values), np.log(diffs), 1)[0]
    assert abs(slope - 1.0) <= 0.1


def test_linearization_gauge_direction():
    """A diffeomorphism direction on Einstein data is in the kernel of the
    analytic linearization."""
    sm = rotating_minkowski_stationary(nr=81, nphi=24)
    grid = sm.grid
    rho, phi = grid.mesh()
    bump = np.exp(-((rho - 1.2) / 0.25) ** 2)
    X = vector_field(grid, np.stack([bump, 0.3 * bump * np.sin(phi)], axis=-1))
    pert = stn.lie_perturbation(sm, X)
    lin = stn.linearized_reduced_residuals(sm, pert)
    # scale of the data entering the linearization
    assert lin.max_norm() < 5e-3
    # and shrinks under refinement (pure truncation error)
    sm2 = rotating_minkowski_stationary(nr=161, nphi=24)
    rho2, phi2 = sm2.grid.mesh()
    bump2 = np.exp(-((rho2 - 1.2) / 0.25) ** 2)
    X2 = vector_field(sm2.grid, np.stack([bump2, 0.3 * bump2 * np.sin(phi2)], axis=-1))
    lin2 = stn.linearized_reduced_residuals(sm2, stn.lie_perturbation(sm2, X2))
    assert lin2.max_norm() < lin.max_norm() / 8


def test_perturbed_lapse_guard(rng):
    sm = random_twisted_data(rng)
    pert = stn.Perturbation(-np.full(sm.grid.shape, 10.0),
                            one_form(sm.grid, sm.grid.zeros(2)),
                            sym2_field(sm.grid, sm.grid.zeros(2, 2)))
    with pytest.raises(stn.StationaryError):
        stn.perturbed(sm, pert, 1.0)
