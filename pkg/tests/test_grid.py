import numpy as np
import pytest

from statvac.grid import (
    Axis,
    ChartGrid,
    GridError,
    fd_weights,
    interval_axis,
    periodic_axis,
    truncation_estimate,
    truncation_tolerance,
)


def test_axis_validation():
    with pytest.raises(GridError):
        Axis("x", 4, 0.1)  # too few nodes
    with pytest.raises(GridError):
        Axis("x", 8, -0.1)
    with pytest.raises(GridError):
        Axis("q", 8, 0.1, radial=True)  # radial name must be r/x/rho
    Axis("rho", 8, 0.1, radial=True)


def test_chart_validation():
    with pytest.raises(GridError):
        ChartGrid((interval_axis("r", 0, 1, 9, radial=True),
                   interval_axis("x", 0, 1, 9, radial=True)))
    with pytest.raises(GridError):
        ChartGrid((periodic_axis("x", 8), periodic_axis("x", 8)))
    with pytest.raises(GridError):
        ChartGrid((periodic_axis("x", 8),), fd_order=3)


def test_radial_tags():
    g = ChartGrid((interval_axis("rho", 0.1, 0.9, 9, radial=True),
                   periodic_axis("y", 8)))
    assert g.radial_axis == 0
    assert g.radial_direction == 0
    np.testing.assert_allclose(g.radial_r_values(), -np.log(g.radial_coords()))
    g2 = ChartGrid((interval_axis("r", 0.0, 1.0, 9, radial=True),
                    periodic_axis("y", 8)), fibers=("t",))
    assert g2.radial_direction == 1  # fiber occupies direction 0


def test_fd_weights_exactness():
    # exact for polynomials up to the stencil degree
    x = np.linspace(0, 1, 6)
    w = fd_weights(0.37, x, 1)
    for p in range(6):
        deriv = np.dot(w, x**p)
        assert deriv == pytest.approx(p * 0.37 ** max(p - 1, 0), abs=1e-10)


@pytest.mark.parametrize("order", [2, 4, 6])
def test_interval_derivative_convergence(order):
    def err(nodes):
        g = ChartGrid((interval_axis("x", 0, 1, nodes),
                       periodic_axis("y", 8)), fd_order=order)
        x = g.mesh()[0]
        d = g.partial(np.exp(2 * x), 1 if False else 0)
        return np.max(np.abs(d - 2 * np.exp(2 * x)))

    ratio = err(33) / err(65)
    assert 0.8 * 2**order <= ratio <= 1.25 * 2**order


def test_second_derivative_stencil():
    g = ChartGrid((interval_axis("x", 0, 1, 65), periodic_axis("y", 8)))
    x = g.mesh()[0]
    d2 = g.partial2(np.sin(3 * x), 0, 0)
    assert np.max(np.abs(d2 + 9 * np.sin(3 * x))) < 2e-5


def test_spectral_derivative_exact():
    g = ChartGrid((periodic_axis("x", 16), periodic_axis("y", 16)))
    x, y = g.mesh()
    f = np.sin(2 * x) * np.cos(y)
    dx = g.partial(f, 0)
    assert np.max(np.abs(dx - 2 * np.cos(2 * x) * np.cos(y))) < 1e-12
    d2 = g.partial2(f, 1, 1)
    assert np.max(np.abs(d2 + f)) < 1e-12


def test_fiber_derivative_is_zero():
    g = ChartGrid((periodic_axis("x", 8),), fibers=("t", "phi"))
    f = np.sin(g.mesh()[0])
    assert np.array_equal(g.partial(f, 0), np.zeros_like(f))
    assert np.array_equal(g.partial(f, 1), np.zeros_like(f))
    assert np.max(np.abs(g.partial(f, 2) - np.cos(g.mesh()[0]))) < 1e-12


def test_mixed_partial_commutes():
    g = ChartGrid((interval_axis("x", 0, 1, 17), interval_axis("z", 0, 1, 17)))
    x, z = g.mesh()
    f = np.exp(x) * np.sin(z)
    assert np.allclose(g.partial2(f, 0, 1), g.partial2(f, 1, 0))


def test_quadrature_periodic_exact():
    g = ChartGrid((periodic_axis("x", 16), periodic_axis("y", 16)))
    x, y = g.mesh()
    val = g.integrate(np.sin(x) ** 2)
    assert val == pytest.approx(0.5 * (2 * np.pi) ** 2, rel=1e-12)


def test_quadrature_interval_simpson():
    g = ChartGrid((interval_axis("x", 0, 1, 33), periodic_axis("y", 8)))
    x = g.mesh()[0]
    val = g.integrate(np.exp(x)) / (2 * np.pi)
    assert val == pytest.approx(np.e - 1, rel=1e-7)


def test_coarsen_roundtrip():
    g = ChartGrid((interval_axis("x", 0, 1, 17), periodic_axis("y", 16)))
    coarse = g.coarsen()
    assert coarse.shape == (9, 8)
    x = g.mesh()[0]
    restricted = g.restrict(np.sin(x))
    assert restricted.shape == (9, 8)
    np.testing.assert_allclose(restricted, np.sin(coarse.mesh()[0]))


def test_truncation_estimate():
    # error behaving like C h^p: estimate reproduces the fine-grid error
    fine, coarse = 1.0, 2.0**4
    est = truncation_estimate(fine, coarse, 4)
    assert est == pytest.approx(1.0)
    assert truncation_tolerance(fine, coarse, 4) == pytest.approx(10.0)
