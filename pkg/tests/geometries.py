"""Closed-form geometries shared across the test suite.

Each builder returns grid-sampled data for an exactly known metric; the
expected curvature values quoted in the tests are the classical closed
forms for these metrics.
"""

import numpy as np

from statvac.fields import MetricField, one_form
from statvac.foliation import AH, FINITE, RadialFoliation
from statvac.grid import ChartGrid, interval_axis, periodic_axis
from statvac.stationary import StationaryMetric


def flat_torus(n=3, nodes=12, fd_order=4):
    grid = ChartGrid(tuple(periodic_axis(f"x{i}", nodes) for i in range(n)),
                     fd_order=fd_order)
    comps = np.zeros(grid.shape + (n, n))
    for i in range(n):
        comps[..., i, i] = 1.0
    return grid, MetricField(grid, comps)


def hyperbolic_metric(n=3, nr=33, nb=12, r_max=1.2, fd_order=4):
    """g = dr^2 + e^{2r} delta; Ric = -(n-1) g."""
    axes = (interval_axis("r", 0.0, r_max, nr, radial=True),)
    axes += tuple(periodic_axis(f"y{i}", nb) for i in range(n - 1))
    grid = ChartGrid(axes, fd_order=fd_order)
    r = grid.mesh()[0]
    comps = np.zeros(grid.shape + (n, n))
    comps[..., 0, 0] = 1.0
    for i in range(1, n):
        comps[..., i, i] = np.exp(2 * r)
    return grid, MetricField(grid, comps)


def round_sphere(ntheta=49, nphi=24, theta_margin=0.35, fd_order=4):
    """Unit round 2-sphere away from the poles; Ric = metric."""
    grid = ChartGrid((interval_axis("theta", theta_margin, np.pi - theta_margin,
                                    ntheta),
                      periodic_axis("phi", nphi)), fd_order=fd_order)
    th = grid.mesh()[0]
    comps = np.zeros(grid.shape + (2, 2))
    comps[..., 0, 0] = 1.0
    comps[..., 1, 1] = np.sin(th) ** 2
    return grid, MetricField(grid, comps)


def random_periodic_metric(rng, n=2, nodes=16, amplitude=0.15, fd_order=4):
    """Smooth band-limited positive-definite metric on a torus."""
    grid = ChartGrid(tuple(periodic_axis(f"x{i}", nodes) for i in range(n)),
                     fd_order=fd_order)
    mesh = grid.mesh()

    def smooth():
        out = np.zeros(grid.shape)
        for m in mesh:
            out = out + rng.uniform(-1, 1) * np.sin(m + rng.uniform(0, 2 * np.pi))
        for i in range(n):
            for j in range(i + 1, n):
                out = out + rng.uniform(-1, 1) * np.sin(
                    mesh[i] + mesh[j] + rng.uniform(0, 2 * np.pi))
        return out

    comps = np.zeros(grid.shape + (n, n))
    for i in range(n):
        comps[..., i, i] = 1.5 + amplitude * smooth()
        for j in range(i + 1, n):
            comps[..., i, j] = comps[..., j, i] = 0.5 * amplitude * smooth()
    return grid, MetricField(grid, comps)


def minkowski_stationary(nodes=12, n=3, fd_order=4):
    grid, m = flat_torus(n, nodes, fd_order)
    return StationaryMetric(np.ones(grid.shape), one_form(grid, grid.zeros(n)),
                            m, 0.0)


def ads_stationary(n=3, nr=33, nb=12, r_max=1.2, fd_order=4):
    """V = e^r, theta = 0, g+ hyperbolic, Lambda = -n(n-1)/2."""
    grid, m = hyperbolic_metric(n, nr, nb, r_max, fd_order)
    r = grid.mesh()[0]
    return StationaryMetric(np.exp(r), one_form(grid, grid.zeros(n)), m,
                            cosmological=-0.5 * n * (n - 1))


def schwarzschild_stationary(mass=1.0, nr=49, ntheta=33, nphi=16,
                             rho_range=(3.0, 8.0), fd_order=4):
    """Exterior Schwarzschild, n = 3, Lambda = 0:
    V^2 = 1 - 2m/rho, g+ = V^-2 d rho^2 + rho^2 dOmega^2."""
    grid = ChartGrid((
        interval_axis("rho", rho_range[0], rho_range[1], nr),
        interval_axis("theta", 0.5, np.pi - 0.5, ntheta),
        periodic_axis("phi", nphi),
    ), fd_order=fd_order)
    rho, th, _ = grid.mesh()
    v2 = 1.0 - 2.0 * mass / rho
    comps = np.zeros(grid.shape + (3, 3))
    comps[..., 0, 0] = 1.0 / v2
    comps[..., 1, 1] = rho**2
    comps[..., 2, 2] = rho**2 * np.sin(th) ** 2
    m = MetricField(grid, comps)
    return StationaryMetric(np.sqrt(v2), one_form(grid, grid.zeros(3)), m, 0.0)


def rotating_minkowski_stationary(omega=0.2, nr=41, nphi=16,
                                  rho_range=(0.5, 2.0), fd_order=4):
    """Minkowski in rotating coordinates: exact stationary Einstein data
    with twist (n = 2)."""
    grid = ChartGrid((interval_axis("rho", rho_range[0], rho_range[1], nr),
                      periodic_axis("phi", nphi)), fd_order=fd_order)
    rho = grid.mesh()[0]
    v2 = 1.0 - omega**2 * rho**2
    th = np.zeros(grid.shape + (2,))
    th[..., 1] = -omega * rho**2 / v2
    comps = np.zeros(grid.shape + (2, 2))
    comps[..., 0, 0] = 1.0
    comps[..., 1, 1] = rho**2 / v2
    return StationaryMetric(np.sqrt(v2), one_form(grid, th),
                            MetricField(grid, comps), 0.0)


def ads_foliation(n=3, nr=41, nb=12, r_max=1.2, fd_order=4):
    boundary = ChartGrid(tuple(periodic_axis(f"y{i}", nb) for i in range(n - 1)),
                         fd_order=fd_order)
    radial = interval_axis("r", 0.0, r_max, nr, radial=True)
    r = radial.coords.reshape((-1,) + (1,) * (n - 1))
    shape = (nr,) + boundary.shape
    g = np.zeros(shape + (n - 1, n - 1))
    for i in range(n - 1):
        g[..., i, i] = np.exp(2 * r)
    return RadialFoliation(radial, boundary, g,
                           V=np.exp(r) * np.ones(shape),
                           xi=np.zeros(shape + (n - 1,)),
                           cosmological=-0.5 * n * (n - 1), flavor=AH)


def flat_ball_foliation(radius=1.0, depth=0.4, nr=65, nb=64, fd_order=4):
    """Flat disk (n = 2): boundary circle of the given radius, x = inward
    distance, g(x) = (R - x)^2 dphi^2."""
    boundary = ChartGrid((periodic_axis("phi", nb),), fd_order=fd_order)
    radial = interval_axis("x", 0.0, depth, nr, radial=True)
    x = radial.coords.reshape(-1, 1)
    g = ((radius - x) ** 2)[..., None, None] * np.ones(
        (nr,) + boundary.shape + (1, 1))
    return RadialFoliation(radial, boundary, g, flavor=FINITE)


def flat_ball3_foliation(radius=2.0, depth=0.5, nr=49, ntheta=33, nphi=16,
                         fd_order=4):
    """Flat 3-ball boundary sphere: g(x) = (R-x)^2 (unit round sphere)."""
    boundary = ChartGrid((interval_axis("theta", 0.5, np.pi - 0.5, ntheta),
                          periodic_axis("phi", nphi)), fd_order=fd_order)
    radial = interval_axis("x", 0.0, depth, nr, radial=True)
    x = radial.coords.reshape(-1, 1, 1)
    th = boundary.mesh()[0]
    g = np.zeros((nr,) + boundary.shape + (2, 2))
    g[..., 0, 0] = (radius - x) ** 2
    g[..., 1, 1] = (radius - x) ** 2 * np.sin(th)[None] ** 2
    return RadialFoliation(radial, boundary, g, flavor=FINITE)


def rotating_minkowski_foliation(omega=0.2, nr=41, nphi=16,
                                 rho_range=(0.5, 2.0), fd_order=4):
    boundary = ChartGrid((periodic_axis("phi", nphi),), fd_order=fd_order)
    radial = interval_axis("x", rho_range[0], rho_range[1], nr, radial=True)
    rho = radial.coords.reshape(-1, 1)
    v2 = 1.0 - omega**2 * rho**2
    shape = (nr,) + boundary.shape
    g = (rho**2 / v2)[..., None, None] * np.ones(shape + (1, 1))
    xi = (-omega * rho**2 / v2)[..., None] * np.ones(shape + (1,))
    return RadialFoliation(radial, boundary, g, V=np.sqrt(v2) * np.ones(shape),
                           xi=xi, cosmological=0.0, flavor=FINITE)


def random_foliation(rng, nr=33, nb=16, fd_order=4):
    """Smooth random Riemannian foliation with 1-d slices."""
    boundary = ChartGrid((periodic_axis("y", nb),), fd_order=fd_order)
    radial = interval_axis("x", 0.0, 1.0, nr, radial=True)
    x = radial.coords.reshape(-1, 1)
    y = boundary.mesh()[0]
    base = 1.5 + rng.uniform(0.1, 0.5) * np.cos(x + rng.uniform(0, 2))
    wave = rng.uniform(0.1, 0.3) * np.sin(
        rng.integers(1, 3) * y + rng.uniform(0, 2 * np.pi))
    g = (base + wave[None, :] * np.exp(-x)) ** 2
    return RadialFoliation(radial, boundary, g[..., None, None])
