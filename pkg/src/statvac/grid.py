"""Coordinate charts and differentiation on structured grids.

A :class:`ChartGrid` is a tensor-product chart.  Every grid axis is either
periodic (differentiated spectrally via the FFT) or an interval
(differentiated with centered finite differences of configurable even order,
one-sided stencils of the same order at the endpoints).

In addition to the sampled axes a chart may declare *fiber* directions:
coordinate directions along which every field is constant by construction
(a time translation ``t``, an axisymmetry angle ``phi``).  Fibers contribute
index range to tensors but carry no nodes; partial derivatives along them
are identically zero.  This is how stationary space-time metrics are
represented without a ``t`` axis.

One grid axis may be tagged ``radial``; its coordinate name must be ``r``,
``x`` or ``rho``.  For a ``rho`` axis the outward coordinate ``r = -ln(rho)``
is exposed for weighting purposes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

RADIAL_NAMES = ("r", "x", "rho")


class GridError(ValueError):
    pass


def fd_weights(z: float, x: np.ndarray, m: int) -> np.ndarray:
    """Finite-difference weights for the m-th derivative at z from nodes x.

    Fornberg's recursive algorithm; exact for polynomials up to degree
    len(x)-1.
    """
    n = len(x)
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


@lru_cache(maxsize=128)
def _fd_matrix(size: int, spacing: float, deriv: int, order: int) -> np.ndarray:
    """Dense differentiation matrix for an interval axis."""
    x = np.arange(size) * spacing
    interior = order + deriv
    if interior % 2 == 0:
        interior += 1
    boundary = order + deriv
    half = interior // 2
    d = np.zeros((size, size))
    for i in range(size):
        if i < half:
            lo, hi = 0, min(boundary, size)
        elif i >= size - half:
            lo, hi = max(0, size - boundary), size
        else:
            lo, hi = i - half, i + half + 1
        d[i, lo:hi] = fd_weights(x[i], x[lo:hi], deriv)
    return d


@dataclass(frozen=True)
class Axis:
    """One sampled coordinate axis of a chart."""

    name: str
    size: int
    spacing: float
    periodic: bool = False
    start: float = 0.0
    radial: bool = False

    def __post_init__(self):
        if self.size < 5:
            raise GridError(f"axis {self.name!r}: need >= 5 nodes, got {self.size}")
        if self.spacing <= 0:
            raise GridError(f"axis {self.name!r}: spacing must be positive")
        if self.radial and self.name not in RADIAL_NAMES:
            raise GridError(
                f"radial axis must be named one of {RADIAL_NAMES}, got {self.name!r}"
            )

    @property
    def coords(self) -> np.ndarray:
        return self.start + self.spacing * np.arange(self.size)

    @property
    def length(self) -> float:
        # full period for periodic axes, node span for intervals
        if self.periodic:
            return self.size * self.spacing
        return (self.size - 1) * self.spacing


def interval_axis(name, lo, hi, size, radial=False) -> Axis:
    return Axis(name, size, (hi - lo) / (size - 1), periodic=False, start=lo,
                radial=radial)


def periodic_axis(name, size, period=2 * np.pi, start=0.0) -> Axis:
    return Axis(name, size, period / size, periodic=True, start=start)


@dataclass(frozen=True)
class ChartGrid:
    """Tensor-product chart: fiber directions followed by sampled axes.

    The index dimension of tensors on the chart is
    ``len(fibers) + len(axes)``; fibers occupy the leading index positions.
    """

    axes: tuple[Axis, ...]
    fibers: tuple[str, ...] = ()
    fd_order: int = 4

    def __post_init__(self):
        # charts of the main manifold have dim >= 2; boundary charts of a
        # 2-dimensional manifold are legitimately 1-dimensional
        if self.dim < 1:
            raise GridError("chart dimension must be >= 1")
        if self.fd_order % 2 or self.fd_order < 2:
            raise GridError("fd_order must be a positive even integer")
        radial = [a for a in self.axes if a.radial]
        if len(radial) > 1:
            raise GridError("at most one axis may carry the radial tag")
        names = [a.name for a in self.axes] + list(self.fibers)
        if len(set(names)) != len(names):
            raise GridError("duplicate coordinate names")

    # -- layout ------------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.fibers) + len(self.axes)

    @property
    def nfib(self) -> int:
        return len(self.fibers)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.fibers) + tuple(a.name for a in self.axes)

    @property
    def radial_axis(self) -> int | None:
        """Position of the radial axis among grid axes, or None."""
        for i, a in enumerate(self.axes):
            if a.radial:
                return i
        return None

    @property
    def radial_direction(self) -> int | None:
        """Index direction of the radial axis (fibers included), or None."""
        i = self.radial_axis
        return None if i is None else self.nfib + i

    def radial_coords(self) -> np.ndarray:
        i = self.radial_axis
        if i is None:
            raise GridError("chart has no radial axis")
        return self.axes[i].coords

    def radial_r_values(self) -> np.ndarray:
        """Outward coordinate along the radial axis; r = -ln(rho) on rho axes."""
        i = self.radial_axis
        if i is None:
            raise GridError("chart has no radial axis")
        c = self.axes[i].coords
        return -np.log(c) if self.axes[i].name == "rho" else c

    def mesh(self) -> list[np.ndarray]:
        return list(np.meshgrid(*(a.coords for a in self.axes), indexing="ij"))

    def sample(self, func) -> np.ndarray:
        """Evaluate func(*coordinate_arrays) on the grid."""
        out = func(*self.mesh())
        return np.broadcast_to(np.asarray(out, dtype=float), self.shape).copy()

    def zeros(self, *index_shape: int) -> np.ndarray:
        return np.zeros(self.shape + tuple(index_shape))

    # -- differentiation ----------------------------------------------------

    def _apply_matrix(self, values: np.ndarray, axis_pos: int, mat: np.ndarray):
        moved = np.moveaxis(values, axis_pos, 0)
        flat = moved.reshape(moved.shape[0], -1)
        res = mat @ flat
        return np.moveaxis(res.reshape(moved.shape), 0, axis_pos)

    def _spectral(self, values: np.ndarray, axis_pos: int, deriv: int):
        ax = self.axes[axis_pos]
        k = 2.0 * np.pi * np.fft.rfftfreq(ax.size, d=ax.spacing)
        moved = np.moveaxis(values, axis_pos, -1)
        spec = np.fft.rfft(moved, axis=-1)
        if deriv == 1:
            mult = 1j * k
            if ax.size % 2 == 0:
                mult[-1] = 0.0  # odd-derivative Nyquist mode is not resolved
        else:
            mult = -(k**2)
        spec *= mult
        out = np.fft.irfft(spec, n=ax.size, axis=-1)
        return np.moveaxis(out, -1, axis_pos)

    def partial(self, values: np.ndarray, direction: int) -> np.ndarray:
        """First partial derivative along an index direction.

        ``values`` has the grid shape followed by any number of component
        axes.  Directions below ``nfib`` are fibers and return zeros.
        """
        if direction < self.nfib:
            return np.zeros_like(values)
        pos = direction - self.nfib
        ax = self.axes[pos]
        if ax.periodic:
            return self._spectral(values, pos, 1)
        return self._apply_matrix(values, pos, _fd_matrix(ax.size, ax.spacing, 1, self.fd_order))

    def partial2(self, values: np.ndarray, d1: int, d2: int) -> np.ndarray:
        """Second partial derivative; same-axis case uses a dedicated stencil."""
        if d1 > d2:
            d1, d2 = d2, d1
        if d1 < self.nfib:
            return np.zeros_like(values)
        if d1 != d2:
            return self.partial(self.partial(values, d1), d2)
        pos = d1 - self.nfib
        ax = self.axes[pos]
        if ax.periodic:
            return self._spectral(values, pos, 2)
        return self._apply_matrix(values, pos, _fd_matrix(ax.size, ax.spacing, 2, self.fd_order))

    def gradient_stack(self, values: np.ndarray) -> np.ndarray:
        """All first partials, stacked on a new axis right after the grid axes."""
        outs = [self.partial(values, d) for d in range(self.dim)]
        return np.stack(outs, axis=len(self.shape))

    # -- quadrature and refinement -------------------------------------------

    def axis_quad_weights(self, axis_pos: int) -> np.ndarray:
        """Integration weights along one axis (trapezoid-exact on periodic
        axes, composite Simpson on odd-sized intervals)."""
        ax = self.axes[axis_pos]
        if ax.periodic:
            return np.full(ax.size, ax.spacing)
        w = np.zeros(ax.size)
        n = ax.size if ax.size % 2 == 1 else ax.size - 1
        w[0:n][0::2] += 2.0
        w[0:n][1::2] += 4.0
        w[0] = 1.0
        w[n - 1] = 1.0
        w[:n] *= ax.spacing / 3.0
        if n != ax.size:  # even node count: trapezoid on the last cell
            w[-1] += ax.spacing / 2.0
            w[-2] += ax.spacing / 2.0
        return w

    def quad_weights(self) -> np.ndarray:
        """Tensor-product quadrature weights over the whole grid."""
        w = np.ones(self.shape)
        for i in range(len(self.axes)):
            shape = [1] * len(self.axes)
            shape[i] = self.axes[i].size
            w = w * self.axis_quad_weights(i).reshape(shape)
        return w

    def integrate(self, values: np.ndarray) -> float:
        return float(np.sum(values * self.quad_weights()))

    def can_coarsen(self) -> bool:
        for a in self.axes:
            if a.periodic and a.size % 2:
                return False
            if not a.periodic and a.size % 2 == 0:
                return False
        return True

    def coarsen(self) -> "ChartGrid":
        """Chart with every other node dropped (periodic: even sizes,
        intervals: odd sizes so endpoints are kept)."""
        if not self.can_coarsen():
            raise GridError("grid sizes do not admit 2:1 coarsening")
        new_axes = []
        for a in self.axes:
            size = a.size // 2 if a.periodic else (a.size - 1) // 2 + 1
            new_axes.append(Axis(a.name, size, 2 * a.spacing, a.periodic, a.start, a.radial))
        return ChartGrid(tuple(new_axes), self.fibers, self.fd_order)

    def restrict(self, values: np.ndarray) -> np.ndarray:
        """Sample a field on the 2:1 coarsened grid."""
        sl = tuple(slice(None, None, 2) for _ in self.axes)
        return values[sl + (Ellipsis,)]


def truncation_estimate(fine: float, coarse: float, order: int) -> float:
    """Richardson truncation-error estimate for a norm computed at spacing h
    (``fine``) and 2h (``coarse``)."""
    return abs(coarse - fine) / (2**order - 1)


def truncation_tolerance(fine: float, coarse: float, order: int,
                         floor: float = 1e-13) -> float:
    """Grid-dependent meaning of 'zero': 10x the Richardson estimate."""
    return 10.0 * max(truncation_estimate(fine, coarse, order), floor)
