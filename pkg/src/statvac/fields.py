"""Grid-sampled tensor fields and metrics.

Component arrays carry the grid axes first and the tensor index axes last,
contravariant slots before covariant ones.  A rank-(1,2) field ``T`` is
stored as ``T.comps[..., k, i, j]`` meaning ``T^k_{ij}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import ChartGrid, GridError

RIEMANNIAN = "riemannian"
LORENTZIAN = "lorentzian"


class FieldError(ValueError):
    pass


class SingularMetricError(FieldError):
    def __init__(self, node_index, det_value):
        self.node_index = tuple(int(i) for i in node_index)
        self.det_value = float(det_value)
        super().__init__(
            f"metric singular at node {self.node_index}: det = {self.det_value:.3e}"
        )


@dataclass
class TensorField:
    """Covariant rank ``p`` / contravariant rank ``q`` tensor on a chart."""

    grid: ChartGrid
    p: int
    q: int
    comps: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        want = self.grid.shape + (self.grid.dim,) * (self.q + self.p)
        self.comps = np.asarray(self.comps, dtype=float)
        if self.comps.shape != want:
            raise FieldError(
                f"component shape {self.comps.shape} != expected {want}"
            )
        if self.symmetric:
            if self.p < 2:
                raise FieldError("symmetric flag requires a covariant pair")
            err = symmetry_defect(self.comps)
            scale = np.max(np.abs(self.comps)) + 1e-300
            if err > 1e-9 * scale:
                raise FieldError(
                    f"declared symmetric but asymmetry {err:.3e} exceeds tolerance"
                )

    @property
    def rank(self) -> tuple[int, int]:
        return (self.p, self.q)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.comps)))

    def __add__(self, other: "TensorField") -> "TensorField":
        self._check_compatible(other)
        return TensorField(self.grid, self.p, self.q, self.comps + other.comps,
                           self.symmetric and other.symmetric)

    def __sub__(self, other: "TensorField") -> "TensorField":
        self._check_compatible(other)
        return TensorField(self.grid, self.p, self.q, self.comps - other.comps,
                           self.symmetric and other.symmetric)

    def __mul__(self, scalar) -> "TensorField":
        fac = np.asarray(scalar, dtype=float)
        if fac.ndim:  # pointwise scalar field: broadcast over index axes
            fac = fac.reshape(fac.shape + (1,) * (self.p + self.q))
        return TensorField(self.grid, self.p, self.q, self.comps * fac, self.symmetric)

    __rmul__ = __mul__

    def _check_compatible(self, other):
        if self.grid is not other.grid and self.grid != other.grid:
            raise FieldError("tensor fields live on different charts")
        if (self.p, self.q) != (other.p, other.q):
            raise FieldError("rank mismatch")


def symmetry_defect(comps: np.ndarray) -> float:
    """Max asymmetry of the final covariant pair."""
    return float(np.max(np.abs(comps - np.swapaxes(comps, -1, -2))))


def scalar_field(grid: ChartGrid, values) -> TensorField:
    return TensorField(grid, 0, 0, np.broadcast_to(np.asarray(values, float), grid.shape).copy())


def one_form(grid: ChartGrid, comps) -> TensorField:
    return TensorField(grid, 1, 0, comps)


def vector_field(grid: ChartGrid, comps) -> TensorField:
    return TensorField(grid, 0, 1, comps)


def sym2_field(grid: ChartGrid, comps) -> TensorField:
    return TensorField(grid, 2, 0, comps, symmetric=True)


def symmetrize(comps: np.ndarray) -> np.ndarray:
    return 0.5 * (comps + np.swapaxes(comps, -1, -2))


class MetricField:
    """Symmetric rank-2 field with signature tag, cached inverse and
    determinant at every node."""

    def __init__(self, grid: ChartGrid, comps: np.ndarray, signature: str = RIEMANNIAN,
                 det_tol: float = 1e-12, validate_signature: bool = True):
        if signature not in (RIEMANNIAN, LORENTZIAN):
            raise FieldError(f"unknown signature {signature!r}")
        self.grid = grid
        self.signature = signature
        self.field = sym2_field(grid, symmetrize(np.asarray(comps, dtype=float)))
        self.comps = self.field.comps
        self.det = np.linalg.det(self.comps)
        bad = np.abs(self.det) < det_tol
        if np.any(bad):
            idx = np.argwhere(bad)[0]
            raise SingularMetricError(idx, self.det[tuple(idx)])
        self.inv = np.linalg.inv(self.comps)
        if validate_signature:
            self._check_signature()

    def _check_signature(self):
        eigs = np.linalg.eigvalsh(self.comps)
        neg = np.sum(eigs < 0, axis=-1)
        want = 0 if self.signature == RIEMANNIAN else 1
        if np.any(neg != want):
            raise FieldError(
                f"eigenvalue signs do not match declared {self.signature} signature"
            )

    @property
    def dim(self) -> int:
        return self.grid.dim

    def volume_density(self) -> np.ndarray:
        return np.sqrt(np.abs(self.det))

    def as_tensor(self) -> TensorField:
        return self.field


# ---------------------------------------------------------------------------
# pointwise algebra
# ---------------------------------------------------------------------------

def raise_form(m: MetricField, omega: np.ndarray) -> np.ndarray:
    """omega^i = g^{ij} omega_j."""
    return np.einsum("...ij,...j->...i", m.inv, omega)


def lower_vector(m: MetricField, vec: np.ndarray) -> np.ndarray:
    return np.einsum("...ij,...j->...i", m.comps, vec)


def raise_sym2(m: MetricField, h: np.ndarray) -> np.ndarray:
    """h^{ij} = g^{ik} g^{jl} h_{kl}."""
    return np.einsum("...ik,...jl,...kl->...ij", m.inv, m.inv, h)


def trace_g(m: MetricField, h: np.ndarray) -> np.ndarray:
    return np.einsum("...ij,...ij->...", m.inv, h)


def inner(m: MetricField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full metric contraction of two covariant tensors of equal rank."""
    rank = a.ndim - len(m.grid.shape)
    if rank != b.ndim - len(m.grid.shape):
        raise FieldError("rank mismatch in inner product")
    letters = "abcdefgh"[:rank]
    letters2 = "stuvwxyz"[:rank]
    invs = ",".join(f"...{x}{y}" for x, y in zip(letters, letters2))
    spec = f"...{letters},{invs},...{letters2}->..."
    return np.einsum(spec, a, *([m.inv] * rank), b)


def norm2(m: MetricField, a: np.ndarray) -> np.ndarray:
    return inner(m, a, a)


def compose(m: MetricField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(a o b)_ij = g^{kl} a_ik b_jl.

    For symmetric arguments this is the index-raised matrix product; the
    convention on antisymmetric arguments is pinned by the requirement that
    trace_g(compose(m, w, w)) equals the full contraction |w|^2.
    """
    from .backend import compose_sym_core

    flat = m.grid.size
    n = m.dim
    out = compose_sym_core(
        m.inv.reshape(flat, n, n), a.reshape(flat, n, n), b.reshape(flat, n, n)
    )
    return out.reshape(m.grid.shape + (n, n))


def l2_inner(m: MetricField, a: np.ndarray, b: np.ndarray) -> float:
    """Discrete L2 pairing with the metric volume element."""
    return m.grid.integrate(inner(m, a, b) * m.volume_density())
