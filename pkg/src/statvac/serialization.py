"""Columnar text serialization of charts, fields and experiment inputs.

Every file is line oriented.  A chart header lists fiber and axis
declarations, tensor blocks follow with one row per grid node containing
the node coordinates and the tensor components.  All floating-point values
are written as IEEE-754 hexadecimal literals (``float.hex``), so files
round-trip bit exactly.

Grammar (# starts a comment, blank lines ignored)::

    statvac <kind> v1
    fiber <name>
    axis <name> <periodic|interval> <size> <spacing-hex> <start-hex> [radial]
    fd_order <int>
    scalar <key> <hex-or-literal>        # file-level metadata
    tensor <name> p=<int> q=<int> sym=<0|1>
    <row of hex floats>                  # size = n_coords + n_components
    ...
    slice <index> coord=<hex>            # foliation files: per-slice tables

Rows are emitted in C raster order over the grid nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import LORENTZIAN, RIEMANNIAN, MetricField, TensorField, one_form
from .grid import Axis, ChartGrid


class FormatError(ValueError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, path, lineno, message):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


def _hex(x: float) -> str:
    return float(x).hex()


def _parse_float(tok: str, path, lineno) -> float:
    try:
        return float.fromhex(tok) if ("x" in tok or "X" in tok) else float(tok)
    except ValueError:
        raise FormatError(path, lineno, f"bad float literal {tok!r}") from None


class _Lines:
    def __init__(self, path):
        self.path = path
        with open(path, "r", encoding="ascii") as fh:
            raw = fh.readlines()
        self.items = []
        for i, line in enumerate(raw, start=1):
            stripped = line.split("#", 1)[0].strip()
            if stripped:
                self.items.append((i, stripped))
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else (None, None)

    def next(self):
        item = self.peek()
        if item[0] is None:
            raise FormatError(self.path, 0, "unexpected end of file")
        self.pos += 1
        return item

    def expect(self, keyword: str):
        lineno, line = self.next()
        if not line.startswith(keyword):
            raise FormatError(self.path, lineno, f"expected {keyword!r}, got {line!r}")
        return lineno, line


def write_chart(fh, grid: ChartGrid):
    for name in grid.fibers:
        fh.write(f"fiber {name}\n")
    for ax in grid.axes:
        kind = "periodic" if ax.periodic else "interval"
        tag = " radial" if ax.radial else ""
        fh.write(f"axis {ax.name} {kind} {ax.size} {_hex(ax.spacing)} "
                 f"{_hex(ax.start)}{tag}\n")
    fh.write(f"fd_order {grid.fd_order}\n")


def read_chart(lines: _Lines) -> ChartGrid:
    fibers = []
    axes = []
    fd_order = 4
    while True:
        lineno, line = lines.peek()
        if line is None:
            break
        toks = line.split()
        if toks[0] == "fiber":
            lines.next()
            fibers.append(toks[1])
        elif toks[0] == "axis":
            lines.next()
            if len(toks) < 6:
                raise FormatError(lines.path, lineno, "axis line needs 6+ fields")
            axes.append(Axis(
                toks[1], int(toks[3]),
                _parse_float(toks[4], lines.path, lineno),
                periodic=(toks[2] == "periodic"),
                start=_parse_float(toks[5], lines.path, lineno),
                radial=("radial" in toks[6:]),
            ))
        elif toks[0] == "fd_order":
            lines.next()
            fd_order = int(toks[1])
        else:
            break
    return ChartGrid(tuple(axes), tuple(fibers), fd_order)


def _write_rows(fh, grid: ChartGrid, arrays: list[np.ndarray]):
    """One row per node: coordinates then the flattened components of each
    array, in C raster order."""
    mesh = grid.mesh()
    ncomp = [int(np.prod(a.shape[len(grid.shape):], dtype=int)) for a in arrays]
    flat = [a.reshape(grid.size, n) for a, n in zip(arrays, ncomp)]
    coords = np.stack([m.reshape(grid.size) for m in mesh], axis=1) if mesh else \
        np.zeros((grid.size, 0))
    for row in range(grid.size):
        toks = [_hex(c) for c in coords[row]]
        for f in flat:
            toks.extend(_hex(v) for v in f[row])
        fh.write(" ".join(toks) + "\n")


def _read_rows(lines: _Lines, grid: ChartGrid, comp_counts: list[int]):
    ncoord = len(grid.axes)
    total = ncoord + sum(comp_counts)
    data = np.empty((grid.size, total))
    for row in range(grid.size):
        lineno, line = lines.next()
        toks = line.split()
        if len(toks) != total:
            raise FormatError(lines.path, lineno,
                              f"expected {total} columns, got {len(toks)}")
        data[row] = [_parse_float(t, lines.path, lineno) for t in toks]
    out = []
    offset = ncoord
    for n in comp_counts:
        out.append(data[:, offset:offset + n])
        offset += n
    return out


def write_tensor_block(fh, grid: ChartGrid, name: str, t: TensorField):
    fh.write(f"tensor {name} p={t.p} q={t.q} sym={1 if t.symmetric else 0}\n")
    _write_rows(fh, grid, [t.comps])


def read_tensor_block(lines: _Lines, grid: ChartGrid) -> tuple[str, TensorField]:
    lineno, line = lines.expect("tensor")
    toks = line.split()
    name = toks[1]
    kv = dict(tok.split("=") for tok in toks[2:])
    p, q, sym = int(kv["p"]), int(kv["q"]), kv.get("sym", "0") == "1"
    rank = p + q
    ncomp = grid.dim**rank
    (flat,) = _read_rows(lines, grid, [ncomp])
    comps = flat.reshape(grid.shape + (grid.dim,) * rank)
    return name, TensorField(grid, p, q, comps, symmetric=sym)


# ---------------------------------------------------------------------------
# whole-file formats
# ---------------------------------------------------------------------------

def save_tensor(path, t: TensorField, name: str = "field"):
    with open(path, "w", encoding="ascii") as fh:
        fh.write("statvac tensor v1\n")
        write_chart(fh, t.grid)
        write_tensor_block(fh, t.grid, name, t)


def load_tensor(path) -> TensorField:
    lines = _Lines(path)
    lineno, line = lines.expect("statvac")
    if "tensor" not in line:
        raise FormatError(path, lineno, "not a tensor file")
    grid = read_chart(lines)
    _, t = read_tensor_block(lines, grid)
    return t


def save_stationary(path, sm) -> None:
    from .stationary import StationaryMetric

    assert isinstance(sm, StationaryMetric)
    grid = sm.grid
    with open(path, "w", encoding="ascii") as fh:
        fh.write("statvac stationary v1\n")
        write_chart(fh, grid)
        fh.write(f"scalar lambda {_hex(sm.cosmological)}\n")
        fh.write(f"scalar dim {grid.dim}\n")
        write_tensor_block(fh, grid, "lapse",
                           TensorField(grid, 0, 0, sm.lapse))
        write_tensor_block(fh, grid, "theta", sm.theta)
        write_tensor_block(fh, grid, "gplus", sm.gplus.as_tensor())


def load_stationary(path):
    from .stationary import StationaryMetric

    lines = _Lines(path)
    lineno, line = lines.expect("statvac")
    if "stationary" not in line:
        raise FormatError(path, lineno, "not a stationary-metric file")
    grid = read_chart(lines)
    meta = {}
    while True:
        lineno, line = lines.peek()
        if line is None or not line.startswith("scalar"):
            break
        lines.next()
        toks = line.split()
        meta[toks[1]] = _parse_float(toks[2], path, lineno)
    blocks = {}
    for _ in range(3):
        name, t = read_tensor_block(lines, grid)
        blocks[name] = t
    for needed in ("lapse", "theta", "gplus"):
        if needed not in blocks:
            raise FormatError(path, 0, f"missing tensor block {needed!r}")
    return StationaryMetric(
        blocks["lapse"].comps, blocks["theta"],
        MetricField(grid, blocks["gplus"].comps),
        cosmological=meta.get("lambda", 0.0),
    )


def save_foliation(path, f) -> None:
    from .foliation import RadialFoliation

    assert isinstance(f, RadialFoliation)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("statvac foliation v1\n")
        fh.write(f"scalar lambda {_hex(f.cosmological)}\n")
        fh.write(f"scalar n {f.ambient_dim}\n")
        fh.write(f"flavor {f.flavor}\n")
        fh.write(f"signature {f.slice_signature}\n")
        fh.write(f"stationary {1 if f.V is not None else 0}\n")
        ax = f.radial
        fh.write(f"axis {ax.name} interval {ax.size} {_hex(ax.spacing)} "
                 f"{_hex(ax.start)} radial\n")
        write_chart(fh, f.boundary)
        bdim = f.bdim
        for i in range(f.nr):
            fh.write(f"slice {i} coord={_hex(f.radial.coords[i])}\n")
            arrays = []
            if f.V is not None:
                arrays.append(f.V[i])
                arrays.append(f.xi_or_zero()[i])
            arrays.append(f.g[i])
            _write_rows(fh, f.boundary, arrays)


def load_foliation(path):
    from .foliation import RadialFoliation

    lines = _Lines(path)
    lineno, line = lines.expect("statvac")
    if "foliation" not in line:
        raise FormatError(path, lineno, "not a foliation file")
    meta = {}
    flavor = "finite-distance"
    signature = RIEMANNIAN
    stationary = True
    radial = None
    while True:
        lineno, line = lines.peek()
        if line is None:
            raise FormatError(path, lineno or 0, "truncated foliation header")
        toks = line.split()
        if toks[0] == "scalar":
            lines.next()
            meta[toks[1]] = _parse_float(toks[2], path, lineno)
        elif toks[0] == "flavor":
            lines.next()
            flavor = toks[1]
        elif toks[0] == "signature":
            lines.next()
            signature = toks[1]
        elif toks[0] == "stationary":
            lines.next()
            stationary = toks[1] == "1"
        elif toks[0] == "axis" and radial is None:
            lines.next()
            radial = Axis(toks[1], int(toks[3]),
                          _parse_float(toks[4], path, lineno),
                          periodic=False,
                          start=_parse_float(toks[5], path, lineno), radial=True)
        else:
            break
    if radial is None:
        raise FormatError(path, 0, "missing radial axis declaration")
    boundary = read_chart(lines)
    bdim = boundary.dim
    nr = radial.size
    V = np.empty((nr,) + boundary.shape) if stationary else None
    xi = np.empty((nr,) + boundary.shape + (bdim,)) if stationary else None
    g = np.empty((nr,) + boundary.shape + (bdim, bdim))
    for i in range(nr):
        lineno, line = lines.expect("slice")
        counts = ([1, bdim] if stationary else []) + [bdim * bdim]
        cols = _read_rows(lines, boundary, counts)
        if stationary:
            V[i] = cols[0].reshape(boundary.shape)
            xi[i] = cols[1].reshape(boundary.shape + (bdim,))
            g[i] = cols[2].reshape(boundary.shape + (bdim, bdim))
        else:
            g[i] = cols[0].reshape(boundary.shape + (bdim, bdim))
    return RadialFoliation(radial, boundary, g, V=V, xi=xi,
                           cosmological=meta.get("lambda", 0.0), flavor=flavor,
                           slice_signature=signature)


def save_kid(path, k) -> None:
    from .kid import BoundaryKID

    assert isinstance(k, BoundaryKID)
    grid = k.boundary
    with open(path, "w", encoding="ascii") as fh:
        fh.write("statvac kid v1\n")
        write_chart(fh, grid)
        fh.write(f"scalar einstein_constant {_hex(k.einstein_constant)}\n")
        fh.write("columns alpha nu ghat pi\n")
        _write_rows(fh, grid, [k.alpha, k.nu.comps, k.metric.comps, k.second_form])


def load_kid(path):
    from .kid import BoundaryKID

    lines = _Lines(path)
    lineno, line = lines.expect("statvac")
    if "kid" not in line:
        raise FormatError(path, lineno, "not a KID file")
    grid = read_chart(lines)
    lam = 0.0
    while True:
        lineno, line = lines.peek()
        if line is None or not (line.startswith("scalar") or line.startswith("columns")):
            break
        lines.next()
        toks = line.split()
        if toks[0] == "scalar":
            lam = _parse_float(toks[2], path, lineno)
    d = grid.dim
    cols = _read_rows(lines, grid, [1, d, d * d, d * d])
    alpha = cols[0].reshape(grid.shape)
    nu = cols[1].reshape(grid.shape + (d,))
    ghat = cols[2].reshape(grid.shape + (d, d))
    pi = cols[3].reshape(grid.shape + (d, d))
    sig = LORENTZIAN if grid.nfib and grid.fibers[0] == "t" else RIEMANNIAN
    return BoundaryKID(grid, alpha, one_form(grid, nu),
                       MetricField(grid, ghat, signature=sig,
                                   validate_signature=False),
                       pi, einstein_constant=lam)


def save_fg(path, data) -> None:
    from .fg import FGData

    assert isinstance(data, FGData)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("statvac fg v1\n")
        write_chart(fh, data.boundary)
        fh.write(f"scalar n {data.n}\n")
        fh.write(f"scalar order {data.order}\n")
        for k, c in enumerate(data.coefficients):
            write_tensor_block(fh, data.boundary, f"G{k}",
                               TensorField(data.boundary, 2, 0, c))


def load_fg(path):
    from .fg import FGData

    lines = _Lines(path)
    lineno, line = lines.expect("statvac")
    if " fg " not in line + " ":
        raise FormatError(path, lineno, "not an expansion file")
    grid = read_chart(lines)
    meta = {}
    while True:
        lineno, line = lines.peek()
        if line is None or not line.startswith("scalar"):
            break
        lines.next()
        toks = line.split()
        meta[toks[1]] = _parse_float(toks[2], path, lineno)
    order = int(meta.get("order", 0))
    coeffs = []
    for _ in range(order + 1):
        _, t = read_tensor_block(lines, grid)
        coeffs.append(t.comps)
    return FGData(grid, int(meta["n"]), coeffs, undetermined_order=int(meta["n"]))


def save_weyl_coefficients(path, coefficients: np.ndarray):
    """Plain two-column (l, a_l) text."""
    with open(path, "w", encoding="ascii") as fh:
        for l, a in enumerate(np.asarray(coefficients, float)):
            fh.write(f"{l} {a!r}\n")


def load_weyl_coefficients(path) -> np.ndarray:
    out = {}
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            toks = stripped.split()
            if len(toks) != 2:
                raise FormatError(path, lineno, "need two columns: l a_l")
            try:
                ell = int(toks[0])
                val = _parse_float(toks[1], path, lineno)
            except ValueError:
                raise FormatError(path, lineno, "bad coefficient row") from None
            out[ell] = val
    if not out:
        raise FormatError(path, 1, "empty coefficient file")
    lmax = max(out)
    coeffs = np.zeros(lmax + 1)
    for ell, val in out.items():
        coeffs[ell] = val
    return coeffs
