"""Solve the spectral systems on a contour grid.

The result is a :class:`SpectralTable`: for each node the unknown vector
scaled by ``exp(-nu**2 * scale_time)``, the relative residual of the
equilibrated solve, and whether the node was solved or filled in by
shape-preserving cubic interpolation because its system could not be
represented.
"""
from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .assembly import Layout, SpectralSystem, equilibrated_systems, layout
from .contour import ContourGrid, Half
from .errors import SingularNode, TooManyOverflowNodes
from .problem import ValidatedProblem

PIVOT_TOL = 1e-14
MAX_OVERFLOW_FRACTION = 0.2
SUPPORT_POINTS = 4
_CHUNK_ENTRIES = 4_000_000


class Provenance(enum.IntEnum):
    SOLVED = 0
    INTERPOLATED = 1


@dataclass(frozen=True, eq=False)
class SpectralTable:
    grid: ContourGrid
    horizon: float
    scale_time: float
    values: np.ndarray
    residuals: np.ndarray
    provenance: np.ndarray
    log_abs_det: np.ndarray
    layout: Layout

    @property
    def solved(self):
        return self.provenance == Provenance.SOLVED

    @property
    def interpolated_fraction(self):
        return float(np.mean(self.provenance == Provenance.INTERPOLATED))

    @property
    def max_residual(self):
        r = self.residuals[self.solved]
        return float(r.max()) if r.size else 0.0

    def for_half(self, grid: ContourGrid) -> "SpectralTable":
        """Reuse the values on ``grid``, whose nodes must be ``+/-`` these.

        The unknowns depend on ``nu**2`` only, so the table of one half is
        the table of the other.
        """
        same = np.allclose(grid.nodes, self.grid.nodes, rtol=1e-14, atol=0)
        flipped = np.allclose(grid.nodes, -self.grid.nodes, rtol=1e-14, atol=0)
        if not (same or flipped):
            raise ValueError("grid nodes are not related to the table's nodes by a sign")
        return SpectralTable(grid, self.horizon, self.scale_time, self.values, self.residuals,
                             self.provenance, self.log_abs_det, self.layout)


def solve_at_node(system: SpectralSystem):
    """Partial-pivoting LU solve of one equilibrated system.

    Returns ``(x, residual)``.  Raises :class:`SingularNode` when a pivot falls
    below ``1e-14`` times the largest matrix entry.
    """
    x, res, _ = _solve_one(system.matrix, system.rhs, system.node)
    return x, res


def _solve_one(A, y, node):
    scale = np.abs(A).max()
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularNode
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(A, check_finite=False)
    d = np.abs(np.diag(lu))
    if scale == 0 or d.min() < PIVOT_TOL * scale:
        raise SingularNode(f"rank-deficient system at nu = {node}: min pivot {d.min():.3e}")
    x = lu_solve((lu, piv), y, check_finite=False)
    ny = np.linalg.norm(y)
    r = np.linalg.norm(A @ x - y)
    res = r / ny if ny > 0 else r
    return x, res, float(np.log(d).sum())


def _solve_chunk(problem, nodes, T, scale_time, raw_overflow):
    A, Y, _, ok = equilibrated_systems(problem, nodes, T, scale_time, raw_overflow)
    m = A.shape[1]
    X = np.zeros((len(nodes), m), dtype=complex)
    res = np.zeros(len(nodes))
    logdet = np.full(len(nodes), np.nan)
    for i in np.flatnonzero(ok):
        X[i], res[i], logdet[i] = _solve_one(A[i], Y[i], nodes[i])
    return X, res, logdet, ok


def solve_nodes(problem: ValidatedProblem, nodes, T, scale_time=None, raw_overflow=False):
    """Scaled unknowns at arbitrary nodes: ``(X, residuals, log_abs_det, ok)``.

    Rows of ``X`` where ``ok`` is False are zero (system not representable).
    """
    nodes = np.asarray(nodes, dtype=complex).reshape(-1)
    s_time = float(T if scale_time is None else scale_time)
    m = layout(problem).size
    chunk = max(1, _CHUNK_ENTRIES // (m * m))
    parts = [_solve_chunk(problem, nodes[i:i + chunk], T, s_time, raw_overflow)
             for i in range(0, len(nodes), chunk)]
    return tuple(np.concatenate([p[k] for p in parts]) for k in range(4))


def build_spectral_table(problem: ValidatedProblem, grid: ContourGrid, T, scale_time=None, *,
                         raw_overflow=False, mirror=True, workers=1,
                         max_overflow_fraction=MAX_OVERFLOW_FRACTION,
                         support=SUPPORT_POINTS) -> SpectralTable:
    """Solve for the scaled unknowns at every node of ``grid``.

    ``scale_time`` defaults to ``T``.  With ``mirror`` (the default) only
    nodes with ``theta >= 0`` are solved: for real data the unknowns at
    ``-theta`` are the complex conjugates.  Nodes whose system is not
    representable are filled by monotone cubic Hermite interpolation of the
    real and imaginary parts in ``theta`` from the nearest ``support`` solved
    nodes on each side.
    """
    s_time = float(T if scale_time is None else scale_time)
    nodes = grid.nodes
    count = len(nodes)
    symmetric = mirror and count % 2 == 1 and np.allclose(grid.theta, -grid.theta[::-1], atol=1e-13)
    idx = np.arange(count // 2, count) if symmetric else np.arange(count)
    lay = layout(problem)
    m = lay.size
    chunk = max(1, _CHUNK_ENTRIES // (m * m))
    pieces = [idx[i:i + chunk] for i in range(0, len(idx), chunk)]

    def work(piece):
        return _solve_chunk(problem, nodes[piece], T, s_time, raw_overflow)

    if workers > 1 and len(pieces) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, pieces))
    else:
        results = [work(p) for p in pieces]

    X = np.zeros((count, m), dtype=complex)
    res = np.zeros(count)
    logdet = np.full(count, np.nan)
    ok = np.zeros(count, dtype=bool)
    for piece, (Xp, rp, dp, okp) in zip(pieces, results):
        X[piece], res[piece], logdet[piece], ok[piece] = Xp, rp, dp, okp
    if symmetric:
        c = count // 2
        X[:c] = np.conj(X[count - 1:c:-1])
        res[:c] = res[count - 1:c:-1]
        logdet[:c] = logdet[count - 1:c:-1]
        ok[:c] = ok[count - 1:c:-1]

    bad = ~ok
    frac = bad.mean()
    if frac > max_overflow_fraction:
        raise TooManyOverflowNodes(
            f"{bad.sum()} of {count} nodes ({100 * frac:.1f}%) need interpolation; "
            "the problem is probably badly scaled")
    if bad.any():
        X = _fill_by_interpolation(grid.theta, X, ok, support)
    prov = np.where(ok, Provenance.SOLVED, Provenance.INTERPOLATED).astype(np.int8)
    return SpectralTable(grid, float(T), s_time, X, res, prov, logdet, lay)


def _runs(mask):
    """Start/stop index pairs of the True runs in ``mask``."""
    edges = np.diff(np.concatenate([[0], mask.astype(np.int8), [0]]))
    return list(zip(np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)))


def _fill_by_interpolation(theta, X, ok, support):
    if not ok.any():
        raise TooManyOverflowNodes("no node could be solved")
    X = X.copy()
    good = np.flatnonzero(ok)
    for start, stop in _runs(~ok):
        left = good[good < start][-support:]
        right = good[good >= stop][:support]
        use = np.concatenate([left, right])
        if len(use) < 2:
            raise TooManyOverflowNodes("not enough solved nodes to interpolate from")
        target = theta[start:stop]
        # slopes near 1e-300 overflow in PCHIP's harmonic mean; the limiter then zeroes them
        with np.errstate(over="ignore", divide="ignore"):
            re = PchipInterpolator(theta[use], X[use].real, axis=0, extrapolate=True)(target)
            im = PchipInterpolator(theta[use], X[use].imag, axis=0, extrapolate=True)(target)
        X[start:stop] = re + 1j * im
    return X


def build_tables(problem: ValidatedProblem, plus_grid: ContourGrid, T, scale_time=None,
                 independent=False, **kw):
    """Tables for both halves; the minus half reuses the plus solves unless ``independent``."""
    if plus_grid.half is not Half.PLUS:
        raise ValueError("expected the plus-half grid")
    minus_grid = plus_grid.mirrored()
    plus = build_spectral_table(problem, plus_grid, T, scale_time, **kw)
    if independent:
        minus = build_spectral_table(problem, minus_grid, T, scale_time, **kw)
    else:
        minus = plus.for_half(minus_grid)
    return plus, minus


def dump_table(table: SpectralTable, path):
    """Write a table as columns: theta, Re/Im of each unknown, residual, provenance."""
    m = table.values.shape[1]
    header = ["theta"]
    for i in range(m):
        header += [f"re{i}", f"im{i}"]
    header += ["residual", "provenance"]
    with open(path, "w") as fh:
        fh.write(f"# half={table.grid.half.value} horizon={table.horizon!r} "
                 f"scale_time={table.scale_time!r}\n")
        fh.write(",".join(header) + "\n")
        for k in range(len(table.grid.theta)):
            row = [repr(float(table.grid.theta[k]))]
            for v in table.values[k]:
                row += [repr(float(v.real)), repr(float(v.imag))]
            row += [repr(float(table.residuals[k])), Provenance(table.provenance[k]).name.lower()]
            fh.write(",".join(row) + "\n")


def log_det_floor(table: SpectralTable):
    """Smallest ``log|det|`` of the equilibrated matrices over solved nodes."""
    d = table.log_abs_det[table.solved]
    return float(d.min()) if d.size else -math.inf


def equilibrated_log_det(problem: ValidatedProblem, nodes, T=1.0):
    """``log|det|`` after scaling rows, then columns, to unit max modulus.

    Row scaling alone leaves a determinant that decays like a power of
    ``|nu|`` because the unknowns themselves scale differently; scaling the
    columns as well removes that and leaves a number that measures how
    close the system is to singular.
    """
    A, _, _, ok = equilibrated_systems(problem, nodes, T)
    out = np.full(len(A), np.nan)
    for i in np.flatnonzero(ok):
        a = A[i] / np.abs(A[i]).max(axis=0)
        out[i] = np.linalg.slogdet(a)[1]
    return out
