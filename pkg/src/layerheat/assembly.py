"""Dense spectral systems ``A(nu) X = Y(nu, T)`` for both interface kinds.

Each layer ``j`` contributes two global relations, one for ``+nu`` and one
for ``-nu``; with the outer Robin conditions this gives ``2n + 4`` equations
for the ``2n + 4`` boundary-value transforms that remain after substituting
the (time-transformed) interface conditions.

Unknown ordering
----------------
imperfect: ``(g1^1, g0^1..g0^{n+1}, h0^1..h0^{n+1}, h1^{n+1})``
perfect:   ``(g0^1..g0^{n+1}, h0^{n+1}, g1^1..g1^{n+1}, h1^{n+1})``

Rows: left boundary, ``+nu`` relations of layers ``1..n+1``, ``-nu``
relations of layers ``1..n+1``, right boundary.

Every matrix entry has the form ``(c0 + c1*nu) * exp(e1*nu)``.  Keeping the
three coefficients separate lets :func:`equilibrated_systems` scale each row
by its largest entry *in log space*, so nodes far out on the contour never
form the individual (overflowing) exponentials.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OverflowAtArgument, WrongInterfaceKind
from .problem import InterfaceKind, ValidatedProblem
from .transforms import (
    LOG_MAX,
    boundary_transform,
    boundary_transform_scaled,
    initial_transform,
    layer_fourier,
    scaled_boundary_core,
)


@dataclass(frozen=True)
class Layout:
    """Column positions of the boundary-value transforms in ``X``."""

    n: int
    imperfect: bool

    @property
    def size(self):
        return 2 * self.n + 4

    @property
    def block(self):
        return self.n + 2

    def g0(self, l):
        return 1 + l if self.imperfect else l

    def h0(self, l):
        """Only the last layer's ``h0`` is an unknown in the perfect ordering."""
        if self.imperfect:
            return self.block + l
        if l != self.n:
            raise KeyError("perfect contact: h0 of an inner layer equals g0 of the next")
        return self.n + 1

    def g1(self, l):
        if self.imperfect:
            if l != 0:
                raise KeyError("imperfect contact: g1 of an inner layer follows from the jump")
            return 0
        return self.block + l

    @property
    def h1(self):
        return 2 * self.n + 3


def layout(problem: ValidatedProblem) -> Layout:
    return Layout(problem.n, problem.kind is InterfaceKind.IMPERFECT)


def _row_terms(problem: ValidatedProblem, lay: Layout):
    """Entries as ``(row, col, c0, c1, e1)`` tuples."""
    x, sig, H, beta = problem.x, problem.sigma, problem.H, problem.beta
    n = problem.n
    terms = []
    # Robin rows: beta1 g0 + beta2 g1 = f1, beta3 h0 + beta4 h1 = f2
    terms += [(0, lay.g1(0), beta[1], 0, 0), (0, lay.g0(0), beta[0], 0, 0)]
    last = lay.size - 1
    terms += [(last, lay.h0(n), beta[2], 0, 0), (last, lay.h1, beta[3], 0, 0)]

    for l in range(n + 1):
        s_j = sig[l]
        for s, row in ((1.0, 1 + l), (-1.0, lay.block + l)):
            # right end: exp(-s i nu x_j / sigma_j) (sigma_j^2 h1^j + s i sigma_j nu h0^j)
            eR = -s * 1j * x[l + 1] / s_j
            if l < n:
                if lay.imperfect:
                    # sigma_j^2 h1^j = H_j (g0^{j+1} - h0^j)
                    terms += [(row, lay.g0(l + 1), H[l], 0, eR),
                              (row, lay.h0(l), -H[l], s * 1j * s_j, eR)]
                else:
                    # h0^j = g0^{j+1}, sigma_j^2 h1^j = sigma_{j+1}^2 g1^{j+1}
                    terms += [(row, lay.g1(l + 1), sig[l + 1] ** 2, 0, eR),
                              (row, lay.g0(l + 1), 0, s * 1j * s_j, eR)]
            else:
                terms += [(row, lay.h1, s_j ** 2, 0, eR),
                          (row, lay.h0(l), 0, s * 1j * s_j, eR)]
            # left end: -exp(-s i nu x_{j-1} / sigma_j) (sigma_j^2 g1^j + s i sigma_j nu g0^j)
            eL = -s * 1j * x[l] / s_j
            if l > 0 and lay.imperfect:
                # sigma_j^2 g1^j = H_{j-1} (g0^j - h0^{j-1})
                terms += [(row, lay.g0(l), -H[l - 1], -s * 1j * s_j, eL),
                          (row, lay.h0(l - 1), H[l - 1], 0, eL)]
            else:
                terms += [(row, lay.g1(l), -s_j ** 2, 0, eL),
                          (row, lay.g0(l), 0, -s * 1j * s_j, eL)]
    return terms


def coefficient_arrays(problem: ValidatedProblem):
    """``(C0, C1, E1)`` with ``A(nu) = (C0 + C1 nu) * exp(E1 nu)`` entrywise."""
    lay = layout(problem)
    m = lay.size
    C0 = np.zeros((m, m), dtype=complex)
    C1 = np.zeros((m, m), dtype=complex)
    E1 = np.zeros((m, m), dtype=complex)
    seen = np.zeros((m, m), dtype=bool)
    for row, col, c0, c1, e1 in _row_terms(problem, lay):
        if seen[row, col]:
            raise AssertionError(f"duplicate entry at ({row}, {col})")
        seen[row, col] = True
        C0[row, col], C1[row, col], E1[row, col] = c0, c1, e1
    return C0, C1, E1


def sparsity_mask(problem: ValidatedProblem):
    """Structural nonzero pattern of the system matrix."""
    C0, C1, _ = coefficient_arrays(problem)
    return (C0 != 0) | (C1 != 0)


def _raw_matrix(problem, nu):
    nu = complex(nu)
    C0, C1, E1 = coefficient_arrays(problem)
    coef = C0 + C1 * nu
    expo = E1 * nu
    nz = coef != 0
    with np.errstate(divide="ignore"):
        logmag = np.where(nz, np.log(np.abs(np.where(nz, coef, 1.0))) + expo.real, -np.inf)
    if np.any(logmag > LOG_MAX):
        raise OverflowAtArgument(f"matrix entries exceed 1e300 at nu = {nu}")
    return np.where(nz, coef * np.exp(expo), 0.0)


def assemble_imperfect(problem: ValidatedProblem, nu) -> np.ndarray:
    """Imperfect-contact matrix at ``nu``, entries exactly as transcribed."""
    if problem.kind is not InterfaceKind.IMPERFECT:
        raise WrongInterfaceKind("assemble_imperfect needs an imperfect-contact problem")
    return _raw_matrix(problem, nu)


def assemble_perfect(problem: ValidatedProblem, nu) -> np.ndarray:
    """Perfect-contact matrix at ``nu``."""
    if problem.kind is not InterfaceKind.PERFECT:
        raise WrongInterfaceKind("assemble_perfect needs a perfect-contact problem")
    return _raw_matrix(problem, nu)


def assemble_matrix(problem: ValidatedProblem, nu) -> np.ndarray:
    return _raw_matrix(problem, nu)


def assemble_rhs(problem: ValidatedProblem, nu, T, scale_time=None) -> np.ndarray:
    """Right-hand side ``Y(nu, T)``, optionally times ``exp(-nu**2 scale_time)``.

    Ordering: ``f1`` slot, ``-uhat0_j(nu/sigma_j)``, ``-uhat0_j(-nu/sigma_j)``,
    ``f2`` slot.
    """
    nu = complex(nu)
    m = 2 * problem.n + 4
    y = np.empty(m, dtype=complex)
    w = nu * nu
    x, sig = problem.x, problem.sigma
    if scale_time is None:
        y[0] = boundary_transform(problem.f_left, w, T)
        y[-1] = boundary_transform(problem.f_right, w, T)
        for l in range(problem.n + 1):
            y[1 + l] = -initial_transform(problem, l + 1, nu / sig[l])
            y[problem.n + 2 + l] = -initial_transform(problem, l + 1, -nu / sig[l])
        return y
    y[0] = boundary_transform_scaled(problem.f_left, w, T, scale_time)
    y[-1] = boundary_transform_scaled(problem.f_right, w, T, scale_time)
    for l in range(problem.n + 1):
        a, b, ic = x[l], x[l + 1], problem.initial[l]
        y[1 + l] = -layer_fourier(ic, a, b, nu / sig[l], w * scale_time)
        y[problem.n + 2 + l] = -layer_fourier(ic, a, b, -nu / sig[l], w * scale_time)
    if not np.all(np.isfinite(y)):
        raise OverflowAtArgument(f"scaled right-hand side not representable at nu = {nu}")
    return y


@dataclass(frozen=True, eq=False)
class SpectralSystem:
    """One node's row-equilibrated system.

    The right-hand side is premultiplied by ``exp(-node**2 * scale_time)``;
    row ``i`` was divided by ``exp(row_log_scale[i])``.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    node: complex
    horizon: float
    scale_time: float
    row_log_scale: np.ndarray


def equilibrated_systems(problem: ValidatedProblem, nodes, T, scale_time=None, raw_overflow=False):
    """Row-equilibrated matrices and right-hand sides at many nodes at once.

    Returns ``(A, Y, R, ok)`` with shapes ``(N, m, m)``, ``(N, m)``, ``(N, m)``
    and ``(N,)``.  Row ``i`` of the raw system was divided by ``exp(R[:, i])``
    and the right-hand side carries the extra factor
    ``exp(-nu**2 * scale_time)`` (``scale_time`` defaults to ``T``).

    ``ok`` is False where the scaled system is not representable.  With
    ``raw_overflow=True`` a node is also rejected as soon as any *raw* entry
    exceeds 1e300, which reproduces the behaviour of an implementation that
    forms the unscaled matrix.
    """
    nodes = np.asarray(nodes, dtype=complex).reshape(-1)
    s_time = T if scale_time is None else scale_time
    C0, C1, E1 = coefficient_arrays(problem)
    coef = C0[None] + C1[None] * nodes[:, None, None]
    expo = E1[None] * nodes[:, None, None]
    nz = coef != 0
    with np.errstate(divide="ignore"):
        logmag = np.where(nz, np.log(np.abs(np.where(nz, coef, 1.0))) + expo.real, -np.inf)
    R = logmag.max(axis=2)
    with np.errstate(under="ignore"):
        A = np.where(nz, coef * np.exp(np.where(nz, expo - R[:, :, None], 0.0)), 0.0)

    n = problem.n
    x, sig = problem.x, problem.sigma
    w = nodes * nodes
    Y = np.empty((len(nodes), 2 * n + 4), dtype=complex)
    stretch = w * (T - s_time)
    with np.errstate(over="ignore", invalid="ignore"):
        growth = np.exp(np.where(stretch.real > LOG_MAX, np.inf, stretch))
    Y[:, 0] = scaled_boundary_core(problem.f_left, w, T) * growth * np.exp(-R[:, 0])
    Y[:, -1] = scaled_boundary_core(problem.f_right, w, T) * growth * np.exp(-R[:, -1])
    for l in range(n + 1):
        a, b, ic = x[l], x[l + 1], problem.initial[l]
        Y[:, 1 + l] = -layer_fourier(ic, a, b, nodes / sig[l], w * s_time + R[:, 1 + l])
        Y[:, n + 2 + l] = -layer_fourier(ic, a, b, -nodes / sig[l], w * s_time + R[:, n + 2 + l])
    with np.errstate(invalid="ignore"):
        ok = np.all(np.isfinite(Y), axis=1) & np.all(np.isfinite(A), axis=(1, 2))
    if raw_overflow:
        ok &= R.max(axis=1) <= LOG_MAX
    return A, Y, R, ok


def assemble_system(problem: ValidatedProblem, nu, T, scale_time=None) -> SpectralSystem:
    """Equilibrated system at a single node."""
    A, Y, R, ok = equilibrated_systems(problem, [nu], T, scale_time)
    if not ok[0]:
        raise OverflowAtArgument(f"system not representable at nu = {nu}")
    s_time = float(T if scale_time is None else scale_time)
    return SpectralSystem(A[0], Y[0], complex(nu), float(T), s_time, R[0])
