"""Independent reference solutions and the relative error metric.

None of these use the spectral machinery:

* :func:`fourier_series_solution` is the separation-of-variables solution
  for one homogeneous slab with constant Dirichlet data, with closed-form
  coefficients for polynomial initial data;
* :func:`crank_nicolson` is a second-order finite-difference solver for the
  full layered problem;
* :func:`steady_state_profile` is the piecewise-linear ``t -> inf`` limit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from numpy.polynomial import polynomial as P
from scipy.interpolate import CubicSpline
from scipy.sparse.linalg import splu

from .errors import GridMismatch, NoSteadyState, SingularStep, UnsupportedSetup
from .evaluate import SolutionField, _locate, output_grid
from .problem import Constant, InterfaceKind, Polynomial, Sampled, as_polynomial, validate

DEFAULT_TERMS = 400
DEFAULT_CELLS = 200
DEFAULT_DT = 1e-4
RANNACHER_STEPS = 4


# ---------------------------------------------------------------------------
# Fourier series
# ---------------------------------------------------------------------------

def sine_coefficients(coeffs, length, terms):
    """``b_m = (2/L) int_0^L g(x) sin(m pi x / L) dx`` for a polynomial ``g``.

    Repeated integration by parts; the sine terms vanish at both ends, so
    only even derivatives evaluated against ``cos`` survive.
    """
    m = np.arange(1, terms + 1)
    k = m * math.pi / length
    sign_L = np.where(m % 2 == 0, 1.0, -1.0)  # cos(m pi)
    total = np.zeros(terms)
    deriv = np.asarray(coeffs, dtype=float)
    q = 0
    while deriv.size and np.any(deriv != 0):
        if q % 2 == 0:
            gL = P.polyval(length, deriv)
            g0 = P.polyval(0.0, deriv)
            sgn = -1.0 if (q // 2) % 2 == 0 else 1.0
            total += sgn * (gL * sign_L - g0) / k ** (q + 1)
        deriv = P.polyder(deriv) if deriv.size > 1 else np.zeros(0)
        q += 1
    return 2.0 / length * total


def fourier_series_solution(sigma, a, b, u0, x, t, terms=DEFAULT_TERMS, length=1.0):
    """Series solution on ``[0, length]`` with ``u(0) = a``, ``u(length) = b``.

    ``u0`` is a :class:`~layerheat.problem.Polynomial` or ``Constant`` in
    ``x``, or a plain coefficient sequence.
    """
    if isinstance(u0, (Constant, Polynomial)):
        coeffs = np.asarray(as_polynomial(u0).coeffs, dtype=float)
    else:
        coeffs = np.asarray(u0, dtype=float)
    line = np.array([a, (b - a) / length])
    g = P.polysub(coeffs, line) if coeffs.size else -line
    bm = sine_coefficients(g, length, terms)
    x = np.asarray(x, dtype=float)
    m = np.arange(1, terms + 1)
    k = m * math.pi / length
    decay = np.exp(-(sigma * k) ** 2 * t)
    series = np.sin(np.multiply.outer(x, k)) @ (bm * decay)
    return a + (b - a) * x / length + series


def fourier_reference(problem, x=None, times=(0.1,), terms=DEFAULT_TERMS, grid_points=401):
    """:func:`fourier_series_solution` for a problem that is one effective slab."""
    vp = validate(problem)
    if not np.allclose(vp.sigma, vp.sigma[0], rtol=0, atol=0):
        raise UnsupportedSetup("Fourier reference needs equal sigma in every layer")
    if vp.imperfect:
        raise UnsupportedSetup("Fourier reference needs perfect contact")
    beta = vp.beta
    if beta[1] != 0 or beta[3] != 0:
        raise UnsupportedSetup("Fourier reference needs Dirichlet ends")
    if not (isinstance(vp.f_left, Constant) and isinstance(vp.f_right, Constant)):
        raise UnsupportedSetup("Fourier reference needs constant boundary data")
    polys = [as_polynomial(ic) for ic in vp.initial]
    if any(p is None for p in polys) or any(p.coeffs != polys[0].coeffs for p in polys):
        raise UnsupportedSetup("Fourier reference needs one polynomial initial condition")
    a = vp.f_left.value / beta[0]
    b = vp.f_right.value / beta[2]
    if x is None:
        x, layer = output_grid(vp, grid_points)
    else:
        layer = None
    xs, idx = _locate(vp, x, layer)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    U = np.empty((len(times), len(xs)))
    for i, t in enumerate(times):
        if t == 0:
            U[i] = vp.initial_value(xs)
        else:
            U[i] = fourier_series_solution(vp.sigma[0], a, b, polys[0], xs, t, terms, vp.length)
    meta = {"method": "fourier", "terms": terms}
    return SolutionField(xs + vp.shift, idx + 1, times, U, None, meta)


# ---------------------------------------------------------------------------
# Crank-Nicolson
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class _FDGrid:
    nodes: list          # per-layer node coordinates
    offsets: np.ndarray  # first global index of each layer
    size: int


def _fd_grid(vp, cells):
    nodes = [np.linspace(vp.x[l], vp.x[l + 1], cells + 1) for l in range(vp.n_layers)]
    offsets = np.arange(vp.n_layers) * (cells + 1)
    return _FDGrid(nodes, offsets, vp.n_layers * (cells + 1))


def _fd_operators(vp, grid, cells):
    """Diffusion operator ``L`` (differential rows) and constraint matrix ``B``.

    Returns ``(L, B, diff_rows, alg_rows)``; algebraic rows hold the
    boundary and interface conditions with one-sided 3-point derivatives.
    """
    m = grid.size
    Lr, Lc, Lv = [], [], []
    Br, Bc, Bv = [], [], []
    diff_rows, alg_rows = [], []
    for l in range(vp.n_layers):
        off = grid.offsets[l]
        h = (vp.x[l + 1] - vp.x[l]) / cells
        c = vp.sigma[l] ** 2 / h ** 2
        for i in range(1, cells):
            r = off + i
            diff_rows.append(r)
            Lr += [r, r, r]
            Lc += [r - 1, r, r + 1]
            Lv += [c, -2 * c, c]

    def dx_left(l):
        off = grid.offsets[l]
        h = (vp.x[l + 1] - vp.x[l]) / cells
        return [off, off + 1, off + 2], [-1.5 / h, 2.0 / h, -0.5 / h]

    def dx_right(l):
        end = grid.offsets[l] + cells
        h = (vp.x[l + 1] - vp.x[l]) / cells
        return [end, end - 1, end - 2], [1.5 / h, -2.0 / h, 0.5 / h]

    def add(row, cols, vals):
        Br.extend([row] * len(cols))
        Bc.extend(cols)
        Bv.extend(vals)

    b1, b2, b3, b4 = vp.beta
    r0 = grid.offsets[0]
    cols, vals = dx_left(0)
    add(r0, [r0], [b1])
    add(r0, cols, [b2 * v for v in vals])
    alg_rows.append(r0)
    for l in range(vp.n):
        rR = grid.offsets[l] + cells
        rL = grid.offsets[l + 1]
        sR2, sL2 = vp.sigma[l] ** 2, vp.sigma[l + 1] ** 2
        cR, vR = dx_right(l)
        cL, vL = dx_left(l + 1)
        if vp.kind is InterfaceKind.PERFECT:
            add(rR, [rR, rL], [1.0, -1.0])
            add(rL, cR, [sR2 * v for v in vR])
            add(rL, cL, [-sL2 * v for v in vL])
        else:
            H = vp.H[l]
            add(rR, cR, [sR2 * v for v in vR])
            add(rR, [rL, rR], [-H, H])
            add(rL, cL, [sL2 * v for v in vL])
            add(rL, [rL, rR], [-H, H])
        alg_rows += [rR, rL]
    rN = grid.offsets[-1] + cells
    cols, vals = dx_right(vp.n)
    add(rN, [rN], [b3])
    add(rN, cols, [b4 * v for v in vals])
    alg_rows.append(rN)
    L = sp.csr_matrix((Lv, (Lr, Lc)), shape=(m, m))
    B = sp.csr_matrix((Bv, (Br, Bc)), shape=(m, m))
    return L, B, np.asarray(diff_rows), np.asarray(alg_rows)


class _Stepper:
    """Factorized step matrices, keyed by ``(dt, theta)``."""

    def __init__(self, L, B, diff_rows, alg_rows):
        m = L.shape[0]
        self.L, self.B = L, B
        self.D = sp.diags(np.isin(np.arange(m), diff_rows).astype(float))
        self.alg_rows = alg_rows
        self.diff_rows = diff_rows
        self._lu = {}

    def _factor(self, dt, theta):
        key = (dt, theta)
        if key not in self._lu:
            lhs = (self.D - theta * dt * self.L + self.B).tocsc()
            try:
                self._lu[key] = splu(lhs)
            except RuntimeError as exc:
                raise SingularStep(f"finite-difference step matrix is singular: {exc}") from exc
        return self._lu[key]

    def step(self, u, dt, theta, g):
        rhs = u + (1 - theta) * dt * (self.L @ u)
        rhs[self.alg_rows] = g
        out = self._factor(dt, theta).solve(rhs)
        if not np.all(np.isfinite(out)):
            raise SingularStep("finite-difference step produced non-finite values")
        return out


def _constraint_values(vp, alg_rows, t):
    g = np.zeros(len(alg_rows))
    g[0] = float(vp.f_left(t))
    g[-1] = float(vp.f_right(t))
    return g


def crank_nicolson(problem, cells_per_layer=DEFAULT_CELLS, dt=DEFAULT_DT, t_end=None, *,
                   times=None, x=None, layer=None, grid_points=401) -> SolutionField:
    """Second-order finite-difference solution sampled at ``times``.

    ``times`` defaults to ``(t_end,)``.  Interface and boundary conditions
    are enforced at the new time level with one-sided 3-point derivatives;
    the first ``2*dt`` are covered by four backward-Euler half steps to damp
    the start-up oscillations of incompatible initial data.  Values between
    nodes come from a cubic spline through each layer's nodes.
    """
    vp = validate(problem)
    if times is None:
        if t_end is None:
            raise ValueError("give t_end or times")
        times = (t_end,)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("times must be nonnegative and sorted")
    if x is None:
        x, layer = output_grid(vp, grid_points)
    xs, idx = _locate(vp, x, layer)

    grid = _fd_grid(vp, cells_per_layer)
    L, B, diff_rows, alg_rows = _fd_operators(vp, grid, cells_per_layer)
    stepper = _Stepper(L, B, diff_rows, alg_rows)
    u = np.concatenate([ic(nd) for ic, nd in zip(vp.initial, grid.nodes)])

    def constraints(t):
        return _constraint_values(vp, alg_rows, t)

    t_now = 0.0
    started = False
    U = np.empty((len(times), len(xs)))
    for k, t_out in enumerate(times):
        while t_now < t_out - 1e-14 * max(1.0, t_out):
            if not started:
                h = dt / 2
                for _ in range(RANNACHER_STEPS):
                    t_now += h
                    u = stepper.step(u, h, 1.0, constraints(t_now))
                started = True
                continue
            gap = t_out - t_now
            steps = max(1, int(round(gap / dt)))
            h = gap / steps
            for _ in range(steps):
                t_now += h
                u = stepper.step(u, h, 0.5, constraints(t_now))
            t_now = t_out
        U[k] = _sample(vp, grid, u, xs, idx, cells_per_layer) if t_out > 0 else _initial(vp, xs, idx)
    meta = {"method": "fd", "cells_per_layer": cells_per_layer, "dt": dt}
    return SolutionField(xs + vp.shift, idx + 1, times, U, None, meta)


def _initial(vp, xs, idx):
    out = np.empty(xs.shape)
    for l in np.unique(idx):
        m = idx == l
        out[m] = vp.initial[l](xs[m])
    return out


def _sample(vp, grid, u, xs, idx, cells):
    out = np.empty(xs.shape)
    for l in np.unique(idx):
        m = idx == l
        off = grid.offsets[l]
        spline = CubicSpline(grid.nodes[l], u[off:off + cells + 1])
        out[m] = spline(xs[m])
    return out


# ---------------------------------------------------------------------------
# Steady state
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SteadyState:
    """Per-layer linear profile ``u = intercept[j] + slope[j] * x`` (shifted ``x``)."""

    breakpoints: np.ndarray
    slope: np.ndarray
    intercept: np.ndarray
    shift: float = 0.0

    def __call__(self, x, layer=None):
        xs = np.atleast_1d(np.asarray(x, dtype=float)) - self.shift
        if layer is None:
            idx = np.clip(np.searchsorted(self.breakpoints, xs, side="left") - 1, 0, len(self.slope) - 1)
        else:
            idx = np.broadcast_to(np.asarray(layer) - 1, xs.shape)
        val = self.intercept[idx] + self.slope[idx] * xs
        return float(val[0]) if np.ndim(x) == 0 else val


def _heat_content(vp):
    total = 0.0
    for l, ic in enumerate(vp.initial):
        a, b = vp.x[l], vp.x[l + 1]
        poly = as_polynomial(ic)
        if poly is not None:
            anti = P.polyint(np.asarray(poly.coeffs, dtype=float))
            total += P.polyval(b, anti) - P.polyval(a, anti)
        elif isinstance(ic, Sampled):
            pts = np.asarray(ic.points)
            knots = np.unique(np.concatenate([[a, b], pts[(pts > a) & (pts < b)]]))
            total += np.trapz(ic(knots), knots)
    return total


def steady_state_profile(problem) -> SteadyState:
    """Piecewise-linear steady state for constant boundary data.

    With both ends pure Neumann the steady state is fixed by conservation of
    ``sum_j int u dx``; unequal end fluxes admit none.
    """
    vp = validate(problem)
    if not (isinstance(vp.f_left, Constant) and isinstance(vp.f_right, Constant)):
        raise UnsupportedSetup("steady state needs constant boundary data")
    f1, f2 = vp.f_left.value, vp.f_right.value
    b1, b2, b3, b4 = vp.beta
    nl = vp.n_layers
    x, s2 = vp.x, vp.sigma ** 2
    M = np.zeros((2 * nl, 2 * nl))
    rhs = np.zeros(2 * nl)
    # unknowns: intercept_j at 2j, slope_j at 2j+1
    M[0, 0], M[0, 1] = b1, b2
    rhs[0] = f1
    r = 1
    for l in range(vp.n):
        xi = x[l + 1]
        M[r, 2 * l + 1] = s2[l]
        M[r, 2 * l + 3] = -s2[l + 1]
        r += 1
        if vp.kind is InterfaceKind.PERFECT:
            M[r, [2 * l, 2 * l + 1, 2 * l + 2, 2 * l + 3]] = [1, xi, -1, -xi]
        else:
            H = vp.H[l]
            M[r, 2 * l + 1] = s2[l]
            M[r, [2 * l, 2 * l + 1, 2 * l + 2, 2 * l + 3]] += [H, H * xi, -H, -H * xi]
        r += 1
    last = 2 * nl - 1
    if b1 == 0 and b3 == 0:
        # flux in at the left must equal flux out at the right
        if not math.isclose(s2[0] * f1 / b2, s2[-1] * f2 / b4, rel_tol=1e-12, abs_tol=1e-14):
            raise NoSteadyState("insulating-type ends with unequal fluxes: heat content drifts")
        for l in range(nl):
            a, b = x[l], x[l + 1]
            M[last, 2 * l] = b - a
            M[last, 2 * l + 1] = 0.5 * (b * b - a * a)
        rhs[last] = _heat_content(vp)
    else:
        M[last, 2 * nl - 2] = b3
        M[last, 2 * nl - 1] = b3 * x[-1] + b4
        rhs[last] = f2
    try:
        sol = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise NoSteadyState(f"steady-state system is singular: {exc}") from exc
    return SteadyState(np.array(x), sol[1::2], sol[0::2], vp.shift)


def steady_state_field(problem, x=None, layer=None, grid_points=401, t=math.inf) -> SolutionField:
    vp = validate(problem)
    if x is None:
        x, layer = output_grid(vp, grid_points)
    xs, idx = _locate(vp, x, layer)
    prof = steady_state_profile(vp)
    vals = prof(xs + vp.shift, idx + 1)
    return SolutionField(xs + vp.shift, idx + 1, np.array([t]), vals[None, :], None,
                         {"method": "steady"})


# ---------------------------------------------------------------------------
# Error metric
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ErrorReport:
    """Relative sup error ``max|u - U| / max|u|`` with ``u`` the computed field."""

    E: float
    excluded_endpoints: bool
    N: int
    t: float


def _time_index(field, t):
    d = np.abs(np.asarray(field.times) - t)
    k = int(np.argmin(d))
    if d[k] > 1e-12 * max(1.0, abs(t)):
        raise GridMismatch(f"time {t} not stored in field (have {list(field.times)})")
    return k


def relative_error(computed: SolutionField, reference: SolutionField, t, exclude_endpoints=False):
    """Relative sup error at time ``t``.

    The denominator is the *computed* field, so swapping the arguments
    changes the result unless both fields have the same maximum modulus.
    """
    if computed.x.shape != reference.x.shape or not np.allclose(computed.x, reference.x, rtol=0,
                                                               atol=1e-12):
        raise GridMismatch("fields are sampled at different points")
    if not np.array_equal(computed.layer, reference.layer):
        raise GridMismatch("fields disagree on layer tags")
    u = computed.values[_time_index(computed, t)]
    U = reference.values[_time_index(reference, t)]
    keep = np.ones(u.shape, dtype=bool)
    if exclude_endpoints:
        keep &= (computed.x > computed.x.min()) & (computed.x < computed.x.max())
    diff = np.abs(u[keep] - U[keep]).max(initial=0.0)
    denom = np.abs(u[keep]).max(initial=0.0)
    if denom == 0:
        E = 0.0 if diff == 0 else math.inf
    else:
        E = float(diff / denom)
    return ErrorReport(E, bool(exclude_endpoints), int(keep.sum()), float(t))
