"""Assemble ``u`` and the flux ``sigma**2 u_x`` from the spectral tables.

In layer ``j`` the solution is the free-space term of the initial data plus
two contour integrals,

    u = I0 - 1/(2 pi) int_{dD-} exp(i nu (x - x_j)/sigma_j - nu**2 t) Phi-(nu) dnu
           - 1/(2 pi) int_{dD+} exp(i nu (x - x_{j-1})/sigma_j - nu**2 t) Phi+(nu) dnu,

where ``Phi-`` collects the right-edge values of layer ``j`` and ``Phi+`` the
left-edge ones, after the interface conditions have replaced the unknowns
that are not in ``X``.  The tables store ``exp(-nu**2 s) X`` for a fixed
``s`` so only ``exp(nu**2 (s - t))`` remains to be applied here.

Public functions take coordinates in the problem's own frame; the shift to
``x0 = 0`` is handled internally.  Layer indices are 1-based.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .contour import (
    DEFAULT_COUNT,
    DEFAULT_THETA_MAX,
    INNER_ANGLE,
    DEFAULT_ANGLE,
    Half,
    contour_nodes,
    real_axis_nodes,
)
from .errors import NonPositiveTime, OutOfDomain, TableHorizonTooSmall
from .problem import Constant, Polynomial, Sampled, ValidatedProblem, as_polynomial, validate
from .spectral import SpectralTable, build_tables
from .transforms import layer_fourier

_TWO_PI = 2.0 * math.pi
_ON_BREAKPOINT = 1e-12


@dataclass(frozen=True)
class ContourSettings:
    """Quadrature parameters for :func:`solve`.

    ``angle=None`` picks the hyperbola through ``i sin(pi/8)`` when the
    spectral horizon equals the evaluation time and the curve
    ``Re(nu**2) = -radius**2 / 2`` when a larger ``fixed_T`` is used, since
    only the latter keeps ``exp(nu**2 (T - t))`` bounded.
    """

    theta_max: float = DEFAULT_THETA_MAX
    count: int = DEFAULT_COUNT
    radius: float = 1.0
    angle: float | None = None
    fixed_T: float | None = None
    real_tol: float = 1e-16
    raw_overflow: bool = False
    workers: int = 1

    def resolved_angle(self):
        if self.angle is not None:
            return float(self.angle)
        return DEFAULT_ANGLE if self.fixed_T is None else INNER_ANGLE

    def grid(self):
        return contour_nodes(Half.PLUS, self.theta_max, self.count, self.radius, self.resolved_angle())


@dataclass(eq=False)
class SolutionField:
    """Values on a space-time grid.

    Rows are grid points; a point on an interior interface appears twice,
    once per adjacent layer.  ``values`` and ``flux`` have shape
    ``(len(times), len(x))``.
    """

    x: np.ndarray
    layer: np.ndarray
    times: np.ndarray
    values: np.ndarray
    flux: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def layer_of(self, i):
        """1-based layer of row ``i``."""
        return int(self.layer[i])

    def at(self, t):
        """Values at the stored time closest to ``t``."""
        k = int(np.argmin(np.abs(self.times - t)))
        return self.values[k]


def output_grid(problem, points=401):
    """``points`` equally spaced abscissae with interface points duplicated.

    Returns ``(x, layer)`` with 1-based layers; a point that coincides with
    an interior breakpoint gets one row for each side.
    """
    vp = validate(problem)
    if points < 3:
        raise ValueError("need at least 3 grid points")
    xs = np.linspace(0.0, vp.length, points)
    tol = _ON_BREAKPOINT * vp.length
    xo, lo = [], []
    for xv in xs:
        left = int(vp.layer_of(xv, "left"))
        right = int(vp.layer_of(xv, "right"))
        hit = np.abs(vp.x[1:-1] - xv) <= tol
        if hit.any():
            b = int(np.flatnonzero(hit)[0])
            xb = float(vp.x[b + 1])
            xo += [xb, xb]
            lo += [b + 1, b + 2]
        else:
            xo.append(float(xv))
            lo.append(left + 1 if left == right or xv <= 0.0 else right + 1)
    return np.asarray(xo) + vp.shift, np.asarray(lo, dtype=int)


def _locate(vp: ValidatedProblem, x, layer):
    """Shifted abscissae and 0-based layers; checks the domain."""
    xs = np.atleast_1d(np.asarray(x, dtype=float)) - vp.shift
    tol = _ON_BREAKPOINT * vp.length
    if np.any(xs < -tol) or np.any(xs > vp.length + tol):
        raise OutOfDomain(f"x outside [{vp.shift}, {vp.shift + vp.length}]")
    xs = np.clip(xs, 0.0, vp.length)
    if layer is None:
        idx = vp.layer_of(xs, "left")
    else:
        idx = np.broadcast_to(np.asarray(layer, dtype=int) - 1, xs.shape).copy()
        if np.any(idx < 0) or np.any(idx >= vp.n_layers):
            raise OutOfDomain(f"layer must be in 1..{vp.n_layers}")
        lo, hi = vp.x[idx], vp.x[idx + 1]
        if np.any(xs < lo - tol) or np.any(xs > hi + tol):
            raise OutOfDomain("x is not in the requested layer")
    return xs, idx


def _initial_term(vp, l, xs, t, tol, derivative=False):
    sig = float(vp.sigma[l])
    a, b = float(vp.x[l]), float(vp.x[l + 1])
    grid = real_axis_nodes(sig, t, tol, vp.length, b - a)
    k = grid.nodes
    spec = layer_fourier(vp.initial[l], a, b, k) * np.exp(-(sig * k) ** 2 * t) * grid.weights
    if derivative:
        spec = spec * 1j * k
    return (np.exp(1j * np.outer(xs, k)) @ spec) / _TWO_PI


def evaluate_initial_term(problem, layer, x, t, tol=1e-16):
    """Free-space evolution of layer ``layer``'s initial data at ``x``."""
    if t <= 0:
        raise NonPositiveTime(f"need t > 0, got {t}")
    vp = validate(problem)
    xs, idx = _locate(vp, x, layer)
    out = _initial_term(vp, int(idx[0]), xs, t, tol).real
    return float(out[0]) if np.ndim(x) == 0 else out


def _phi(vp, l, X, nu, minus):
    """``Phi-`` (right edge) or ``Phi+`` (left edge) of layer ``l`` at the nodes."""
    from .assembly import layout

    lay = layout(vp)
    n = vp.n
    sig = float(vp.sigma[l])
    if minus:
        if l == n:
            return sig * X[:, lay.h1] + 1j * nu * X[:, lay.h0(n)]
        if lay.imperfect:
            H = float(vp.H[l])
            return (H * X[:, lay.g0(l + 1)] + (1j * sig * nu - H) * X[:, lay.h0(l)]) / sig
        s2 = float(vp.sigma[l + 1]) ** 2
        return (s2 / sig) * X[:, lay.g1(l + 1)] + 1j * nu * X[:, lay.g0(l + 1)]
    if l == 0 or not lay.imperfect:
        return sig * X[:, lay.g1(l)] + 1j * nu * X[:, lay.g0(l)]
    H = float(vp.H[l - 1])
    return ((H + 1j * sig * nu) * X[:, lay.g0(l)] - H * X[:, lay.h0(l - 1)]) / sig


def _contour_term(vp, table: SpectralTable, l, xs, t, minus, derivative=False):
    nu = table.grid.nodes
    w = table.grid.weights
    sig = float(vp.sigma[l])
    edge = float(vp.x[l + 1] if minus else vp.x[l])
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        comp = np.exp(nu * nu * (table.scale_time - t))
        phi = _phi(vp, l, table.values, nu, minus) * comp * w
        if derivative:
            phi = phi * 1j * nu / sig
        good = np.isfinite(phi)
        phi = np.where(good, phi, 0.0)
        kern = np.exp(1j * np.outer(xs - edge, nu) / sig)
        return -(kern @ phi) / _TWO_PI


def _assemble(vp, tables, xs, idx, t, tol, derivative):
    plus, minus = tables
    for tab in (plus, minus):
        if t > tab.horizon * (1 + 1e-14):
            raise TableHorizonTooSmall(f"t = {t} exceeds the table horizon {tab.horizon}")
    if plus.grid.half is not Half.PLUS:
        plus, minus = minus, plus
    out = np.zeros(xs.shape, dtype=complex)
    for l in np.unique(idx):
        m = idx == l
        val = _initial_term(vp, l, xs[m], t, tol, derivative)
        val = val + _contour_term(vp, minus, l, xs[m], t, True, derivative)
        val = val + _contour_term(vp, plus, l, xs[m], t, False, derivative)
        if derivative:
            val = val * float(vp.sigma[l]) ** 2
        out[m] = val
    return out


def _initial_values(vp, xs, idx, derivative=False):
    out = np.empty(xs.shape)
    for l in np.unique(idx):
        m = idx == l
        ic = vp.initial[l]
        if not derivative:
            out[m] = ic(xs[m])
            continue
        poly = as_polynomial(ic)
        if poly is not None:
            c = np.asarray(poly.coeffs, dtype=float)
            d = np.polynomial.polynomial.polyder(c) if len(c) > 1 else np.zeros(1)
            out[m] = np.polynomial.polynomial.polyval(xs[m], d)
        else:
            pts, vals = np.asarray(ic.points), np.asarray(ic.values)
            slopes = np.diff(vals) / np.diff(pts)
            seg = np.clip(np.searchsorted(pts, xs[m], side="right") - 1, 0, len(slopes) - 1)
            out[m] = slopes[seg]
        out[m] *= float(vp.sigma[l]) ** 2
    return out


def evaluate_solution(problem, tables, x, t, layer=None, *, tol=1e-16, return_imag=False):
    """``u(x, t)`` from a ``(plus, minus)`` pair of tables.

    At an interface the left layer is used unless ``layer`` says otherwise.
    With ``return_imag`` the imaginary residue of the assembled value is
    returned as well; it measures quadrature error, the exact value being
    real.
    """
    vp = validate(problem)
    xs, idx = _locate(vp, x, layer)
    if t == 0:
        val = _initial_values(vp, xs, idx).astype(complex)
    elif t < 0:
        raise NonPositiveTime(f"t must be nonnegative, got {t}")
    else:
        val = _assemble(vp, tables, xs, idx, t, tol, False)
    return _finish(val, x, return_imag)


def evaluate_flux(problem, tables, x, t, layer=None, *, tol=1e-16, return_imag=False):
    """``sigma_j**2 u_x`` at ``x``; same conventions as :func:`evaluate_solution`."""
    vp = validate(problem)
    xs, idx = _locate(vp, x, layer)
    if t == 0:
        val = _initial_values(vp, xs, idx, derivative=True).astype(complex)
    elif t < 0:
        raise NonPositiveTime(f"t must be nonnegative, got {t}")
    else:
        val = _assemble(vp, tables, xs, idx, t, tol, True)
    return _finish(val, x, return_imag)


def _finish(val, x, return_imag):
    re, im = val.real, val.imag
    if np.ndim(x) == 0:
        re, im = float(re[0]), float(im[0])
    return (re, im) if return_imag else re


def spectral_tables(problem, T, settings: ContourSettings | None = None):
    """Plus/minus tables with horizon ``T`` for the given settings."""
    s = settings or ContourSettings()
    vp = validate(problem)
    return build_tables(vp, s.grid(), T, T, raw_overflow=s.raw_overflow, workers=s.workers)


def _is_zero(signal):
    if isinstance(signal, Constant):
        return signal.value == 0
    if isinstance(signal, Polynomial):
        return all(c == 0 for c in signal.coeffs)
    if isinstance(signal, Sampled):
        return not np.any(np.asarray(signal.values))
    return getattr(signal, "amplitude", 1.0) == 0


def solve(problem, x=None, times=(0.1,), settings: ContourSettings | None = None, *,
          layer=None, flux=True, grid_points=401) -> SolutionField:
    """Evaluate the solution on a grid at several times.

    ``x`` defaults to :func:`output_grid` with ``grid_points`` points.  Each
    positive time gets its own tables with horizon ``t`` unless
    ``settings.fixed_T`` is set, in which case one table serves all times.
    """
    s = settings or ContourSettings()
    vp = validate(problem)
    if x is None:
        x, layer = output_grid(vp, grid_points)
    xs, idx = _locate(vp, x, layer)
    x_out = xs + vp.shift
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0):
        raise NonPositiveTime("times must be nonnegative")
    if s.fixed_T is not None and np.any(times > s.fixed_T):
        raise TableHorizonTooSmall(f"fixed_T = {s.fixed_T} is below the largest time {times.max()}")

    U = np.empty((len(times), len(xs)))
    F = np.empty_like(U) if flux else None
    imag = 0.0
    residual = 0.0
    interpolated = 0.0
    shared = spectral_tables(vp, s.fixed_T, s) if s.fixed_T is not None else None
    for k, t in enumerate(times):
        if t == 0:
            U[k] = _initial_values(vp, xs, idx)
            if flux:
                F[k] = _initial_values(vp, xs, idx, derivative=True)
            continue
        tabs = shared if shared is not None else spectral_tables(vp, t, s)
        residual = max(residual, tabs[0].max_residual)
        interpolated = max(interpolated, tabs[0].interpolated_fraction)
        val = _assemble(vp, tabs, xs, idx, t, s.real_tol, False)
        U[k] = val.real
        imag = max(imag, float(np.abs(val.imag).max(initial=0.0)))
        if flux:
            fv = _assemble(vp, tabs, xs, idx, t, s.real_tol, True)
            F[k] = fv.real

    at_left = bool(np.any(xs <= 0.0)) and not _is_zero(vp.f_left)
    at_right = bool(np.any(xs >= vp.length)) and not _is_zero(vp.f_right)
    meta = {
        "method": "utm",
        "theta_max": s.theta_max,
        "nodes": s.count,
        "radius": s.radius,
        "angle": s.resolved_angle(),
        "fixed_T": s.fixed_T,
        "max_residual": residual,
        "interpolated_fraction": interpolated,
        "max_imag_residue": imag,
        "endpoint_caveat_left": at_left,
        "endpoint_caveat_right": at_right,
    }
    return SolutionField(x_out, idx + 1, times, U, F, meta)
