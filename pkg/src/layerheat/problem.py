"""Domain model for heat conduction in an n-layer composite slab.

Layer ``j`` (1-based) occupies ``[x_{j-1}, x_j]`` and obeys
``u_t = sigma_j**2 u_xx``.  Interfaces are either in perfect contact
(temperature and flux continuous) or imperfect contact, where the flux on
both sides equals ``H_j`` times the temperature jump.  The two outer ends
carry Robin conditions ``beta1 u + beta2 u_x = f_left(t)`` and
``beta3 u + beta4 u_x = f_right(t)``.

Everything downstream works on a :class:`ValidatedProblem`, which shifts the
geometry so the left end sits at ``x = 0`` and keeps the shift for reporting.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    DegenerateBoundaryRow,
    InvalidProblem,
    InvalidSignal,
    LengthMismatch,
    NonIncreasingBreakpoints,
    NonPositiveSigma,
    ZeroContactCoefficient,
)


# ---------------------------------------------------------------------------
# Signals: time-dependent boundary data and per-layer initial data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    value: float

    def __call__(self, s):
        return np.full(np.shape(s), float(self.value)) if np.ndim(s) else float(self.value)

    def to_dict(self):
        return {"type": "constant", "value": self.value}


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with ascending coefficients, ``sum(c[p] * s**p)``."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    def __call__(self, s):
        return P.polyval(s, self.coeffs)

    def to_dict(self):
        return {"type": "polynomial", "coeffs": list(self.coeffs)}


PolynomialInX = Polynomial


@dataclass(frozen=True)
class Cosine:
    amplitude: float
    frequency: float

    def __call__(self, s):
        return self.amplitude * np.cos(self.frequency * np.asarray(s, dtype=float))

    def to_dict(self):
        return {"type": "cosine", "amplitude": self.amplitude, "frequency": self.frequency}


@dataclass(frozen=True)
class Sine:
    amplitude: float
    frequency: float

    def __call__(self, s):
        return self.amplitude * np.sin(self.frequency * np.asarray(s, dtype=float))

    def to_dict(self):
        return {"type": "sine", "amplitude": self.amplitude, "frequency": self.frequency}


@dataclass(frozen=True)
class Exponential:
    amplitude: float
    rate: float

    def __call__(self, s):
        return self.amplitude * np.exp(self.rate * np.asarray(s, dtype=float))

    def to_dict(self):
        return {"type": "exponential", "amplitude": self.amplitude, "rate": self.rate}


@dataclass(frozen=True)
class Sampled:
    """Tabulated data, reconstructed piecewise linearly between samples."""

    points: tuple
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(float(p) for p in self.points))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def __call__(self, s):
        return np.interp(s, self.points, self.values)

    def to_dict(self):
        return {"type": "sampled", "points": list(self.points), "values": list(self.values)}


TimeSignal = Union[Constant, Polynomial, Cosine, Sine, Exponential, Sampled]
InitialCondition = Union[Constant, Polynomial, Sampled]

_SIGNAL_TYPES = {
    "constant": Constant,
    "polynomial": Polynomial,
    "cosine": Cosine,
    "sine": Sine,
    "exponential": Exponential,
    "sampled": Sampled,
}


def signal_from_dict(d) -> TimeSignal:
    """Inverse of ``to_dict``; bare numbers are read as constants."""
    if isinstance(d, (int, float)):
        return Constant(float(d))
    kind = d.get("type")
    if kind not in _SIGNAL_TYPES:
        raise InvalidSignal(f"unknown signal type {kind!r}")
    args = {k: v for k, v in d.items() if k != "type"}
    return _SIGNAL_TYPES[kind](**args)


def as_polynomial(ic) -> Polynomial | None:
    """Return ``ic`` as a :class:`Polynomial` when it has a closed form."""
    if isinstance(ic, Constant):
        return Polynomial((ic.value,))
    if isinstance(ic, Polynomial):
        return ic
    return None


# ---------------------------------------------------------------------------
# Problem records
# ---------------------------------------------------------------------------

class InterfaceKind(str, enum.Enum):
    PERFECT = "perfect"
    IMPERFECT = "imperfect"


@dataclass(frozen=True)
class LayerStack:
    breakpoints: tuple
    sigmas: tuple

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(float(x) for x in self.breakpoints))
        object.__setattr__(self, "sigmas", tuple(float(s) for s in self.sigmas))


@dataclass(frozen=True)
class InterfaceSpec:
    kind: InterfaceKind = InterfaceKind.PERFECT
    contact_coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", InterfaceKind(self.kind))
        object.__setattr__(self, "contact_coeffs", tuple(float(h) for h in self.contact_coeffs))

    @classmethod
    def perfect(cls):
        return cls(InterfaceKind.PERFECT)

    @classmethod
    def imperfect(cls, contact_coeffs):
        return cls(InterfaceKind.IMPERFECT, tuple(contact_coeffs))


@dataclass(frozen=True)
class BoundarySpec:
    beta: tuple
    f_left: TimeSignal = Constant(0.0)
    f_right: TimeSignal = Constant(0.0)

    def __post_init__(self):
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))

    @classmethod
    def dirichlet(cls, left, right):
        """Temperature prescribed at both ends."""
        return cls((1.0, 0.0, 1.0, 0.0), _signal(left), _signal(right))


def _signal(v):
    return v if not isinstance(v, (int, float)) else Constant(float(v))


@dataclass(frozen=True)
class Problem:
    layers: LayerStack
    interfaces: InterfaceSpec
    boundary: BoundarySpec
    initial: tuple

    def __post_init__(self):
        init = self.initial
        if not isinstance(init, (tuple, list)):
            init = (init,) * len(self.layers.sigmas)
        object.__setattr__(self, "initial", tuple(init))

    @property
    def n_interfaces(self):
        return len(self.layers.sigmas) - 1


@dataclass(frozen=True, eq=False)
class ValidatedProblem:
    """Immutable, normalized problem (left end shifted to ``x = 0``).

    Attributes
    ----------
    x : ndarray, shape (n+2,)
        Breakpoints after the shift, ``x[0] == 0``.
    sigma : ndarray, shape (n+1,)
    H : ndarray, shape (n,)
        Contact coefficients; empty for perfect contact.
    beta : ndarray, shape (4,)
    f_left, f_right : TimeSignal
    initial : tuple of InitialCondition, expressed in shifted coordinates.
    shift : float
        Original ``x_0``; original coordinates are ``x + shift``.
    """

    x: np.ndarray
    sigma: np.ndarray
    kind: InterfaceKind
    H: np.ndarray
    beta: np.ndarray
    f_left: TimeSignal
    f_right: TimeSignal
    initial: tuple
    shift: float = 0.0
    source: Problem | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for name in ("x", "sigma", "H", "beta"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self):
        """Number of interfaces."""
        return len(self.sigma) - 1

    @property
    def n_layers(self):
        return len(self.sigma)

    @property
    def length(self):
        return float(self.x[-1] - self.x[0])

    @property
    def imperfect(self):
        return self.kind is InterfaceKind.IMPERFECT and self.n > 0

    def layer_of(self, x, side="left"):
        """0-based layer index of each point; interface points go to ``side``."""
        x = np.asarray(x, dtype=float)
        if side == "left":
            idx = np.searchsorted(self.x, x, side="left") - 1
        else:
            idx = np.searchsorted(self.x, x, side="right") - 1
        return np.clip(idx, 0, self.n_layers - 1)

    def initial_value(self, x):
        """Initial temperature at shifted coordinates ``x`` (left layer at interfaces)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        layer = self.layer_of(x)
        for j, ic in enumerate(self.initial):
            m = layer == j
            if m.any():
                out[m] = ic(x[m])
        return out

    def to_problem(self) -> Problem:
        """Rebuild a :class:`Problem` in the original coordinates."""
        return Problem(
            LayerStack(tuple(self.x + self.shift), tuple(self.sigma)),
            InterfaceSpec(self.kind, tuple(self.H)),
            BoundarySpec(tuple(self.beta), self.f_left, self.f_right),
            tuple(_shift_ic(ic, self.shift) for ic in self.initial),
        )

    def __eq__(self, other):
        if not isinstance(other, ValidatedProblem):
            return NotImplemented
        return (
            np.array_equal(self.x, other.x)
            and np.array_equal(self.sigma, other.sigma)
            and self.kind == other.kind
            and np.array_equal(self.H, other.H)
            and np.array_equal(self.beta, other.beta)
            and self.f_left == other.f_left
            and self.f_right == other.f_right
            and self.initial == other.initial
            and self.shift == other.shift
        )

    __hash__ = None


def _shift_ic(ic, dx):
    """Express ``ic`` (a function of ``x``) in coordinates ``x' = x - dx``."""
    if dx == 0.0 or isinstance(ic, Constant):
        return ic
    if isinstance(ic, Polynomial):
        # p(x' + dx) re-expanded in powers of x'
        c = np.zeros(1)
        shift_pow = np.array([1.0])
        for ck in ic.coeffs:
            c = P.polyadd(c, ck * shift_pow)
            shift_pow = P.polymul(shift_pow, [dx, 1.0])
        return Polynomial(tuple(np.trim_zeros(c, "b")) or (0.0,))
    if isinstance(ic, Sampled):
        return Sampled(tuple(np.asarray(ic.points) - dx), ic.values)
    raise InvalidSignal(f"unsupported initial condition {ic!r}")


def _check_signal(sig, label, violations):
    if isinstance(sig, Sampled):
        pts = np.asarray(sig.points)
        if len(pts) < 2 or len(pts) != len(sig.values) or np.any(np.diff(pts) <= 0):
            violations.append(InvalidSignal(f"{label}: sampled grid must be strictly increasing"))
        elif pts[0] > 0.0:
            violations.append(InvalidSignal(f"{label}: sampled grid must start at t = 0"))
    elif not isinstance(sig, (Constant, Polynomial, Cosine, Sine, Exponential)):
        violations.append(InvalidSignal(f"{label}: unsupported signal {sig!r}"))


def validate(problem) -> ValidatedProblem:
    """Check every structural invariant and normalize the geometry.

    Raises the first violation found (an :class:`InvalidProblem` subclass);
    its ``violations`` attribute lists all of them.  Passing an already
    validated problem returns it unchanged.
    """
    if isinstance(problem, ValidatedProblem):
        return problem
    violations = []
    x = np.asarray(problem.layers.breakpoints, dtype=float)
    sig = np.asarray(problem.layers.sigmas, dtype=float)
    if len(x) < 2 or len(sig) != len(x) - 1:
        violations.append(LengthMismatch(
            f"need len(sigmas) == len(breakpoints) - 1, got {len(sig)} and {len(x)}"))
    if not np.all(np.isfinite(x)) or np.any(np.diff(x) <= 0):
        violations.append(NonIncreasingBreakpoints(f"breakpoints must strictly increase: {tuple(x)}"))
    if not np.all(np.isfinite(sig)) or np.any(sig <= 0):
        violations.append(NonPositiveSigma(f"sigmas must be positive and finite: {tuple(sig)}"))

    n = max(len(sig) - 1, 0)
    iface = problem.interfaces
    H = np.asarray(iface.contact_coeffs, dtype=float)
    if iface.kind is InterfaceKind.IMPERFECT:
        if len(H) != n:
            violations.append(LengthMismatch(f"imperfect contact needs {n} coefficients, got {len(H)}"))
        elif np.any(H == 0) or not np.all(np.isfinite(H)):
            violations.append(ZeroContactCoefficient(f"contact coefficients must be nonzero: {tuple(H)}"))
    elif len(H):
        violations.append(LengthMismatch("perfect contact takes no contact coefficients"))

    bnd = problem.boundary
    beta = np.asarray(bnd.beta, dtype=float)
    if beta.shape != (4,):
        violations.append(LengthMismatch(f"beta must have four entries, got {beta.shape}"))
    else:
        if beta[0] == 0 and beta[1] == 0:
            violations.append(DegenerateBoundaryRow("left boundary has beta1 = beta2 = 0"))
        if beta[2] == 0 and beta[3] == 0:
            violations.append(DegenerateBoundaryRow("right boundary has beta3 = beta4 = 0"))
    _check_signal(bnd.f_left, "f_left", violations)
    _check_signal(bnd.f_right, "f_right", violations)

    if len(problem.initial) != len(sig):
        violations.append(LengthMismatch(
            f"need one initial condition per layer ({len(sig)}), got {len(problem.initial)}"))
    else:
        for j, ic in enumerate(problem.initial):
            if isinstance(ic, Sampled):
                pts = np.asarray(ic.points)
                if (len(pts) < 2 or np.any(np.diff(pts) <= 0)
                        or (len(x) > j + 1 and (pts[0] > x[j] or pts[-1] < x[j + 1]))):
                    violations.append(InvalidSignal(f"initial condition of layer {j + 1} "
                                                    "must cover the layer on an increasing grid"))
            elif not isinstance(ic, (Constant, Polynomial)):
                violations.append(InvalidSignal(f"unsupported initial condition {ic!r}"))

    if violations:
        first = violations[0]
        raise type(first)(str(first), [str(v) for v in violations])

    shift = float(x[0])
    return ValidatedProblem(
        x=x - shift,
        sigma=sig,
        kind=iface.kind,
        H=H if iface.kind is InterfaceKind.IMPERFECT else np.zeros(0),
        beta=beta,
        f_left=bnd.f_left,
        f_right=bnd.f_right,
        initial=tuple(_shift_ic(ic, shift) for ic in problem.initial),
        shift=shift,
        source=problem,
    )


def evenly_spaced(n_layers, length=1.0, start=0.0):
    """Breakpoints of ``n_layers`` equal layers on ``[start, start + length]``."""
    return tuple(start + length * k / n_layers for k in range(n_layers + 1))


def make_problem(breakpoints: Sequence[float], sigmas: Sequence[float], beta, f_left, f_right,
                 initial, contact: Sequence[float] | None = None) -> ValidatedProblem:
    """Convenience constructor returning a validated problem."""
    iface = InterfaceSpec.perfect() if contact is None else InterfaceSpec.imperfect(contact)
    prob = Problem(LayerStack(tuple(breakpoints), tuple(sigmas)), iface,
                   BoundarySpec(tuple(beta), _signal(f_left), _signal(f_right)),
                   initial if isinstance(initial, (tuple, list)) else _signal(initial))
    return validate(prob)


__all__ = [
    "BoundarySpec", "Constant", "Cosine", "Exponential", "InitialCondition", "InterfaceKind",
    "InterfaceSpec", "InvalidProblem", "LayerStack", "Polynomial", "PolynomialInX", "Problem",
    "Sampled", "Sine", "TimeSignal", "ValidatedProblem", "as_polynomial", "evenly_spaced",
    "make_problem", "signal_from_dict", "validate",
]
