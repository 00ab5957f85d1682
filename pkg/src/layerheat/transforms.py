"""Spectral transforms of the initial and boundary data.

Two families of integrals feed the spectral systems:

* the finite Fourier transform of the initial data on one layer,
  ``uhat0_j(k) = int_{x_{j-1}}^{x_j} exp(-i k x) u0_j(x) dx``;
* the time transform of a boundary signal,
  ``ftilde(w, t) = int_0^t exp(w s) f(s) ds``.

Both grow exponentially for the complex arguments met on the contours, so
every routine has a *scaled* form that returns the value multiplied by a
caller-supplied exponential factor, evaluated without forming the large
intermediate.  All closed forms reduce to the moments

    chi_p(z) = int_0^1 v**p exp(-z v) dv,

evaluated by a power series near ``z = 0`` (which also gives the exact
``k -> 0`` and ``w -> 0`` limits) and by upward recurrence elsewhere.
"""
from __future__ import annotations

import math
import threading

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import InvalidSignal, OverflowAtArgument
from .problem import (
    Constant,
    Cosine,
    Exponential,
    Polynomial,
    Sampled,
    Sine,
    ValidatedProblem,
    as_polynomial,
)

#: Largest exponent accepted before a value is declared unrepresentable.
LOG_MAX = math.log(1e300)

_SERIES_TERMS = 64


def chi(p_max, z):
    """Moments ``chi_p(z)`` for ``p = 0..p_max``; output shape ``(p_max+1,) + z.shape``."""
    z = np.asarray(z, dtype=complex)
    out = np.empty((p_max + 1,) + z.shape, dtype=complex)
    small = np.abs(z) <= max(2.0, p_max + 2.0)
    if small.any():
        zs = z[small]
        # sum_m (-z)^m / (m! (p+m+1))
        term = np.ones_like(zs)
        acc = np.zeros((p_max + 1,) + zs.shape, dtype=complex)
        for m in range(_SERIES_TERMS):
            for p in range(p_max + 1):
                acc[p] += term / (p + m + 1)
            term = term * (-zs) / (m + 1)
        out[:, small] = acc
    big = ~small
    if big.any():
        zb = z[big]
        emz = np.exp(-zb)
        cur = -np.expm1(-zb) / zb
        out[0, big] = cur
        for p in range(1, p_max + 1):
            cur = (p * cur - emz) / zb
            out[p, big] = cur
    return out


def taylor_shift(coeffs, a):
    """Coefficients of ``p(a + r)`` in powers of ``r``."""
    c = np.zeros(max(len(coeffs), 1))
    power = np.array([1.0])
    for ck in coeffs:
        term = ck * power
        c[: len(term)] += term
        power = P.polymul(power, [a, 1.0])
    return c


def _poly_moment(local, h, z):
    """``sum_q local[q] h**(q+1) chi_q(z h)``: int_0^h exp(-z r) p(r) dr."""
    ch = chi(len(local) - 1, z * h)
    out = np.zeros(np.shape(z), dtype=complex)
    for q, c in enumerate(local):
        if c != 0.0:
            out = out + c * h ** (q + 1) * ch[q]
    return out


def poly_fourier(coeffs, a, b, k, log_scale=0.0):
    """``exp(-log_scale) * int_a^b exp(-i k y) p(y) dy`` for ascending ``coeffs``.

    The integral is anchored at the end where ``|exp(-i k y)|`` is largest, so
    the remaining moment is bounded and only the anchor exponential carries
    the growth; combining it with ``log_scale`` keeps the result finite
    whenever the scaled value is representable.
    """
    k = np.asarray(k, dtype=complex)
    log_scale = np.broadcast_to(np.asarray(log_scale, dtype=complex), k.shape)
    h = b - a
    out = np.empty(k.shape, dtype=complex)
    upper = k.imag >= 0
    if upper.any():
        # y = b - r; p(b - r) has coefficients (-1)^q d_q
        d = taylor_shift(coeffs, b) * (-1.0) ** np.arange(max(len(coeffs), 1))
        ku = k[upper]
        out[upper] = np.exp(-1j * ku * b - log_scale[upper]) * _poly_moment(d, h, -1j * ku)
    lower = ~upper
    if lower.any():
        c = taylor_shift(coeffs, a)
        kl = k[lower]
        out[lower] = np.exp(-1j * kl * a - log_scale[lower]) * _poly_moment(c, h, 1j * kl)
    return out


def sampled_fourier(points, values, a, b, k, log_scale=0.0):
    """Scaled transform of the piecewise-linear interpolant of samples on ``[a, b]``."""
    pts = np.asarray(points, dtype=float)
    vals = np.asarray(values, dtype=float)
    knots = np.unique(np.concatenate([[a, b], pts[(pts > a) & (pts < b)]]))
    fv = np.interp(knots, pts, vals)
    k = np.asarray(k, dtype=complex)
    out = np.zeros(k.shape, dtype=complex)
    for lo, hi, flo, fhi in zip(knots[:-1], knots[1:], fv[:-1], fv[1:]):
        slope = (fhi - flo) / (hi - lo)
        out += poly_fourier((flo - slope * lo, slope), lo, hi, k, log_scale)
    return out


def layer_fourier(ic, a, b, k, log_scale=0.0):
    """Scaled finite Fourier transform of one layer's initial condition."""
    poly = as_polynomial(ic)
    if poly is not None:
        return poly_fourier(poly.coeffs, a, b, k, log_scale)
    if isinstance(ic, Sampled):
        return sampled_fourier(ic.points, ic.values, a, b, k, log_scale)
    raise InvalidSignal(f"unsupported initial condition {ic!r}")


def initial_transform(problem: ValidatedProblem, layer, k, cache=None):
    """``uhat0`` of layer ``layer`` (1-based) at ``k``, unscaled.

    Raises :class:`OverflowAtArgument` when ``|Im k|`` times the layer's far
    end exceeds the floating range; the spectral solver uses the scaled
    forms instead.
    """
    j = int(layer)
    if not 1 <= j <= problem.n_layers:
        raise IndexError(f"layer must be in 1..{problem.n_layers}, got {j}")
    a, b = float(problem.x[j - 1]), float(problem.x[j])
    k_arr = np.asarray(k, dtype=complex)
    if np.any(np.abs(k_arr.imag) * max(abs(a), abs(b)) > LOG_MAX):
        raise OverflowAtArgument(f"exp(-i k x) overflows on layer {j} at k = {k!r}")
    if cache is not None and k_arr.ndim == 0:
        key = ("u0", j, complex(k_arr))
        return cache.get_or_compute(key, lambda: complex(layer_fourier(problem.initial[j - 1], a, b, k_arr)))
    val = layer_fourier(problem.initial[j - 1], a, b, k_arr)
    return complex(val) if val.ndim == 0 else val


# ---------------------------------------------------------------------------
# Boundary data
# ---------------------------------------------------------------------------

def _phi0(z, t):
    """``t * chi_0(z t)`` = int_0^t exp(-z r) dr."""
    return t * chi(0, z * t)[0]


def scaled_boundary_core(signal, omega, t):
    """``exp(-omega t) * ftilde(omega, t)`` = int_0^t exp(-omega r) f(t - r) dr."""
    w = np.asarray(omega, dtype=complex)
    t = float(t)
    if t < 0:
        raise ValueError("horizon must be nonnegative")
    if t == 0.0:
        return np.zeros(w.shape, dtype=complex)
    if isinstance(signal, Constant):
        return signal.value * _phi0(w, t)
    if isinstance(signal, Polynomial):
        # f(t - r) = sum_q c_q r^q
        c = taylor_shift(signal.coeffs, t) * (-1.0) ** np.arange(max(len(signal.coeffs), 1))
        return _poly_moment(c, t, w)
    if isinstance(signal, Exponential):
        return signal.amplitude * math.exp(signal.rate * t) * _phi0(w + signal.rate, t)
    if isinstance(signal, (Cosine, Sine)):
        a = signal.frequency
        plus = np.exp(1j * a * t) * _phi0(w + 1j * a, t)
        minus = np.exp(-1j * a * t) * _phi0(w - 1j * a, t)
        if isinstance(signal, Cosine):
            return 0.5 * signal.amplitude * (plus + minus)
        return signal.amplitude * (plus - minus) / 2j
    if isinstance(signal, Sampled):
        return _sampled_core(signal, w, t)
    raise InvalidSignal(f"unsupported boundary signal {signal!r}")


def _sampled_core(signal, w, t):
    pts = np.asarray(signal.points)
    if pts[0] > 0.0 or pts[-1] < t:
        raise ValueError(f"sampled boundary data cover [{pts[0]}, {pts[-1]}], need [0, {t}]")
    knots = np.unique(np.concatenate([[0.0, t], pts[(pts > 0.0) & (pts < t)]]))
    fv = signal(knots)
    out = np.zeros(w.shape, dtype=complex)
    ch_cache = {}
    for lo, hi, flo, fhi in zip(knots[:-1], knots[1:], fv[:-1], fv[1:]):
        h = hi - lo
        slope = (fhi - flo) / h
        r_lo = t - hi
        if h not in ch_cache:
            ch_cache[h] = chi(1, w * h)
        ch = ch_cache[h]
        # s = hi - rho on this segment, f(s) = fhi - slope * rho
        seg = fhi * h * ch[0] - slope * h * h * ch[1]
        out += np.exp(-w * r_lo) * seg
    return out


def boundary_transform_scaled(signal, omega, t, scale_time=None):
    """``exp(-omega * scale_time) * ftilde(omega, t)``; ``scale_time`` defaults to ``t``."""
    core = scaled_boundary_core(signal, omega, t)
    if scale_time is None or scale_time == t:
        return core
    expo = np.asarray(omega, dtype=complex) * (t - scale_time)
    if np.any(expo.real > LOG_MAX):
        raise OverflowAtArgument("boundary transform overflows for the requested scaling")
    return core * np.exp(expo)


def boundary_transform(signal, omega, t, cache=None):
    """``ftilde(omega, t) = int_0^t exp(omega s) f(s) ds``."""
    w = np.asarray(omega, dtype=complex)
    if t < 0:
        raise ValueError("horizon must be nonnegative")
    if np.any((w * t).real > LOG_MAX):
        raise OverflowAtArgument(f"exp(omega t) overflows at omega = {omega!r}, t = {t}")

    def compute():
        val = scaled_boundary_core(signal, w, t) * np.exp(w * t)
        return complex(val) if val.ndim == 0 else val

    if cache is not None and w.ndim == 0:
        return cache.get_or_compute(("f", signal, complex(w), float(t)), compute)
    return compute()


class TransformCache:
    """Thread-safe memo table for scalar transform evaluations."""

    def __init__(self):
        self._data = {}
        self._lock = threading.Lock()

    def get_or_compute(self, key, fn):
        with self._lock:
            if key in self._data:
                return self._data[key]
        val = fn()
        with self._lock:
            return self._data.setdefault(key, val)

    def __len__(self):
        return len(self._data)
