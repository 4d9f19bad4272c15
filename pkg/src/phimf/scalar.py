"""Scalar evaluation of psi_1, phi_1 and the mixed polynomial-rational family.

All public functions accept Python scalars or numpy arrays (real or complex)
and return the same shape.  Real input gives real output wherever the
function is real on the real axis.

The family member ``psi_ns(z, n, s)`` is the degree-2n Maclaurin polynomial
of ``psi1(z) = z / (e^z - 1)`` plus ``s`` pole-pair corrections; its error on
the real axis is bounded by ``truncation_bound(n, s, |z|)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, log10, pi
from typing import NamedTuple

import mpmath
import numpy as np

from .errors import PoleProximity

TWO_PI = 2.0 * pi

#: Distance to a pole below which evaluation raises :class:`PoleProximity`.
POLE_RADIUS = 1e-8
#: ``|z|`` below which the removable singularities are handled by series.
SERIES_SWITCH = 0.25
SERIES_DEGREE = 30
MAX_BERNOULLI_INDEX = 400


# ---------------------------------------------------------------------------
# Bernoulli numbers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BernoulliTable:
    """Exact Bernoulli numbers ``B_0 .. B_max_index`` (convention B_1 = -1/2)."""

    values: tuple[Fraction, ...]

    @property
    def max_index(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)


@lru_cache(maxsize=None)
def _bernoulli_bucket(top: int) -> tuple[Fraction, ...]:
    B = [Fraction(1)]
    for k in range(1, top + 1):
        if k > 1 and k % 2 == 1:
            B.append(Fraction(0))
            continue
        acc = sum((comb(k + 1, j) * B[j] for j in range(k)), Fraction(0))
        B.append(-acc / (k + 1))
    return tuple(B)


def bernoulli_numbers(max_index: int) -> BernoulliTable:
    """Exact Bernoulli numbers from ``sum_{j<=k} C(k+1, j) B_j = 0``."""
    if max_index < 0:
        raise ValueError("max_index must be nonnegative")
    if max_index > MAX_BERNOULLI_INDEX:
        raise ValueError(f"max_index > {MAX_BERNOULLI_INDEX} is not supported")
    top = max(64, -(-max_index // 64) * 64)
    return BernoulliTable(_bernoulli_bucket(min(top, MAX_BERNOULLI_INDEX))[: max_index + 1])


def bernoulli_poly(k: int, t):
    """Bernoulli polynomial ``B_k(t) = sum_j C(k, j) B_j t^(k-j)``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    B = bernoulli_numbers(k)
    # descending powers of t: coefficient of t^(k-j) is C(k, j) B_j
    coeffs = [float(comb(k, j) * B[j]) for j in range(k + 1)]
    return np.polyval(coeffs, t) if np.ndim(t) else float(np.polyval(coeffs, float(t)))


@lru_cache(maxsize=None)
def even_taylor_coefficients(n: int) -> tuple[float, ...]:
    """``B_{2i} / (2i)!`` for ``i = 1..n``, each rounded once from the exact value."""
    B = bernoulli_numbers(2 * n)
    return tuple(float(B[2 * i] / factorial(2 * i)) for i in range(1, n + 1))


@lru_cache(maxsize=None)
def _psi_series_coeffs() -> np.ndarray:
    B = bernoulli_numbers(SERIES_DEGREE)
    return np.array([float(B[k] / factorial(k)) for k in range(SERIES_DEGREE + 1)])


@lru_cache(maxsize=None)
def _phi_series_coeffs() -> np.ndarray:
    return np.array([1.0 / factorial(k + 1) for k in range(SERIES_DEGREE + 1)])


# ---------------------------------------------------------------------------
# zeta at even integers
# ---------------------------------------------------------------------------

def _zeta_even_rational(two_l: int) -> Fraction:
    # zeta(2l) = |B_2l| 2^(2l-1) pi^(2l) / (2l)!; returns the rational factor
    if two_l < 2 or two_l % 2:
        raise ValueError("argument must be an even integer >= 2")
    B = bernoulli_numbers(two_l)[two_l]
    return abs(B) * 2 ** (two_l - 1) / factorial(two_l)


def zeta_even(two_l: int) -> float:
    """Riemann zeta at an even integer, from the Bernoulli-number closed form."""
    return float(_zeta_even_rational(two_l)) * pi ** two_l


@lru_cache(maxsize=4096)
def zeta_tail(two_l: int, s: int) -> float:
    """``zeta(2l) - sum_{k<=s} k^(-2l)`` without cancellation.

    The closed-form zeta value and the partial sum are combined in extended
    precision, then rounded once.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    if s == 0:
        return zeta_even(two_l)
    dps = 30 + int(two_l * log10(s + 1)) + 1
    with mpmath.workdps(dps):
        q = _zeta_even_rational(two_l)
        z = mpmath.mpf(q.numerator) / q.denominator * mpmath.pi ** two_l
        partial = mpmath.fsum(mpmath.mpf(k) ** (-two_l) for k in range(1, s + 1))
        return float(z - partial)


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

def _prepare(z):
    arr = np.asarray(z)
    if arr.dtype.kind not in "fc":
        arr = arr.astype(float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("evaluation points must be finite")
    return arr


def _finish(out: np.ndarray, like):
    if np.ndim(like) == 0:
        return out[()].item() if isinstance(out[()], np.generic) else out[()]
    return out


def _check_imaginary_poles(z: np.ndarray, spacing: float, kmax: int | None = None,
                           what: str = "psi1") -> None:
    """Raise if ``z`` lies within POLE_RADIUS of ``i*k*spacing`` for ``k != 0``."""
    if z.dtype.kind != "c":
        # real points can only approach the lattice through k = 0, which is excluded
        return
    k = np.rint(z.imag / spacing)
    if kmax is not None:
        k = np.clip(k, -kmax, kmax)
    near = (k != 0) & (np.abs(z - 1j * spacing * k) < POLE_RADIUS)
    if np.any(near):
        bad = np.asarray(z)[near].ravel()[0]
        raise PoleProximity(f"{what}: argument {bad!r} is within {POLE_RADIUS:g} of a pole")


# ---------------------------------------------------------------------------
# psi_1, phi_1, q_t, w_t, r_t
# ---------------------------------------------------------------------------

def _psi1_raw(z: np.ndarray) -> np.ndarray:
    out = np.empty(z.shape, dtype=z.dtype)
    small = np.abs(z) < SERIES_SWITCH
    out[small] = np.polyval(_psi_series_coeffs()[::-1], z[small])
    zb = z[~small]
    with np.errstate(over="ignore", invalid="ignore"):
        pos = zb.real > 0
        vals = np.empty_like(zb)
        vals[~pos] = zb[~pos] / np.expm1(zb[~pos])
        zp = zb[pos]
        vals[pos] = zp * np.exp(-zp) / -np.expm1(-zp)
    out[~small] = vals
    return out


def _phi1_raw(z: np.ndarray) -> np.ndarray:
    out = np.empty(z.shape, dtype=z.dtype)
    small = np.abs(z) < SERIES_SWITCH
    out[small] = np.polyval(_phi_series_coeffs()[::-1], z[small])
    zb = z[~small]
    with np.errstate(over="ignore", invalid="ignore"):
        out[~small] = np.expm1(zb) / zb
    return out


def psi1(z):
    """``z / (e^z - 1)``, the reciprocal of phi_1; equals 1 at ``z = 0``."""
    arr = _prepare(z)
    _check_imaginary_poles(arr, TWO_PI)
    return _finish(_psi1_raw(arr), z)


def phi1(z):
    """``(e^z - 1) / z``, entire, equals 1 at ``z = 0``."""
    arr = _prepare(z)
    return _finish(_phi1_raw(arr), z)


def _check_horizon(t: float, tau: float) -> None:
    if not tau > 0:
        raise ValueError("tau must be positive")
    if not 0.0 <= t <= tau:
        raise ValueError("t must satisfy 0 <= t <= tau")


def q_t(z, t: float, tau: float):
    """``z e^(zt) / (e^(tau z) - 1)``, with ``q_t(0) = 1/tau``."""
    _check_horizon(t, tau)
    arr = _prepare(z)
    _check_imaginary_poles(arr, TWO_PI / tau, what="q_t")
    x = tau * arr
    out = np.empty(arr.shape, dtype=arr.dtype)
    with np.errstate(over="ignore", invalid="ignore"):
        pos = (arr.real > 0) & (np.abs(x) >= SERIES_SWITCH)
        zp = arr[pos]
        out[pos] = zp * np.exp(zp * (t - tau)) / -np.expm1(-tau * zp)
        rest = ~pos
        out[rest] = _psi1_raw(x[rest]) / tau * np.exp(arr[rest] * t)
    return _finish(out, z)


def w_t(z, t: float, tau: float):
    """``(e^(zt) - 1) / (e^(tau z) - 1)``, with ``w_t(0) = t/tau``."""
    _check_horizon(t, tau)
    arr = _prepare(z)
    _check_imaginary_poles(arr, TWO_PI / tau, what="w_t")
    if t == 0:
        return _finish(np.zeros(arr.shape, dtype=arr.dtype), z)
    if t == tau:
        return _finish(np.ones(arr.shape, dtype=arr.dtype), z)
    x = tau * arr
    out = np.empty(arr.shape, dtype=arr.dtype)
    small = np.abs(x) < SERIES_SWITCH
    out[small] = (t / tau) * _phi1_raw(arr[small] * t) * _psi1_raw(x[small])
    with np.errstate(over="ignore", invalid="ignore"):
        pos = ~small & (arr.real > 0)
        zp = arr[pos]
        out[pos] = np.exp(zp * (t - tau)) * np.expm1(-zp * t) / np.expm1(-tau * zp)
        neg = ~small & ~pos
        zn = arr[neg]
        out[neg] = np.expm1(zn * t) / np.expm1(tau * zn)
    return _finish(out, z)


def r_t(z, t: float):
    """``e^(zt) / (e^(2 pi z) - 1)`` for ``0 <= t <= 2 pi``; poles at ``ik``, k integer."""
    _check_horizon(t, TWO_PI)
    arr = _prepare(z)
    if np.any(np.abs(arr) < POLE_RADIUS):
        raise PoleProximity("r_t has a pole at z = 0")
    _check_imaginary_poles(arr, 1.0, what="r_t")
    with np.errstate(over="ignore", invalid="ignore"):
        pos = arr.real > 0
        out = np.empty(arr.shape, dtype=arr.dtype)
        zp = arr[pos]
        out[pos] = np.exp(zp * (t - TWO_PI)) / -np.expm1(-TWO_PI * zp)
        zn = arr[~pos]
        out[~pos] = np.exp(zn * t) / np.expm1(TWO_PI * zn)
    return _finish(out, z)


# ---------------------------------------------------------------------------
# the (n, s) family
# ---------------------------------------------------------------------------

class ApproxParams(NamedTuple):
    """Member ``(n, s)`` of the family: polynomial degree 2n, s pole pairs."""

    n: int
    s: int


def check_order(n: int, s: int = 0) -> None:
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    if int(s) != s or s < 0:
        raise ValueError(f"s must be a nonnegative integer, got {s!r}")


def taylor_part(z, n: int):
    """Maclaurin part ``p_n(z) = 1 - z/2 + sum_{i=1}^{n} B_{2i} z^{2i} / (2i)!``."""
    check_order(n)
    arr = _prepare(z)
    z2 = arr * arr
    acc = np.zeros_like(arr)
    for c in reversed(even_taylor_coefficients(n)):
        acc = (acc + c) * z2
    return _finish(1.0 - 0.5 * arr + acc, z)


def _pole_weights(n: int, s: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(1, s + 1, dtype=float)
    with np.errstate(under="ignore"):
        return k, np.power(k, -2.0 * n)


def rational_part(z, n: int, s: int):
    """``2 (-1)^n u^(2n+2) sum_{k=1}^{s} 1 / (k^(2n) (u^2 + k^2))`` with ``u = z / 2 pi``."""
    check_order(n, s)
    arr = _prepare(z)
    if s == 0:
        return _finish(np.zeros_like(arr), z)
    _check_imaginary_poles(arr, TWO_PI, kmax=s, what="rational_part")
    w = (arr / TWO_PI) ** 2
    k, kw = _pole_weights(n, s)
    terms = kw / (w[..., None] + k * k)
    total = np.zeros_like(w)
    for j in range(s):  # ascending k
        total = total + terms[..., j]
    sign = -2.0 if n % 2 else 2.0
    return _finish(sign * w ** (n + 1) * total, z)


def psi_ns(z, n: int, s: int):
    """Mixed polynomial-rational approximant ``p_n(z) + r_{n,s}(z)`` of psi1."""
    return taylor_part(z, n) + rational_part(z, n, s)


def truncation_bound(n: int, s: int, z_magnitude):
    """Upper bound on ``|psi_ns(x) - psi1(x)|`` for real ``x`` with ``|x| = z_magnitude``.

    ``2 (|x|/2pi)^(2n+2) (zeta(2n+2) - sum_{k<=s} k^-(2n+2))``.
    """
    check_order(n, s)
    tail = zeta_tail(2 * n + 2, s)
    mag = np.asarray(z_magnitude, dtype=float)
    out = 2.0 * (mag / TWO_PI) ** (2 * n + 2) * tail
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# accelerated Fourier series for y_t
# ---------------------------------------------------------------------------

def bernoulli_part_coefficients(n: int, t: float) -> np.ndarray:
    """Coefficients ``c_j`` with ``p_{n,t}(z) = sum_{j=1}^{2n} c_j z^j`` (index 0 unused)."""
    check_order(n)
    if not 0.0 <= t <= TWO_PI:
        raise ValueError("t must lie in [0, 2 pi]")
    c = np.zeros(2 * n + 1)
    x = t / TWO_PI
    for i in range(2, 2 * n + 2):
        c[i - 1] = TWO_PI ** (i - 1) / factorial(i) * bernoulli_poly(i, x)
    return c


def y_t_accelerated(z, t: float, n: int, s: int):
    """Accelerated series for ``y_t(z)``: Bernoulli part plus ``s`` series terms.

    ``y_t(z) = p_{n,t}(z) + ((-1)^n / pi) sum_k z^(2n) (z cos kt + z^2 sin(kt)/k)
    / (k^(2n) (z^2 + k^2))``.  For ``n = 0`` this is the plain truncated series.
    """
    check_order(n, s)
    if not 0.0 <= t <= TWO_PI:
        raise ValueError("t must lie in [0, 2 pi]")
    arr = _prepare(z)
    _check_imaginary_poles(arr, 1.0, kmax=s, what="y_t")
    c = bernoulli_part_coefficients(n, t)
    poly = np.polyval(c[::-1], arr)
    if s == 0:
        return _finish(np.asarray(poly), z)
    k, kw = _pole_weights(n, s)
    cos_kt, sin_k = np.cos(k * t), np.sin(k * t) / k
    zz = arr[..., None]
    terms = kw * (zz * cos_kt + zz * zz * sin_k) / (zz * zz + k * k)
    series = np.zeros_like(arr)
    for j in range(s):
        series = series + terms[..., j]
    sign = -1.0 if n % 2 else 1.0
    return _finish(poly + sign / pi * arr ** (2 * n) * series, z)
