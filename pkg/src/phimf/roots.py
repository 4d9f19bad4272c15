"""Zeros of the rational approximants psi_{n,s}.

Over the common denominator ``D(z) = prod_k ((z/2pi)^2 + k^2)`` the
approximant is ``N(z) / D(z)`` with a real polynomial ``N``.  ``N`` is
assembled exactly, its coefficients living in Q[pi], and rounded once.
The zeros are then found by Aberth-Ehrlich simultaneous iteration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import mpmath
import numpy as np

from .errors import DegreeTooLarge, NoConvergence
from .scalar import TWO_PI, bernoulli_numbers, check_order, even_taylor_coefficients

__all__ = [
    "RealPolynomial", "RootSet", "numerator_poly", "denominator_poly", "aberth_roots",
    "zeros_psi_ns", "MAX_DEGREE",
]

MAX_DEGREE = 400
_DPS = 60


@dataclass(frozen=True)
class RealPolynomial:
    """``P(z) = 10^exponent * sum_i coefficients[i] * (z / scale)^i``.

    Coefficients are ascending and normalized so the largest has modulus 1;
    ``scale`` balances their magnitudes.  Roots of the normalized
    polynomial times ``scale`` are the roots of ``P``.
    """

    coefficients: np.ndarray
    scale: float = 1.0
    exponent: float = 0.0

    def __post_init__(self):
        c = np.trim_zeros(np.asarray(self.coefficients, dtype=float), "b")
        if c.size == 0:
            raise ValueError("zero polynomial")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    @classmethod
    def from_coefficients(cls, coeffs) -> "RealPolynomial":
        """Plain polynomial from ascending coefficients (no scaling)."""
        return cls(np.asarray(coeffs, dtype=float))

    def normalized(self, x):
        """``sum_i c_i x^i`` with ``x = z / scale``, by Horner."""
        x = np.asarray(x, dtype=complex)
        out = np.zeros_like(x)
        for c in self.coefficients[::-1]:
            out = out * x + c
        return out

    def __call__(self, z):
        """Value ``P(z)``; may overflow for polynomials with huge coefficients."""
        return 10.0 ** self.exponent * self.normalized(np.asarray(z) / self.scale)


@dataclass(frozen=True)
class RootSet:
    """Roots in ``z`` (sorted by imaginary part, then real part).

    ``residual_max`` is the largest relative Newton correction
    ``|P(r) / P'(r)| / max(1, |r|)`` at the returned roots.
    """

    roots: np.ndarray
    residual_max: float
    iterations: int

    def __len__(self) -> int:
        return self.roots.size


# ---------------------------------------------------------------------------
# exact construction
# ---------------------------------------------------------------------------
# A polynomial in y is a list of coefficients; a coefficient in Q[pi] is a
# dict {power of pi: Fraction}.

def _qpi_add(a: dict, b: dict, scale=Fraction(1)) -> dict:
    out = dict(a)
    for e, v in b.items():
        out[e] = out.get(e, Fraction(0)) + scale * v
        if out[e] == 0:
            del out[e]
    return out


def _int_poly_mul(a: list, b: list) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _shift_products(s: int) -> tuple[list, list]:
    """``D(y) = prod_k (y^2 + k^2)`` and ``S(y) = sum_k k^(-2n') prod_{j!=k}`` pieces.

    Returns ``D`` and the list of cofactors ``prod_{j != k}(y^2 + j^2)``, all
    with integer coefficients.
    """
    D = [1]
    for k in range(1, s + 1):
        D = _int_poly_mul(D, [k * k, 0, 1])
    cof = []
    for k in range(1, s + 1):
        # synthetic division of D by y^2 + k^2
        q = [0] * (len(D) - 2)
        rem = list(D)
        for i in range(len(D) - 1, 1, -1):
            c = rem[i]
            q[i - 2] = c
            rem[i] -= c
            rem[i - 2] -= c * k * k
        assert not any(rem), "exact division failed"
        cof.append(q)
    return D, cof


def _numerator_y(n: int, s: int) -> list:
    """Coefficients (in Q[pi]) of ``N(2 pi y)`` as a polynomial in ``y``."""
    D, cof = _shift_products(s)
    B = bernoulli_numbers(max(2 * n, 2))
    # p_n(2 pi y) = 1 - pi y + sum_i B_2i (2pi)^(2i) / (2i)! y^(2i)
    p = [{0: Fraction(1)}, {1: Fraction(-1)}]
    for i in range(1, n + 1):
        p += [dict(), dict()]
        p[2 * i] = {2 * i: B[2 * i] * 2 ** (2 * i) / factorial(2 * i)}
    deg = max(len(p) - 1 + len(D) - 1, 2 * n + 2 + len(D) - 3)
    N = [dict() for _ in range(deg + 1)]
    for i, pc in enumerate(p):
        if not pc:
            continue
        for j, dc in enumerate(D):
            if dc:
                N[i + j] = _qpi_add(N[i + j], pc, Fraction(dc))
    sign = -2 if n % 2 else 2
    S = [Fraction(0)] * (len(D) - 2)
    for k, q in enumerate(cof, start=1):
        w = Fraction(1, k ** (2 * n))
        for j, c in enumerate(q):
            S[j] += w * c
    for j, c in enumerate(S):
        if c:
            N[2 * n + 2 + j] = _qpi_add(N[2 * n + 2 + j], {0: sign * c})
    while N and not N[-1]:
        N.pop()
    return N


def _to_real_polynomial(coeffs_y: list) -> RealPolynomial:
    """Round Q[pi] coefficients in ``y = z / 2pi`` once and rebalance."""
    with mpmath.workdps(_DPS):
        pi = mpmath.pi
        vals = []
        for c in coeffs_y:
            v = mpmath.mpf(0)
            for e, q in c.items():
                v += mpmath.mpf(q.numerator) / q.denominator * pi ** e
            vals.append(v)
        deg = len(vals) - 1
        # balance: x = y / sigma with sigma^deg = |c_0 / c_deg|
        sigma = (abs(vals[0]) / abs(vals[-1])) ** (mpmath.mpf(1) / deg) if deg > 0 and vals[0] != 0 else mpmath.mpf(1)
        scaled = [v * sigma ** i for i, v in enumerate(vals)]
        big = max(abs(v) for v in scaled)
        coeffs = np.array([float(v / big) for v in scaled])
        scale = float(2 * pi * sigma)  # z = 2 pi y = 2 pi sigma x
        exponent = float(mpmath.log10(big))
    return RealPolynomial(coeffs, scale=scale, exponent=exponent)


def numerator_poly(n: int, s: int) -> RealPolynomial:
    """Numerator of ``psi_{n,s}`` over ``prod_{k<=s} ((z/2pi)^2 + k^2)``.

    The degree is ``2s + 1`` for ``n = 0`` and ``2n + 2s`` otherwise.
    """
    check_order(n, s)
    if s < 1:
        raise ValueError("s must be at least 1")
    expected = 2 * s + 1 if n == 0 else 2 * n + 2 * s
    if expected > MAX_DEGREE:
        raise DegreeTooLarge(f"numerator degree {expected} exceeds {MAX_DEGREE}")
    N = _numerator_y(n, s)
    poly = _to_real_polynomial(N)
    if poly.degree != expected:
        raise AssertionError(f"numerator degree {poly.degree} != {expected}")
    return poly


def denominator_poly(s: int, scale: float | None = None) -> RealPolynomial:
    """``prod_{k<=s} ((z/2pi)^2 + k^2)`` in the same representation."""
    D, _ = _shift_products(s)
    poly = _to_real_polynomial([{0: Fraction(c)} if c else {} for c in D])
    return poly


def ratio_value(num: RealPolynomial, den: RealPolynomial, z) -> np.ndarray:
    """``num(z) / den(z)`` without forming either value separately."""
    z = np.asarray(z, dtype=complex)
    return (num.normalized(z / num.scale) / den.normalized(z / den.scale)
            * 10.0 ** (num.exponent - den.exponent))


# ---------------------------------------------------------------------------
# Aberth-Ehrlich
# ---------------------------------------------------------------------------

def _newton_polygon_guesses(c: np.ndarray) -> np.ndarray:
    """Initial points on circles whose radii come from the upper convex hull
    of ``(i, log|c_i|)``."""
    deg = c.size - 1
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(c))
    pts = [i for i in range(deg + 1) if np.isfinite(logs[i])]
    hull: list[int] = []
    for i in pts:
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b if it lies on or below the segment a -> i
            if (logs[b] - logs[a]) * (i - a) <= (logs[i] - logs[a]) * (b - a):
                hull.pop()
            else:
                break
        hull.append(i)
    guesses = []
    sigma = 0.7  # fixed angular offset keeps circles from aligning
    for a, b in zip(hull[:-1], hull[1:]):
        count = b - a
        radius = np.exp((logs[a] - logs[b]) / count)
        ang = TWO_PI * np.arange(count) / count + TWO_PI * a / deg + sigma
        guesses.append(radius * np.exp(1j * ang))
    out = np.concatenate(guesses) if guesses else np.zeros(0, dtype=complex)
    # zero roots from vanishing low-order coefficients
    return np.concatenate([np.zeros(pts[0], dtype=complex), out]) if pts[0] else out


def _newton_ratio(c: np.ndarray, x: np.ndarray, with_noise: bool = False):
    """``p(x) / p'(x)``, using the reversed polynomial where ``|x| > 1``.

    With ``with_noise`` also returns a mask of points where ``|p(x)|`` is at
    the rounding level ``4 eps sum |c_i| |x|^i`` of Horner's rule.
    """
    deg = c.size - 1
    ac = np.abs(c)
    out = np.empty_like(x)
    noise = np.zeros(x.shape, dtype=bool)
    eps = np.finfo(float).eps
    inner = np.abs(x) <= 1
    if np.any(inner):
        xi = x[inner]
        p = np.zeros_like(xi) + c[-1]
        dp = np.zeros_like(xi)
        ax = np.abs(xi)
        bound = np.zeros(xi.shape) + ac[-1]
        for a, b in zip(c[-2::-1], ac[-2::-1]):
            dp = dp * xi + p
            p = p * xi + a
            bound = bound * ax + b
        with np.errstate(divide="ignore", invalid="ignore"):
            out[inner] = p / dp
        noise[inner] = np.abs(p) <= 4 * deg * eps * bound
    outer = ~inner
    if np.any(outer):
        xo = x[outer]
        y = 1.0 / xo
        ay = np.abs(y)
        # q(y) = y^deg p(1/y) has ascending coefficients c[::-1]
        q = np.zeros_like(y) + c[0]
        dq = np.zeros_like(y)
        bound = np.zeros(y.shape) + ac[0]
        for a, b in zip(c[1:], ac[1:]):
            dq = dq * y + q
            q = q * y + a
            bound = bound * ay + b
        with np.errstate(divide="ignore", invalid="ignore"):
            out[outer] = xo / (deg - y * dq / q)
        noise[outer] = np.abs(q) <= 4 * deg * eps * bound
    out[~np.isfinite(out)] = 0.0  # exact zero of p
    return (out, noise) if with_noise else out


def _aberth_iterate(x: np.ndarray, newton, tol: float, max_iter: int):
    """Aberth-Ehrlich sweeps from ``x``; returns ``(x, iterations, converged)``."""
    deg = x.size
    active = np.ones(deg, dtype=bool)
    it = 0
    for it in range(1, max_iter + 1):
        idx = np.flatnonzero(active)
        xa = x[idx]
        ratio, noise = newton(xa)
        diff = xa[:, None] - x[None, :]
        diff[np.arange(idx.size), idx] = 1.0
        inv = 1.0 / diff
        inv[np.arange(idx.size), idx] = 0.0
        corr = ratio / (1.0 - ratio * inv.sum(axis=1))
        x[idx] = xa - corr
        done = noise | (np.abs(corr) <= tol * np.maximum(np.abs(x[idx]), np.finfo(float).tiny))
        active[idx[done]] = False
        if not np.any(active):
            return x, it, True
    return x, it, False


def aberth_roots(p: RealPolynomial, tol: float = 1e-14, max_iter: int = 500,
                 newton=None) -> RootSet:
    """All roots of ``p`` by Aberth-Ehrlich iteration.

    Starting points come from the Newton polygon of the coefficients.  A
    root is frozen once its correction is below ``tol`` relative to its
    modulus, or once ``|p|`` there has reached the rounding level of the
    evaluation.  Conjugate symmetry is enforced afterwards by pairing.

    ``newton``, if given, maps points ``x`` of the normalized variable to
    ``(p(x) / p'(x), at_noise_level)``.  It lets a caller supply a better
    conditioned evaluation of the same polynomial.
    """
    c = p.coefficients
    if p.degree < 1:
        raise ValueError("degree must be at least 1")
    if newton is None:
        newton = lambda xa: _newton_ratio(c, xa, with_noise=True)  # noqa: E731
    x, it, ok = _aberth_iterate(_newton_polygon_guesses(c).astype(complex), newton, tol, max_iter)
    if not ok:
        raise NoConvergence(f"Aberth iteration did not converge in {max_iter} steps")
    x = _pair_conjugates(x)
    residual = np.abs(newton(x)[0]) / np.maximum(1.0, np.abs(x))
    return _root_set(x * p.scale, float(residual.max()), it)


def _root_set(roots: np.ndarray, residual: float, iterations: int) -> RootSet:
    order = np.lexsort((roots.real, roots.imag))
    return RootSet(roots[order], residual, iterations)


def _pair_conjugates(x: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    x = x.copy()
    scale = np.maximum(np.abs(x), 1.0)
    real = np.abs(x.imag) <= tol * scale
    x[real] = x[real].real
    upper = np.flatnonzero(x.imag > 0)
    lower = list(np.flatnonzero(x.imag < 0))
    for i in upper:
        if not lower:
            break
        j = min(lower, key=lambda j: abs(x[j] - np.conj(x[i])))
        lower.remove(j)
        mid = 0.5 * (x[i] + np.conj(x[j]))
        x[i], x[j] = mid, np.conj(mid)
    return x


def _psi_ns_newton(n: int, s: int, scale: float):
    """Newton ratio of the numerator of ``psi_{n,s}`` from the pole form.

    With ``N = psi_{n,s} D``, ``N / N' = psi / (psi' + psi D'/D)``; in the
    normalized variable ``x = z / scale`` the ratio is divided by ``scale``.
    """
    coeffs = np.array(even_taylor_coefficients(n))
    k = np.arange(1, s + 1, dtype=float)
    kw = np.power(k, -2.0 * n)
    k2 = k * k
    sign = -2.0 if n % 2 else 2.0
    eps = np.finfo(float).eps

    def newton(x):
        z = np.asarray(x, dtype=complex) * scale
        z2 = z * z
        # polynomial part and its derivative, Horner in z^2
        p = np.zeros_like(z)
        dp = np.zeros_like(z)
        mag = np.zeros(z.shape)
        az2 = np.abs(z2)
        for i in range(n, 0, -1):
            dp = dp * z2 + 2 * i * coeffs[i - 1]
            p = p * z2 + coeffs[i - 1]
            mag = mag * az2 + abs(coeffs[i - 1])
        p, dp, mag = 1.0 - 0.5 * z + p * z2, -0.5 + dp * z, 1.0 + 0.5 * np.abs(z) + mag * az2
        w = (z / TWO_PI) ** 2
        wn = w ** n
        den = w[:, None] + k2
        terms = kw * (wn * w)[:, None] / den
        r = sign * terms.sum(axis=1)
        dr_dw = sign * (kw * ((n + 1) * wn[:, None] * den - (wn * w)[:, None]) / den ** 2).sum(axis=1)
        dr = dr_dw * 2.0 * z / TWO_PI ** 2
        psi = p + r
        dpsi = dp + dr
        dlogD = (2.0 * z[:, None] / (z2[:, None] + (TWO_PI * k) ** 2)).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = psi / (dpsi + psi * dlogD) / scale
        ratio[~np.isfinite(ratio)] = 0.0
        noise = np.abs(psi) <= 8 * (s + n + 1) * eps * (mag + 2 * np.abs(terms).sum(axis=1))
        return ratio, noise

    return newton


def _mp_psi_ns_ratio(n: int, s: int):
    """``N / N'`` of the numerator of ``psi_{n,s}`` at an mpmath point, from the pole form."""
    B = bernoulli_numbers(2 * n)
    exact = [B[2 * i] / factorial(2 * i) for i in range(1, n + 1)]
    sign = -2 if n % 2 else 2

    def ratio(z):
        # coefficients at the caller's working precision, not the default 53 bits
        coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in exact]
        two_pi = 2 * mpmath.pi
        z2 = z * z
        p, dp = 1 - z / 2, mpmath.mpf(-0.5)
        zp = z
        for i, c in enumerate(coeffs, start=1):
            dp += 2 * i * c * zp  # zp = z^(2i - 1)
            zp *= z
            p += c * zp
            zp *= z
        w = z2 / two_pi ** 2
        wn = w ** n
        r = dr_dw = dlogD = mpmath.mpf(0)
        for k in range(1, s + 1):
            kk = k * k
            kw = mpmath.mpf(k) ** (-2 * n)
            den = w + kk
            r += kw / den
            dr_dw += kw * ((n + 1) * wn * den - wn * w) / den ** 2
            dlogD += 2 * z / (z2 + (two_pi * k) ** 2)
        r *= sign * wn * w
        dr = sign * dr_dw * 2 * z / two_pi ** 2
        psi = p + r
        return psi / (dp + dr + psi * dlogD)

    return ratio


def _polish_mp(z: np.ndarray, ratio, dps: int, max_iter: int = 100) -> np.ndarray:
    """Aberth sweeps in ``dps``-digit arithmetic until every correction is below
    double-precision resolution.  Separates iterates that met at one root."""
    with mpmath.workdps(dps):
        x = [mpmath.mpc(complex(v)) for v in z]
        deg = len(x)
        active = list(range(deg))
        for _ in range(max_iter):
            still = []
            for i in active:
                r = ratio(x[i])
                if r == 0:
                    continue
                rep = mpmath.fsum(1 / (x[i] - x[j]) for j in range(deg) if j != i)
                corr = r / (1 - r * rep)
                x[i] -= corr
                if abs(corr) > 1e-18 * abs(x[i]):
                    still.append(i)
            active = still
            if not active:
                return np.array([complex(v) for v in x])
    raise NoConvergence(f"root refinement did not converge in {max_iter} sweeps")


def zeros_psi_ns(n: int, s: int, tol: float = 1e-14, max_iter: int = 500) -> RootSet:
    """Zeros of ``psi_{n,s}``, as many as the degree of its numerator.

    The exact numerator fixes the root count and the starting points.  A
    double-precision Aberth pass evaluates the numerator through the pole
    form of ``psi_{n,s}``, which is far better conditioned than the expanded
    coefficients.  The pole form still cancels heavily for large roots, so
    the result is polished in extended precision, with digits added in
    proportion to the measured cancellation.  Sorted by imaginary part.
    """
    N = numerator_poly(n, s)
    newton = _psi_ns_newton(n, s, N.scale)
    x, it, _ = _aberth_iterate(_newton_polygon_guesses(N.coefficients).astype(complex), newton,
                               tol, max_iter)
    z = x * N.scale
    dps = 30 + int(np.ceil(np.log10(max(_cancellation(n, s, z), 1.0))))
    z = _pair_conjugates(_polish_mp(z, _mp_psi_ns_ratio(n, s), dps) / N.scale) * N.scale
    residual = np.abs(newton(z / N.scale)[0]) / np.maximum(1.0, np.abs(z / N.scale))
    return _root_set(z, float(residual.max()), it)


def _cancellation(n: int, s: int, z: np.ndarray) -> float:
    """Largest ratio of term magnitudes to ``|psi_{n,s}|`` scale over ``z``: the
    size of the Taylor part ``sum |c_i| |z|^(2i)`` and of the pole sum."""
    az = np.abs(z)
    mag = 1.0 + 0.5 * az
    for i, c in enumerate(even_taylor_coefficients(n), start=1):
        mag = mag + abs(c) * az ** (2 * i)
    w = (az / TWO_PI) ** 2
    k = np.arange(1, s + 1, dtype=float)
    poles = 2 * (w ** (n + 1))[:, None] * k ** (-2.0 * n) / np.abs(
        (z[:, None] / TWO_PI) ** 2 + k * k)
    return float(np.max(mag + poles.sum(axis=1)))
