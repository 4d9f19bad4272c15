"""Off-diagonal decay bounds for psi_1 of symmetric banded matrices.

Outside the band of the polynomial part, an entry of ``psi_1(A)`` is
bounded by a rational term, built from the Demko-Moss-Smith estimates for
the inverses of ``(A/2pi)^2 + k^2 I``, plus a truncation term that does not
depend on the entry.  The classical alternative bound from best polynomial
approximation on a Bernstein ellipse is provided for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, factorial, sqrt
from typing import NamedTuple

import numpy as np

from .errors import BandViolation
from .matrix import SymBandMatrix, as_dense, half_bandwidth, jacobi_eig, spectral_radius
from .scalar import MAX_BERNOULLI_INDEX, TWO_PI, bernoulli_numbers, check_order, psi1, zeta_tail

__all__ = [
    "DecayBoundParams", "DecayBound", "dms_constants", "decay_params", "decay_bound_entry",
    "best_poly_bound", "estimate_M", "choose_chi", "psi_series_oracle", "verify_decay",
    "DecayReport",
]


def dms_constants(k: int, rho: float, m: int) -> tuple[float, float]:
    """``(C_k, lambda_k)`` for the shifted matrix ``(A/2pi)^2 + k^2 I``.

    Its spectrum lies in ``[a_k, b_k] = [k^2, (rho/2pi)^2 + k^2]``; with
    ``r = b_k / a_k`` the decay rate is ``((sqrt r - 1)/(sqrt r + 1))^(1/(2m))``.
    """
    if k < 1 or rho < 0 or m < 1:
        raise ValueError("need k >= 1, rho >= 0, m >= 1")
    a = float(k) * k
    b = (rho / TWO_PI) ** 2 + a
    r = b / a
    sr = sqrt(r)
    lam = ((sr - 1.0) / (sr + 1.0)) ** (1.0 / (2 * m))
    C = max(1.0 / a, (1.0 + sr) ** 2 / (2.0 * a * r))
    return C, lam


@dataclass(frozen=True)
class DecayBoundParams:
    """Everything the entrywise bound needs, computed once per matrix.

    ``per_k[k-1] = (a_k, b_k, r_k, lambda_k, C_k)``.
    """

    dim: int
    half_bandwidth: int
    accel_order: int
    pole_count: int
    spectral_radius: float
    norm_over_2pi: float
    per_k: tuple
    pair_factor: float = 1.0

    def __post_init__(self):
        for a, b, r, lam, C in self.per_k:
            if not (0 < a < b or (a == b and self.spectral_radius == 0)):
                raise ValueError("need a_k < b_k")
            if not (0 <= lam < 1 and C >= 1.0 / a):
                raise ValueError("invalid Demko-Moss-Smith constants")

    @property
    def weights(self) -> np.ndarray:
        """``C_k / k^(2n)``."""
        k = np.arange(1, self.pole_count + 1, dtype=float)
        return np.array([row[4] for row in self.per_k]) * np.power(k, -2.0 * self.accel_order)

    @property
    def rates(self) -> np.ndarray:
        return np.array([row[3] for row in self.per_k])


def decay_params(A, n: int, s: int, *, rho: float | None = None,
                 pair_factor: float = 1.0) -> DecayBoundParams:
    """Build :class:`DecayBoundParams` for a symmetric banded ``A``.

    ``rho`` defaults to the spectral radius from the Jacobi eigenvalues, so
    ``||A/2pi||_2 = rho / 2pi``.  ``pair_factor`` multiplies both bound terms.
    The rational part of ``psi_{n,s}`` carries a factor 2 per pole pair, so
    ``pair_factor=2`` gives the strictly rigorous bound; the default 1 keeps
    the bound in its customary form.
    """
    check_order(n, s)
    if s < 1:
        raise ValueError("the bound needs s >= 1")
    m = max(half_bandwidth(A), 1)
    d = A.dim if isinstance(A, SymBandMatrix) else as_dense(A).shape[0]
    if rho is None:
        rho = spectral_radius(A)
    per_k = []
    for k in range(1, s + 1):
        C, lam = dms_constants(k, rho, m)
        a = float(k) * k
        b = (rho / TWO_PI) ** 2 + a
        per_k.append((a, b, b / a, lam, C))
    return DecayBoundParams(d, m, n, s, float(rho), float(rho) / TWO_PI, tuple(per_k),
                            float(pair_factor))


class DecayBound(NamedTuple):
    """Bound on one entry split into its rational and truncation parts."""

    rational: float
    error: float

    @property
    def total(self) -> float:
        return self.rational + self.error

    def __float__(self) -> float:
        return self.total


def decay_bound_entry(i: int, j: int, params: DecayBoundParams) -> DecayBound:
    """Bound on ``|psi_1(A)[i, j]|`` for ``|i - j| > 2 m n`` (0-based indices)."""
    m, n, s, d = params.half_bandwidth, params.accel_order, params.pole_count, params.dim
    if not (0 <= i < d and 0 <= j < d):
        raise IndexError("entry outside the matrix")
    if abs(i - j) <= 2 * m * n:
        raise BandViolation(f"|i-j| = {abs(i - j)} lies inside the band 2mn = {2 * m * n}")
    scale = params.pair_factor * params.norm_over_2pi ** (2 * (n + 1))
    reach = 2 * m * (n + 1)
    nu = np.arange(max(0, j - reach), min(d - 1, j + reach) + 1)
    dist = np.abs(i - nu).astype(float)
    with np.errstate(under="ignore"):
        terms = params.weights[None, :] * params.rates[None, :] ** dist[:, None]
    rational = scale * float(np.sum(terms))
    error = scale * zeta_tail(2 * n + 2, s)
    return DecayBound(rational, error)


# ---------------------------------------------------------------------------
# best polynomial approximation bound
# ---------------------------------------------------------------------------

def best_poly_bound(chi: float, k: int, M: float) -> float:
    """``2 M / (chi^k (chi - 1))``."""
    if not chi > 1 or not M > 0 or k < 0:
        raise ValueError("need chi > 1, M > 0, k >= 0")
    return 2.0 * M / (chi ** k * (chi - 1.0))


def choose_chi(xi: float, safety: float = 0.95) -> float:
    """Ellipse parameter whose minor semi-axis is ``safety * 2pi / xi``."""
    if not xi > 0 or not 0 < safety < 1:
        raise ValueError("need xi > 0 and 0 < safety < 1")
    beta = safety * TWO_PI / xi
    return beta + sqrt(beta * beta + 1.0)


def estimate_M(chi: float, xi: float = 1.0, points: int = 10_000) -> float:
    """Estimate of ``max |psi_1(xi z)|`` on the Bernstein ellipse of parameter ``chi``.

    Uniform sampling of the boundary parameter; an estimate, not a certified maximum.
    """
    theta = TWO_PI * np.arange(points) / points
    major, minor = (chi + 1 / chi) / 2, (chi - 1 / chi) / 2
    z = major * np.cos(theta) + 1j * minor * np.sin(theta)
    return float(np.max(np.abs(psi1(xi * z))))


# ---------------------------------------------------------------------------
# reference entries and the empirical check
# ---------------------------------------------------------------------------

def psi_series_oracle(A, max_offset: int | None = None) -> np.ndarray:
    """``psi_1(A)`` from its Maclaurin series with enough terms for far entries.

    Every term ``c_j A^j`` is banded, so the rounding error of the entry at
    offset ``o`` is bounded by ``eps * sum_j |c_j| (|A|^j)_{io}``.  That error
    decays with the offset at the same rate as the entries themselves, which
    a dense eigendecomposition cannot deliver.  Requires ``rho(|A|) < pi``.
    """
    Ad = as_dense(A)
    d = Ad.shape[0]
    m = max(half_bandwidth(A), 1)
    absA = np.abs(Ad)
    growth = float(np.max(np.sum(absA, axis=1)))  # ||A||_inf bounds rho(|A|)
    if growth >= np.pi:
        raise ValueError("series oracle needs ||A||_inf < pi")
    max_offset = d - 1 if max_offset is None else max_offset
    ratio = growth / TWO_PI
    # beyond the last term reaching max_offset, add terms until they fall below eps^2
    extra = int(ceil(2 * np.log(np.finfo(float).eps) / np.log(max(ratio, 1e-300)))) if ratio > 0 else 0
    top = int(ceil(max_offset / m)) + extra + 2
    B = bernoulli_numbers(min(top, MAX_BERNOULLI_INDEX))
    coeffs = _series_coefficients(top, B)
    out = np.eye(d) - 0.5 * Ad
    P = Ad.copy()
    for j in range(2, top + 1):
        P = Ad @ P
        if coeffs[j] != 0.0:
            out += coeffs[j] * P
    return out


def _series_coefficients(top: int, B) -> np.ndarray:
    c = np.zeros(top + 1)
    c[0], c[1] = 1.0, -0.5
    for j in range(2, top + 1, 2):
        if j <= B.max_index:
            c[j] = float(B[j] / factorial(j))
        else:
            # |B_2i / (2i)!| = 2 zeta(2i) / (2pi)^(2i), and zeta(2i) = 1 in double here
            c[j] = (-1.0) ** (j // 2 + 1) * 2.0 / TWO_PI ** j
    return c


@dataclass(frozen=True)
class DecayReport:
    """Per-offset comparison along one row.

    ``rows`` holds ``(offset, actual_max_abs, thm3_bound, bestpoly_bound)``.
    ``thm3_bound`` is the smaller of the bounds for the two entries at that
    offset, so it is conservative as a display.  ``violations`` counts
    entries, not offsets.
    """

    row: int
    rows: list
    violations: int
    chi: float
    M_estimate: float

    def to_csv_rows(self):
        return [list(r) for r in self.rows]


def verify_decay(A, n: int = 3, s: int = 50, row: int | None = None, *, oracle: str = "series",
                 chi: float | None = None, safety: float = 0.95,
                 pair_factor: float = 1.0) -> DecayReport:
    """Compare the entrywise bound with the actual entries of ``psi_1(A)`` along ``row``.

    ``oracle="series"`` uses :func:`psi_series_oracle`; ``oracle="jacobi"`` the
    dense eigendecomposition (accurate only down to about ``1e-16 ||psi_1(A)||``).
    """
    Ad = as_dense(A)
    d = Ad.shape[0]
    if d > 1024:
        raise ValueError("verify_decay is limited to d <= 1024")
    row = d // 2 if row is None else row
    m = max(half_bandwidth(A), 1)
    rho = spectral_radius(A)
    params = decay_params(A, n, s, rho=rho, pair_factor=pair_factor)
    if oracle == "series":
        exact = psi_series_oracle(A)
    elif oracle == "jacobi":
        exact = jacobi_eig(A).apply_function(psi1)
    else:
        raise ValueError("oracle must be 'series' or 'jacobi'")
    xi = max(rho, np.finfo(float).tiny)
    if chi is None:
        chi = choose_chi(max(xi, 1.0), safety)
    M = estimate_M(chi, max(xi, 1.0))
    rows, violations = [], 0
    for off in range(2 * m * n + 1, max(row, d - 1 - row) + 1):
        actual, bound = 0.0, np.inf
        for j in (row - off, row + off):
            if 0 <= j < d:
                b = decay_bound_entry(row, j, params).total
                a = abs(exact[row, j])
                violations += a > b
                actual, bound = max(actual, a), min(bound, b)
        k = int(ceil(off / m)) - 1
        rows.append((off, actual, bound, best_poly_bound(chi, k, M)))
    return DecayReport(row, rows, int(violations), float(chi), M)
