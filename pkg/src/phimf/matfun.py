"""Matrix-argument evaluation of psi_1 and of the (n, s) approximant family.

``psi_rational_matrix(A, n, s)`` forms

    p_n(A) + 2 (-1)^n [sum_{k=1}^{s} k^(-2n) ((A/2pi)^2 + k^2 I)^(-1)] (A/2pi)^(2n+2)

with one shifted solve per pole pair.  Shifted systems are solved by banded
Cholesky when ``A`` is a :class:`~phimf.matrix.SymBandMatrix` (the shifted
matrix is SPD with half-bandwidth 2m) and by dense LU otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import scalar
from .matrix import (
    BandCholeskyFactor,
    CirculantSpec,
    LUFactor,
    SymBandMatrix,
    as_dense,
    build_test_matrix,
    circulant_apply_function,
    frobenius_norm,
    jacobi_eig,
    spectral_norm,
)
from .scalar import TWO_PI, check_order, even_taylor_coefficients

__all__ = [
    "psi_poly_matrix", "psi_rational_matrix", "psi_rational_apply",
    "psi_exact_sym", "phi_exact_sym", "psi_exact_circulant", "phi_exact_circulant",
    "ErrorReport", "error_report", "maclaurin_order", "relative_error",
]


def _dense_input(A) -> np.ndarray:
    if isinstance(A, CirculantSpec):
        return A.to_dense()
    return as_dense(A)


def psi_poly_matrix(A, n: int) -> np.ndarray:
    """Maclaurin part ``p_n(A)`` by Horner's rule in ``A^2``.

    Banded input gives output whose entries beyond offset ``2nm`` are exactly zero.
    """
    check_order(n)
    Ad = _dense_input(A)
    d = Ad.shape[0]
    out = np.eye(d) - 0.5 * Ad
    coeffs = even_taylor_coefficients(n)
    if coeffs:
        A2 = Ad @ Ad
        acc = coeffs[-1] * np.eye(d)
        for c in reversed(coeffs[:-1]):
            acc = acc @ A2
            acc[np.diag_indices(d)] += c
        out += acc @ A2
    if isinstance(A, SymBandMatrix):
        i = np.arange(d)
        out[np.abs(i[:, None] - i[None, :]) > max(2 * n, 1) * A.half_bandwidth] = 0.0
    return out


class _ShiftedSolver:
    """Factorizations of ``W + k^2 I`` with ``W = (A / 2pi)^2``, one per ``k``."""

    def __init__(self, A, scale: float = 1.0 / TWO_PI):
        self.banded = isinstance(A, SymBandMatrix)
        if self.banded:
            self.W = A.scaled(scale).square()
            self.dim = A.dim
        else:
            As = scale * _dense_input(A)
            self.W = As @ As
            self.dim = As.shape[0]

    def factor(self, k: int):
        if self.banded:
            return BandCholeskyFactor(self.W.shifted(float(k) * k))
        M = self.W.copy()
        M[np.diag_indices(self.dim)] += float(k) * k
        return LUFactor(M)

    def apply_W(self, X: np.ndarray) -> np.ndarray:
        return self.W.matvec(X) if self.banded else self.W @ X


def psi_rational_matrix(A, n: int, s: int, order: str = "solve_first") -> np.ndarray:
    """Dense ``psi_{n,s}(A)``.

    ``order="solve_first"`` accumulates the shifted inverses (ascending k) and
    then multiplies by ``W^(n+1)``; ``order="power_first"`` solves against
    ``W^(n+1)`` directly.  Both are algebraically equal.
    """
    check_order(n, s)
    P = psi_poly_matrix(A, n)
    if s == 0:
        return P
    solver = _ShiftedSolver(A)
    d = solver.dim
    if order == "solve_first":
        rhs = np.eye(d)
    elif order == "power_first":
        rhs = np.eye(d)
        for _ in range(n + 1):
            rhs = solver.apply_W(rhs)
    else:
        raise ValueError("order must be 'solve_first' or 'power_first'")
    S = np.zeros((d, d))
    for k in range(1, s + 1):  # ascending k, deterministic accumulation
        S += float(k) ** (-2 * n) * solver.factor(k).solve(rhs)
    if order == "solve_first":
        for _ in range(n + 1):
            S = solver.apply_W(S)
    sign = -2.0 if n % 2 else 2.0
    return P + sign * S


def _poly_apply(A, n: int, b: np.ndarray) -> np.ndarray:
    matvec = A.matvec if isinstance(A, SymBandMatrix) else (lambda x: _dense_input(A) @ x)
    coeffs = even_taylor_coefficients(n)
    Ab = matvec(b)
    out = b - 0.5 * Ab
    if coeffs:
        acc = coeffs[-1] * b
        for c in reversed(coeffs[:-1]):
            acc = matvec(matvec(acc)) + c * b
        out = out + matvec(matvec(acc))
    return out


def psi_rational_apply(A, n: int, s: int, b) -> np.ndarray:
    """``psi_{n,s}(A) b`` from matrix-vector products and ``s`` shifted solves."""
    check_order(n, s)
    b = np.asarray(b, dtype=float)
    out = _poly_apply(A, n, b)
    if s == 0 or not np.any(b):
        return out
    solver = _ShiftedSolver(A)
    v = b
    for _ in range(n + 1):
        v = solver.apply_W(v)
    acc = np.zeros_like(v)
    for k in range(1, s + 1):
        acc += float(k) ** (-2 * n) * solver.factor(k).solve(v)
    sign = -2.0 if n % 2 else 2.0
    return out + sign * acc


def psi_exact_sym(A) -> np.ndarray:
    """``U psi1(Lambda) U^T`` from the Jacobi eigendecomposition."""
    return jacobi_eig(A).apply_function(scalar.psi1)


def phi_exact_sym(A) -> np.ndarray:
    return jacobi_eig(A).apply_function(scalar.phi1)


def psi_exact_circulant(spec: CirculantSpec) -> np.ndarray:
    return circulant_apply_function(spec, scalar.psi1)


def phi_exact_circulant(spec: CirculantSpec) -> np.ndarray:
    return circulant_apply_function(spec, scalar.phi1)


# ---------------------------------------------------------------------------
# error reports
# ---------------------------------------------------------------------------

def maclaurin_order(N: int) -> int:
    """Order ``n`` of ``p_n`` equal to the Maclaurin series truncated to ``N`` terms.

    Terms ``k = 0..N-1``; odd terms beyond ``k = 1`` vanish, so ``n = (N - 1) // 2``.
    """
    if N < 1:
        raise ValueError("N must be positive")
    return (N - 1) // 2


def relative_error(exact: np.ndarray, approx: np.ndarray, norm: str = "2") -> float:
    diff = exact - approx
    if not np.all(np.isfinite(diff)):
        return float("inf")
    f = spectral_norm if norm == "2" else frobenius_norm
    with np.errstate(over="ignore", invalid="ignore"):
        return f(diff) / f(exact)


@dataclass(frozen=True)
class ErrorReport:
    """Relative errors of the polynomial and rational approximants of one matrix.

    ``err_p`` uses the Maclaurin series truncated to ``poly_order`` terms,
    i.e. ``psi_{n,0}`` with ``n = taylor_n``.  ``err_r`` uses
    ``psi_{m, N-m}`` where ``rational_split = (m, N - m)``.
    """

    dim: int
    matrix_label: str
    poly_order: int
    rational_split: tuple[int, int]
    err_p: float
    err_r: float
    taylor_n: int = 0
    norm: str = "2"
    gamma: float | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.err_p >= 0 and self.err_r >= 0):
            raise ValueError("errors must be nonnegative")
        m, rest = self.rational_split
        if m < 0 or rest < 0 or m + rest != self.poly_order:
            raise ValueError("rational split must be nonnegative and sum to poly_order")

    @property
    def divergent(self) -> bool:
        return not np.isfinite(self.err_p)


def error_report(matrix_label: str, d: int, N: int = 50, m: int = 3, *,
                 gamma: float | None = None, norm: str = "2") -> ErrorReport:
    """Errors ``err_p_N`` and ``err_r_{N,m}`` for a builder-generated test matrix.

    The reference value is the spectral decomposition (Jacobi for symmetric
    matrices, the DFT for the scaled companion matrix).  Errors are
    normalized by the reference, in the 2-norm unless ``norm="fro"``.
    """
    if N < m or m < 0:
        raise ValueError("need 0 <= m <= N")
    if norm not in ("2", "fro"):
        raise ValueError("norm must be '2' or 'fro'")
    A = build_test_matrix(matrix_label, d, gamma)
    if isinstance(A, CirculantSpec):
        exact = psi_exact_circulant(A)
    else:
        exact = psi_exact_sym(A)
    n_taylor = maclaurin_order(N)
    with np.errstate(over="ignore", invalid="ignore"):
        poly = psi_poly_matrix(A, n_taylor)
    rat = psi_rational_matrix(A, m, N - m)
    return ErrorReport(
        dim=d, matrix_label=matrix_label, poly_order=N, rational_split=(m, N - m),
        err_p=relative_error(exact, poly, norm), err_r=relative_error(exact, rat, norm),
        taylor_n=n_taylor, norm=norm, gamma=gamma,
    )
