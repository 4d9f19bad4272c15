"""Matrix storage, test-matrix builders and the dense/banded kernels.

Dense matrices are plain ``numpy.ndarray`` objects.  Symmetric banded
matrices use :class:`SymBandMatrix`, which stores the main diagonal and the
``m`` subdiagonals in LAPACK lower band layout: ``bands[r, j] = A[j + r, j]``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import MaxSweepsExceeded, NotPositiveDefinite, NotSymmetric, Singular

__all__ = [
    "SymBandMatrix", "SpectralDecomp", "CirculantSpec",
    "build_tridiag_toeplitz", "build_quasiseparable_example", "build_kms", "build_circulant",
    "build_test_matrix", "as_dense", "half_bandwidth",
    "band_cholesky", "band_cholesky_solve", "dense_lu_solve", "LUFactor",
    "jacobi_eig", "circulant_apply_function",
    "frobenius_norm", "spectral_norm", "spectral_radius",
    "read_matrix", "write_matrix", "read_vector", "write_vector",
]


@dataclass(frozen=True, eq=False)
class SymBandMatrix:
    """Symmetric matrix with half-bandwidth ``m`` in lower band storage."""

    bands: np.ndarray

    def __post_init__(self):
        b = np.array(self.bands, dtype=float)
        if b.ndim != 2 or b.shape[1] < 1:
            raise ValueError("bands must have shape (m + 1, d)")
        if not np.all(np.isfinite(b)):
            raise ValueError("matrix entries must be finite")
        d = b.shape[1]
        for r in range(1, b.shape[0]):
            b[r, d - r:] = 0.0  # unused tail of each subdiagonal
        b.setflags(write=False)
        object.__setattr__(self, "bands", b)

    @property
    def dim(self) -> int:
        return self.bands.shape[1]

    @property
    def half_bandwidth(self) -> int:
        return self.bands.shape[0] - 1

    @property
    def shape(self) -> tuple[int, int]:
        return (self.dim, self.dim)

    @classmethod
    def from_dense(cls, A, m: int | None = None, check: bool = True) -> "SymBandMatrix":
        A = np.asarray(A, dtype=float)
        d = A.shape[0]
        if check and not np.allclose(A, A.T, rtol=1e-12, atol=0.0):
            raise NotSymmetric("matrix is not symmetric")
        if m is None:
            m = half_bandwidth(A)
        bands = np.zeros((m + 1, d))
        for r in range(m + 1):
            bands[r, : d - r] = np.diagonal(A, -r)
        return cls(bands)

    def diagonal(self, r: int = 0) -> np.ndarray:
        return self.bands[abs(r), : self.dim - abs(r)]

    def to_dense(self) -> np.ndarray:
        d = self.dim
        A = np.zeros((d, d))
        for r in range(self.half_bandwidth + 1):
            v = self.bands[r, : d - r]
            idx = np.arange(d - r)
            A[idx + r, idx] = v
            A[idx, idx + r] = v
        return A

    def __array__(self, dtype=None, copy=None):
        A = self.to_dense()
        return A if dtype is None else A.astype(dtype)

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x)
        d = self.dim
        y = self.bands[0].reshape((d,) + (1,) * (x.ndim - 1)) * x
        for r in range(1, self.half_bandwidth + 1):
            v = self.bands[r, : d - r].reshape((d - r,) + (1,) * (x.ndim - 1))
            y[r:] += v * x[: d - r]
            y[: d - r] += v * x[r:]
        return y

    def __matmul__(self, other):
        return self.matvec(other)

    def scaled(self, alpha: float) -> "SymBandMatrix":
        return SymBandMatrix(alpha * self.bands)

    def shifted(self, sigma: float) -> "SymBandMatrix":
        b = self.bands.copy()
        b[0] += sigma
        return SymBandMatrix(b)

    def square(self) -> "SymBandMatrix":
        """``A @ A`` as a banded matrix of half-bandwidth ``2m``."""
        return SymBandMatrix.from_dense(self.matvec(self.to_dense()), 2 * self.half_bandwidth,
                                        check=False)


@dataclass(frozen=True)
class SpectralDecomp:
    """``A = Q diag(eigenvalues) Q^T`` with ascending eigenvalues."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        Q = self.eigenvectors
        return (Q * self.eigenvalues) @ Q.T

    def apply_function(self, f: Callable) -> np.ndarray:
        Q = self.eigenvectors
        return (Q * np.asarray(f(self.eigenvalues))) @ Q.T


@dataclass(frozen=True)
class CirculantSpec:
    """``gamma * F`` where ``F`` is the companion matrix of ``z^d - 1``.

    ``F`` has ones on the subdiagonal and in the top-right corner (a cyclic
    down-shift), so its eigenvalues are the d-th roots of unity.
    """

    dim: int
    scale: float

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if not np.isfinite(self.scale):
            raise ValueError("scale must be finite")

    def eigenvalues(self) -> np.ndarray:
        # F v_j = omega^(-j) v_j with (v_j)_k = omega^(jk), omega = exp(2 pi i / d)
        theta = -2.0 * np.pi * np.arange(self.dim) / self.dim
        return self.scale * (np.cos(theta) + 1j * np.sin(theta))

    def to_dense(self) -> np.ndarray:
        d = self.dim
        F = np.zeros((d, d))
        if d == 1:
            F[0, 0] = 1.0
        else:
            F[np.arange(1, d), np.arange(d - 1)] = 1.0
            F[0, d - 1] = 1.0
        return self.scale * F


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def build_tridiag_toeplitz(d: int, sub: float, diag: float, sup: float):
    """Tridiagonal Toeplitz matrix; banded storage when ``sub == sup``."""
    if d < 2:
        raise ValueError("d must be at least 2")
    if sub == sup:
        bands = np.zeros((2, d))
        bands[0] = diag
        bands[1, : d - 1] = sub
        return SymBandMatrix(bands)
    return (np.diag(np.full(d, float(diag))) + np.diag(np.full(d - 1, float(sub)), -1)
            + np.diag(np.full(d - 1, float(sup)), 1))


def build_quasiseparable_example(d: int, scale: float = 0.7) -> np.ndarray:
    """``scale * inv(tridiag(d/2, [d, d-1, ..., 1], d/2))``, a dense order-one quasiseparable matrix."""
    if d < 2:
        raise ValueError("d must be at least 2")
    T = (np.diag(np.arange(d, 0, -1, dtype=float)) + np.diag(np.full(d - 1, d / 2.0), 1)
         + np.diag(np.full(d - 1, d / 2.0), -1))
    A = scale * np.linalg.inv(T)
    return 0.5 * (A + A.T)


def build_kms(d: int, rho: float = 0.8) -> np.ndarray:
    """Kac-Murdock-Szego Toeplitz matrix with entries ``rho^|i-j|``."""
    if d < 1:
        raise ValueError("d must be positive")
    i = np.arange(d)
    return float(rho) ** np.abs(i[:, None] - i[None, :]).astype(float)


def build_circulant(d: int, gamma: float) -> CirculantSpec:
    return CirculantSpec(d, float(gamma))


def build_test_matrix(label: str, d: int, gamma: float | None = None):
    """Builder dispatch by label: ``tridiag``, ``qs``, ``kms`` or ``companion``."""
    if label == "tridiag":
        return build_tridiag_toeplitz(d, -1.0, 4.0, -1.0)
    if label == "qs":
        return build_quasiseparable_example(d)
    if label == "kms":
        return build_kms(d, 0.8)
    if label == "companion":
        if gamma is None:
            raise ValueError("companion matrix needs gamma")
        return build_circulant(d, gamma)
    raise ValueError(f"unknown test matrix {label!r}")


def as_dense(A) -> np.ndarray:
    if isinstance(A, (SymBandMatrix, CirculantSpec)):
        return A.to_dense()
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def half_bandwidth(A) -> int:
    if isinstance(A, SymBandMatrix):
        return A.half_bandwidth
    A = np.asarray(A)
    i, j = np.nonzero(A)
    return int(np.max(np.abs(i - j))) if i.size else 0


# ---------------------------------------------------------------------------
# banded Cholesky
# ---------------------------------------------------------------------------

def band_cholesky(M: SymBandMatrix) -> np.ndarray:
    """Lower Cholesky factor in band storage, ``L[r, j] = L_{j+r, j}``."""
    m, d = M.half_bandwidth, M.dim
    A = M.bands
    L = np.zeros_like(A)
    for j in range(d):
        k0 = max(0, j - m)
        ks = np.arange(k0, j)
        row = L[j - ks, ks]
        piv = A[0, j] - row @ row
        if not piv > 0.0:
            raise NotPositiveDefinite(f"pivot {piv:.3e} at index {j}")
        ljj = np.sqrt(piv)
        L[0, j] = ljj
        for i in range(j + 1, min(d, j + m + 1)):
            ks2 = np.arange(max(0, i - m), j)
            L[i - j, j] = (A[i - j, j] - L[i - ks2, ks2] @ L[j - ks2, ks2]) / ljj
    return L


def _band_factor_solve(L: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    m = L.shape[0] - 1
    d = L.shape[1]
    y = np.array(rhs, dtype=float, copy=True)
    # forward: L y = b
    for i in range(d):
        k0 = max(0, i - m)
        if i > k0:
            ks = np.arange(k0, i)
            y[i] -= L[i - ks, ks] @ y[k0:i]
        y[i] /= L[0, i]
    # backward: L^T x = y
    for i in range(d - 1, -1, -1):
        k1 = min(d, i + m + 1)
        if k1 > i + 1:
            y[i] -= L[1: k1 - i, i] @ y[i + 1: k1]
        y[i] /= L[0, i]
    return y


def band_cholesky_solve(M: SymBandMatrix, rhs) -> np.ndarray:
    """Solve ``M X = rhs`` for symmetric positive definite banded ``M``."""
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != M.dim:
        raise ValueError("right-hand side has the wrong number of rows")
    return _band_factor_solve(band_cholesky(M), rhs)


class BandCholeskyFactor:
    """Reusable banded Cholesky factorization."""

    def __init__(self, M: SymBandMatrix):
        self.dim = M.dim
        self.L = band_cholesky(M)

    def solve(self, rhs) -> np.ndarray:
        return _band_factor_solve(self.L, np.asarray(rhs, dtype=float))


# ---------------------------------------------------------------------------
# dense LU
# ---------------------------------------------------------------------------

class LUFactor:
    """Partial-pivoted LU with an explicit singularity threshold.

    A pivot ``|U_kk| <= d * 1e-15 * ||M||_inf`` raises :class:`Singular`.
    """

    def __init__(self, M):
        M = np.asarray(M)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("expected a square matrix")
        d = M.shape[0]
        scale = np.max(np.sum(np.abs(M), axis=1)) if d else 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            self.lu, self.piv = scipy.linalg.lu_factor(M, check_finite=True)
        pivots = np.abs(np.diagonal(self.lu))
        if np.any(pivots <= d * 1e-15 * scale):
            k = int(np.argmin(pivots))
            raise Singular(f"pivot {pivots[k]:.3e} in column {k} is numerically zero")
        self.dim = d

    def solve(self, rhs) -> np.ndarray:
        return scipy.linalg.lu_solve((self.lu, self.piv), rhs, check_finite=False)


def dense_lu_solve(M, rhs) -> np.ndarray:
    rhs = np.asarray(rhs)
    M = np.asarray(M)
    if rhs.shape[0] != M.shape[0]:
        raise ValueError("right-hand side has the wrong number of rows")
    return LUFactor(M).solve(rhs)


# ---------------------------------------------------------------------------
# symmetric Jacobi eigensolver
# ---------------------------------------------------------------------------

def _round_robin(d: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Disjoint pair sets covering all pairs once per sweep (circle method)."""
    n = d + (d % 2)
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        p, q = [], []
        for a, b in zip(players[: n // 2], reversed(players[n // 2:])):
            if a < d and b < d:
                p.append(min(a, b))
                q.append(max(a, b))
        rounds.append((np.array(p, dtype=int), np.array(q, dtype=int)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _off_norm(A: np.ndarray) -> float:
    off = A - np.diag(np.diagonal(A))
    return float(np.linalg.norm(off))


def jacobi_eig(M, max_sweeps: int = 64) -> SpectralDecomp:
    """Cyclic Jacobi eigensolver for a real symmetric matrix.

    Rotations are applied in round-robin order, so each step rotates ``d/2``
    disjoint pairs at once.  A rotation is skipped when ``|a_pq|`` is below
    machine precision relative to ``sqrt(|a_pp a_qq|)``; the iteration stops
    after a sweep that performs no rotation (or once the matrix is diagonal).
    """
    A = np.array(as_dense(M), dtype=float)
    d = A.shape[0]
    norm = np.linalg.norm(A)
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * max(norm, np.finfo(float).tiny)):
        raise NotSymmetric("jacobi_eig requires a symmetric matrix")
    A = 0.5 * (A + A.T)
    V = np.eye(d)
    eps = np.finfo(float).eps
    sweeps = 0
    if d > 1 and norm > 0:
        rounds = _round_robin(d)
        tiny = np.finfo(float).tiny / eps
        while True:
            if _off_norm(A) == 0.0:
                break
            if sweeps >= max_sweeps:
                raise MaxSweepsExceeded(f"no convergence after {max_sweeps} sweeps")
            sweeps += 1
            rotated = False
            for p, q in rounds:
                apq = A[p, q]
                app, aqq = A[p, p], A[q, q]
                active = np.abs(apq) > eps * np.sqrt(np.abs(app * aqq)) + tiny
                if not np.any(active):
                    continue
                rotated = True
                p, q, apq, app, aqq = p[active], q[active], apq[active], app[active], aqq[active]
                theta = (aqq - app) / (2.0 * apq)
                t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t[theta == 0] = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # columns: A <- A J
                Ap, Aq = A[:, p], A[:, q]
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                # rows: A <- J^T A
                Ap, Aq = A[p, :], A[q, :]
                A[p, :] = c[:, None] * Ap - s[:, None] * Aq
                A[q, :] = s[:, None] * Ap + c[:, None] * Aq
                A[p, q] = 0.0
                A[q, p] = 0.0
                Vp, Vq = V[:, p], V[:, q]
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
            if not rotated:
                break
    w = np.diagonal(A).copy()
    order = np.argsort(w, kind="stable")
    return SpectralDecomp(w[order], V[:, order], sweeps)


# ---------------------------------------------------------------------------
# circulant functional calculus
# ---------------------------------------------------------------------------

def circulant_apply_function(spec: CirculantSpec, f: Callable) -> np.ndarray:
    """``f(gamma F)`` through the discrete Fourier diagonalization of ``F``.

    The result is circulant; its first column is the inverse DFT of ``f``
    at the eigenvalues.  The imaginary residue must stay below
    ``1e-10 * ||result||_F``.
    """
    d = spec.dim
    fvals = np.asarray(f(spec.eigenvalues()), dtype=complex)
    # first column c_k = (1/d) sum_j omega^(jk) f_j
    col = np.fft.ifft(fvals)
    idx = (np.arange(d)[:, None] - np.arange(d)[None, :]) % d
    C = col[idx]
    real = C.real
    residue = np.linalg.norm(C.imag)
    if residue > 1e-10 * max(np.linalg.norm(real), np.finfo(float).tiny):
        raise ValueError(f"f(gamma F) is not real: imaginary residue {residue:.3e}")
    return real


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def frobenius_norm(A) -> float:
    return float(np.linalg.norm(as_dense(A)))


def spectral_norm(A) -> float:
    """Matrix 2-norm (largest singular value); ``inf`` for non-finite input."""
    A = A.to_dense() if isinstance(A, (SymBandMatrix, CirculantSpec)) else np.asarray(A, dtype=float)
    if not np.all(np.isfinite(A)):
        return float("inf")
    return float(np.linalg.norm(A, 2))


def spectral_radius(A, exact_limit: int = 1024) -> float:
    """Exact for symmetric input up to ``exact_limit``; Gershgorin bound beyond."""
    if isinstance(A, CirculantSpec):
        return abs(A.scale)
    d = A.dim if isinstance(A, SymBandMatrix) else np.asarray(A).shape[0]
    if d <= exact_limit:
        ev = jacobi_eig(A).eigenvalues
        return float(np.max(np.abs(ev)))
    Ad = as_dense(A)
    return float(np.max(np.sum(np.abs(Ad), axis=1)))


# ---------------------------------------------------------------------------
# text files
# ---------------------------------------------------------------------------
# Dense: one comma-separated row per line.  Banded: a header line
# "symband d m" followed by m + 1 lines holding the main diagonal and the
# subdiagonals (diagonal r has d - r entries).  Vectors: one value per line.

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_row(line: str) -> list[float]:
    parts = [p for p in line.replace(",", " ").split()]
    return [float(p) for p in parts]


def read_matrix(path):
    """Read a dense CSV or ``symband`` text file."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    head = lines[0].split()
    if head[0] == "symband":
        if len(head) != 3:
            raise ValueError(f"{path}: header must read 'symband d m'")
        d, m = int(head[1]), int(head[2])
        if d < 1 or not 0 <= m < d:
            raise ValueError(f"{path}: invalid dimensions d={d}, m={m}")
        rows = lines[1:]
        if len(rows) != m + 1:
            raise ValueError(f"{path}: expected {m + 1} diagonal lines, found {len(rows)}")
        bands = np.zeros((m + 1, d))
        for r, line in enumerate(rows):
            vals = _parse_row(line)
            if len(vals) != d - r:
                raise ValueError(f"{path}: diagonal {r} needs {d - r} values, found {len(vals)}")
            bands[r, : d - r] = vals
        return SymBandMatrix(bands)
    rows = [_parse_row(line) for line in lines]
    d = len(rows)
    if any(len(r) != d for r in rows):
        raise ValueError(f"{path}: dense matrix must be square")
    return as_dense(np.array(rows))


def write_matrix(path, A) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if isinstance(A, SymBandMatrix):
            fh.write(f"symband {A.dim} {A.half_bandwidth}\n")
            for r in range(A.half_bandwidth + 1):
                fh.write(",".join(_fmt(v) for v in A.diagonal(r)) + "\n")
        else:
            for row in as_dense(A):
                fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_vector(path) -> np.ndarray:
    """Read a vector stored one value per line, or comma/space separated."""
    with open(path, encoding="utf-8") as fh:
        vals = [x for ln in fh if ln.strip() for x in _parse_row(ln)]
    v = np.array(vals)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{path}: vector entries must be finite")
    return v


def write_vector(path, v) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for x in np.asarray(v, dtype=float).reshape(-1):
            fh.write(_fmt(x) + "\n")
