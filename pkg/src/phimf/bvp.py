"""Two-point inverse problem for a linear autonomous system.

Given ``A``, the boundary values ``u(0) = g`` and ``u(tau) = h``, find the
constant forcing ``p`` and the trajectory of

    u'(t) = A u(t) + p,   0 <= t <= tau.

The solution is ``p = q_0(A)(h - g) - A g`` and ``u(t) = w_t(A)(h - g) + g``.
After rescaling to the horizon ``2 pi`` both are evaluated through the
accelerated Fourier representation of ``y_t``: a Bernoulli-polynomial part
plus ``s`` terms that each need one solve with ``B^2 + k^2 I``.  Those
solves do not depend on ``t`` and are shared by every grid point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch
from .matfun import _ShiftedSolver, _dense_input
from .matrix import SymBandMatrix
from .scalar import TWO_PI, bernoulli_part_coefficients, check_order

__all__ = ["BvpProblem", "BvpSolution", "solve_bvp", "verify_bvp", "BvpResidual"]


@dataclass(frozen=True)
class BvpProblem:
    """Data of the inverse problem.

    Parameters
    ----------
    A : ndarray or SymBandMatrix
        System matrix, ``d x d``.
    g, h : array_like
        Values of ``u`` at ``t = 0`` and ``t = tau``.
    tau : float
        Horizon, positive.
    accel_order, series_terms : int
        Order ``n`` of the Bernoulli acceleration and number ``s`` of series terms.
    t_grid : array_like, optional
        Sorted sample times in ``[0, tau]``; defaults to 9 equispaced points.
    """

    A: object
    g: np.ndarray
    h: np.ndarray
    tau: float
    accel_order: int = 4
    series_terms: int = 200
    t_grid: np.ndarray | None = None

    def __post_init__(self):
        d = self.A.dim if isinstance(self.A, SymBandMatrix) else np.shape(self.A)[0]
        if not isinstance(self.A, SymBandMatrix) and np.shape(self.A) != (d, d):
            raise DimensionMismatch("A must be square")
        g = np.asarray(self.g, dtype=float).reshape(-1)
        h = np.asarray(self.h, dtype=float).reshape(-1)
        if g.shape != (d,) or h.shape != (d,):
            raise DimensionMismatch(f"g and h must have length {d}")
        if not (np.isfinite(self.tau) and self.tau > 0):
            raise ValueError("tau must be positive")
        check_order(self.accel_order, self.series_terms)
        grid = (np.linspace(0.0, self.tau, 9) if self.t_grid is None
                else np.asarray(self.t_grid, dtype=float).reshape(-1))
        if grid.size and (np.any(np.diff(grid) < 0) or grid[0] < 0 or grid[-1] > self.tau):
            raise ValueError("t_grid must be sorted inside [0, tau]")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "t_grid", grid)

    @property
    def dim(self) -> int:
        return self.g.shape[0]


@dataclass(frozen=True)
class BvpSolution:
    """Forcing ``p`` and samples ``(t, u(t))`` on the problem grid.

    ``evaluate(t)`` gives ``u`` at further times without new factorizations.
    """

    p: np.ndarray
    trajectory: list
    evaluate: Callable = field(repr=False)

    @property
    def t(self) -> np.ndarray:
        return np.array([t for t, _ in self.trajectory])

    @property
    def u(self) -> np.ndarray:
        return np.array([u for _, u in self.trajectory])


def _power_columns(B, v: np.ndarray, top: int) -> list[np.ndarray]:
    """``[v, Bv, ..., B^top v]``."""
    out = [v]
    for _ in range(top):
        out.append(B @ out[-1])
    return out


def solve_bvp(problem: BvpProblem) -> BvpSolution:
    """Recover ``p`` and ``u(t)`` for ``problem``.

    Raises
    ------
    Singular, NotPositiveDefinite
        A shifted matrix ``B^2 + k^2 I`` is singular, i.e. the spectrum of
        ``A`` meets ``2 pi i k / tau``.
    """
    A, tau = problem.A, problem.tau
    n, s = problem.accel_order, problem.series_terms
    g, h = problem.g, problem.h
    v = h - g
    scale = tau / TWO_PI
    if isinstance(A, SymBandMatrix):
        B = A.scaled(scale)
        Ag = A.matvec(g)
    else:
        Ad = _dense_input(A)
        B = scale * Ad
        Ag = Ad @ g
    # B^j v for j = 0..2n+1
    powers = _power_columns(B, v, 2 * n + 1)

    # x_k = (B^2 + k^2)^-1 B^(2n+1) v, y_k = B x_k
    X = np.zeros((problem.dim, s))
    if s:
        solver = _ShiftedSolver(A, scale)
        rhs = powers[2 * n + 1]
        for k in range(1, s + 1):
            X[:, k - 1] = solver.factor(k).solve(rhs)
    Y = B @ X if s else X
    k = np.arange(1, s + 1, dtype=float)
    kw = np.power(k, -2.0 * n)
    sign = (-1.0 if n % 2 else 1.0) / pi

    def y_apply(tt: float) -> np.ndarray:
        """``y_t(B) v`` at rescaled time ``tt`` in ``[0, 2 pi]``."""
        c = bernoulli_part_coefficients(n, tt)
        out = np.zeros_like(v)
        for j in range(1, 2 * n + 1):
            out += c[j] * powers[j]
        if s:
            series = X @ (kw * np.cos(k * tt)) + Y @ (kw * np.sin(k * tt) / k)
            out += sign * series
        return out

    y0 = y_apply(0.0)
    # rescaled p~ = (1/2pi - B/2 + B y_0(B)) v - B g, and p = p~ / scale
    p_tilde = v / TWO_PI - 0.5 * powers[1] + B @ y0 - scale * Ag
    p = p_tilde / scale

    def evaluate(t: float) -> np.ndarray:
        if not 0.0 <= t <= tau:
            raise ValueError("t outside [0, tau]")
        tt = min(TWO_PI * t / tau, TWO_PI)
        return (tt / TWO_PI) * v + (y_apply(tt) - y0) + g

    trajectory = [(float(t), evaluate(float(t))) for t in problem.t_grid]
    return BvpSolution(p=p, trajectory=trajectory, evaluate=evaluate)


@dataclass(frozen=True)
class BvpResidual:
    max_residual: float
    residuals: np.ndarray
    start_mismatch: float
    end_mismatch: float

    def as_dict(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "residuals": [float(r) for r in self.residuals],
            "start_mismatch": self.start_mismatch,
            "end_mismatch": self.end_mismatch,
        }


def verify_bvp(problem: BvpProblem, solution: BvpSolution, fd_step: float = 1e-4) -> BvpResidual:
    """Central-difference check of ``u' = A u + p`` at the interior grid points.

    The residual at ``t`` is ``max |(u(t+h) - u(t-h)) / 2h - A u(t) - p|``.
    """
    if fd_step <= 0:
        raise ValueError("fd_step must be positive")
    A, tau = problem.A, problem.tau
    matvec = A.matvec if isinstance(A, SymBandMatrix) else (lambda x: _dense_input(A) @ x)
    ts = [t for t in problem.t_grid if fd_step < t < tau - fd_step]
    res = []
    for t in ts:
        du = (solution.evaluate(t + fd_step) - solution.evaluate(t - fd_step)) / (2 * fd_step)
        res.append(float(np.max(np.abs(du - matvec(solution.evaluate(t)) - solution.p))))
    res = np.array(res)
    start = float(np.max(np.abs(solution.evaluate(0.0) - problem.g), initial=0.0))
    end = float(np.max(np.abs(solution.evaluate(tau) - problem.h), initial=0.0))
    return BvpResidual(float(res.max(initial=0.0)), res, start, end)


def exact_bvp_sym(A, g: Sequence[float], h: Sequence[float], tau: float, t_grid) -> tuple:
    """Reference ``p`` and ``u(t)`` from an eigendecomposition and scalar ``q_0``, ``w_t``.

    Only for symmetric ``A``.
    """
    from .matrix import jacobi_eig
    from .scalar import q_t, w_t

    dec = jacobi_eig(A)
    g = np.asarray(g, dtype=float)
    v = np.asarray(h, dtype=float) - g
    Ad = _dense_input(A)
    p = dec.apply_function(lambda z: q_t(z, 0.0, tau)) @ v - Ad @ g
    us = [dec.apply_function(lambda z, t=t: w_t(z, t, tau)) @ v + g for t in t_grid]
    return p, np.array(us)
