"""Local histopolation polynomials in a scaled Chebyshev basis.

A local histopolant on chained segments ``s_i, i in S`` is the unique
polynomial of degree ``card(S) - 1`` whose integral over every ``s_i`` equals
the datum ``mu_i``.  It is stored as Chebyshev coefficients with respect to
the affine map of the hull of ``S`` onto ``[-1, 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import ResidualTooLarge, SingularGram, WindowViolation
from .grid import SegmentGrid

RESIDUAL_RTOL = 1e-10
PIVOT_RTOL = 1e-13


@dataclass(frozen=True, eq=False)
class ScaledChebyshevPoly:
    """``sum_k coeffs[k] T_k(t)`` with ``t = (2x - alpha - beta) / (beta - alpha)``."""

    alpha: float
    beta: float
    coeffs: np.ndarray

    def __post_init__(self):
        if not self.beta > self.alpha:
            raise WindowViolation(f"empty window [{self.alpha!r}, {self.beta!r}]")
        c = np.asarray(self.coeffs, dtype=float).reshape(-1)
        if c.size == 0 or not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be a nonempty finite vector")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def window(self) -> tuple[float, float]:
        return self.alpha, self.beta

    def to_unit(self, x):
        return (2.0 * np.asarray(x, dtype=float) - self.alpha - self.beta) / (self.beta - self.alpha)

    def __call__(self, x):
        return eval_poly(self, x)


def clenshaw(coeffs: np.ndarray, t):
    """Evaluate a Chebyshev series at ``t`` by the backward recurrence.

    ``coeffs`` may be 1-D (one series) or 2-D with one series per column, in
    which case ``t`` broadcasts against the trailing axis.
    """
    t = np.asarray(t, dtype=float)
    n = coeffs.shape[0]
    if n == 1:
        return coeffs[0] + 0.0 * t
    if n == 2:
        return coeffs[0] + coeffs[1] * t
    two_t = 2.0 * t
    b1 = np.zeros(np.broadcast(t, coeffs[0]).shape)
    b2 = np.zeros_like(b1)
    for k in range(n - 1, 0, -1):
        b1, b2 = coeffs[k] + two_t * b1 - b2, b1
    return coeffs[0] + t * b1 - b2


def eval_poly(p: ScaledChebyshevPoly, x):
    """Value of ``p`` at ``x`` (scalar or array).  Points outside the window
    are allowed."""
    out = clenshaw(p.coeffs, p.to_unit(x))
    return float(out) if np.ndim(out) == 0 else out


def _cheb_antiderivatives(kmax: int, t: np.ndarray) -> np.ndarray:
    """Rows ``k = 0..kmax`` of an antiderivative of ``T_k`` evaluated at ``t``."""
    t = np.asarray(t, dtype=float)
    T = np.empty((kmax + 2,) + t.shape)
    T[0] = 1.0
    T[1] = t
    for k in range(1, kmax + 1):
        T[k + 1] = 2.0 * t * T[k] - T[k - 1]
    F = np.empty((kmax + 1,) + t.shape)
    F[0] = t
    if kmax >= 1:
        F[1] = 0.5 * t * t
    for k in range(2, kmax + 1):
        F[k] = 0.5 * (T[k + 1] / (k + 1) - T[k - 1] / (k - 1))
    return F


def gram_matrix(k: int, window: tuple[float, float], segments: np.ndarray) -> np.ndarray:
    """``G[i, q]`` = integral over ``segments[i]`` of the scaled ``T_q``,
    ``q = 0..k-1``."""
    alpha, beta = window
    segs = np.asarray(segments, dtype=float).reshape(-1, 2)
    t = (2.0 * segs - alpha - beta) / (beta - alpha)
    F = _cheb_antiderivatives(k - 1, t)  # (k, nseg, 2)
    return 0.5 * (beta - alpha) * (F[..., 1] - F[..., 0]).T


def basis_segment_integral(k: int, window: tuple[float, float], segment: tuple[float, float]) -> float:
    """Integral of the scaled Chebyshev polynomial ``T_k`` over ``segment``.

    Raises
    ------
    WindowViolation
        ``segment`` is empty or not inside ``window``.
    """
    alpha, beta = window
    u, v = segment
    if not beta > alpha:
        raise WindowViolation(f"empty window [{alpha!r}, {beta!r}]")
    slack = 1e-14 * (beta - alpha)
    if not (u < v and u >= alpha - slack and v <= beta + slack):
        raise WindowViolation(f"segment [{u!r}, {v!r}] is not a subinterval of the window [{alpha!r}, {beta!r}]")
    return float(gram_matrix(k + 1, window, np.array([[u, v]]))[0, k])


def integrate_poly(p: ScaledChebyshevPoly, segment: tuple[float, float]) -> float:
    """Exact integral of ``p`` over ``segment`` (which may leave the window)."""
    G = gram_matrix(len(p.coeffs), p.window, np.array([segment], dtype=float))
    return float(G[0] @ p.coeffs)


@dataclass(frozen=True, eq=False)
class LocalHistopolant:
    iota: int
    poly: ScaledChebyshevPoly
    segment_ids: tuple[int, ...]
    residual: float
    condition: float

    @property
    def k(self) -> int:
        return len(self.segment_ids)


def fit_histopolant(grid: SegmentGrid, segment_ids: Sequence[int], iota: int = 0) -> LocalHistopolant:
    """Histopolant of degree ``len(segment_ids) - 1`` on chained segments.

    The Gram system is solved by LU with partial pivoting; the basis window
    is the hull of the segments.  A single segment short-circuits to the
    segment average.

    Raises
    ------
    SingularGram
        A pivot fell below ``1e-13`` times the matrix norm.
    ResidualTooLarge
        Some segment integral misses its datum by more than
        ``1e-10 max(1, |mu_i|)``.
    """
    ids = tuple(int(i) for i in segment_ids)
    if not ids:
        raise ValueError("segment_ids must be nonempty")
    if ids != tuple(range(ids[0], ids[0] + len(ids))):
        raise ValueError(f"segments {ids} are not chained")
    if ids[0] < 1 or ids[-1] > grid.n:
        raise IndexError(f"segments {ids[0]}..{ids[-1]} outside 1..{grid.n}")
    x = grid.nodes
    alpha, beta = float(x[ids[0] - 1]), float(x[ids[-1]])
    mu = np.asarray(grid.data[ids[0] - 1: ids[-1]], dtype=float)
    k = len(ids)
    if k == 1:
        poly = ScaledChebyshevPoly(alpha, beta, np.array([mu[0] / (beta - alpha)]))
        return LocalHistopolant(iota, poly, ids, 0.0, 1.0)

    segs = np.column_stack([x[ids[0] - 1: ids[-1]], x[ids[0]: ids[-1] + 1]])
    G = gram_matrix(k, (alpha, beta), segs)
    lu, piv = scipy.linalg.lu_factor(G, check_finite=True)
    norm = np.linalg.norm(G, np.inf)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < PIVOT_RTOL * norm:
        raise SingularGram(f"Gram matrix of segments {ids[0]}..{ids[-1]} is numerically singular")
    c = scipy.linalg.lu_solve((lu, piv), mu)
    residual = float(np.max(np.abs(G @ c - mu)))
    bound = RESIDUAL_RTOL * np.maximum(1.0, np.abs(mu))
    if np.any(np.abs(G @ c - mu) > bound):
        raise ResidualTooLarge(f"histopolant on segments {ids[0]}..{ids[-1]} has residual {residual:.3e}")
    cond = float(np.linalg.cond(G, 1))
    return LocalHistopolant(iota, ScaledChebyshevPoly(alpha, beta, c), ids, residual, cond)
