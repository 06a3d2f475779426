"""The quasi-histopolant: local histopolants blended by multinode Shepard
weights.

``Q(x) = sum_iota W_iota(x) p_iota(x)`` where ``p_iota`` histopolates the
data on the segments of covering interval ``U_iota`` and ``W_iota`` is the
Shepard weight of the point set placed in ``U_iota``.  The blend reproduces
every polynomial of degree ``<= d`` but does not match the segment integrals
exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import quadrature
from .covering import Covering, build_covering
from .errors import OutOfDomain
from .grid import ContinuityPartition, SegmentGrid
from .histopoly import LocalHistopolant, fit_histopolant
from .shepard import Placement, ShepardNodes, eval_weights_many, place_nodes

DEFAULT_MU = 4.0
DEFAULT_K = 10
DOMAIN_RTOL = 1e-14
_CHUNK_ELEMS = 1 << 22


class OddMuWarning(UserWarning):
    """``mu`` is not an even positive integer, so the blend is not C-infinity
    at the Shepard points."""


@dataclass(frozen=True, eq=False)
class QuasiHistopolant:
    grid: SegmentGrid
    partition: ContinuityPartition
    covering: Covering
    locals: tuple[LocalHistopolant, ...]
    nodes: ShepardNodes
    mu: float
    report: dict = field(default_factory=dict)
    # padded coefficient table (kmax, M) and windows (M,), (M,)
    _coeffs: np.ndarray = field(default=None, repr=False)
    _alpha: np.ndarray = field(default=None, repr=False)
    _beta: np.ndarray = field(default=None, repr=False)

    @property
    def M(self) -> int:
        return len(self.locals)

    @property
    def d(self) -> int:
        return self.covering.d

    @property
    def K(self) -> int:
        return self.nodes.K

    def __call__(self, x):
        out = evaluate_many(self, np.atleast_1d(x))
        return float(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))


def single_node_overlaps(covering: Covering, tol: float) -> bool:
    """True when consecutive intervals of every group touch in one point."""
    for ell in covering.ells:
        g = covering.group(ell)
        if any(abs(nxt.a - prev.b) > tol for prev, nxt in zip(g, g[1:])):
            return False
    return True


def build(grid: SegmentGrid, partition: ContinuityPartition, d: int,
          K: int = DEFAULT_K, mu: float = DEFAULT_MU,
          placement: Optional[str] = None) -> QuasiHistopolant:
    """Run the whole construction: covering, local fits, point sets.

    ``placement=None`` picks ``interior`` when every pair of consecutive
    covering intervals meets in a single node and ``shared`` otherwise.
    """
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu!r}")
    if not (float(mu).is_integer() and int(mu) % 2 == 0):
        warnings.warn(f"mu={mu!r} is not an even positive integer", OddMuWarning, stacklevel=2)
    cov = build_covering(grid, partition, d)
    if placement is None:
        placement = Placement.INTERIOR if single_node_overlaps(cov, 1e-13 * grid.width) else Placement.SHARED
    placement = Placement.parse(placement)
    locs = tuple(fit_histopolant(grid, u.segment_ids, iota) for iota, u in enumerate(cov.flat))
    nodes = place_nodes(cov, K, placement)

    kmax = max(len(p.poly.coeffs) for p in locs)
    coeffs = np.zeros((kmax, len(locs)))
    for iota, p in enumerate(locs):
        coeffs[: len(p.poly.coeffs), iota] = p.poly.coeffs
    alpha = np.array([p.poly.alpha for p in locs])
    beta = np.array([p.poly.beta for p in locs])
    report = {
        "n": grid.n,
        "d": int(d),
        "K": int(K),
        "mu": float(mu),
        "placement": placement.value,
        "r": cov.radius,
        "M": cov.M,
        "n_ell": {str(k): v for k, v in cov.counts.items()},
        "worst_residual": max(p.residual for p in locs),
        "max_condition": max(p.condition for p in locs),
    }
    return QuasiHistopolant(grid, partition, cov, locs, nodes, float(mu), report, coeffs, alpha, beta)


def _check_domain(Q: QuasiHistopolant, x: np.ndarray) -> None:
    tol = DOMAIN_RTOL * Q.grid.width
    bad = ~((x >= Q.grid.a - tol) & (x <= Q.grid.b + tol))
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise OutOfDomain(f"xs[{i}]={x[i]!r} outside [{Q.grid.a!r}, {Q.grid.b!r}]", index=i)


def local_values(Q: QuasiHistopolant, x: np.ndarray) -> np.ndarray:
    """``p_iota(x)`` for all ``iota``, shape ``(len(x), M)``."""
    t = (2.0 * x[:, None] - Q._alpha - Q._beta) / (Q._beta - Q._alpha)
    c = Q._coeffs
    if c.shape[0] == 1:
        return np.broadcast_to(c[0], t.shape).copy()
    two_t = 2.0 * t
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    for k in range(c.shape[0] - 1, 0, -1):
        b1, b2 = c[k] + two_t * b1 - b2, b1
    return c[0] + t * b1 - b2


def _blend(Q: QuasiHistopolant, x: np.ndarray) -> np.ndarray:
    W = eval_weights_many(Q.nodes, Q.mu, x)
    P = local_values(Q, x)
    with np.errstate(invalid="ignore", over="ignore"):
        terms = np.where(W > 0, W * P, 0.0)
    return terms.sum(axis=1)


def evaluate_many(Q: QuasiHistopolant, xs) -> np.ndarray:
    """``Q(x)`` for every entry of ``xs``, in order.

    Raises
    ------
    OutOfDomain
        With ``index`` set to the first offending position.
    """
    x = np.asarray(xs, dtype=float).reshape(-1)
    if x.size == 0:
        return np.empty(0)
    _check_domain(Q, x)
    out = np.empty(x.size)
    step = max(1, _CHUNK_ELEMS // (Q.M * Q.K))
    for s in range(0, x.size, step):
        out[s:s + step] = _blend(Q, x[s:s + step])
    return out


def evaluate(Q: QuasiHistopolant, x: float) -> float:
    return float(evaluate_many(Q, [x])[0])


def omega(Q: QuasiHistopolant) -> list[tuple[float, float]]:
    """Per continuity interval, the span from its first to its last Shepard
    point; the region where the error analysis applies."""
    spans = []
    for ell in Q.covering.ells:
        idx = [i for i, u in enumerate(Q.covering.flat) if u.ell == ell]
        pts = Q.nodes.xi[idx]
        spans.append((float(pts.min()), float(pts.max())))
    return spans


def integral_defect(Q: QuasiHistopolant, grid: Optional[SegmentGrid] = None,
                    tol: float = 1e-11) -> np.ndarray:
    """``|int_{s_i} Q - mu_i|`` per segment; NaN on jump-hosting segments.

    Integrals use adaptive 16-point Gauss-Legendre with the Shepard points
    inside each segment as initial breakpoints.
    """
    grid = Q.grid if grid is None else grid
    x = grid.nodes
    hosts = Q.partition.host_segments
    pts = Q.nodes.all_points
    lo, hi, owner = [], [], []
    for i in range(1, grid.n + 1):
        if i in hosts:
            continue
        u, v = x[i - 1], x[i]
        inner = pts[(pts > u) & (pts < v)]
        bp = np.concatenate([[u], inner, [v]])
        lo.append(bp[:-1])
        hi.append(bp[1:])
        owner.append(np.full(len(bp) - 1, i - 1))
    out = np.full(grid.n, np.nan)
    if not lo:
        return out
    totals = quadrature.adaptive(lambda t: evaluate_many(Q, t), np.concatenate(lo), np.concatenate(hi),
                                 np.concatenate(owner), grid.n, tol=tol)
    free = np.array([i for i in range(grid.n) if (i + 1) not in hosts])
    out[free] = np.abs(totals[free] - grid.data[free])
    return out
