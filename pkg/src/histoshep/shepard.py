"""Multinode Shepard weights.

Each covering interval ``U_iota`` carries a set ``C_iota`` of ``K`` points in
its interior.  The weight of set ``iota`` at ``x`` is the normalised inverse
product of distances::

    W_iota(x) = prod_k |x - xi_k^iota|^-mu / sum_lambda prod_k |x - xi_k^lambda|^-mu

The weights are nonnegative, sum to one, and ``W_iota`` vanishes on the points
of every other set.  Products of ``K`` small distances raised to ``mu`` under-
or overflow quickly, so evaluation happens in the log domain with a
softmax-style normalisation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.special import gammaln

from .covering import Covering
from .errors import BadIndex, BadK, PoolUnderflow

COINCIDENCE_GUARD = 1e-300
_CHUNK_ELEMS = 1 << 22


class Placement(str, Enum):
    INTERIOR = "interior"
    SHARED = "shared"

    @classmethod
    def parse(cls, value) -> "Placement":
        if isinstance(value, cls):
            return value
        aliases = {"interior": cls.INTERIOR, "interiorequispaced": cls.INTERIOR,
                   "shared": cls.SHARED, "sharedpool": cls.SHARED}
        key = str(value).lower().replace("_", "").replace("-", "")
        if key not in aliases:
            raise ValueError(f"unknown placement {value!r}; use 'interior' or 'shared'")
        return aliases[key]


@dataclass(frozen=True, eq=False)
class ShepardNodes:
    """Point sets ``C_iota`` as rows of ``xi`` (shape ``(M, K)``)."""

    xi: np.ndarray
    intervals: np.ndarray  # (M, 2): a_iota, b_iota
    placement: Placement

    def __post_init__(self):
        self.xi.setflags(write=False)
        self.intervals.setflags(write=False)

    @property
    def M(self) -> int:
        return self.xi.shape[0]

    @property
    def K(self) -> int:
        return self.xi.shape[1]

    @property
    def sets(self) -> list[np.ndarray]:
        return list(self.xi)

    @property
    def all_points(self) -> np.ndarray:
        return np.unique(self.xi)


@dataclass(frozen=True, eq=False)
class WeightVector:
    values: np.ndarray
    at: float


def _interior(a: float, b: float, K: int) -> np.ndarray:
    return a + (b - a) * (np.arange(1, K + 1) / (K + 1))


def _pool_counts(gaps: np.ndarray, member: np.ndarray, K: int, r: float) -> np.ndarray:
    """Integer points per gap such that every covering interval gets exactly
    ``K`` and every gap at least one.

    Gaps owned by a single interval aim at ``floor(K |gap| / r)`` points; gaps
    shared by several intervals absorb the rounding surplus, with a weak pull
    towards their length-proportional share.
    """
    G = len(gaps)
    if G == member.shape[0] and np.array_equal(member, np.eye(G, dtype=bool)):
        return np.full(G, K)
    share = K * gaps / r
    exclusive = member.sum(axis=0) == 1
    target = np.where(exclusive, np.maximum(np.floor(share + 1e-9), 1.0), share)
    weight = np.where(exclusive, 1.0, 1e-3)
    # variables: counts n_g (integer), then deviations t_g >= |n_g - target_g|
    c = np.concatenate([np.zeros(G), weight])
    eye = np.eye(G)
    cons = [
        LinearConstraint(np.hstack([member.astype(float), np.zeros(member.shape)]), K, K),
        LinearConstraint(np.hstack([eye, -eye]), -np.inf, target),
        LinearConstraint(np.hstack([-eye, -eye]), -np.inf, -target),
    ]
    integrality = np.concatenate([np.ones(G), np.zeros(G)])
    res = milp(c, constraints=cons, integrality=integrality,
               bounds=Bounds(np.concatenate([np.ones(G), np.zeros(G)]), np.full(2 * G, np.inf)))
    if not res.success:
        raise PoolUnderflow(f"no shared point pool gives exactly K={K} points to every covering interval; "
                            "raise K or use interior placement")
    return np.rint(res.x[:G]).astype(int)


def _shared_group(ivs: np.ndarray, K: int, r: float, tol: float) -> list[np.ndarray]:
    ends = np.sort(ivs.ravel())
    keep = np.concatenate([[True], np.diff(ends) > tol])
    ends = ends[keep]
    gaps = np.diff(ends)
    mids = 0.5 * (ends[:-1] + ends[1:])
    member = (mids[None, :] > ivs[:, :1]) & (mids[None, :] < ivs[:, 1:])
    counts = _pool_counts(gaps, member, K, r)
    pool = [ends[g] + gaps[g] * (np.arange(1, counts[g] + 1) / (counts[g] + 1)) for g in range(len(gaps))]
    return [np.concatenate([pool[g] for g in np.flatnonzero(member[i])]) for i in range(len(ivs))]


def place_nodes(covering: Covering, K: int, mode="interior") -> ShepardNodes:
    """Choose the ``K`` points of every set ``C_iota``.

    ``interior``
        ``K`` equispaced points strictly inside each ``U_iota``.
    ``shared``
        All covering endpoints of a continuity interval cut it into open
        gaps; each gap receives equispaced points and every ``U`` takes the
        points of the gaps it spans, so overlapping intervals share their
        points on the overlap.  Per-gap counts come from a small integer
        program: exactly ``K`` points per ``U``, at least one per gap, gaps
        private to one ``U`` rounded down from their proportional share.

    Raises
    ------
    BadK
        ``K < 2``.
    PoolUnderflow
        No admissible integer split exists (shared mode only).
    """
    if int(K) != K or K < 2:
        raise BadK(f"K must be an integer >= 2, got {K!r}")
    K = int(K)
    mode = Placement.parse(mode)
    bounds = np.array([[u.a, u.b] for u in covering.flat], dtype=float)
    if mode is Placement.INTERIOR:
        xi = np.array([_interior(a, b, K) for a, b in bounds])
    else:
        xi = np.empty((covering.M, K))
        for ell in covering.ells:
            idx = [i for i, u in enumerate(covering.flat) if u.ell == ell]
            span = bounds[idx].max() - bounds[idx].min()
            rows = _shared_group(bounds[idx], K, covering.radius, 1e-13 * span)
            for i, row in zip(idx, rows):
                xi[i] = np.sort(row)
    return ShepardNodes(xi, bounds, mode)


def log_products(xi: np.ndarray, x: np.ndarray):
    """``sum_k log|x - xi_k|`` per set and the coincidence mask.

    Returns arrays of shape ``(len(x), M)``.
    """
    diff = np.abs(x[:, None, None] - xi[None, :, :])
    hit = diff <= COINCIDENCE_GUARD
    with np.errstate(divide="ignore"):
        logs = np.log(diff).sum(axis=2)
    return logs, hit.any(axis=2)


def _weights_chunk(xi: np.ndarray, mu: float, x: np.ndarray) -> np.ndarray:
    logs, hit = log_products(xi, x)
    W = np.empty_like(logs)
    on_node = hit.any(axis=1)
    if on_node.any():
        h = hit[on_node].astype(float)
        W[on_node] = h / h.sum(axis=1, keepdims=True)
    off = ~on_node
    if off.any():
        L = -mu * logs[off]
        L -= L.max(axis=1, keepdims=True)
        E = np.exp(L)
        W[off] = E / E.sum(axis=1, keepdims=True)
    return W


def eval_weights_many(nodes: ShepardNodes, mu: float, xs) -> np.ndarray:
    """Weights at many points, shape ``(len(xs), M)``; row ``i`` is
    bit-identical to :func:`eval_weights` at ``xs[i]``."""
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu!r}")
    x = np.asarray(xs, dtype=float).reshape(-1)
    out = np.empty((len(x), nodes.M))
    step = max(1, _CHUNK_ELEMS // (nodes.M * nodes.K))
    for s in range(0, len(x), step):
        out[s:s + step] = _weights_chunk(nodes.xi, float(mu), x[s:s + step])
    return out


def eval_weights(nodes: ShepardNodes, mu: float, x: float) -> WeightVector:
    """All ``M`` weights at one point.  On a node the weights become the
    uniform distribution over the sets owning that node."""
    return WeightVector(eval_weights_many(nodes, mu, [x])[0], float(x))


def weight_bound_F(gap: float, r: float, k: int, K: int, mu: float) -> float:
    """Upper bound on the foreign weight for two neighbouring sets.

    For two intervals of length ``r`` separated by ``gap`` with ``K``
    interior equispaced points each, and ``x`` between points ``k`` and
    ``k + 1`` of one set, the other set's weight is at most::

        ( k! (K-k)! / ( prod_{j=1..K} (K-k+j) + (K+1)^K (gap/r)^K ) )^mu

    Evaluated through log-gamma so large ``K`` does not overflow.
    """
    if not (1 <= k <= K - 1):
        raise BadIndex(f"k must lie in 1..K-1, got k={k}, K={K}")
    if gap < 0 or not r > 0 or not mu > 0:
        raise ValueError("need gap >= 0, r > 0, mu > 0")
    log_num = gammaln(k + 1) + gammaln(K - k + 1)
    log_prod = gammaln(2 * K - k + 1) - gammaln(K - k + 1)
    log_sep = K * np.log(K + 1) + K * np.log(gap / r) if gap > 0 else -np.inf
    return float(np.exp(mu * (log_num - np.logaddexp(log_prod, log_sep))))


def two_interval_nodes(alpha: float, beta: float, gamma: float, delta: float, K: int) -> ShepardNodes:
    """The two-set configuration with interior equispaced points in
    ``(alpha, beta)`` and ``(gamma, delta)``."""
    cov = Covering.from_intervals([[(alpha, beta), (gamma, delta)]])
    return place_nodes(cov, K, Placement.INTERIOR)


def figure_layout(lefts: Sequence[float], length: float) -> Covering:
    """Single-group covering with intervals ``[a, a + length]``."""
    return Covering.from_intervals([[(a, a + length) for a in lefts]], radius=length)
