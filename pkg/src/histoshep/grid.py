"""Segment grids, discontinuity bookkeeping and mesh metrics.

A :class:`SegmentGrid` stores the nodes ``x_0 < ... < x_n`` together with the
integrals of the unknown function over the chained segments
``s_i = [x_{i-1}, x_i]``.  Segments are numbered from 1, nodes from 0, so that
segment ``i`` always sits between nodes ``i - 1`` and ``i``.

Known jump locations split the grid into continuity intervals
(:class:`ContinuityPartition`).  Each jump is hosted by the segment whose open
interior contains it; that segment belongs to no continuity interval.
"""

from __future__ import annotations

import bisect
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    AllSegmentsHostJumps,
    JumpOnNode,
    JumpOutsideDomain,
    LengthMismatch,
    NonFiniteInput,
    NonMonotoneNodes,
    TwoJumpsOneSegment,
)

#: relative tolerance used when comparing mesh lengths computed along
#: different floating point paths (e.g. ``x_3 - x_1`` versus ``2 h``).
LENGTH_RTOL = 1e-12
#: a jump closer than this (times ``b - a``) to a node is "on" the node.
JUMP_NODE_RTOL = 1e-14


@dataclass(frozen=True, eq=False)
class SegmentGrid:
    """Nodes, chained segments and the integral datum of each segment.

    Attributes
    ----------
    nodes : ndarray of shape (n + 1,)
        Strictly increasing nodes.
    data : ndarray of shape (n,)
        ``data[i - 1]`` is the integral of ``f`` over segment ``i``.
    """

    nodes: np.ndarray
    data: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.data.setflags(write=False)

    @property
    def n(self) -> int:
        """Number of segments."""
        return len(self.nodes) - 1

    @property
    def a(self) -> float:
        return float(self.nodes[0])

    @property
    def b(self) -> float:
        return float(self.nodes[-1])

    @property
    def width(self) -> float:
        return self.b - self.a

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def averages(self) -> np.ndarray:
        """Segment averages ``mu_i / |s_i|`` (a derived view of the data)."""
        return self.data / self.lengths

    def segment(self, i: int) -> tuple[float, float]:
        """Endpoints of segment ``i`` (1-based)."""
        if not 1 <= i <= self.n:
            raise IndexError(f"segment index {i} outside 1..{self.n}")
        return float(self.nodes[i - 1]), float(self.nodes[i])

    def locate(self, x: float) -> int:
        """1-based index of the segment whose half-open span ``[x_{i-1}, x_i)``
        holds ``x``; the right end maps to segment ``n``."""
        i = bisect.bisect_right(self.nodes, x)
        return min(max(i, 1), self.n)

    def with_data(self, data) -> "SegmentGrid":
        return build_grid(self.nodes, data)

    def __repr__(self):
        return f"SegmentGrid(n={self.n}, a={self.a!r}, b={self.b!r})"


@dataclass(frozen=True)
class ContinuityInterval:
    """A nonempty continuity interval: segments ``first..last`` (inclusive)."""

    first: int
    last: int
    left: float
    right: float

    @property
    def length(self) -> float:
        return self.right - self.left

    @property
    def count(self) -> int:
        return self.last - self.first + 1

    @property
    def segment_ids(self) -> range:
        return range(self.first, self.last + 1)


@dataclass(frozen=True)
class ContinuityPartition:
    """Jump locations, their host segments and the continuity intervals.

    ``intervals`` has ``m + 2`` entries for ``m + 1`` jumps; empty intervals
    are kept as ``None`` so that positions match the usual ``I_0..I_{m+1}``
    numbering.  ``sigma[j]`` is the 1-based host segment of jump ``j``, or
    ``None`` for a jump that was accepted on a node (see
    :func:`partition_continuity`).
    """

    jumps: tuple[float, ...]
    sigma: tuple[Optional[int], ...]
    intervals: tuple[Optional[ContinuityInterval], ...]
    n_segments: int

    @property
    def host_segments(self) -> frozenset[int]:
        """Segments outside every continuity interval (normally the jump
        hosts; with ``on_node="straddle"`` also the neighbours of node jumps)."""
        inside = set()
        for _, iv in self.nonempty:
            inside.update(iv.segment_ids)
        return frozenset(range(1, self.n_segments + 1)) - inside

    @property
    def nonempty(self) -> list[tuple[int, ContinuityInterval]]:
        """``(ell, interval)`` pairs for the nonempty continuity intervals."""
        return [(ell, iv) for ell, iv in enumerate(self.intervals) if iv is not None]

    @property
    def lengths(self) -> tuple[float, ...]:
        """``h_ell``: interval length, 0 for empty entries."""
        return tuple(0.0 if iv is None else iv.length for iv in self.intervals)


@dataclass(frozen=True)
class GridMetrics:
    h_min_continuity: float
    h_min_segments: float
    h_max_segments: float
    h_min_jump_segments: Optional[float]
    admissible: bool

    def as_dict(self) -> dict:
        return {
            "h_min_continuity": self.h_min_continuity,
            "h_min_segments": self.h_min_segments,
            "h_max_segments": self.h_max_segments,
            "h_min_jump_segments": self.h_min_jump_segments,
            "admissible": self.admissible,
        }


def _as_finite_array(values, what: str) -> np.ndarray:
    try:
        arr = np.array(values, dtype=float, copy=True).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise NonFiniteInput(f"{what} must be real numbers") from exc
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise NonFiniteInput(f"{what}[{bad}] is not finite")
    return arr


def build_grid(nodes: Sequence[float], data: Sequence[float]) -> SegmentGrid:
    """Validate nodes and integral data and wrap them in a :class:`SegmentGrid`.

    Raises
    ------
    NonMonotoneNodes
        Fewer than two nodes, or nodes not strictly increasing.
    LengthMismatch
        ``len(data) != len(nodes) - 1``.
    NonFiniteInput
        Any NaN/inf value.
    """
    x = _as_finite_array(nodes, "nodes")
    mu = _as_finite_array(data, "data")
    if len(x) < 2:
        raise NonMonotoneNodes("at least two nodes (one segment) are required")
    steps = np.diff(x)
    if np.any(steps <= 0):
        bad = int(np.flatnonzero(steps <= 0)[0])
        raise NonMonotoneNodes(
            f"nodes must be strictly increasing: x[{bad}]={x[bad]!r} >= x[{bad + 1}]={x[bad + 1]!r}"
        )
    if len(mu) != len(x) - 1:
        raise LengthMismatch(f"{len(x)} nodes define {len(x) - 1} segments but {len(mu)} data values were given")
    return SegmentGrid(x, mu)


def partition_continuity(grid: SegmentGrid, jumps: Sequence[float] = (), *,
                         on_node: str = "raise") -> ContinuityPartition:
    """Locate each jump in its host segment and assemble the continuity intervals.

    Parameters
    ----------
    grid : SegmentGrid
    jumps : sequence of float
        Discontinuity locations; sorted internally.
    on_node : {"raise", "split", "straddle"}
        What to do with a jump lying on a node (within ``1e-14 (b - a)``).
        ``"raise"`` rejects it.  ``"split"`` breaks the continuity intervals
        at that node, with no segment removed.  ``"straddle"`` removes both
        segments sharing the node, as if each hosted the jump.

    Raises
    ------
    JumpOnNode, JumpOutsideDomain, TwoJumpsOneSegment
    """
    if on_node not in ("raise", "split", "straddle"):
        raise ValueError(f"on_node must be 'raise', 'split' or 'straddle', got {on_node!r}")
    ys = sorted(_as_finite_array(jumps, "jumps").tolist())
    for j in range(1, len(ys)):
        if ys[j] == ys[j - 1]:
            raise TwoJumpsOneSegment(f"duplicate jump location {ys[j]!r}")
    x = grid.nodes
    tol = JUMP_NODE_RTOL * grid.width

    # each jump becomes a cut: (last segment of the interval before it,
    # first segment of the interval after it)
    sigma: list[Optional[int]] = []
    cuts: list[tuple[int, int]] = []
    for y in ys:
        if not (grid.a < y < grid.b) or min(y - grid.a, grid.b - y) <= tol:
            raise JumpOutsideDomain(f"jump {y!r} is not inside the open interval ({grid.a!r}, {grid.b!r})")
        k = int(np.argmin(np.abs(x - y)))
        if abs(x[k] - y) <= tol:
            if on_node == "raise":
                raise JumpOnNode(f"jump {y!r} coincides with node x_{k}={x[k]!r}")
            sigma.append(None)
            cuts.append((k, k + 1) if on_node == "split" else (k - 1, k + 2))
        else:
            s = grid.locate(y)
            sigma.append(s)
            cuts.append((s - 1, s + 1))

    for (_, prev_next), (end, _) in zip(cuts, cuts[1:]):
        # removed segments of consecutive jumps must not overlap
        if end < prev_next - 1:
            raise TwoJumpsOneSegment("two jumps share a segment")

    intervals: list[Optional[ContinuityInterval]] = []
    start = 1
    for end, nxt in cuts + [(grid.n, grid.n + 1)]:
        if end >= start:
            intervals.append(ContinuityInterval(start, end, float(x[start - 1]), float(x[end])))
        else:
            intervals.append(None)
        start = nxt
    return ContinuityPartition(tuple(ys), tuple(sigma), tuple(intervals), grid.n)


def lengths_ge(u: float, v: float, width: float) -> bool:
    """``u >= v`` up to the rounding noise of mesh-length arithmetic."""
    return u >= v - LENGTH_RTOL * width


def compute_metrics(grid: SegmentGrid, partition: ContinuityPartition) -> GridMetrics:
    """Mesh metrics over non-host segments and the admissibility flag.

    The grid is admissible when the shortest nonempty continuity interval is
    at least as long as the longest segment not hosting a jump.  The
    comparison allows ``1e-12 (b - a)`` of rounding noise.

    Raises
    ------
    AllSegmentsHostJumps
        No segment is free of jumps.
    """
    lengths = grid.lengths
    hosts = partition.host_segments
    free = np.array([lengths[i - 1] for i in range(1, grid.n + 1) if i not in hosts])
    if free.size == 0:
        raise AllSegmentsHostJumps("every segment hosts a jump; metrics are undefined")
    h_cont = min(h for h in partition.lengths if h > 0)
    h_min = float(free.min())
    h_max = float(free.max())
    h_jump = min((float(lengths[s - 1]) for s in hosts), default=None)
    admissible = lengths_ge(h_cont, h_max, grid.width)
    if not admissible:
        warnings.warn(
            f"grid is not admissible: shortest continuity interval {h_cont!r} < longest segment {h_max!r}",
            stacklevel=2,
        )
    return GridMetrics(float(h_cont), h_min, h_max, h_jump, admissible)


def equispaced_nodes(a: float, b: float, n: int) -> np.ndarray:
    """``n + 1`` equispaced nodes on ``[a, b]`` with exact endpoints."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.linspace(a, b, n + 1)


def is_equispaced(grid: SegmentGrid, rtol: float = 1e-12) -> bool:
    h = grid.width / grid.n
    return bool(np.all(np.abs(grid.lengths - h) <= rtol * grid.width))

