"""Covering radius, maximal degree and equal-length coverings of the
continuity intervals.

Every continuity interval ``I_ell`` is covered by closed intervals ``U`` of a
common length ``r`` such that each segment of ``I_ell`` lies wholly inside at
least one ``U`` (property C), no ``U`` can be dropped without losing that
(property M), and each ``U`` contains at least ``d + 1`` whole segments.  The
local histopolants of degree ``>= d`` live on the segments of each ``U``.

For a general mesh the radius used is the longest window of ``d + 1``
consecutive segments inside one continuity interval; on a uniform mesh this
is exactly ``(d + 1) (b - a) / n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import CoverageViolation, DegreeInfeasible, InadmissibleGrid
from .grid import (
    ContinuityPartition,
    SegmentGrid,
    compute_metrics,
    is_equispaced,
    lengths_ge,
)

#: endpoint tolerance (times ``b - a``) for containment tests
CONTAIN_RTOL = 1e-13


@dataclass(frozen=True)
class CoverInterval:
    """One covering interval ``U`` with its back-reference ``(ell, j)``."""

    ell: int
    j: int
    a: float
    b: float
    segment_ids: tuple[int, ...] = ()

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def k(self) -> int:
        """Number of whole segments inside ``U``."""
        return len(self.segment_ids)


@dataclass(frozen=True)
class Covering:
    """Coverings of all nonempty continuity intervals, flattened in
    ``(ell, j)`` order."""

    flat: tuple[CoverInterval, ...]
    radius: float
    d: int
    spans: dict = field(default_factory=dict)  # ell -> (left, right) of I_ell

    @property
    def M(self) -> int:
        return len(self.flat)

    @property
    def ells(self) -> list[int]:
        return sorted({u.ell for u in self.flat})

    def group(self, ell: int) -> list[CoverInterval]:
        return [u for u in self.flat if u.ell == ell]

    @property
    def counts(self) -> dict[int, int]:
        """``n_ell`` per continuity interval."""
        return {ell: len(self.group(ell)) for ell in self.ells}

    def index_of(self, ell: int, j: int) -> int:
        """Flat index of ``U_{ell, j}`` (``j`` is 1-based)."""
        for iota, u in enumerate(self.flat):
            if u.ell == ell and u.j == j:
                return iota
        raise KeyError((ell, j))

    @classmethod
    def from_intervals(cls, groups: Sequence[Sequence[tuple[float, float]]],
                       radius: Optional[float] = None, d: int = 0) -> "Covering":
        """Covering made of explicit intervals, without a segment grid.

        Useful to study the blending weights on a prescribed layout; each
        inner sequence is one continuity interval.
        """
        flat = []
        spans = {}
        for ell, group in enumerate(groups):
            ivs = sorted((float(a), float(b)) for a, b in group)
            for j, (a, b) in enumerate(ivs, start=1):
                flat.append(CoverInterval(ell, j, a, b))
            spans[ell] = (ivs[0][0], max(b for _, b in ivs))
        if radius is None:
            radius = max(u.length for u in flat)
        return cls(tuple(flat), float(radius), d, spans)

    def as_dict(self) -> dict:
        return {
            "radius": self.radius,
            "d": self.d,
            "M": self.M,
            "intervals": {
                str(ell): [
                    {"a": u.a, "b": u.b, "segments": [u.segment_ids[0], u.segment_ids[-1]] if u.segment_ids else []}
                    for u in self.group(ell)
                ]
                for ell in self.ells
            },
        }


def _tol(grid: SegmentGrid) -> float:
    return CONTAIN_RTOL * grid.width


def _window_max(grid: SegmentGrid, partition: ContinuityPartition, d: int) -> float:
    """Longest window of ``d + 1`` consecutive segments inside one continuity
    interval."""
    x = grid.nodes
    best = 0.0
    for _, iv in partition.nonempty:
        lo = iv.first - 1  # node index of the left end
        hi = iv.last - d - 1  # last admissible window start
        if hi < lo:
            continue
        starts = np.arange(lo, hi + 1)
        best = max(best, float(np.max(x[starts + d + 1] - x[starts])))
    return best


def _h_min(partition: ContinuityPartition) -> float:
    return min(h for h in partition.lengths if h > 0)


def _feasible(grid, partition, d: int) -> bool:
    if any(iv.count < d + 1 for _, iv in partition.nonempty):
        return False
    return lengths_ge(_h_min(partition), _window_max(grid, partition, d), grid.width)


def _check_admissible(grid, partition) -> None:
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        metrics = compute_metrics(grid, partition)
    if not metrics.admissible:
        raise InadmissibleGrid(
            f"shortest continuity interval {metrics.h_min_continuity!r} is shorter than "
            f"the longest segment {metrics.h_max_segments!r}"
        )


def max_degree(grid: SegmentGrid, partition: ContinuityPartition) -> int:
    """Largest ``d`` for which :func:`covering_radius` succeeds.

    Raises
    ------
    InadmissibleGrid
    """
    _check_admissible(grid, partition)
    d = 0
    while _feasible(grid, partition, d + 1):
        d += 1
    return d


def covering_radius(grid: SegmentGrid, partition: ContinuityPartition, d: int) -> float:
    """Common length of the covering intervals for local degree ``d``.

    Raises
    ------
    InadmissibleGrid
        The grid violates the admissibility condition for this ``d``.
    DegreeInfeasible
        Some continuity interval has fewer than ``d + 1`` segments.
    """
    if d < 0 or int(d) != d:
        raise ValueError("d must be a nonnegative integer")
    d = int(d)
    _check_admissible(grid, partition)
    short = [(ell, iv.count) for ell, iv in partition.nonempty if iv.count < d + 1]
    if short:
        ell, count = short[0]
        d_max = max_degree(grid, partition)
        raise DegreeInfeasible(
            f"continuity interval I_{ell} has only {count} segments, need {d + 1} for d={d} (d_max={d_max})",
            d_max=d_max,
        )
    window = _window_max(grid, partition, d)
    if not lengths_ge(_h_min(partition), window, grid.width):
        d_max = max_degree(grid, partition)
        raise DegreeInfeasible(
            f"windows of {d + 1} segments (length {window!r}) exceed the shortest continuity "
            f"interval {_h_min(partition)!r} (d_max={d_max})",
            d_max=d_max,
        )
    if is_equispaced(grid):
        return (d + 1) * grid.width / grid.n
    return window


def segments_in(a: float, b: float, grid: SegmentGrid) -> tuple[int, ...]:
    """1-based indices of the segments lying inside ``[a, b]``.

    Containment is tested with an endpoint tolerance of ``1e-13 (b - a)`` of
    the grid, since covering endpoints land on nodes only up to rounding.
    """
    tol = _tol(grid)
    x = grid.nodes
    lo = int(np.searchsorted(x, a - tol, side="left"))  # first node >= a
    hi = int(np.searchsorted(x, b + tol, side="right")) - 1  # last node <= b
    if hi <= lo:
        return ()
    return tuple(range(lo + 1, hi + 1))


def _greedy(grid: SegmentGrid, left: float, right: float, r: float) -> list[tuple[float, float]]:
    x = grid.nodes
    tol = _tol(grid)
    out = [(left, left + r)]
    while out[-1][1] < right - tol:
        edge = out[-1][1]
        k = int(np.argmin(np.abs(x - edge)))
        if abs(x[k] - edge) <= tol:
            start = float(x[k])  # segment starting at the node
        else:
            start = float(x[grid.locate(edge) - 1])  # segment straddling the edge
        if start + r >= right - tol:
            out.append((right - r, right))
            break
        out.append((start, start + r))
    return out


def _drop_redundant(ivs: list[tuple[float, float]], seg_sets: list[set[int]]):
    keep = list(range(len(ivs)))
    for idx in range(len(ivs)):
        others = set().union(*(seg_sets[o] for o in keep if o != idx)) if len(keep) > 1 else set()
        if seg_sets[idx] <= others:
            keep.remove(idx)
    return [ivs[i] for i in keep], [seg_sets[i] for i in keep]


def build_covering(grid: SegmentGrid, partition: ContinuityPartition, d: int) -> Covering:
    """Greedy left-to-right covering of every continuity interval.

    ``U_1 = [a_ell, a_ell + r]``; each further interval starts at the left end
    of the segment holding (or, at a node, starting at) the previous right
    end.  When that would overrun ``b_ell`` the last interval is
    right-aligned to ``[b_ell - r, b_ell]``.  Redundant intervals are dropped
    and all covering properties are re-verified.

    Raises
    ------
    CoverageViolation
        A post-construction check failed.
    InadmissibleGrid, DegreeInfeasible
        Propagated from :func:`covering_radius`.
    """
    r = covering_radius(grid, partition, d)
    flat = []
    spans = {}
    for ell, iv in partition.nonempty:
        ivs = _greedy(grid, iv.left, iv.right, r)
        seg_sets = [set(segments_in(a, b, grid)) for a, b in ivs]
        ivs, seg_sets = _drop_redundant(ivs, seg_sets)
        spans[ell] = (iv.left, iv.right)
        for j, ((a, b), segs) in enumerate(zip(ivs, seg_sets), start=1):
            flat.append(CoverInterval(ell, j, a, b, tuple(sorted(segs))))
    cov = Covering(tuple(flat), r, int(d), spans)
    verify_covering(cov, grid, partition)
    return cov


def verify_covering(cov: Covering, grid: SegmentGrid, partition: ContinuityPartition) -> None:
    """Raise :class:`CoverageViolation` unless equal lengths, union, chained
    overlap, property (C), ``>= d + 1`` segments and property (M) all hold."""
    tol = _tol(grid)
    for ell, iv in partition.nonempty:
        group = cov.group(ell)
        if not group:
            raise CoverageViolation(f"I_{ell} has no covering intervals")
        for u in group:
            if abs(u.length - cov.radius) > tol:
                raise CoverageViolation(f"U_{ell},{u.j} has length {u.length!r} != radius {cov.radius!r}")
            if u.a < iv.left - tol or u.b > iv.right + tol:
                raise CoverageViolation(f"U_{ell},{u.j} = [{u.a!r}, {u.b!r}] leaves I_{ell}")
            if u.k < cov.d + 1:
                raise CoverageViolation(f"U_{ell},{u.j} holds {u.k} segments, need {cov.d + 1}")
            if tuple(range(u.segment_ids[0], u.segment_ids[-1] + 1)) != u.segment_ids:
                raise CoverageViolation(f"U_{ell},{u.j} segments are not contiguous")
        if abs(group[0].a - iv.left) > tol or abs(group[-1].b - iv.right) > tol:
            raise CoverageViolation(f"covering of I_{ell} does not span it")
        for prev, nxt in zip(group, group[1:]):
            if nxt.a > prev.b + tol:
                raise CoverageViolation(f"gap between U_{ell},{prev.j} and U_{ell},{nxt.j}")
        covered = [set(u.segment_ids) for u in group]
        if set().union(*covered) != set(iv.segment_ids):
            missing = sorted(set(iv.segment_ids) - set().union(*covered))
            raise CoverageViolation(f"property (C) fails on I_{ell}: segments {missing[:5]} uncovered")
        for idx, u in enumerate(group):
            rest = set().union(*(c for o, c in enumerate(covered) if o != idx)) if len(group) > 1 else set()
            if covered[idx] <= rest:
                raise CoverageViolation(f"property (M) fails: U_{ell},{u.j} is redundant")
