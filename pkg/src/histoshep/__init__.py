"""Smooth rational quasi-histopolation of functions with jumps.

Reconstructs a bounded, possibly discontinuous function on ``[a, b]`` from its
integrals over consecutive segments by blending local histopolation
polynomials with multinode Shepard weights.
"""

from .covering import Covering, build_covering, covering_radius, max_degree, segments_in
from .errors import HistoshepError
from .grid import (
    ContinuityPartition,
    GridMetrics,
    SegmentGrid,
    build_grid,
    compute_metrics,
    equispaced_nodes,
    partition_continuity,
)
from .histopoly import (
    LocalHistopolant,
    ScaledChebyshevPoly,
    basis_segment_integral,
    eval_poly,
    fit_histopolant,
    integrate_poly,
)
from .operator import QuasiHistopolant, build, evaluate, evaluate_many, integral_defect
from .shepard import Placement, ShepardNodes, eval_weights, eval_weights_many, place_nodes, weight_bound_F

__version__ = "0.1.0"

__all__ = [
    "ContinuityPartition", "Covering", "GridMetrics", "HistoshepError", "LocalHistopolant", "Placement",
    "QuasiHistopolant", "ScaledChebyshevPoly", "SegmentGrid", "ShepardNodes", "basis_segment_integral",
    "build", "build_covering", "build_grid", "compute_metrics", "covering_radius", "equispaced_nodes",
    "eval_poly", "eval_weights", "eval_weights_many", "evaluate", "evaluate_many", "fit_histopolant",
    "integral_defect", "integrate_poly", "max_degree", "partition_continuity", "place_nodes", "segments_in",
    "weight_bound_F",
]
