"""Test-function catalog, integral-data synthesis, error metrics and the
named experiment sweeps.

Segment counts are always explicit here.  The discontinuous sweeps use 1024
segments (1025 equispaced nodes on ``[-1, 1]``), so the jump at 0 falls on a
node; both segments touching it are then left out of the continuity
intervals (``on_node="straddle"``).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import erfi

from . import quadrature
from .errors import JumpOnNode, NumericalError, UnknownExperiment
from .grid import JUMP_NODE_RTOL, build_grid, equispaced_nodes, partition_continuity
from .operator import QuasiHistopolant, build, evaluate_many, omega
from .shepard import Placement, eval_weights_many, figure_layout, place_nodes, two_interval_nodes

SYNTH_POINTS = 32
SYNTH_RTOL = 1e-12
DEFAULT_NE = 10007


@dataclass(frozen=True, eq=False)
class TestFunction:
    """A function on ``[-1, 1]`` given piecewise between its jumps.

    ``pieces[j]`` is the smooth branch on ``[jumps[j-1], jumps[j]]``;
    ``antiderivatives`` (optional) holds one primitive per piece.
    """

    __test__ = False  # not a pytest class

    name: str
    pieces: tuple[Callable, ...]
    jumps: tuple[float, ...] = ()
    antiderivatives: Optional[tuple[Callable, ...]] = None
    # which side owns a jump point: "left" means x <= y uses the left branch
    closed: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.pieces) != len(self.jumps) + 1:
            raise ValueError("need one piece per continuity interval")
        if any(b <= a for a, b in zip(self.jumps, self.jumps[1:])):
            raise ValueError("jumps must be strictly increasing")
        if not self.closed:
            object.__setattr__(self, "closed", ("left",) * len(self.jumps))

    def piece_index(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        idx = np.zeros(x.shape, dtype=int)
        for y, side in zip(self.jumps, self.closed):
            idx += (x > y) if side == "left" else (x >= y)
        return idx

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape)
        idx = self.piece_index(x)
        for j, p in enumerate(self.pieces):
            m = idx == j
            if m.any():
                out[m] = p(x[m])
        return float(out) if out.ndim == 0 else out

    def range_on(self, j: int, lo: float, hi: float, npts: int = 20001) -> tuple[float, float]:
        """Min and max of piece ``j`` over ``[lo, hi]`` (sampled)."""
        v = self.pieces[j](np.linspace(lo, hi, npts))
        return float(v.min()), float(v.max())


def _const(c):
    return lambda x: np.full(np.shape(x), float(c))


_C5 = 17 / 8 * np.pi
_E = np.e

CATALOG: dict[str, TestFunction] = {
    "f1": TestFunction("f1", (lambda x: 1 / (1 + 25 * x**2),), (), (lambda x: np.arctan(5 * x) / 5,)),
    "f2": TestFunction("f2", (lambda x: np.cos(5 * np.pi * x),), (),
                       (lambda x: np.sin(5 * np.pi * x) / (5 * np.pi),)),
    "f3": TestFunction("f3", (lambda x: 1 / (x - 1.5),), (), (lambda x: np.log(1.5 - x),)),
    "f4": TestFunction("f4", (lambda x: np.cos(50 * np.pi * x),), (),
                       (lambda x: np.sin(50 * np.pi * x) / (50 * np.pi),)),
    "f5": TestFunction(
        "f5",
        (lambda x: np.sin(_C5 * x), lambda x: 0.5 * np.sin(_C5 * x) + 10),
        (0.0,),
        (lambda x: -np.cos(_C5 * x) / _C5, lambda x: -0.5 * np.cos(_C5 * x) / _C5 + 10 * x),
    ),
    "f6": TestFunction(
        "f6",
        (lambda x: 0.5 * x**5 - x**2, lambda x: x**6 - x**4 + x**2 - 2),
        (0.0,),
        (lambda x: x**6 / 12 - x**3 / 3, lambda x: x**7 / 7 - x**5 / 5 + x**3 / 3 - 2 * x),
    ),
    "f7": TestFunction(
        "f7",
        (lambda x: np.exp(0.5 * (x + 1)), lambda x: 1 + np.exp(0.25 * (x + 1) ** 2)),
        (0.0,),
        (lambda x: 2 * np.exp(0.5 * (x + 1)), lambda x: x + np.sqrt(np.pi) * erfi((x + 1) / 2)),
    ),
    "f8": TestFunction(
        "f8",
        (lambda x: 5 / ((x / 4) ** 2 + 1), _const(1.5), _const(0.25), lambda x: 5 / ((x / 4) ** 2 + 1)),
        (-0.5, 0.0, 0.5),
        (lambda x: 20 * np.arctan(x / 4), lambda x: 1.5 * x, lambda x: 0.25 * x,
         lambda x: 20 * np.arctan(x / 4)),
        closed=("left", "right", "right"),
    ),
    "g1": TestFunction("g1", (lambda x: 1 / (1 + 25 * x**2),), (), (lambda x: np.arctan(5 * x) / 5,)),
    "g2": TestFunction("g2", (lambda x: 1 / (1 + 8 * x**2),), (),
                       (lambda x: np.arctan(np.sqrt(8) * x) / np.sqrt(8),)),
    "g3": TestFunction("g3", (lambda x: np.exp(x**2 + 1),), (),
                       (lambda x: _E * np.sqrt(np.pi) / 2 * erfi(x),)),
    "g4": TestFunction("g4", (lambda x: np.cos(5 * x),), (), (lambda x: np.sin(5 * x) / 5,)),
    "g5": TestFunction("g5", (lambda x: 1 / (x - 1.5),), (), (lambda x: np.log(1.5 - x),)),
    "g6": TestFunction("g6", (lambda x: x * np.abs(x) ** 3,), (), (lambda x: np.abs(x) ** 5 / 5,)),
}


def get_function(name: str) -> TestFunction:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownExperiment(f"unknown test function {name!r}; known: {', '.join(CATALOG)}") from None


def synthesize_data(f: TestFunction, nodes, *, allow_jump_on_node: bool = False) -> np.ndarray:
    """Segment integrals of ``f`` over the grid defined by ``nodes``.

    Each segment (split at any jump inside it) gets a 32-point Gauss-Legendre
    rule.  When ``f`` has exact antiderivatives those values are returned,
    after checking the quadrature agrees with them to ``1e-12 max(1, |mu|)``.

    Raises
    ------
    JumpOnNode
        A jump sits on a node and ``allow_jump_on_node`` is false.
    NumericalError
        Quadrature and antiderivative disagree.
    """
    x = np.asarray(nodes, dtype=float)
    tol = JUMP_NODE_RTOL * (x[-1] - x[0])
    if not allow_jump_on_node:
        for y in f.jumps:
            if np.min(np.abs(x - y)) <= tol:
                raise JumpOnNode(f"jump {y!r} of {f.name} lies on a node")
    lo, hi, owner, piece = [], [], [], []
    for i in range(len(x) - 1):
        u, v = x[i], x[i + 1]
        cuts = [u]
        for y in f.jumps:
            if u + tol < y < v - tol:
                cuts.append(y)
        cuts.append(v)
        for p, q in zip(cuts[:-1], cuts[1:]):
            lo.append(p)
            hi.append(q)
            owner.append(i)
            piece.append(int(f.piece_index(np.array(0.5 * (p + q)))))
    lo, hi, owner, piece = map(np.asarray, (lo, hi, owner, piece))

    pts, wts = quadrature.panel_points(lo, hi, SYNTH_POINTS)
    vals = np.empty_like(pts)
    for j, p in enumerate(f.pieces):
        m = piece == j
        if m.any():
            vals[m] = p(pts[m])
    mu_quad = np.zeros(len(x) - 1)
    np.add.at(mu_quad, owner, np.sum(vals * wts, axis=1))
    if f.antiderivatives is None:
        return mu_quad

    parts = np.empty(len(lo))
    for j, F in enumerate(f.antiderivatives):
        m = piece == j
        if m.any():
            parts[m] = F(hi[m]) - F(lo[m])
    mu = np.zeros(len(x) - 1)
    np.add.at(mu, owner, parts)
    bad = np.abs(mu - mu_quad) > SYNTH_RTOL * np.maximum(1.0, np.abs(mu))
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise NumericalError(f"{f.name}: quadrature {mu_quad[i]!r} and antiderivative {mu[i]!r} "
                             f"disagree on segment {i + 1}")
    return mu


@dataclass(frozen=True)
class ErrorReport:
    e1: float
    emax: float
    emean: float
    n_e: int
    t_min: float
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.emean > self.emax:
            raise NumericalError(f"mean error {self.emean!r} exceeds max error {self.emax!r}")

    def as_row(self) -> dict:
        return {**self.config, "e1": self.e1, "emax": self.emax, "emean": self.emean, "t_min": self.t_min}


def jump_distances(f: TestFunction, xs: np.ndarray) -> list[float]:
    """Per jump, the distance to the closest evaluation point."""
    return [float(np.min(np.abs(xs - y))) for y in f.jumps]


def _kept(Q: QuasiHistopolant, xs: np.ndarray, exclude: str) -> np.ndarray:
    if exclude == "none":
        return np.ones(xs.shape, dtype=bool)
    if exclude == "jump_segments":
        keep = np.zeros(xs.shape, dtype=bool)
        for _, iv in Q.partition.nonempty:
            keep |= (xs >= iv.left) & (xs <= iv.right)
        return keep
    if exclude == "omega":
        keep = np.zeros(xs.shape, dtype=bool)
        for lo, hi in omega(Q):
            keep |= (xs >= lo) & (xs <= hi)
        return keep
    raise ValueError(f"exclude must be 'none', 'jump_segments' or 'omega', got {exclude!r}")


def l1_error(f: TestFunction, Q: QuasiHistopolant) -> float:
    """``int |f - Q|`` with 16-point Gauss-Legendre on ``4 n`` panels,
    refined at the jumps and at every Shepard point."""
    a, b = Q.grid.a, Q.grid.b
    bp = np.concatenate([np.linspace(a, b, 4 * Q.grid.n + 1), f.jumps, Q.nodes.all_points])
    bp = np.unique(bp[(bp >= a) & (bp <= b)])
    return quadrature.composite(lambda t: np.abs(f(t) - evaluate_many(Q, t)), bp, 16)


def error_report(f: TestFunction, Q: QuasiHistopolant, n_e: int = DEFAULT_NE,
                 exclude: str = "none", with_e1: bool = True) -> ErrorReport:
    """Max, mean and L1 errors of ``Q`` against ``f``.

    ``exclude`` drops evaluation points outside the continuity intervals
    (``"jump_segments"``) or outside the span of the Shepard points
    (``"omega"``) from ``emax``/``emean``.  ``t_min`` is the smallest
    distance from the evaluation grid to a jump (NaN without jumps).
    """
    if n_e < 2:
        raise ValueError("n_e must be at least 2")
    xs = np.linspace(Q.grid.a, Q.grid.b, int(n_e))
    err = np.abs(f(xs) - evaluate_many(Q, xs))[_kept(Q, xs, exclude)]
    dists = jump_distances(f, xs)
    config = {k: Q.report[k] for k in ("n", "d", "K", "mu", "placement")}
    return ErrorReport(
        e1=l1_error(f, Q) if with_e1 else float("nan"),
        emax=float(err.max()),
        emean=float(err.mean()),
        n_e=int(n_e),
        t_min=min(dists) if dists else float("nan"),
        config=config,
    )


def build_for(f: TestFunction, n: int, d: int, K: int = 10, mu: float = 4.0,
              placement: Optional[str] = None) -> QuasiHistopolant:
    """Quasi-histopolant of ``f`` from ``n`` equispaced segments on ``[-1, 1]``.

    Jumps falling on nodes remove both neighbouring segments.
    """
    x = equispaced_nodes(-1.0, 1.0, n)
    grid = build_grid(x, synthesize_data(f, x, allow_jump_on_node=True))
    part = partition_continuity(grid, f.jumps, on_node="straddle")
    return build(grid, part, d, K=K, mu=mu, placement=placement)


# published columns of the mock-Chebyshev comparison table, echoed verbatim
REFERENCE_SMOOTH = {
    "g1": {"eq": 4.77e+06, "MC": 6.19e-02, "MCF": 7.39e-02, "MCF_hat": 2.67e-01,
           "Q": {3: 2.01e-03, 6: 5.77e-04, 9: 3.02e-03, 12: 2.17e-04}},
    "g2": {"eq": 6.57e+02, "MC": 1.12e-02, "MCF": 9.19e-03, "MCF_hat": 1.25e-02,
           "Q": {3: 1.42e-04, 6: 3.04e-05, 9: 2.87e-05, 12: 2.70e-06}},
    "g3": {"eq": 4.05e-03, "MC": 2.10e-08, "MCF": 8.48e-10, "MCF_hat": 5.90e-13,
           "Q": {3: 2.48e-05, 6: 4.77e-07, 9: 3.52e-10, 12: 2.90e-12}},
    "g4": {"eq": 2.67e-03, "MC": 9.12e-07, "MCF": 2.85e-08, "MCF_hat": 7.43e-13,
           "Q": {3: 4.75e-05, 6: 1.31e-06, 9: 4.77e-09, 12: 6.77e-12}},
    "g5": {"eq": 1.68e-03, "MC": 6.43e-06, "MCF": 1.61e-06, "MCF_hat": 2.94e-08,
           "Q": {3: 4.74e-05, 6: 4.24e-06, 9: 1.01e-07, 12: 1.10e-08}},
    "g6": {"eq": 1.53e+06, "MC": 1.31e-04, "MCF": 1.22e-04, "MCF_hat": 2.33e-04,
           "Q": {3: 5.83e-06, 6: 6.78e-06, 9: 1.18e-05, 12: 2.54e-07}},
}

# published max errors for f5 on 1024 segments, indexed [K][row i-1][d-2]
REFERENCE_F5 = {
    10: [[5.1525e-07, 4.9831e-09, 5.8677e-11, 9.2664e-10],
         [2.2003e-06, 1.0656e-06, 1.1993e-05, 6.0061e-04],
         [2.8706e-03, 3.8893e-03, 1.5064e-02, 2.6906e-01],
         [2.7313e-01, 2.0466e-01, 4.6859e-01, 3.6115e+00]],
    15: [[5.1525e-07, 4.8759e-09, 5.8677e-11, 5.8653e-13],
         [1.9819e-06, 5.6674e-09, 6.6691e-09, 3.8303e-07],
         [1.7335e-05, 9.3846e-05, 3.9392e-04, 5.7528e-03],
         [1.5626e-02, 3.9503e-02, 8.0300e-02, 5.9887e-01]],
    20: [[5.1525e-07, 4.8538e-09, 5.8677e-11, 5.7643e-13],
         [1.9819e-06, 5.6576e-09, 3.0537e-10, 2.4306e-10],
         [3.5375e-06, 1.2977e-06, 1.0058e-05, 1.2101e-04],
         [4.5416e-03, 4.4043e-03, 1.3102e-02, 7.2323e-02]],
}
REFERENCE_T = [2.0040e-03, 1.0010e-03, 5.0025e-04, 2.5006e-04]
TABLE_NE = (500, 1000, 2000, 4000)

# lefts of the nine overlapping intervals of the shared-point illustration
OVERLAP_LEFTS = (-1.0, -0.8032, -0.6233, -0.3924, -0.1773, 0.0408, 0.3290, 0.5646, 19 / 30)
OVERLAP_LENGTH = 11 / 30


def _threads() -> int:
    raw = os.environ.get("HISTOSHEP_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return min(4, os.cpu_count() or 1)


def _pmap(fn, items):
    items = list(items)
    workers = min(_threads(), len(items)) or 1
    if workers == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, items))  # keeps declared order


def _cell(name, n, d, K, mu, placement, n_e, exclude):
    f = get_function(name)
    Q = build_for(f, n, d, K, mu, placement)
    rep = error_report(f, Q, n_e, exclude)
    return {"function": name, **rep.as_row(), "n_e": n_e}


def _test1(o):
    cells = []
    for name in ("f1", "f2", "f3"):
        cells += [(name, n, d) for d in o.get("d_list", (3, 6, 9)) for n in o.get("n_list", range(100, 1001, 100))]
    cells += [("f4", n, d) for d in o.get("d_list_f4", (3, 6, 9, 12, 15))
              for n in o.get("n_list_f4", range(200, 2001, 200))]
    return _pmap(lambda c: _cell(c[0], c[1], c[2], o["K"], o["mu"], o["placement"], o["ne"], "none"), cells)


def tables_f5(K_list=(10, 15, 20), d_list=(2, 3, 4, 5), n=1024, mu=4.0, placement=None):
    """Max errors of f5 for each ``(K, d)`` on the four evaluation grids."""
    f = CATALOG["f5"]

    def run(cell):
        K, d = cell
        Q = build_for(f, n, d, K, mu, placement)
        rows = []
        for i, n_e in enumerate(TABLE_NE):
            xs = np.linspace(-1.0, 1.0, n_e)
            emax = float(np.max(np.abs(f(xs) - evaluate_many(Q, xs))))
            ref = REFERENCE_F5.get(K, [[np.nan] * 4] * 4)[i][d - 2] if 2 <= d <= 5 else np.nan
            rows.append({"K": K, "d": d, "n": n, "mu": mu, "placement": Q.report["placement"],
                         "i": i + 1, "n_e": n_e, "t_min": jump_distances(f, xs)[0],
                         "emax": emax, "reference:emax": ref})
        return rows

    return [r for rows in _pmap(run, [(K, d) for K in K_list for d in d_list]) for r in rows]


def _test2(o):
    rows = [{"table": "f5", **r} for r in tables_f5(o.get("K_list", (10, 15, 20)), o.get("d_list", (2, 3, 4, 5)),
                                                   o.get("n", 1024), o["mu"], o["placement"])]
    return rows


def _test3(o):
    cells = [(name, n) for name in ("f5", "f6", "f7", "f8") for n in o.get("n_list", range(100, 1501, 200))]
    rows = _pmap(lambda c: _cell(c[0], c[1], 3, 10, o["mu"], o["placement"], o["ne"], "none"), cells)
    rows += _pmap(lambda n: _cell("f5", n, 5, 25, o["mu"], o["placement"], o["ne"], "jump_segments"),
                  o.get("n_list", range(100, 1501, 200)))
    return rows


def _test4(o):
    cells = [(name, d) for name in ("g1", "g2", "g3", "g4", "g5", "g6") for d in o.get("d_list", (3, 6, 9, 12))]

    def run(c):
        name, d = c
        row = _cell(name, o.get("n", 51), d, o["K"], o["mu"], o["placement"], o["ne"], "none")
        ref = REFERENCE_SMOOTH[name]
        row.update({"reference:e_eq": ref["eq"], "reference:e_MC": ref["MC"], "reference:e_MCF": ref["MCF"],
                    "reference:e_MCF_hat": ref["MCF_hat"], "reference:emax": ref["Q"].get(d, np.nan)})
        return row

    return _pmap(run, cells)


def overlap_layout_weights(placement: str, K: int = 10, mu: float = 4.0, n_x: int = 2001):
    """Weights of the nine-interval layout on ``n_x`` equispaced points."""
    cov = figure_layout(OVERLAP_LEFTS, OVERLAP_LENGTH)
    nodes = place_nodes(cov, K, placement)
    xs = np.linspace(-1.0, 1.0, n_x)
    return xs, eval_weights_many(nodes, mu, xs), nodes


def _weight_rows(tag, xs, W):
    return [{"config": tag, "x": float(x), **{f"W_{i + 1}": float(w) for i, w in enumerate(row)}}
            for x, row in zip(xs, W)]


def _figure1(o):
    rows = []
    for mode in (Placement.INTERIOR, Placement.SHARED):
        xs, W, _ = overlap_layout_weights(mode, o["K"], o["mu"], o.get("n_x", 2001))
        rows += _weight_rows(mode.value, xs, W)
    return rows


def _figure8(o):
    nodes = two_interval_nodes(-1.0, -0.1, 0.1, 1.0, o["K"])
    xs = np.linspace(-1.0, 1.0, o.get("n_x", 2001))
    return _weight_rows("two_intervals", xs, eval_weights_many(nodes, o["mu"], xs))


EXPERIMENTS = {
    "test1": _test1,
    "test2": _test2,
    "test3": _test3,
    "test4": _test4,
    "figure1": _figure1,
    "figure8": _figure8,
}


def run_experiment(name: str, overrides: Optional[dict] = None) -> list[dict]:
    """Rows of the named sweep, in declared order.

    Overrides: ``K``, ``mu``, ``placement``, ``ne`` and sweep-specific lists
    such as ``n_list``/``d_list``.

    Raises
    ------
    UnknownExperiment
    """
    if name not in EXPERIMENTS:
        raise UnknownExperiment(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    o = {"K": 10, "mu": 4.0, "placement": None, "ne": DEFAULT_NE}
    o.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return EXPERIMENTS[name](o)


def plot_traces(name: str, n: int = 1024, d: int = 3, K: int = 10, mu: float = 4.0,
                placement: Optional[str] = None, n_x: int = 4001) -> list[dict]:
    """``x, f(x), Q(x)`` on ``n_x`` points for one catalog function."""
    f = get_function(name)
    Q = build_for(f, n, d, K, mu, placement)
    xs = np.linspace(-1.0, 1.0, n_x)
    return [{"x": float(x), "f": float(a), "Q": float(b)} for x, a, b in zip(xs, f(xs), evaluate_many(Q, xs))]


def rows_to_csv(rows: Sequence[dict]) -> str:
    """CSV text with the union of keys as header (first-seen order) and
    shortest round-trip floats."""
    cols: list[str] = []
    for r in rows:
        cols += [k for k in r if k not in cols]
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join(_fmt(r.get(c, "")) for c in cols))
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "" if v is None else str(v)
