"""Acceptance criteria 1-10.

Each test records one PASS/FAIL line (shown in the pytest terminal summary
under "acceptance criteria") and then asserts.
"""

import time

import numpy as np
import pytest

import histoshep as hs
from histoshep import bench
from histoshep.covering import verify_covering

from conftest import ACCEPTANCE_LINES, poly_data, random_admissible, random_grid


def record(num, ok, detail):
    line = f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def _suite_builds():
    """Representative operators: discontinuous, smooth, random mesh, heavy overlap."""
    rng = np.random.default_rng(7)
    out = []
    for name, n, d, K in (("f5", 1024, 3, 10), ("f8", 1024, 3, 10), ("g1", 51, 12, 10), ("f7", 1024, 5, 20)):
        t0 = time.perf_counter()
        Q = bench.build_for(bench.CATALOG[name], n, d, K)
        out.append((f"{name} n={n} d={d} K={K}", Q, time.perf_counter() - t0))
    x = random_grid(rng, 300)
    g = hs.build_grid(x, np.sin(3 * x[1:]) - np.sin(3 * x[:-1]))
    t0 = time.perf_counter()
    Q = hs.build(g, hs.partition_continuity(g, [x[150] + 0.4 * (x[151] - x[150])]), 4)
    out.append(("random mesh n=300 d=4", Q, time.perf_counter() - t0))
    return out


@pytest.fixture(scope="module")
def suite():
    return _suite_builds()


def test_c1_partition_of_unity(suite):
    rng = np.random.default_rng(1)
    worst_sum, min_w, slowest = 0.0, 1.0, 0.0
    for _, Q, secs in suite:
        x = rng.uniform(Q.grid.a, Q.grid.b, 10**4)
        W = hs.eval_weights_many(Q.nodes, Q.mu, x)
        worst_sum = max(worst_sum, float(np.max(np.abs(W.sum(axis=1) - 1))))
        min_w = min(min_w, float(W.min()))
        slowest = max(slowest, secs)
    ok = worst_sum <= 1e-12 and min_w >= 0 and slowest < 1.0
    record(1, ok, f"max|sum W - 1|={worst_sum:.1e} min W={min_w:.1e} slowest build {slowest:.2f}s")
    assert ok


def test_c2_polynomial_reproduction():
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    worst = 0.0
    for d in (0, 1, 2, 3, 5):
        for trial in range(20):
            x = random_grid(rng, int(rng.integers(40, 120)))
            jumps = [] if trial % 2 else [x[20] + 0.5 * (x[21] - x[20])]
            c = rng.normal(size=d + 1)
            g = hs.build_grid(x, poly_data(c, x))
            Q = hs.build(g, hs.partition_continuity(g, jumps), d)
            t = rng.uniform(-1, 1, 200)
            q = np.polynomial.Polynomial(c)(t)
            scale = max(1.0, float(np.max(np.abs(np.polynomial.Polynomial(c)(np.linspace(-1, 1, 2001))))))
            worst = max(worst, float(np.max(np.abs(Q(t) - q))) / scale)
    secs = time.perf_counter() - t0
    ok = worst <= 1e-9 and secs < 10
    record(2, ok, f"worst relative error {worst:.1e} over 100 polynomials, {secs:.1f}s")
    assert ok


def test_c3_local_histopolation(suite):
    worst = 0.0
    for _, Q, _ in suite:
        mu = Q.grid.data
        for p in Q.locals:
            for i in p.segment_ids:
                err = abs(hs.integrate_poly(p.poly, Q.grid.segment(i)) - mu[i - 1]) / max(1.0, abs(mu[i - 1]))
                worst = max(worst, err)
    ok = worst <= 1e-10
    record(3, ok, f"worst scaled local residual {worst:.1e}")
    assert ok


def _independent_cover_check(cov, grid, part):
    x = grid.nodes
    tol = 1e-13 * grid.width
    for ell, iv in part.nonempty:
        sets = []
        for u in cov.group(ell):
            if abs(u.length - cov.radius) > tol:
                return False
            inside = {i for i in iv.segment_ids if x[i - 1] >= u.a - tol and x[i] <= u.b + tol}
            if len(inside) < cov.d + 1:
                return False
            sets.append(inside)
        if set().union(*sets) != set(iv.segment_ids):
            return False
        for k in range(len(sets)):
            rest = set().union(*(s for j, s in enumerate(sets) if j != k)) if len(sets) > 1 else set()
            if not sets[k] - rest:
                return False
    return True


def test_c4_radius_oracle_and_coverings(suite):
    rng = np.random.default_rng(4)
    mismatches = 0
    for _ in range(100):
        grid, part = random_admissible(rng)
        hosts = part.host_segments
        brute = max(grid.nodes[i] - grid.nodes[i - 1] for i in range(1, grid.n + 1) if i not in hosts)
        if hs.covering_radius(grid, part, 0) != brute:
            mismatches += 1
        d_max = hs.max_degree(grid, part)
        for d in {0, min(2, d_max), d_max}:
            cov = hs.build_covering(grid, part, d)
            verify_covering(cov, grid, part)
            mismatches += not _independent_cover_check(cov, grid, part)
    for _, Q, _ in suite:
        mismatches += not _independent_cover_check(Q.covering, Q.grid, Q.partition)
    ok = mismatches == 0
    record(4, ok, f"100 random grids + suite coverings, {mismatches} failures")
    assert ok


def test_c5_weight_bound_and_monotonicity():
    rng = np.random.default_rng(5)
    worst = -np.inf
    for K in (5, 10, 20):
        for mu in (2.0, 4.0):
            for gap in (0.0, 0.1, 1.0):
                nodes = hs.shepard.two_interval_nodes(0.0, 1.0, 1.0 + gap, 2.0 + gap, K)
                for side in (0, 1):  # foreign weight of set 2 on set 1, and the mirror
                    xi = nodes.xi[side]
                    x = rng.uniform(xi[0], xi[-1], 1000)
                    k = np.searchsorted(xi, x)
                    k = k if side == 0 else K - k
                    F = np.array([hs.weight_bound_F(gap, 1.0, int(q), K, mu) for q in k])
                    W = hs.eval_weights_many(nodes, mu, x)[:, 1 - side]
                    worst = max(worst, float(np.max(W - F)))
    mono_bad = 0
    for K in range(2, 31):
        for gap in (0.0, 0.05, 0.1, 0.5, 1.0, 2.0):
            for mu in (1.0, 2.0, 4.0):
                F = [hs.weight_bound_F(gap, 1.0, k, K, mu) for k in range(1, K)]
                mono_bad += max(F) > F[-1]
    ok = worst <= 1e-12 and mono_bad == 0
    record(5, ok, f"max(W - F)={worst:.1e} over 36000 samples; monotonicity violations {mono_bad}")
    assert ok


def test_c6_f5_error_tables():
    t0 = time.perf_counter()
    rows = bench.tables_f5()
    secs = time.perf_counter() - t0
    dev = [abs(np.log10(r["emax"] / r["reference:emax"])) for r in rows]
    t_ok = all(f"{r['t_min']:.4e}" == f"{bench.REFERENCE_T[r['i'] - 1]:.4e}" for r in rows)
    ok = len(rows) == 48 and max(dev) <= 1.0 and t_ok
    record(6, ok, f"48 cells, worst |log10(ours/published)|={max(dev):.2f}, t column 4-digit match={t_ok}, {secs:.0f}s")
    assert ok


def test_c7_smooth_comparison_table():
    t0 = time.perf_counter()
    rows = bench.run_experiment("test4")
    secs = time.perf_counter() - t0
    dev = [abs(np.log10(r["emax"] / r["reference:emax"])) for r in rows]
    echoed = all(r["reference:e_MC"] == bench.REFERENCE_SMOOTH[r["function"]]["MC"] for r in rows)
    ok = len(rows) == 24 and max(dev) <= 1.0 and echoed and secs < 60
    record(7, ok, f"24 cells, worst |log10(ours/published)|={max(dev):.2f}, reference columns echoed, {secs:.0f}s")
    assert ok


def test_c8_convergence_trend():
    f = bench.CATALOG["f1"]
    e = {}
    for n, d in ((100, 3), (1000, 3), (1000, 9)):
        e[n, d] = bench.error_report(f, bench.build_for(f, n, d), with_e1=False).emax
    ok = e[1000, 3] <= e[100, 3] / 10 and e[1000, 9] <= 1e-10
    record(8, ok, f"f1 d=3: {e[100, 3]:.2e} -> {e[1000, 3]:.2e}; d=9 n=1000: {e[1000, 9]:.2e}")
    assert ok


def test_c9_no_cross_jump_overshoot():
    worst = 0.0
    for name in ("f5", "f6", "f7", "f8"):
        f = bench.CATALOG[name]
        Q = bench.build_for(f, 1024, 3)
        heights = [abs(f.pieces[j + 1](np.array(y)) - f.pieces[j](np.array(y))) for j, y in enumerate(f.jumps)]
        H = max(heights)
        for ell, iv in Q.partition.nonempty:
            xs = np.linspace(iv.left, iv.right, 20001)
            q = Q(xs)
            lo, hi = f.range_on(ell, iv.left, iv.right)
            worst = max(worst, (q.max() - hi) / H, (lo - q.min()) / H)
    ok = worst <= 1e-3
    record(9, ok, f"largest overshoot over f5..f8 = {worst:.1e} of the jump height")
    assert ok


def test_c10_shared_pool_suppresses_oscillation():
    tv = {}
    for mode in ("interior", "shared"):
        xs, W, nodes = bench.overlap_layout_weights(mode, n_x=20001)
        tv[mode] = np.abs(np.diff(W, axis=0)).sum(axis=0)
    ok = tv["shared"].max() <= 4.0 and tv["interior"].max() >= 10.0 and tv["interior"].sum() >= 3 * tv["shared"].sum()
    record(10, ok, f"weight total variation: shared max {tv['shared'].max():.2f} sum {tv['shared'].sum():.1f}; "
                   f"interior max {tv['interior'].max():.2f} sum {tv['interior'].sum():.1f}")
    assert ok
