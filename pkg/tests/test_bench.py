import numpy as np
import pytest
from scipy.integrate import quad

from histoshep import bench
from histoshep.errors import JumpOnNode, UnknownExperiment


def test_constant_data_exact():
    f = bench.TestFunction("c", (lambda x: np.full(np.shape(x), 2.0),))
    x = np.array([0.0, 0.3, 0.5, 1.0])
    np.testing.assert_allclose(bench.synthesize_data(f, x), 2.0 * np.diff(x), rtol=1e-15)


def test_f2_segment():
    mu = bench.synthesize_data(bench.CATALOG["f2"], [0.0, 0.1])
    assert mu[0] == pytest.approx(1 / (5 * np.pi), abs=1e-15)


def test_f5_split_segment_oracle():
    f = bench.CATALOG["f5"]
    c = 17 / 8 * np.pi
    u, v = -0.013, 0.021
    left = (-np.cos(c * 0) + np.cos(c * u)) / c
    right = 0.5 * (-np.cos(c * v) + np.cos(c * 0)) / c + 10 * v
    assert bench.synthesize_data(f, [u, v])[0] == pytest.approx(left + right, abs=1e-14)


def test_jump_on_node():
    with pytest.raises(JumpOnNode):
        bench.synthesize_data(bench.CATALOG["f5"], [-1.0, 0.0, 1.0])
    bench.synthesize_data(bench.CATALOG["f5"], [-1.0, 0.0, 1.0], allow_jump_on_node=True)


@pytest.mark.parametrize("name", sorted(bench.CATALOG))
def test_antiderivatives_match_quad(name):
    f = bench.CATALOG[name]
    x = np.linspace(-1, 1, 38)  # keeps every jump inside a segment
    mu = bench.synthesize_data(f, x)
    for i in (0, 11, 18, 30):
        pts = [p for p in f.jumps if x[i] < p < x[i + 1]]
        ref, _ = quad(f, x[i], x[i + 1], points=pts or None, epsabs=1e-14, epsrel=1e-13, limit=200)
        assert mu[i] == pytest.approx(ref, abs=1e-12)


def test_function_values():
    f8 = bench.CATALOG["f8"]
    np.testing.assert_allclose(f8([-0.5, -0.25, 0.0, 0.25, 0.5]), [5 / (1 / 64 + 1), 1.5, 0.25, 0.25, 5 / (1 / 64 + 1)])
    assert bench.CATALOG["f5"](0.0) == 0.0
    assert bench.CATALOG["g6"](-2.0) == -16.0


def test_polynomial_errors_tiny():
    f = bench.TestFunction("cubic", (lambda x: 1 - 2 * x + x**3,), (), (lambda x: x - x**2 + x**4 / 4,))
    Q = bench.build_for(f, 60, 3)
    rep = bench.error_report(f, Q, 2001)
    assert rep.e1 <= 1e-9 and rep.emax <= 1e-9 and rep.emean <= rep.emax


def test_table_example_cells():
    rows = bench.tables_f5(K_list=(10,), d_list=(4,)) + bench.tables_f5(K_list=(20,), d_list=(3,))
    cell = {(r["K"], r["d"], r["i"]): r for r in rows}
    for key, ref in {(10, 4, 1): 5.8677e-11, (20, 3, 2): 5.6576e-09}.items():
        assert abs(np.log10(cell[key]["emax"] / ref)) <= 1.0
    assert f"{cell[(10, 4, 1)]['t_min']:.4e}" == "2.0040e-03"


def test_report_exclusions():
    f = bench.CATALOG["f5"]
    Q = bench.build_for(f, 256, 3)
    full = bench.error_report(f, Q, 1000, with_e1=False)
    cont = bench.error_report(f, Q, 1000, exclude="jump_segments", with_e1=False)
    om = bench.error_report(f, Q, 1000, exclude="omega", with_e1=False)
    assert cont.emax < 1e-4 < full.emax and om.emax <= cont.emax
    assert full.t_min == pytest.approx(1 / 999)
    with pytest.raises(ValueError):
        bench.error_report(f, Q, 1001, exclude="bogus")


def test_unknown_experiment():
    with pytest.raises(UnknownExperiment):
        bench.run_experiment("test9")


def test_test4_rows_and_reference_columns():
    rows = bench.run_experiment("test4", {"d_list": (3,), "ne": 2001})
    assert [r["function"] for r in rows] == ["g1", "g2", "g3", "g4", "g5", "g6"]
    g1 = rows[0]
    assert g1["reference:emax"] == 2.01e-03 and g1["reference:e_MC"] == 6.19e-02
    assert abs(np.log10(g1["emax"] / 2.01e-03)) <= 1.0


def test_csv_deterministic(monkeypatch):
    a = bench.rows_to_csv(bench.run_experiment("test4", {"d_list": (3, 6), "ne": 1001}))
    monkeypatch.setenv("HISTOSHEP_THREADS", "1")
    b = bench.rows_to_csv(bench.run_experiment("test4", {"d_list": (3, 6), "ne": 1001}))
    assert a == b
    header = a.splitlines()[0].split(",")
    assert header[:5] == ["function", "n", "d", "K", "mu"]
    for col in ("e1", "emax", "emean", "t_min"):
        assert col in header


def test_two_interval_weights_dominate():
    rows = bench.run_experiment("figure8", {"n_x": 101})
    left = [r for r in rows if r["x"] < -0.1]
    assert all(r["W_1"] > 0.99 for r in left)
    assert rows[50]["W_1"] == pytest.approx(0.5)


def test_test3_small_sweep():
    rows = bench.run_experiment("test3", {"n_list": (100, 300), "ne": 1001})
    e1 = {(r["function"], r["n"], r["d"]): r["e1"] for r in rows}
    for name in ("f5", "f6", "f7", "f8"):
        assert e1[(name, 300, 3)] < e1[(name, 100, 3)]
