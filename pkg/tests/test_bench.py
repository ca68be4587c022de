import time

import numpy as np
import pytest
from scipy import stats

from mvdindex.bench import (
    CSV_COLUMNS,
    BenchReport,
    OracleMismatch,
    Workload,
    gen_points,
    gen_queries,
    run_cell,
    run_grid,
)
from mvdindex.geometry import Point
from mvdindex.mvd import QueryStats


def test_gen_points_deterministic():
    w = Workload(n=4, seed=11)
    assert gen_points(w) == gen_points(Workload(n=4, seed=11))
    assert gen_points(w) != gen_points(Workload(n=4, seed=12))
    assert [i for i, _ in gen_points(w)] == [0, 1, 2, 3]


def test_uniform_moments():
    xy = np.array([tuple(p) for _, p in gen_points(Workload("uniform", n=10_000, seed=1))])
    assert ((0 <= xy) & (xy < 1)).all()
    # std of the mean is 0.289 / 100, so the band is about 7 sigma
    assert np.all((0.48 <= xy.mean(axis=0)) & (xy.mean(axis=0) <= 0.52))


def test_exponential_skewed_and_rescaled():
    xy = np.array([tuple(p) for _, p in gen_points(Workload("exp", n=10_000, seed=1))])
    assert xy.min() == 0.0 and xy.max() == 1.0
    assert np.all(stats.skew(xy, axis=0) > 1)


def test_exponential_alias():
    assert Workload("exponential").distribution == "exp"


def test_points_unique():
    pts = gen_points(Workload("exp", n=20_000, seed=3))
    assert len({p for _, p in pts}) == 20_000


def test_queries_disjoint_and_deterministic():
    w = Workload("uniform", n=50, seed=2, query_count=200)
    pts = gen_points(w)
    qs = gen_queries(w, pts)
    assert len(qs) == 200 and not set(qs) & {p for _, p in pts}
    assert qs == gen_queries(w, pts)


def test_file_workload(tmp_path):
    f = tmp_path / "pts.csv"
    f.write_text("x,y\n0,0\n3,0\n0,4\n")
    w = Workload("file", input=str(f), query_count=20)
    pts = gen_points(w)
    assert pts == [(0, Point(0.0, 0.0)), (1, Point(3.0, 0.0)), (2, Point(0.0, 4.0))]
    qs = gen_queries(w, pts)
    assert all(0 <= q.x <= 3 and 0 <= q.y <= 4 for q in qs)


def test_workload_validation():
    with pytest.raises(ValueError):
        Workload("gaussian")
    with pytest.raises(ValueError):
        Workload("file")
    with pytest.raises(ValueError):
        Workload(dim=3)
    with pytest.raises(ValueError):
        gen_points(Workload(n=0))


def test_smoke_grid_is_fast_and_complete():
    t0 = time.perf_counter()
    report = run_grid(["mvd", "kdtree", "scan"], [10], [], Workload(query_count=1000), trials=1)
    assert time.perf_counter() - t0 < 1.0
    assert [r.index for r in report.rows] == ["mvd", "kdtree", "scan"]
    assert all(r.n == 10 and r.k_query == 1 and len(r.samples_ns) == 1000 for r in report.rows)


def test_nn_report_shape():
    report = run_grid(["mvd", "scan"], [10, 100, 1000], [], Workload(query_count=50), trials=1)
    md = report.to_markdown()
    assert "| Size | mvd | scan |" in md
    for n in (10, 100, 1000):
        assert f"| {n} |" in md
    csv_text = report.to_csv()
    lines = [line for line in csv_text.splitlines() if not line.startswith("#")]
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 7
    assert "# trials=1" in csv_text


def test_knn_report_shape():
    report = run_grid(["mvd"], [1000], [2, 4, 8], Workload(query_count=30), trials=1)
    assert [r.k_query for r in report.rows] == [2, 4, 8]
    assert "| k | mvd |" in report.to_markdown()


def test_counts_reproducible():
    def counts():
        r = run_grid(["mvd", "kdtree"], [500], [4], Workload("exp", query_count=100), trials=2)
        return [(r.index, r.mean_dist_evals, r.mean_visited) for r in r.rows]

    assert counts() == counts()


def test_oracle_mismatch_aborts():
    class Broken:
        def nn(self, q):
            return 99, QueryStats()

    with pytest.raises(OracleMismatch) as err:
        run_cell("broken", Broken(), [Point(0.5, 0.5)], [3], None, 1, 10, 0.0)
    assert err.value.index == "broken" and err.value.expected == 3 and err.value.got == 99
    assert "0.5" in str(err.value)


def test_unknown_index():
    with pytest.raises(ValueError):
        run_grid(["rtree"], [10], [], Workload(), trials=1)


def test_empty_report_markdown():
    assert BenchReport().to_markdown() == ""
