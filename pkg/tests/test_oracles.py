"""Cross-checks between the test oracles themselves."""

from hypothesis import given
from hypothesis import strategies as st

from oracles import ExactScan, scan_knn

coords = st.lists(
    st.tuples(st.integers(-4, 4), st.integers(-4, 4)).map(lambda t: (t[0] / 4, t[1] / 4)),
    min_size=1, max_size=40, unique=True,
)


@given(coords, st.tuples(st.integers(-8, 8), st.integers(-8, 8)), st.integers(1, 50))
def test_exact_scan_agrees_with_plain_sort(cs, qi, k):
    pts = [(7 * i + 3, p) for i, p in enumerate(cs)]
    q = (qi[0] / 8, qi[1] / 8)
    scan = ExactScan(pts)
    assert scan.knn(q, k) == scan_knn(pts, q, k)
    ranks = scan.ranks(q)
    full = scan_knn(pts, q, len(pts))
    assert [full.index(i) for i, _ in pts] == ranks.tolist()


def test_exact_scan_separates_float_ties():
    pts = [(0, (0.0, 0.0)), (1, (0.0, 1e-53))]
    assert ExactScan(pts).knn((0.0, 1.0), 2) == [1, 0]
