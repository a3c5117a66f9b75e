import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import small_windows
from plsplit import generators as g
from plsplit.complex import LazyComplex, PeriodicSpec, PointLocus, build_complex, perm_inverse
from plsplit.errors import BoundViolated, Disconnected, InvalidGluing, NotCovered


def test_single_tet_counts():
    T = g.single_tet()
    assert len(T.boundary_faces()) == 4
    assert len(T.vertex_classes) == 4
    assert len(T.edge_classes) == 6
    assert T.geometry_audit()["max_vertex_degree"] == 1


def test_two_tet_s3_gluings_are_involutive():
    for T in (g.double_s3(), g.one_vertex_s3()):
        assert T.num_tets == 2 and T.is_closed()
        for t in T.tets:
            for f in range(4):
                u, perm = T.glued(t, f)
                back_t, back_perm = T.glued(u, perm[f])
                assert back_t == t and back_perm == perm_inverse(perm)
    assert len(g.one_vertex_s3().vertex_classes) == 1


def test_double_s3_vertex_degree():
    # every corner class of the identity double holds one corner of each tet
    T = g.double_s3()
    assert all(len(T.tets_of_vertex(v)) == 2 for v in range(len(T.vertex_classes)))


def test_non_involutive_gluing_rejected():
    with pytest.raises(InvalidGluing):
        build_complex({0: [(1, (0, 1, 2, 3)), None, None, None], 1: [(0, (1, 0, 2, 3)), None, None, None]})
    with pytest.raises(InvalidGluing):
        build_complex({0: [(0, (0, 1, 2, 3)), None, None, None]})


@pytest.mark.parametrize("T", small_windows(), ids=lambda T: T.name)
def test_skeleta_and_homology_match_oracle(T):
    table = T.gluing_table()
    assert T.euler_characteristic() == oracles.euler_characteristic(table)
    assert list(T.betti_numbers()) == oracles.betti_numbers(table)


def test_lazy_seed_and_monotone_expansion():
    L = LazyComplex(g.torus_line_spec())
    assert L.blocks == {0}
    c = L.tet_id(0, 0)
    windows = [set(L.expand_window(c, r).tets) for r in range(5)]
    assert all(a <= b for a, b in zip(windows, windows[1:]))
    assert set(L.expand_window(c, 2).tets) == windows[2]


def test_lazy_growth_is_linear():
    L = LazyComplex(g.torus_line_spec())
    sizes = [L.expand_window(L.tet_id(0, 0), r).num_tets for r in range(2, 8)]
    diffs = {b - a for a, b in zip(sizes, sizes[1:])}
    assert len(diffs) == 1 and diffs.pop() > 0


def test_radius_zero_is_the_closed_star():
    L = LazyComplex(g.torus_line_spec())
    c = L.tet_id(0, 0)
    W = L.expand_window(c, 0)
    big = L.window_blocks(range(-3, 4))
    dist = big.tet_distances([c])
    assert {t for t, d in dist.items() if d <= 1} <= set(W.tets)


def test_subset_size_examples():
    T = g.tet_chain(4)
    assert T.subset_size([("t", 0)]) == 1
    t, a, b = T.edge_classes[T.edge_class(1, 0, 3)[0]][0]
    assert T.subset_size([("e", T.edge_class(t, a, b)[0])]) == 1
    assert T.subset_size([("t", 0), ("t", 3)]) == 2
    with pytest.raises(NotCovered):
        T.subset_size([("t", 99)])


def _brute_cover(T, stars):
    for k in range(1, len(T.tets) + 1):
        for combo in itertools.combinations(T.tets, k):
            if all(set(combo) & s for s in stars):
                return k


def test_subset_size_matches_exhaustive_cover():
    T = g.tet_chain(5)
    cells = [("t", t) for t in T.tets] + [("v", v) for v in range(len(T.vertex_classes))]
    for a, b in itertools.combinations(cells, 2):
        assert T.subset_size([a, b]) == _brute_cover(T, [T.star(a), T.star(b)])


def test_quasi_distance_examples():
    T = g.tet_chain(6)
    x = PointLocus("t", 0)
    assert T.quasi_distance(x, x) == 0
    # interior points of face-adjacent tets need a path of size 2
    assert T.quasi_distance(("t", 0), ("t", 1)) == 1
    shared = ("f", T.face_class(0, 3))
    assert T.quasi_distance(("t", 0), shared) == T.quasi_distance(shared, ("t", 1)) == 0
    # every tet of the chain contains the vertex shared along it
    assert {T.quasi_distance(("t", 0), ("t", k)) for k in range(1, 6)} == {1}


def test_quasi_distance_grows_linearly_in_blocks():
    L = LazyComplex(g.torus_line_spec())
    W = L.window_blocks(range(-1, 10))
    dist = W.tet_distances([L.tet_id(0, 0)])
    ds = [W.quasi_distance(("t", L.tet_id(0, 0)), ("t", L.tet_id(k, 0))) for k in range(8)]
    assert ds == [dist[L.tet_id(k, 0)] for k in range(8)]
    assert ds == list(range(8))


def test_quasi_distance_disconnected():
    T = build_complex({0: [None] * 4, 1: [None] * 4})
    with pytest.raises(Disconnected):
        T.quasi_distance(("t", 0), ("t", 1))


@pytest.mark.parametrize("T", [g.tet_chain(5), g.double_s3(), g.three_tet_closed()], ids=lambda T: T.name)
def test_quasimetric_axioms_on_all_cell_triples(T):
    cells = [("t", t) for t in T.tets]
    cells += [("v", v) for v in range(len(T.vertex_classes))]
    cells += [("e", e) for e in range(len(T.edge_classes))]
    cells += [("f", f) for f in range(len(T.face_classes))]
    d = {(x, y): T.quasi_distance(x, y) for x in cells for y in cells}
    for x in cells:
        assert d[(x, x)] == 0
    for x, y in itertools.product(cells, repeat=2):
        assert d[(x, y)] == d[(y, x)]
    for x, y, z in itertools.product(cells, repeat=3):
        assert d[(x, z)] <= d[(x, y)] + d[(y, z)] + 1


def test_periodic_audit_within_bound():
    L = LazyComplex(g.torus_line_spec())
    rep = L.geometry_audit(radius=3)
    assert rep["max_vertex_degree"] <= rep["declared_bound"]
    W = L.expand_window(L.tet_id(0, 0), 3)
    assert W.geometry_audit()["max_vertex_degree"] <= L.spec.bound


def test_declared_bound_violation():
    with pytest.raises(BoundViolated):
        build_complex(g.double_s3().gluing_table(), declared_bound=1).geometry_audit()
    spec = g.torus_line_spec()
    with pytest.raises(BoundViolated):
        LazyComplex(PeriodicSpec(spec.block, 2, spec.reach, "tight")).geometry_audit(radius=1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3))
def test_subset_size_monotone(i, j):
    T = g.tet_chain(4)
    small = [("t", i)]
    big = [("t", i), ("t", j)]
    assert T.subset_size(small) <= T.subset_size(big)
