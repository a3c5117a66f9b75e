import json
from dataclasses import replace
from fractions import Fraction

import pytest

import oracles
from plsplit import generators as g
from plsplit.errors import OneSided, OverlapUnresolved, SeedDegenerate
from plsplit.interplay import disjointify_intervals
from plsplit.jsj import (
    COUNTEREXAMPLE,
    INCONCLUSIVE,
    VERIFIED,
    GraphCertificate,
    HypothesisConstants,
    Member,
    SplittingCollection,
    assemble_limit_region,
    audit_graph_submanifold,
    boundary_components,
    census_from_surfaces,
    certificate_json,
    check_hypotheses,
    cut_along,
    grow_taut_sequence,
    realizably_disjoint,
    replay,
    shortest_special_walk,
    torus_census,
    validate_splitting,
)
from plsplit.normal import NormalCoordinates, enumerate_surfaces, vertex_linking
from plsplit.surface import analyze_surface, realize_surface


# ------------------------------------------------------------------ cutting
@pytest.mark.parametrize("T", [g.double_s3(), g.one_vertex_s3(), g.three_tet_closed(), g.tet_chain(3)], ids=lambda T: T.name)
def test_cut_matches_oracle(T):
    checked = 0
    for c in enumerate_surfaces(T, weight_bound=8, closed=T.is_closed()):
        if c.is_empty():
            continue
        S = realize_surface(T, c)
        try:
            cut = cut_along(T, S)
        except OneSided:
            continue
        checked += 1
        table = cut.window.gluing_table()
        chi_s = oracles.surface_euler(T.gluing_table(), c.entries)
        assert cut.chi_identity()
        assert oracles.euler_characteristic(table) == oracles.euler_characteristic(T.gluing_table()) + chi_s
        assert cut.h1_ranks == [oracles.betti_numbers(w.gluing_table())[1] for w in cut.components]
        assert sum(w.num_tets for w in cut.components) == cut.window.num_tets
    assert checked


def test_cut_along_empty_is_identity():
    T = g.three_tet_closed()
    cut = cut_along(T, realize_surface(T, NormalCoordinates.empty()))
    assert cut.identity and cut.window is T
    assert len(cut.components) == 1 and cut.chi_identity()


def test_cut_along_vertex_link_splits_off_a_ball():
    T = g.double_s3()
    cut = cut_along(T, realize_surface(T, vertex_linking(T, 0)))
    assert len(cut.components) == 2
    assert cut.h1_ranks == [0, 0]
    assert sorted(len(boundary_components(w)) for w in cut.components) == [1, 1]
    assert cut.boundary_euler == 4


def test_cut_product_along_vertical_torus():
    P = g.product(g.grid_torus(3, "A"), g.circle_fiber(1))
    curve = g.straight_curve(P.base, 3, (1, 0), (0.137, 1.52))
    coords, params = g.vertical_surface(P, curve)
    cut = cut_along(P.window, realize_surface(P.window, coords, params))
    # T^3 cut along a non-separating torus is T^2 x I
    assert len(cut.components) == 1 and cut.h1_ranks == [2]
    assert cut.chi_identity() and cut.boundary_euler == 0
    assert len(boundary_components(cut.window)) == 2


# ------------------------------------------------------------------ census
def test_product_census_labels(product_census):
    d = product_census.as_dict()
    assert [m["name"] for m in d["members"]] == ["h", "v", "s"]
    assert {m["label"] for m in d["members"]} == {"Noncanonical"}
    assert [m["weight"] for m in d["members"]] == [16, 16, 32]
    assert d["exhaustive"] is False


def test_realizably_disjoint(product2):
    P, surfs = product2
    h, v = surfs["h"][2], surfs["v"][2]
    assert not realizably_disjoint(P.window, h, v)
    assert realizably_disjoint(P.window, h, h)
    other, _ = g.vertical_surface(P, g.straight_curve(P.base, 4, (1, 0), (0.61, 2.47)))
    assert realizably_disjoint(P.window, h, other)
    # components are compared one by one, so a doubled copy does not match
    assert not realizably_disjoint(P.window, h, h.scale(2))


def test_torus_census_on_small_window_is_empty():
    census = torus_census(g.double_s3(), 8)
    assert census.members == [] and census.exhaustive


# -------------------------------------------------------------- hypotheses
def test_hypothesis_a(product_census, product2):
    P, _ = product2
    v = check_hypotheses(P, HypothesisConstants(C1=16), "A", product_census)
    assert v.result == VERIFIED and not replay(v, product_census)


def test_hypothesis_b_and_replay(product_census, product2):
    P, _ = product2
    bad = check_hypotheses(P, HypothesisConstants(C2=0), "b", product_census)
    assert bad.result == COUNTEREXAMPLE
    assert bad.witness["torus"] == "h"
    assert replay(bad, product_census)
    good = check_hypotheses(P, HypothesisConstants(C2=3), "B", product_census)
    assert good.result == VERIFIED


def test_special_walks_have_length_three(product_census):
    m = product_census.member("h")
    for d in range(0, len(m.surface.disks), 5):
        assert shortest_special_walk(m.surface, d, m.xi, 8) == 3
        assert shortest_special_walk(m.surface, d, m.xi, 2) is None


def test_hypotheses_c_and_d(product_census, product2):
    P, _ = product2
    c = check_hypotheses(P, HypothesisConstants(C3=32, C4=0), "C", product_census)
    assert c.result == VERIFIED
    low = check_hypotheses(P, HypothesisConstants(C3=0, C4=0), "C", product_census)
    # the census is not exhaustive, so a miss is never a counterexample
    assert low.result in (VERIFIED, INCONCLUSIVE)
    assert check_hypotheses(P, HypothesisConstants(), "D", product_census).result == VERIFIED
    with pytest.raises(ValueError):
        check_hypotheses(P, HypothesisConstants(), "E", product_census)
    with pytest.raises(ValueError):
        HypothesisConstants(C1=-1)


# ---------------------------------------------------------------- splittings
def test_empty_collection_on_closed_window():
    T = g.double_s3()
    rep = validate_splitting(T, SplittingCollection(), {"all": "Atoroidal"}, piece_of={t: "all" for t in T.tets})
    assert rep["condition_1"]["verdict"] == VERIFIED
    assert rep["disjoint"]["ok"]
    assert rep["condition_2"]["verdict"] == INCONCLUSIVE


def test_parallel_copies_flagged(product2, product_census):
    P, surfs = product2
    h = surfs["h"][2]
    C = SplittingCollection([Member("h", h), Member("h'", h)])
    rep = validate_splitting(P.window, C, {"P": "Seifert"}, piece_of={t: "P" for t in P.window.tets}, census=product_census)
    assert rep["condition_3"]["verdict"] == COUNTEREXAMPLE
    assert rep["condition_3"]["duplicate_classes"] == [["h", "h'"]]
    assert rep["disjoint"]["ok"]


def test_intersecting_members_violate_disjointness(product2):
    P, surfs = product2
    C = SplittingCollection([Member("h", surfs["h"][2]), Member("v", surfs["v"][2])])
    rep = validate_splitting(P.window, C, {"P": "Seifert"}, piece_of={t: "P" for t in P.window.tets})
    assert rep["disjoint"]["violations"] == [["h", "v"]]


@pytest.fixture(scope="module")
def motivating_report(motivating):
    M = motivating
    blocks = range(-1, 2)
    W = M.lazy.window_blocks(blocks)
    small = M.lazy.expand_window(M.lazy.tet_id(0, 0), 1)
    seed = torus_census(small, 10)
    census = census_from_surfaces(W, {m.name: m.coords for m in seed.members})
    C = SplittingCollection([
        Member("A0", M.annulus(0, blocks), "Annulus", "Annulus"),
        Member("A1", M.annulus(1, blocks), "Annulus", "Annulus"),
    ])
    return validate_splitting(W, C, M.labels, piece_of={t: M.region_of(t) for t in W.tets}, census=census)


def test_motivating_conditions(motivating_report):
    rep = motivating_report
    assert all(m["ok"] for m in rep["members"])
    assert [p["piece"] for p in rep["condition_1"]["pieces"]] == [["X0"], ["X1"], ["Y"]]
    assert [p["label"] for p in rep["condition_1"]["pieces"]] == ["Atoroidal", "Atoroidal", "Seifert"]
    for k in (1, 2, 3, 4):
        assert rep[f"condition_{k}"]["verdict"] == VERIFIED


# ------------------------------------------------------- graph submanifolds
def test_audit_flags_noncanonical_members(product2, product_census):
    P, surfs = product2
    sigma = frozenset(P.window.tets)
    cert = GraphCertificate(sigma, [Member("h", surfs["h"][2])], {"P": "Seifert"}, C1=16)
    rep = audit_graph_submanifold(cert, product_census)
    assert {"check": "G canonical", "torus": "h"} in rep["violations"]
    assert not rep["ok"]
    clean = audit_graph_submanifold(GraphCertificate(sigma, [], {"P": "Seifert"}), product_census)
    assert clean["ok"]
    bare = audit_graph_submanifold(GraphCertificate(frozenset({0})), product_census)
    assert bare["conclusions"] and not bare["ok"]


def test_grow_taut_sequence(product2, product_census):
    P, surfs = product2
    seeds = [(surfs["h"][0], surfs["v"][0]), (surfs["h"][0], surfs["s"][0])]
    seq = grow_taut_sequence(P.window, seeds, schedule=(0, 1), census=product_census)
    assert seq.nested()
    sizes = [len(s.sigma) for s in seq.stages]
    assert sizes == sorted(sizes) and sizes[0] == 0 and sizes[-1] > sizes[1]
    assert len(seq.audits) == 2
    with pytest.raises(SeedDegenerate):
        grow_taut_sequence(P.window, [(surfs["h"][0], surfs["h"][0])])


def test_assemble_limit_region(product2):
    P, surfs = product2
    seq = grow_taut_sequence(P.window, [(surfs["h"][0], surfs["v"][0])])
    classes = {0: [Fraction(1, 5), Fraction(3, 5)], 1: [Fraction(2, 5), Fraction(4, 5)]}
    hulls = disjointify_intervals(7, classes)
    region = assemble_limit_region(seq, [(hulls, classes)])
    assert region.region == seq.stages[-1].sigma and region.intervals_ok
    half = (Fraction(1, 2), Fraction(1, 2))
    bad = [replace(h, shrunk=half) for h in hulls]
    with pytest.raises(OverlapUnresolved):
        assemble_limit_region(seq, [(bad, classes)])


def test_certificate_json_is_versioned_and_stable(product_census):
    text = certificate_json(product_census)
    data = json.loads(text)
    assert data["schema"] == 1
    assert data["certificate"]["members"][0]["name"] == "h"
    assert certificate_json(product_census) == text


def test_surface_helper_consistency(product2):
    P, surfs = product2
    for key, (S, _, coords, _) in surfs.items():
        assert analyze_surface(S).kinds() == ["Torus"], key
