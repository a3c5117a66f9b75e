"""Acceptance criteria, one test each.

Every test is named ``test_criterion_NN_*``; conftest prints a PASS/FAIL
line per criterion at the end of the run.  Run alone with
``pytest tests/test_acceptance.py``.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np

import oracles
from conftest import PRODUCT_LINES, small_windows
from plsplit import generators as g
from plsplit.cellsurface import primitive_up_to_sign
from plsplit.complex import LazyComplex
from plsplit.errors import OneSided
from plsplit.hypmetric import SIDE_0I, SIDE_1I, JRMetricData, Status, minimize_arc_system, model_arc_length, surface_arc_system
from plsplit.interplay import (
    _Bases,
    check_disjoint,
    classify_limit_ends,
    disjointify_intervals,
    intersect_surfaces,
    limit_surface,
    seifert_neighborhood,
    special_class,
)
from plsplit.jsj import (
    COUNTEREXAMPLE,
    VERIFIED,
    HypothesisConstants,
    check_hypotheses,
    cut_along,
    replay,
    torus_census,
)
from plsplit.normal import enumerate_surfaces, vertex_linking, weight
from plsplit.surface import analyze_surface, connected_components, diam, realize_surface

# single- and two-triangle arc systems shared with the unit tests
from test_hypmetric import CONFIGS

PAIRS = [("h", "v"), ("h", "s"), ("v", "s")]


def test_criterion_01_enumeration_matches_brute_force():
    for T in small_windows():
        assert T.num_tets <= 3
        start = time.perf_counter()
        got = enumerate_surfaces(T, coord_bound=5)
        elapsed = time.perf_counter() - start
        assert elapsed < 10, f"{T.name}: {elapsed:.1f} s"
        assert {c.entries for c in got} == oracles.brute_force_solutions(T.gluing_table(), 5), T.name


def test_criterion_02_euler_characteristic_oracle():
    start = time.perf_counter()
    total = 0
    for T in small_windows():
        table = T.gluing_table()
        for c in enumerate_surfaces(T, weight_bound=20):
            rep = analyze_surface(realize_surface(T, c))
            assert rep.euler_characteristic == oracles.surface_euler(table, c.entries), (T.name, c)
            total += 1
    assert total > 1000
    assert time.perf_counter() - start < 60


def test_criterion_03_diameter_bound(product2, periodic_fx):
    start = time.perf_counter()
    checked = 0
    for T in small_windows():
        for c in enumerate_surfaces(T, weight_bound=20, closed=True):
            if c.is_empty():
                continue
            assert diam(realize_surface(T, c)) <= weight(T, c) ** 2
            checked += 1
    P, surfs = product2
    for S, *_ in surfs.values():
        assert diam(S) <= S.weight ** 2
        checked += 1
    W = periodic_fx.lazy.expand_window(0, 4)
    for c in periodic_fx.tori[:4]:
        sub = c.as_dict()
        if set(sub) <= set(W.tets):
            assert diam(realize_surface(W, c)) <= weight(W, c) ** 2
            checked += 1
    assert checked > 100
    assert time.perf_counter() - start < 60


def _connected_near(L, center, ball, radius):
    W = L.expand_window(center, radius)
    found = set()
    for c in enumerate_surfaces(W, weight_bound=12, closed=True):
        if c.is_empty() or not set(c.support) & ball:
            continue
        if len(connected_components(realize_surface(W, c))) == 1:
            found.add(c.entries)
    return found


def test_criterion_04_local_finiteness():
    start = time.perf_counter()
    L = LazyComplex(g.torus_line_spec())
    center = L.tet_id(0, 0)
    ball = set(L.expand_window(center, 2).tets)
    near, far = _connected_near(L, center, ball, 4), _connected_near(L, center, ball, 8)
    assert near and len(near) == len(far)
    assert near == far
    assert time.perf_counter() - start < 120


def test_criterion_05_length_minimization():
    for system in CONFIGS:
        res = minimize_arc_system(system, np.zeros(system.nvars))
        best, _ = oracles.grid_min(system.length, -6.0, 6.0, 121 if system.nvars == 2 else 2001, system.nvars)
        assert res.status is Status.CONVERGED
        assert abs(res.length - best) < 1e-6
    P = g.product(g.genus2_base(4), g.circle_fiber(1))
    d, o = PRODUCT_LINES["h"]
    coords, params = g.vertical_surface(P, g.straight_curve(P.base, 4, d, o))
    system, _, x0 = surface_arc_system(JRMetricData(P.window), realize_surface(P.window, coords, params))
    rng = np.random.default_rng(20240611)
    for _ in range(1000):
        a = x0 + rng.normal(0, 1.5, size=len(x0))
        b = x0 + rng.normal(0, 1.5, size=len(x0))
        assert system.length((a + b) / 2) <= (system.length(a) + system.length(b)) / 2 + 1e-9
    assert abs(model_arc_length(SIDE_0I, 0.0, SIDE_1I, 0.0) - math.acosh(1.5)) < 1e-9
    assert abs(model_arc_length(SIDE_0I, 0.0, SIDE_1I, 0.0) - 0.962424) < 1e-6


def _fiber(P, surfs, key):
    S, curve = surfs[key][0], surfs[key][1]
    tri, corner = curve.arcs[0]
    walk = g.fiber_walk(S, P, tri, corner)
    return primitive_up_to_sign(_Bases(S).classify(walk[0][1], walk))


def test_criterion_06_special_class_is_fiber(product2):
    P, surfs = product2
    for a, b in PAIRS:
        p = intersect_surfaces(surfs[a][0], surfs[b][0], names=(a, b))
        assert len(p.circles) == oracles.line_intersection_number(PRODUCT_LINES[a][0], PRODUCT_LINES[b][0])
        assert special_class(a, [p]).xi == _fiber(P, surfs, a)
        assert special_class(b, [p]).xi == _fiber(P, surfs, b)


def test_criterion_07_seifert_chi_identity(product2):
    _, surfs = product2
    for a, b in PAIRS:
        p = intersect_surfaces(surfs[a][0], surfs[b][0], names=(a, b))
        sd = seifert_neighborhood(surfs[a][0], surfs[b][0], p)
        assert sd.as_dict()["chi_identity"]
        assert sd.as_dict()["euler_characteristic"] == -len(p.circles)


def test_criterion_08_disjointify():
    rng = random.Random(1729)
    for _ in range(100):
        ncls = rng.randint(2, 6)
        pool = rng.sample(range(1, 400), ncls * 4)
        classes = {cid: [Fraction(pool.pop(), 401) for _ in range(rng.randint(1, 4))] for cid in range(ncls)}
        hulls = disjointify_intervals("e", classes)
        assert check_disjoint(hulls, classes)
        spans = sorted(h.shrunk for h in hulls)
        assert all(hi < lo for (_, hi), (lo, _) in zip(spans, spans[1:]))
        for h in hulls:
            imgs = [h.remap(x) for x in sorted(classes[h.class_id])]
            assert imgs == sorted(imgs)


def test_criterion_09_periodic_annulus_limit(periodic_fx):
    L = periodic_fx.lazy
    R = L.expand_window(0, 4)
    lim = limit_surface(periodic_fx.tori, region=R.tets, lazy=L, center=0, radii=(0, 1, 2, 3, 4))
    assert lim.support == "Noncompact"
    rep = classify_limit_ends(L, lim.coordinates(), center=0, core=1, outer=(2, 4))
    assert rep.kinds() == ["Annulus", "Annulus"]
    assert all(c.ends == 2 and c.planar for c in rep.components)


def test_criterion_10_replay_and_motivating(product2, product_census, motivating):
    P, _ = product2
    emitted = 0
    for which, consts in (("A", {"C1": 0}), ("A", {"C1": 16}), ("B", {"C2": 0}), ("B", {"C2": 2}),
                          ("B", {"C2": 3}), ("C", {"C3": 32, "C4": 0}), ("D", {})):
        v = check_hypotheses(P, HypothesisConstants(**consts), which, product_census)
        if v.result == COUNTEREXAMPLE:
            emitted += 1
            assert replay(v, product_census), (which, consts)
    assert emitted >= 2
    M = motivating
    census = torus_census(M.lazy.expand_window(M.lazy.tet_id(0, 0), 1), 10)
    C1 = max(m.weight for m in census.members)
    v = check_hypotheses(M.lazy, HypothesisConstants(C1=C1), "A", census)
    assert v.result == VERIFIED


def test_criterion_11_cut_accounting(product2):
    for T in small_windows():
        table = T.gluing_table()
        for c in enumerate_surfaces(T, weight_bound=8, closed=T.is_closed()):
            if c.is_empty():
                continue
            try:
                cut = cut_along(T, realize_surface(T, c))
            except OneSided:
                continue
            assert cut.chi_identity(), (T.name, c)
            assert T.num_tets <= 20
            assert cut.h1_ranks == [oracles.betti_numbers(w.gluing_table())[1] for w in cut.components]
            assert oracles.euler_characteristic(cut.window.gluing_table()) == (
                oracles.euler_characteristic(table) + oracles.surface_euler(table, c.entries)
            )
    P, surfs = product2
    for S, *_ in surfs.values():
        assert cut_along(P.window, S).chi_identity()
    T = g.double_s3()
    assert cut_along(T, realize_surface(T, vertex_linking(T, 1))).chi_identity()
