import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from plsplit import generators as g
from plsplit.complex import LazyComplex
from plsplit.errors import NotNormal, SameSide
from plsplit.hypmetric import (
    SIDE_01,
    SIDE_0I,
    SIDE_1I,
    ArcSystem,
    EdgePosition,
    JRMetricData,
    Ordering,
    PLArea,
    Status,
    arc_length,
    compare_pl_area,
    isometry_signature,
    minimize_arc_system,
    minimize_length,
    model_arc_length,
    model_point,
    pl_area,
    surface_arc_system,
)
from plsplit.normal import NormalCoordinates, vertex_linking
from plsplit.surface import realize_surface

SIDES = (SIDE_0I, SIDE_1I, SIDE_01)
finite = st.floats(-4.0, 4.0, allow_nan=False)


def test_midpoints_at_infinity():
    assert model_arc_length(SIDE_0I, 0.0, SIDE_1I, 0.0) == pytest.approx(math.acosh(1.5), abs=1e-12)
    assert math.acosh(1.5) == pytest.approx(0.962424, abs=1e-6)


@pytest.mark.parametrize("h", [0.5, 1.0, 3.0, 40.0])
def test_equal_heights(h):
    s = math.log(h)
    assert model_arc_length(SIDE_0I, s, SIDE_1I, s) == pytest.approx(math.acosh(1 + 1 / (2 * h * h)), rel=1e-12)


def test_same_side_rejected():
    with pytest.raises(SameSide):
        model_arc_length(SIDE_01, 0.0, SIDE_01, 1.0)


def test_arc_length_on_a_window():
    T = g.single_tet()
    metric = JRMetricData(T)
    fc = T.face_class(0, 3)
    e_lo_hi = T.edge_class(0, 0, 2)[0]
    e_mid_hi = T.edge_class(0, 1, 2)[0]
    d = arc_length(metric, fc, EdgePosition(e_lo_hi, 0.0), EdgePosition(e_mid_hi, 0.0))
    assert d == pytest.approx(math.acosh(1.5), abs=1e-12)
    with pytest.raises(SameSide):
        arc_length(metric, fc, EdgePosition(e_lo_hi, 0.0), EdgePosition(e_lo_hi, 1.0))


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(list(itertools.permutations(SIDES, 2))), finite, finite)
def test_model_length_matches_half_plane_formula(sides, s, t):
    a, b = sides
    z, w = model_point(a, s), model_point(b, t)
    assert model_arc_length(a, s, b, t) == pytest.approx(oracles.uhp_distance(z, w), rel=1e-9, abs=1e-9)
    assert model_arc_length(a, s, b, t) == model_arc_length(b, t, a, s)
    assert model_arc_length(a, s, b, t) > 0


def _mobius_symmetries():
    rot = lambda z: 1 / (1 - z) if z != 1 else complex("inf")  # noqa: E731
    ref = lambda z: 1 - z.conjugate()  # noqa: E731
    ident = lambda z: z  # noqa: E731
    maps = [ident, rot, lambda z: rot(rot(z))]
    return maps + [lambda z, m=m: ref(m(z)) for m in maps]


def _locate(z):
    for side in SIDES:
        if side == SIDE_0I and abs(z.real) < 1e-9:
            return side, math.log(z.imag)
        if side == SIDE_1I and abs(z.real - 1) < 1e-9:
            return side, math.log(z.imag)
        if side == SIDE_01 and abs(abs(z - 0.5) - 0.5) < 1e-9:
            return side, math.atanh(2 * z.real - 1)
    raise AssertionError(z)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(list(itertools.permutations(SIDES, 2))), finite, finite)
def test_invariant_under_triangle_symmetries(sides, s, t):
    a, b = sides
    base = model_arc_length(a, s, b, t)
    for phi in _mobius_symmetries():
        a2, s2 = _locate(phi(model_point(a, s)))
        b2, t2 = _locate(phi(model_point(b, t)))
        assert model_arc_length(a2, s2, b2, t2) == pytest.approx(base, rel=1e-8, abs=1e-10)


def test_compare_pl_area():
    assert compare_pl_area(PLArea(3, 100.0), PLArea(4, 0.1)) is Ordering.LESS
    assert compare_pl_area(PLArea(3, 1.0), PLArea(3, 2.0)) is Ordering.LESS
    assert compare_pl_area(PLArea(3, 1.0), PLArea(3, 1.0 + 1e-12)) is Ordering.EQUAL
    assert compare_pl_area(PLArea(5, 1.0), PLArea(3, 1.0)) is Ordering.GREATER
    with pytest.raises(ValueError):
        PLArea(-1, 0.0)


def test_pl_area_examples():
    T = g.single_tet()
    metric = JRMetricData(T)
    assert pl_area(metric, realize_surface(T, NormalCoordinates.empty())) == PLArea(0, 0.0)
    S = realize_surface(T, NormalCoordinates.from_dict({0: (1, 0, 0, 0, 0, 0, 0)}))
    area = pl_area(metric, S)
    assert area.weight == 3
    # three arcs, one per face at vertex 0, each joining two params 0 points
    total = 0.0
    for fc_t, fc_f in ((0, 1), (0, 2), (0, 3)):
        fc = T.face_class(fc_t, fc_f)
        a, b = [w for w in range(4) if w not in (0, fc_f)]
        p = EdgePosition(T.edge_class(0, 0, a)[0], 0.0)
        q = EdgePosition(T.edge_class(0, 0, b)[0], 0.0)
        total += arc_length(metric, fc, p, q)
    assert area.length == pytest.approx(total, abs=1e-12)


def test_parallel_copies_double_area():
    T = g.double_s3()
    metric = JRMetricData(T)
    c = vertex_linking(T, 0)
    S = realize_surface(T, c, {ec: (0.3 * ec - 0.5,) for ec in range(len(T.edge_classes))})
    eps = 1e-10
    S2 = realize_surface(T, c.scale(2), {ec: (p[0] - eps, p[0] + eps) for ec, p in S.params.items()})
    one, two = pl_area(metric, S), pl_area(metric, S2)
    assert two.weight == 2 * one.weight
    assert two.length == pytest.approx(2 * one.length, abs=1e-8)


# --------------------------------------------------------- minimization
def _var(i, flip=1, off=0.0):
    return ("var", i, flip, off)


def _fix(v):
    return ("fix", v)


# single triangle: one or two free crossings, others fixed
CONFIGS = [
    ArcSystem([(SIDE_0I, _fix(0.0), SIDE_1I, _var(0))], 1),
    ArcSystem([(SIDE_0I, _fix(1.3), SIDE_01, _var(0))], 1),
    ArcSystem([(SIDE_1I, _var(0), SIDE_01, _fix(-0.7)), (SIDE_1I, _var(0), SIDE_0I, _fix(2.0))], 1),
    ArcSystem([(SIDE_01, _var(0), SIDE_0I, _fix(0.4)), (SIDE_01, _var(0), SIDE_1I, _fix(-1.1))], 1),
    ArcSystem([(SIDE_0I, _fix(0.5), SIDE_1I, _var(0)), (SIDE_1I, _var(0), SIDE_01, _var(1)), (SIDE_01, _var(1), SIDE_0I, _fix(-0.5))], 2),
    # two triangles glued along the crossing edges, with flips and offsets
    ArcSystem([(SIDE_0I, _fix(0.2), SIDE_1I, _var(0)), (SIDE_01, _var(0, -1, 0.3), SIDE_0I, _fix(1.0))], 1),
    ArcSystem([(SIDE_0I, _fix(0.0), SIDE_01, _var(0)), (SIDE_1I, _var(0, -1), SIDE_01, _fix(0.8))], 1),
    ArcSystem([(SIDE_0I, _fix(-0.3), SIDE_1I, _var(0)), (SIDE_0I, _var(0, 1, 0.5), SIDE_01, _var(1)), (SIDE_01, _var(1, -1), SIDE_1I, _fix(0.6))], 2),
    ArcSystem([(SIDE_01, _fix(0.9), SIDE_0I, _var(0)), (SIDE_1I, _var(0, -1, -0.4), SIDE_01, _var(1)), (SIDE_0I, _var(1), SIDE_1I, _fix(0.1))], 2),
    ArcSystem([(SIDE_0I, _var(0), SIDE_1I, _var(1)), (SIDE_01, _var(0, -1), SIDE_0I, _fix(0.0)), (SIDE_01, _var(1, -1), SIDE_1I, _fix(0.0))], 2),
]


@pytest.mark.parametrize("k", range(len(CONFIGS)))
def test_minimum_matches_grid_search(k):
    system = CONFIGS[k]
    res = minimize_arc_system(system, np.zeros(system.nvars))
    assert res.status is Status.CONVERGED
    best, _ = oracles.grid_min(system.length, -6.0, 6.0, 121 if system.nvars == 2 else 2001, system.nvars)
    assert abs(res.length - best) < 1e-6
    assert all(b <= a + 1e-15 for a, b in zip(res.history, res.history[1:]))


def test_cusp_drift():
    system = ArcSystem([(SIDE_0I, _var(0), SIDE_1I, _var(0, 1, 0.0))], 1)
    res = minimize_arc_system(system, np.zeros(1))
    assert res.status is Status.CUSP_DRIFT
    assert res.history[-1] < res.history[0]
    assert all(b <= a for a, b in zip(res.history, res.history[1:]))


@pytest.fixture(scope="module")
def torus_system(product2):
    P, surfs = product2
    metric = JRMetricData(P.window)
    S = surfs["h"][0]
    return metric, S, surface_arc_system(metric, S)


def test_convexity_midpoint(torus_system):
    _, _, (system, _, x0) = torus_system
    rng = np.random.default_rng(20240611)
    for _ in range(1000):
        a = x0 + rng.normal(0, 1.5, size=len(x0))
        b = x0 + rng.normal(0, 1.5, size=len(x0))
        mid = system.length((a + b) / 2)
        assert mid <= (system.length(a) + system.length(b)) / 2 + 1e-9


def test_minimize_torus_converges_and_is_unique(torus_system):
    metric, S, (system, _, x0) = torus_system
    pos, length, status = minimize_length(metric, S)
    assert status is Status.CONVERGED
    assert length <= pl_area(metric, S).length
    rng = np.random.default_rng(7)
    other = minimize_arc_system(system, x0 + rng.normal(0, 0.5, size=len(x0)))
    ref = np.array([pos[ec][j] for ec in sorted(S.counts) for j in range(S.counts[ec])])
    assert np.max(np.abs(other.x - ref)) < 1e-6
    # restarting at the optimum changes nothing
    again = minimize_arc_system(system, ref)
    assert np.max(np.abs(again.x - ref)) < 1e-9 and again.length == pytest.approx(length, abs=1e-12)


def test_vertex_link_drifts():
    T = g.double_s3()
    metric = JRMetricData(T)
    _, length, status = minimize_length(metric, realize_surface(T, vertex_linking(T, 0)))
    assert status is Status.CUSP_DRIFT
    assert length < pl_area(metric, realize_surface(T, vertex_linking(T, 0))).length


def test_not_normal_rejected():
    T = g.one_vertex_s3()
    metric = JRMetricData(T)
    c = vertex_linking(T, 0)
    S = realize_surface(T, c)
    if all(len({x[0] for x in cr}) == len(cr) for cr in S.disk_crossings.values()):
        pytest.skip("every disk meets distinct edge classes here")
    with pytest.raises(NotNormal):
        surface_arc_system(metric, S)


def test_isometry_types_are_finite():
    L = LazyComplex(g.torus_line_spec())
    counts = []
    for r in (2, 4):
        W = L.expand_window(L.tet_id(0, 0), r)
        metric = JRMetricData(W)
        sigs = set()
        for n in (1, 2, 3):
            for combo in itertools.combinations(W.tets, n):
                inside = set(combo)
                # face-connected subsets only
                seen, todo = {combo[0]}, [combo[0]]
                while todo:
                    t = todo.pop()
                    for f in range(4):
                        gl = W.glued(t, f)
                        if gl and gl[0] in inside and gl[0] not in seen:
                            seen.add(gl[0])
                            todo.append(gl[0])
                if seen == inside:
                    sigs.add(isometry_signature(metric, combo))
        counts.append(len(sigs))
    assert counts[0] == counts[1]
