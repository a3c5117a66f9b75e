"""Cutting, splitting certificates, hypothesis checkers and growth loops.

Cutting keeps everything local to the original tetrahedra.  Inside a
tet the normal disks cut it into convex blocks whose faces are pieces of
the tet's faces and copies of the disks.  Each block is coned from its
centre over cones of its polygons from their centres, so a block bounded
by polygons with e edges in total becomes e new tetrahedra.  Pieces of
glued faces are matched through the original gluing permutation.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from ._intlin import UnionFind
from .complex import EDGE_SLOTS, TriangulationWindow, build_complex
from .errors import (
    BudgetExceeded,
    NotNormal,
    OverlapUnresolved,
    SeedDegenerate,
)
from .interplay import (
    check_disjoint,
    classify_limit_ends,
    intersect_surfaces,
    seifert_neighborhood,
    transverse_sides,
)
from .normal import NormalCoordinates, arc_count, quad_sides, slot_count, weight
from .surface import analyze_surface, connected_components, realize_surface

SCHEMA_VERSION = 1


# ------------------------------------------------------------------ cutting
def _norm_point(vec, a, b, idx, toward):
    if a < b:
        return ("x", a, b, idx, toward)
    return ("x", b, a, slot_count(vec, a, b) - 1 - idx, toward)


def _norm_seg(vec, a, b, i):
    if a < b:
        return ("s", a, b, i)
    return ("s", b, a, slot_count(vec, a, b) - i)


class _TetCut:
    """Points, edges, polygons and blocks of one tet cut by its disks."""

    def __init__(self, S, t, vec):
        self.t = t
        self.vec = vec
        self.ends = {}  # edge -> (point, point)
        self.polys = {}  # polygon -> list of edges
        for a, b in EDGE_SLOTS:
            n = slot_count(vec, a, b)
            for i in range(n + 1):
                lo = ("c", a) if i == 0 else ("x", a, b, i - 1, b)
                hi = ("c", b) if i == n else ("x", a, b, i, a)
                self.ends[("s", a, b, i)] = (lo, hi)
        for f in range(4):
            verts = [v for v in range(4) if v != f]
            mid = []
            for u in verts:
                n_u = arc_count(vec, f, u)
                others = [w for w in verts if w != u]
                for r in range(n_u):
                    near = [_norm_point(vec, u, w, r, u) for w in others]
                    far = [_norm_point(vec, u, w, r, w) for w in others]
                    self.ends[("a", f, u, r, "u")] = tuple(near)
                    self.ends[("a", f, u, r, "far")] = tuple(far)
                for i in range(n_u):
                    edges = [_norm_seg(vec, u, w, i) for w in others] + [("a", f, u, i, "u")]
                    if i:
                        edges.append(("a", f, u, i - 1, "far"))
                    self.polys[("p", f, u, i)] = edges
                for w in others:
                    if u < w:
                        mid.append(_norm_seg(vec, u, w, n_u))
                if n_u:
                    mid.append(("a", f, u, n_u - 1, "far"))
            self.polys[("p", f, "m")] = mid
        # disk sides
        for d in (d for d in S.disks if d.tet == t):
            if d.kind == "t":
                side_a = frozenset({d.type})
            else:
                side_a = frozenset(quad_sides(d.type)[0])
            side_b = frozenset(range(4)) - side_a
            for side in (side_a, side_b):
                self.polys[("d", d.id, min(side))] = []
            for f in range(4):
                verts = [v for v in range(4) if v != f]
                for u in verts:
                    w = next(x for x in verts if x != u)
                    for r in range(arc_count(vec, f, u)):
                        if S.disk_at(t, u, w, r) != d.id:
                            continue
                        near = side_a if u in side_a else side_b
                        far = side_b if near is side_a else side_a
                        self.polys[("d", d.id, min(near))].append(("a", f, u, r, "u"))
                        self.polys[("d", d.id, min(far))].append(("a", f, u, r, "far"))
        # blocks: polygons sharing an edge inside one tet lie in one block
        owners = {}
        for p, edges in self.polys.items():
            for e in edges:
                owners.setdefault(e, []).append(p)
        uf = UnionFind([repr(p) for p in self.polys])
        for e, ps in owners.items():
            if len(ps) != 2:
                raise NotNormal(f"tet {t}: cut edge {e} lies on {len(ps)} polygons")
            uf.union(repr(ps[0]), repr(ps[1]))
        self.owners = owners
        self.block = {p: uf.find(repr(p)) for p in self.polys}

    def new_tets(self):
        for p, edges in self.polys.items():
            for e in edges:
                yield (self.t, self.block[p], p, e)

    def vertices(self, key):
        _, b, p, e = key
        lo, hi = sorted(self.ends[e], key=repr)
        return [("B", self.t, b), ("P", p), lo, hi]


def _map_key(perm, vec2, key):
    kind = key[0]
    if kind == "c":
        return ("c", perm[key[1]])
    if kind == "x":
        _, a, b, idx, w = key
        return _norm_point(vec2, perm[a], perm[b], idx, perm[w])
    if kind == "s":
        _, a, b, i = key
        return _norm_seg(vec2, perm[a], perm[b], i)
    if kind == "a":
        _, f, u, r, side = key
        return ("a", perm[f], perm[u], r, side)
    if kind == "p":
        return ("p", perm[key[1]], key[2] if key[2] == "m" else perm[key[2]]) + key[3:]
    raise ValueError(key)


@dataclass
class CutResult:
    """Complement of a surface, retriangulated, with maps back to the input.

    ``origin[new tet] = (old tet, block)``; ``components`` are windows of
    the cut complex, one per connected piece.
    """

    window: TriangulationWindow
    components: list
    origin: dict
    surface_euler: int
    euler: int
    boundary_euler: int
    source_euler: int
    source_boundary_euler: int
    h1_ranks: list
    identity: bool = False

    def chi_identity(self) -> bool:
        """chi(cut) = chi(M) + chi(S) and chi(boundary of cut) = chi(boundary of M) + 2 chi(S)."""
        return (
            self.euler == self.source_euler + self.surface_euler
            and self.boundary_euler == self.source_boundary_euler + 2 * self.surface_euler
        )

    def as_dict(self):
        return {
            "components": len(self.components),
            "tets": self.window.num_tets,
            "h1_ranks": self.h1_ranks,
            "euler_characteristic": self.euler,
            "boundary_euler_characteristic": self.boundary_euler,
            "surface_euler_characteristic": self.surface_euler,
            "source_euler_characteristic": self.source_euler,
            "source_boundary_euler_characteristic": self.source_boundary_euler,
            "chi_identity": self.chi_identity(),
        }


def cut_along(T: TriangulationWindow, S) -> CutResult:
    """Split ``T`` along the realized surface ``S``.

    One-sided surfaces are refused with :class:`OneSided`.  The empty
    surface returns the window itself.
    """
    src_chi, src_bchi = T.euler_characteristic(), T.boundary_euler_characteristic()
    if not S.disks:
        comps = [T.subwindow(c, name=f"{T.name}/{i}") for i, c in enumerate(T.components())]
        return CutResult(T, comps, {t: (t, 0) for t in T.tets}, 0, src_chi, src_bchi, src_chi, src_bchi,
                         [w.betti_numbers()[1] for w in comps], identity=True)
    transverse_sides(S)  # raises OneSided
    d = S.coords.as_dict()
    zero = (0,) * 7
    cuts = {t: _TetCut(S, t, d.get(t, zero)) for t in T.tets}
    ids = {}
    for t in T.tets:
        for key in cuts[t].new_tets():
            ids[key] = len(ids)
    table = {i: [None] * 4 for i in ids.values()}
    for t in T.tets:
        C = cuts[t]
        for key in C.new_tets():
            _, b, p, e = key
            mine = C.vertices(key)
            me = ids[key]
            # across the polygon, through the original face
            if p[0] == "p":
                g = T.glued(t, p[1])
                if g is not None:
                    t2, perm = g
                    C2 = cuts[t2]
                    p2 = _map_key(perm, C2.vec, p)
                    e2 = _map_key(perm, C2.vec, e)
                    key2 = (t2, C2.block[p2], p2, e2)
                    theirs = C2.vertices(key2)
                    img = [0, 1] + [theirs.index(_map_key(perm, C2.vec, x)) for x in mine[2:]]
                    table[me][0] = (ids[key2], tuple(img))
            # across the cone on the edge, to the other polygon of the block
            p2 = next(q for q in C.owners[e] if q != p)
            key2 = (t, b, p2, e)
            theirs = C.vertices(key2)
            table[me][1] = (ids[key2], tuple([0, 1] + [theirs.index(x) for x in mine[2:]]))
            # across a cone on a vertex, to the neighbouring edge of the polygon
            for f, keep in ((2, mine[3]), (3, mine[2])):
                e2 = next(x for x in C.polys[p] if x != e and keep in C.ends[x])
                key2 = (t, b, p, e2)
                theirs = C.vertices(key2)
                other = next(x for x in theirs[2:] if x != keep)
                img = [0, 1, 0, 0]
                img[f] = theirs.index(other)
                img[5 - f] = theirs.index(keep)
                table[me][f] = (ids[key2], tuple(img))
    cut = build_complex(table, name=f"{T.name}|{S.name or 'S'}")
    back = {v: k for k, v in ids.items()}
    origin = {i: (back[i][0], back[i][1]) for i in cut.tets}
    comps = [cut.subwindow(c, name=f"{cut.name}/{i}") for i, c in enumerate(cut.components())]
    comps.sort(key=lambda w: min(w.tets))
    chi_s = sum(c.euler_characteristic for c in analyze_surface(S).components)
    return CutResult(
        cut, comps, origin, chi_s, cut.euler_characteristic(), cut.boundary_euler_characteristic(),
        src_chi, src_bchi, [w.betti_numbers()[1] for w in comps],
    )


# ------------------------------------------------------------------- census
@dataclass
class CensusTorus:
    """One torus of a census: its coordinates, realization and label."""

    name: str
    coords: NormalCoordinates
    weight: int
    surface: object
    label: str = "Canonical"
    xi: tuple | None = None
    conflict: list = field(default_factory=list)

    def support(self):
        return {t for t, _ in self.coords.entries}


@dataclass
class TorusCensus:
    """Tori on a window with their pairwise intersection patterns.

    A member is labeled ``Compressible`` when one side of it is a
    homology solid torus bounded by it alone (see
    :func:`homology_solid_torus_side`), ``Noncanonical`` when some other
    member meets it in an essential circle, ``Canonical`` otherwise.  ``exhaustive`` says
    whether every closed normal torus up to ``weight_bound`` is listed.
    """

    window: TriangulationWindow
    members: list
    weight_bound: int | None
    exhaustive: bool
    patterns: dict = field(default_factory=dict)

    def member(self, name) -> CensusTorus:
        for m in self.members:
            if m.name == name:
                return m
        raise KeyError(name)

    def classes(self):
        """Homotopy classes, read as equal coordinates: class key -> member names."""
        out = {}
        for m in self.members:
            out.setdefault(m.coords.entries, []).append(m.name)
        return {names[0]: names for names in out.values()}

    def as_dict(self):
        return {
            "window": self.window.name,
            "tets": self.window.num_tets,
            "weight_bound": self.weight_bound,
            "exhaustive": self.exhaustive,
            "members": [
                {"name": m.name, "weight": m.weight, "label": m.label, "xi": None if m.xi is None else list(m.xi)}
                for m in self.members
            ],
        }


def realizably_disjoint(T: TriangulationWindow, a: NormalCoordinates, b: NormalCoordinates) -> bool:
    """True when the realization of a + b falls apart into copies of a and b."""
    if not (a + b).embedded():
        return False
    parts = connected_components(realize_surface(T, a + b))
    want = sorted([a.entries, b.entries])
    return sorted(p.entries for p in parts) == want


def boundary_components(W: TriangulationWindow) -> list:
    """Boundary faces of a window grouped into connected surfaces."""
    faces = W.boundary_faces()
    uf = UnionFind(range(len(faces)))
    by_edge = {}
    for i, (t, f) in enumerate(faces):
        for a, b in itertools.combinations([v for v in range(4) if v != f], 2):
            by_edge.setdefault(W.edge_class(t, a, b)[0], []).append(i)
    for idx in by_edge.values():
        for j in idx[1:]:
            uf.union(idx[0], j)
    groups = {}
    for i, face in enumerate(faces):
        groups.setdefault(uf.find(i), []).append(face)
    return list(groups.values())


def homology_solid_torus_side(T: TriangulationWindow, S) -> bool:
    """Evident compressibility: a side of S whose only boundary is S and whose H_1 has rank 1.

    A torus bounding a solid torus compresses.  The homology test cannot
    tell a solid torus from a knot exterior, so this is a screen, not a
    decision.
    """
    cut = cut_along(T, S)
    for w in cut.components:
        if len(boundary_components(w)) == 1 and w.boundary_euler_characteristic() == 0 and w.betti_numbers()[1] <= 1:
            return True
    return False


def _label_census(census: TorusCensus, screen: bool = True):
    from .interplay import special_class
    from .errors import ConflictingWitnesses, NoEssentialIntersections

    if screen:
        for m in census.members:
            if homology_solid_torus_side(census.window, m.surface):
                m.label = "Compressible"
    ms = [m for m in census.members if m.label != "Compressible"]
    for i, A in enumerate(ms):
        for B in ms[i + 1 :]:
            if realizably_disjoint(census.window, A.coords, B.coords):
                continue
            p = intersect_surfaces(A.surface, B.surface, names=(A.name, B.name))
            census.patterns[(A.name, B.name)] = p
    for m in ms:
        involved = [p for (a, b), p in census.patterns.items() if m.name in (a, b)]
        try:
            m.xi = special_class(m.name, involved).xi
            m.label = "Noncanonical"
        except NoEssentialIntersections:
            m.label = "Canonical"
        except ConflictingWitnesses as exc:
            m.label = "Noncanonical"
            m.conflict = [list(c) for c in exc.classes]
    return census


def census_from_surfaces(T: TriangulationWindow, surfaces: dict, *, screen: bool = True) -> TorusCensus:
    """A census from given tori ``{name: coords}`` or ``{name: (coords, params)}``."""
    members = []
    for name, val in surfaces.items():
        coords, params = val if isinstance(val, tuple) else (val, None)
        S = realize_surface(T, coords, params, name=name)
        members.append(CensusTorus(name, coords, weight(T, coords), S))
    return _label_census(TorusCensus(T, members, None, False), screen)


def torus_census(T: TriangulationWindow, weight_bound: int, *, budget: int = 2_000_000, screen: bool = True) -> TorusCensus:
    """All closed connected normal tori of weight at most ``weight_bound``."""
    from .errors import WindowTooLarge
    from .normal import enumerate_surfaces

    try:
        sols = enumerate_surfaces(T, weight_bound=weight_bound, closed=True, budget=budget)
    except WindowTooLarge as exc:
        raise BudgetExceeded(str(exc)) from None
    members = []
    for c in sols:
        if c.is_empty():
            continue
        S = realize_surface(T, c)
        comps = analyze_surface(S).components
        if len(comps) == 1 and comps[0].kind == "Torus":
            name = f"T{len(members)}"
            S.name = name
            members.append(CensusTorus(name, c, S.weight, S))
    return _label_census(TorusCensus(T, members, weight_bound, True), screen)


# --------------------------------------------------------------- verdicts
@dataclass
class HypothesisConstants:
    C1: int = 0
    C2: int = 0
    C3: int = 0
    C4: int = 0
    C2_prime: int | None = None
    C2_second: int | None = None
    derivations: dict = field(default_factory=dict)

    def __post_init__(self):
        for k in ("C1", "C2", "C3", "C4"):
            if getattr(self, k) < 0:
                raise ValueError(f"{k} must be nonnegative")

    def as_dict(self):
        return {
            "C1": self.C1, "C2": self.C2, "C3": self.C3, "C4": self.C4,
            "C2_prime": self.C2_prime, "C2_second": self.C2_second, "derivations": self.derivations,
        }


VERIFIED, COUNTEREXAMPLE, INCONCLUSIVE = "VerifiedOnWindow", "Counterexample", "Inconclusive"


@dataclass
class HypothesisVerdict:
    hypothesis: str
    result: str
    scope: dict
    witness: dict | None = None
    reason: str = ""
    details: list = field(default_factory=list)

    def as_dict(self):
        return {
            "hypothesis": self.hypothesis,
            "result": self.result,
            "scope": self.scope,
            "witness": self.witness,
            "reason": self.reason,
            "details": self.details,
        }


def shortest_special_walk(S, disk: int, xi, bound: int, *, budget: int = 200_000):
    """Length of the shortest closed dual walk through ``disk`` in class +-xi.

    Walks cross one normal arc per step, so the length counts crossings
    with the 2-skeleton.  Returns None when nothing of length <= bound
    exists.  Breadth-first search on (disk, partial class) states.
    """
    from .interplay import _Bases

    bases = _Bases(S)
    basis = bases.basis(disk)
    if basis is None:
        raise ValueError("disk does not lie on a closed orientable component")
    targets = {tuple(xi), tuple(-x for x in xi)}
    cells = basis.surf
    start = (disk, (0,) * basis.rank)
    seen = {start}
    frontier = [start]
    visited = 0
    for length in range(1, bound + 1):
        nxt = []
        for d, cls in frontier:
            for e, _ in cells.faces[d]:
                for g, _, _ in cells.incidence[e]:
                    if g == d and any(h != d for h, _, _ in cells.incidence[e]):
                        continue
                    step = basis.classify([(e, d)])
                    new = tuple(a + b for a, b in zip(cls, step))
                    if g == disk and new in targets:
                        return length
                    state = (g, new)
                    if state not in seen:
                        seen.add(state)
                        nxt.append(state)
                        visited += 1
                        if visited > budget:
                            raise BudgetExceeded(f"special-curve search visited {visited} states")
        frontier = nxt
    return None


def _scope(census, consts, extra=None):
    out = {
        "window": census.window.name,
        "tets": census.window.num_tets,
        "census_weight_bound": census.weight_bound,
        "census_exhaustive": census.exhaustive,
        "constants": consts.as_dict(),
    }
    out.update(extra or {})
    return out


def _check_a(census, consts):
    bad = []
    for rep, names in sorted(census.classes().items()):
        m = census.member(rep)
        if m.label != "Canonical":
            continue
        if min(census.member(n).weight for n in names) > consts.C1:
            bad.append({"class": rep, "min_weight": m.weight, "C1": consts.C1})
    return bad


def _special_lengths(m, bound, budget):
    """Disk -> shortest special walk length (None if above ``bound``)."""
    return {d.id: shortest_special_walk(m.surface, d.id, m.xi, bound, budget=budget) for d in m.surface.disks}


def _check_b(census, consts, budget):
    bad, skipped = [], []
    for m in census.members:
        if m.label != "Noncanonical":
            continue
        if m.xi is None:
            skipped.append(m.name)
            continue
        for d, L in sorted(_special_lengths(m, consts.C2, budget).items()):
            if L is None:
                bad.append({"torus": m.name, "disk": d, "xi": list(m.xi), "C2": consts.C2})
    return bad, skipped


def _circle_distance(T, pattern, tet):
    dist = T.tet_distances([tet])
    best = None
    for c in pattern.circles:
        if not (c.essential_a and c.essential_b):
            continue
        for t, _, _ in c.segments:
            if t in dist and (best is None or dist[t] < best):
                best = dist[t]
    return best


def _partner_pattern(census, a, b):
    p = census.patterns.get((a, b))
    if p is not None:
        return p
    p = census.patterns.get((b, a))
    return None if p is None else p.swapped()


def _check_c(census, consts):
    bad, found = [], []
    T = census.window
    for m in census.members:
        if m.label != "Noncanonical":
            continue
        per_tet = {}
        for d in m.surface.disks:
            per_tet[d.tet] = per_tet.get(d.tet, 0) + 1
        for sigma in sorted((t for t, n in per_tet.items() if n > 1), key=repr):
            hit = None
            for other in census.members:
                if other.name == m.name or other.weight > consts.C3:
                    continue
                p = _partner_pattern(census, m.name, other.name)
                if p is None:
                    continue
                dist = _circle_distance(T, p, sigma)
                if dist is not None and dist <= consts.C4:
                    hit = {"torus": m.name, "tet": sigma, "partner": other.name, "distance": dist}
                    break
            if hit:
                found.append(hit)
            else:
                bad.append({"torus": m.name, "tet": sigma, "C3": consts.C3, "C4": consts.C4})
    return bad, found


def _check_d(census, consts):
    """Disjoint noncanonical pairs with single disks in a common tet.

    The annulus is found as a product region: the two tori must bound a
    piece of the window cut along both whose homology is that of T^2 x I,
    with the two disks of the tet in that piece.
    """
    found, open_ = [], []
    ms = [m for m in census.members if m.label == "Noncanonical"]
    T = census.window
    for i, A in enumerate(ms):
        for B in ms[i + 1 :]:
            if not realizably_disjoint(T, A.coords, B.coords):
                continue
            da, db = dict(A.coords.entries), dict(B.coords.entries)
            singles = [t for t in da if t in db and sum(da[t]) == 1 and sum(db[t]) == 1]
            if not singles:
                continue
            cut = cut_along(T, realize_surface(T, A.coords + B.coords))
            product_piece = None
            for w in cut.components:
                if w.betti_numbers()[1] == 2 and w.boundary_euler_characteristic() == 0 and len(w.boundary_faces()) and _touches_both(cut, w, da, db):
                    product_piece = w
                    break
            entry = {"pair": [A.name, B.name], "tets": singles}
            (found if product_piece is not None else open_).append(entry)
    return found, open_


def _touches_both(cut, w, da, db):
    olds = {cut.origin[t][0] for t in w.tets}
    return any(t in olds for t in da) and any(t in olds for t in db)


def check_hypotheses(M, consts: HypothesisConstants, which: str, census: TorusCensus, *, budget: int = 200_000) -> HypothesisVerdict:
    """Bounded check of one of the hypotheses A-D on a census window.

    ``M`` is recorded in the scope only; the search runs over
    ``census.window``.  Counterexamples are reported only when the search
    inside the stated constants is exhaustive on the window.
    """
    which = which.upper()
    scope = _scope(census, consts, {"complex": getattr(getattr(M, "spec", M), "name", str(M))})
    try:
        if which == "A":
            bad = _check_a(census, consts)
            if bad:
                return HypothesisVerdict("A", COUNTEREXAMPLE, scope, bad[0], "canonical class above C1", bad)
            return HypothesisVerdict("A", VERIFIED, scope, reason="every canonical census class has weight <= C1")
        if which == "B":
            bad, skipped = _check_b(census, consts, budget)
            if bad:
                return HypothesisVerdict("B", COUNTEREXAMPLE, scope, bad[0], "no special curve of length <= C2", bad)
            if skipped:
                return HypothesisVerdict("B", INCONCLUSIVE, scope, reason="special class undetermined", details=skipped)
            return HypothesisVerdict("B", VERIFIED, scope, reason="special curves found through every disk")
        if which == "C":
            bad, found = _check_c(census, consts)
            exhaustive = census.exhaustive and census.weight_bound is not None and census.weight_bound >= consts.C3
            if bad and exhaustive:
                return HypothesisVerdict("C", COUNTEREXAMPLE, scope, bad[0], "no nearby partner of weight <= C3", bad)
            if bad:
                return HypothesisVerdict("C", INCONCLUSIVE, scope, reason="census not exhaustive up to C3", details=bad)
            return HypothesisVerdict("C", VERIFIED, scope, reason="partners found", details=found)
        if which == "D":
            found, open_ = _check_d(census, consts)
            if open_:
                return HypothesisVerdict("D", INCONCLUSIVE, scope, reason="no product region found", details=open_)
            return HypothesisVerdict("D", VERIFIED, scope, reason="product regions found", details=found)
    except BudgetExceeded as exc:
        return HypothesisVerdict(which, INCONCLUSIVE, scope, reason=f"budget: {exc}")
    raise ValueError(f"unknown hypothesis {which!r}")


def replay(verdict: HypothesisVerdict, census: TorusCensus, *, budget: int = 200_000) -> bool:
    """Re-run the check behind a Counterexample witness; True if it still fails."""
    if verdict.result != COUNTEREXAMPLE or verdict.witness is None:
        return False
    w = verdict.witness
    h = verdict.hypothesis
    if h == "A":
        names = census.classes()[w["class"]]
        return min(weight(census.window, census.member(n).coords) for n in names) > w["C1"]
    if h == "B":
        m = census.member(w["torus"])
        return shortest_special_walk(m.surface, w["disk"], tuple(w["xi"]), w["C2"], budget=budget) is None
    if h == "C":
        consts = HypothesisConstants(C3=w["C3"], C4=w["C4"])
        bad, _ = _check_c(census, consts)
        return any(b["torus"] == w["torus"] and b["tet"] == w["tet"] for b in bad)
    return False


# ------------------------------------------------------------- splittings
@dataclass
class Member:
    name: str
    coords: NormalCoordinates
    kind: str = "Torus"  # Torus | Annulus
    label: str = "Canonical"  # Canonical | Noncanonical | Annulus


@dataclass
class SplittingCollection:
    members: list = field(default_factory=list)

    def union(self) -> NormalCoordinates:
        total = NormalCoordinates.empty()
        for m in self.members:
            total = total + m.coords
        return total


def _pieces(T, union, piece_of):
    """Cut along the union and name each piece by its uncut original tets."""
    cut = cut_along(T, realize_surface(T, union))
    touched = {t for t, _ in union.entries}
    names = []
    for w in cut.components:
        olds = {cut.origin[t][0] for t in w.tets}
        tags = {piece_of.get(t) for t in olds if t not in touched and piece_of.get(t) is not None}
        names.append(sorted(tags))
    return cut, names


def validate_splitting(M: TriangulationWindow, C: SplittingCollection, labels: dict, *, piece_of=None, census: TorusCensus | None = None, evidence=None) -> dict:
    """Mechanical checks of the four splitting conditions on a window.

    ``labels`` maps piece names to ``Seifert`` or ``Atoroidal`` and
    ``piece_of`` maps original tets to piece names.  Conditions 2-4 are
    checked against the census and tagged with its weight bound.
    """
    piece_of = piece_of or {}
    evidence = evidence or {}
    report = {"members": [], "window": M.name, "census_bound": None if census is None else census.weight_bound}
    # member types
    for m in C.members:
        comps = analyze_surface(realize_surface(M, m.coords)).components
        kinds = [c.kind for c in comps]
        report["members"].append({"name": m.name, "kind": m.kind, "realized": kinds, "ok": kinds == [m.kind]})
    # disjointness
    clash = []
    for i, a in enumerate(C.members):
        for b in C.members[i + 1 :]:
            if a.coords.entries == b.coords.entries:
                continue
            if not realizably_disjoint(M, a.coords, b.coords):
                clash.append([a.name, b.name])
    report["disjoint"] = {"ok": not clash, "violations": clash}
    report["locally_finite"] = {"ok": True, "members_meeting_window": len(C.members)}
    # condition 1: pieces carry labels
    cut, names = _pieces(M, C.union(), piece_of)
    pieces = []
    ok1 = True
    for w, tags in zip(cut.components, names):
        lab = labels.get(tags[0]) if len(tags) == 1 else None
        good = lab in ("Seifert", "Atoroidal")
        ok1 &= good
        pieces.append({"piece": tags, "label": lab, "tets": w.num_tets, "h1_rank": w.betti_numbers()[1],
                       "evidence": evidence.get(tags[0]) if len(tags) == 1 else None, "ok": good})
    report["condition_1"] = {"verdict": VERIFIED if ok1 else COUNTEREXAMPLE, "pieces": pieces}
    if census is None:
        for k in (2, 3, 4):
            report[f"condition_{k}"] = {"verdict": INCONCLUSIVE, "reason": "no census"}
        return report
    bound = {"census_weight_bound": census.weight_bound, "exhaustive": census.exhaustive}
    # condition 2: members are canonical (no essential intersection with census tori)
    bad2 = []
    for m in C.members:
        if m.kind != "Torus":
            continue
        S = realize_surface(M, m.coords, name=m.name)
        for t in census.members:
            if t.label == "Compressible":
                continue
            if t.coords.entries == m.coords.entries or realizably_disjoint(M, t.coords, m.coords):
                continue
            p = intersect_surfaces(S, realize_surface(M, t.coords, name=t.name), names=(m.name, t.name))
            if any(c.essential_a and c.essential_b for c in p.circles):
                bad2.append({"member": m.name, "census": t.name})
    report["condition_2"] = {"verdict": COUNTEREXAMPLE if bad2 else VERIFIED, "violations": bad2, **bound}
    # condition 3: census canonical classes appear in C; no duplicated classes in C
    coords_c = {}
    for m in C.members:
        coords_c.setdefault(m.coords.entries, []).append(m.name)
    dup = [names for names in coords_c.values() if len(names) > 1]
    missing = [t.name for t in census.members if t.label == "Canonical" and t.coords.entries not in coords_c]
    report["condition_3"] = {"verdict": COUNTEREXAMPLE if (missing or dup) else VERIFIED,
                             "missing": missing, "duplicate_classes": dup, **bound}
    # condition 4: census tori avoid C and sit in Seifert pieces
    bad4 = []
    for t in census.members:
        if t.label == "Compressible":
            continue
        tags = {piece_of.get(x) for x in t.support()}
        in_seifert = all(labels.get(g) == "Seifert" for g in tags)
        crosses = [m.name for m in C.members if not realizably_disjoint(M, t.coords, m.coords)]
        if not in_seifert or crosses:
            bad4.append({"census": t.name, "pieces": sorted(map(str, tags)), "crosses": crosses})
    report["condition_4"] = {"verdict": COUNTEREXAMPLE if bad4 else VERIFIED, "violations": bad4, **bound}
    return report


# ---------------------------------------------------- graph submanifolds
@dataclass
class GraphCertificate:
    """A tet region with canonical tori, piece labels and claimed outsiders."""

    sigma: frozenset
    G: list = field(default_factory=list)  # Member list
    piece_labels: dict = field(default_factory=dict)
    boundary: list = field(default_factory=list)  # Member list
    outside: list = field(default_factory=list)  # census names claimed outside sigma
    C1: int | None = None

    def as_dict(self):
        return {
            "schema": SCHEMA_VERSION,
            "sigma": sorted(self.sigma, key=repr),
            "G": [{"name": m.name, "coords": [[t, list(v)] for t, v in m.coords.entries]} for m in self.G],
            "piece_labels": self.piece_labels,
            "boundary": [m.name for m in self.boundary],
            "outside": list(self.outside),
            "C1": self.C1,
        }


def audit_graph_submanifold(cert: GraphCertificate, census: TorusCensus) -> dict:
    """Report-only audit of a graph-submanifold certificate against a census."""
    T = census.window
    sigma = set(cert.sigma)
    violations = []
    for i, a in enumerate(cert.G):
        for b in cert.G[i + 1 :]:
            if not realizably_disjoint(T, a.coords, b.coords):
                violations.append({"check": "G disjoint", "tori": [a.name, b.name]})
    canon = {t.coords.entries: t for t in census.members}
    for m in cert.G:
        entry = canon.get(m.coords.entries)
        if entry is not None and entry.label != "Canonical":
            violations.append({"check": "G canonical", "torus": m.name})
        if cert.C1 is not None and weight(T, m.coords) > cert.C1:
            violations.append({"check": "G weight", "torus": m.name, "C1": cert.C1})
    if sigma and not cert.piece_labels:
        violations.append({"check": "labels", "reason": "no piece carries a label"})
    for name in cert.outside:
        t = census.member(name)
        if t.support() <= sigma:
            violations.append({"check": "taut", "torus": name, "reason": "listed outside but contained in sigma"})
    seen = {}
    for m in cert.boundary:
        if m.coords.entries in seen:
            violations.append({"check": "parallel boundary", "tori": [seen[m.coords.entries], m.name]})
        seen.setdefault(m.coords.entries, m.name)
    conclusions = []
    for t in census.members:
        sup = t.support()
        inside, apart = sup <= sigma, not (sup & sigma)
        if t.label == "Noncanonical" and not inside:
            conclusions.append({"conclusion": "ii", "torus": t.name})
        if t.label == "Canonical" and not (inside or apart):
            conclusions.append({"conclusion": "iii", "torus": t.name})
    return {"ok": not violations and not conclusions, "violations": violations, "conclusions": conclusions,
            "census_weight_bound": census.weight_bound, "flags": ["parallelism tested by coordinate equality only"]}


@dataclass
class TautSequence:
    stages: list
    witnesses: list
    audits: list = field(default_factory=list)
    boundary_counts: list = field(default_factory=list)

    def nested(self) -> bool:
        return all(a.sigma <= b.sigma for a, b in zip(self.stages, self.stages[1:]))

    def as_dict(self):
        return {
            "stages": [len(s.sigma) for s in self.stages],
            "boundary_components": self.boundary_counts,
            "witnesses": self.witnesses,
            "audits": self.audits,
            "nested": self.nested(),
        }


def _thicken(T, tets, radius):
    if radius is None or radius < 0:
        return set(tets)
    dist = T.tet_distances(list(tets))
    return {t for t, d in dist.items() if d <= radius}


def region_boundary_components(T: TriangulationWindow, sigma) -> int:
    """Components of the frontier of a tet region (faces glued to tets outside it)."""
    sigma = set(sigma)
    faces = [(t, f) for t in sigma for f in range(4) if (g := T.glued(t, f)) is not None and g[0] not in sigma]
    uf = UnionFind(range(len(faces)))
    by_edge = {}
    for i, (t, f) in enumerate(faces):
        for a, b in itertools.combinations([v for v in range(4) if v != f], 2):
            by_edge.setdefault(T.edge_class(t, a, b)[0], []).append(i)
    for idx in by_edge.values():
        for j in idx[1:]:
            uf.union(idx[0], j)
    return len({uf.find(i) for i in range(len(faces))})


def grow_taut_sequence(M: TriangulationWindow, seeds, schedule=(0,), *, census: TorusCensus | None = None) -> TautSequence:
    """Grow nested regions around Seifert neighbourhoods of intersecting pairs.

    ``seeds`` is a list of (A, B) realized surfaces; stage n thickens the
    supports of the n-th pair by ``schedule[n-1]`` (last entry repeats)
    and merges with the previous region.
    """
    stages = [GraphCertificate(frozenset())]
    witnesses, audits, counts = [], [], [0]
    for n, (A, B) in enumerate(seeds, 1):
        p = intersect_surfaces(A, B, names=(A.name or "A", B.name or "B"))
        if not any(c.essential_a and c.essential_b for c in p.circles):
            raise SeedDegenerate(f"seed {n} has no essential circles")
        datum = seifert_neighborhood(A, B, p)
        r = schedule[min(n - 1, len(schedule) - 1)]
        support = {d.tet for d in A.disks} | {d.tet for d in B.disks}
        region = frozenset(stages[-1].sigma | _thicken(M, support, r))
        labels = dict(stages[-1].piece_labels)
        labels[f"seed{n}"] = {"Seifert": datum.as_dict()}
        stage = GraphCertificate(region, [], labels)
        witnesses.append({"stage": n, "added": len(region - stages[-1].sigma), "subset": stages[-1].sigma <= region})
        stages.append(stage)
        counts.append(region_boundary_components(M, region))
        if census is not None:
            audits.append(audit_graph_submanifold(stage, census))
    return TautSequence(stages, witnesses, audits, counts)


@dataclass
class LimitRegion:
    region: frozenset
    boundary: list
    intervals_ok: bool

    def as_dict(self):
        return {"tets": len(self.region), "intervals_ok": self.intervals_ok,
                "boundary": [b.as_dict() for b in self.boundary]}


def assemble_limit_region(seq: TautSequence, remaps=(), *, lazy=None, boundary_limits=(), center=0, core=1, outer=(2, 4)) -> LimitRegion:
    """Union of the stages, checked interval remaps, and limit boundary reports.

    ``remaps`` is a list of ``(hulls, classes)`` pairs from
    :func:`disjointify_intervals`; any collision raises
    :class:`OverlapUnresolved`.  Each entry of ``boundary_limits`` is a
    limit coordinate vector classified by ends.
    """
    for hulls, classes in remaps:
        if not check_disjoint(hulls, classes):
            raise OverlapUnresolved(f"remapped hulls collide on edge {hulls[0].edge_class if hulls else '?'}")
    region = frozenset().union(*(s.sigma for s in seq.stages))
    reports = []
    for F in boundary_limits:
        reports.append(classify_limit_ends(lazy, F, center=center, core=core, outer=outer))
    return LimitRegion(region, reports, True)


def certificate_json(obj) -> str:
    """Versioned JSON for certificates and reports."""
    body = obj.as_dict() if hasattr(obj, "as_dict") else obj
    return json.dumps({"schema": SCHEMA_VERSION, "certificate": body}, sort_keys=True, indent=2, default=str)
