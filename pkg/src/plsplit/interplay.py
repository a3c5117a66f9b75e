"""Interactions between normal surfaces.

Intersections are computed face by face: inside a triangle of the
2-skeleton two normal arcs cross exactly when their endpoints interleave
on the boundary circle.  Each pair of disks in a tetrahedron meets along
segments joining such face points, and the segments close up into
circles (or arcs ending on the window boundary).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from ._intlin import UnionFind
from .cellsurface import CellSurface, primitive_up_to_sign
from .errors import (
    BudgetExceeded,
    ConflictingWitnesses,
    NoEssentialIntersections,
    NonParallelCircles,
    NotMonotone,
    NotTransverse,
    OneSided,
    Unstable,
)
from .surface import RealizedSurface

PERTURB = 1e-6
_CORNERS = ((0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0))


# --------------------------------------------------------------- geometry
class _Frame:
    """Per face class: sorted labels of the representative and its sides."""

    def __init__(self, T):
        self.T = T
        self._cache = {}

    def face(self, fc):
        if fc not in self._cache:
            t, f = self.T.face_rep(fc)
            labels = sorted(v for v in range(4) if v != f)
            sides = {}
            for x, y in ((labels[0], labels[1]), (labels[1], labels[2]), (labels[0], labels[2])):
                sides[(x, y)] = self.T.edge_class(t, x, y)
            self._cache[fc] = (labels, sides)
        return self._cache[fc]

    def point(self, fc, side, crossing, param):
        """Perimeter key and planar position of a crossing on a face side."""
        labels, sides = self.face(fc)
        ec, sign = sides[side]
        if ec != crossing[0]:
            raise AssertionError(f"crossing {crossing} is not on side {side} of face {fc}")
        sigma = sign * param
        frac = 0.5 * (1.0 + math.tanh(sigma / 2.0))
        x, y = side
        px, py = _CORNERS[labels.index(x)], _CORNERS[labels.index(y)]
        xy = (px[0] + frac * (py[0] - px[0]), px[1] + frac * (py[1] - px[1]))
        rank = (labels.index(x), labels.index(y))
        key = {(0, 1): (0, frac), (1, 2): (1, frac), (0, 2): (2, 1.0 - frac)}[rank]
        return key, xy

    def corner(self, fc, label):
        labels, _ = self.face(fc)
        return _CORNERS[labels.index(label)]


def _arc_ends(S: RealizedSurface, frame: _Frame, key):
    """Perimeter keys and positions of an arc's two ends (canonical order)."""
    fc, u, _ = key
    labels, _ = frame.face(fc)
    ws = [w for w in labels if w != u]
    arc = S.arcs[key]
    out = []
    for crossing, w in zip(arc.ends, ws):
        side = tuple(sorted((u, w)))
        out.append(frame.point(fc, side, crossing, S.crossing_param(crossing)))
    return out


def _interleave(a, b):
    keys = [a[0][0], a[1][0], b[0][0], b[1][0]]
    if len(set(keys)) < 4:
        raise NotTransverse("arcs share an endpoint on a face side")
    lo, hi = sorted(keys[:2])
    inside = [lo < k < hi for k in keys[2:]]
    return inside[0] != inside[1]


def _cross_params(a, b):
    """Fractions along arc ``a`` and ``b`` (from their first ends) of their crossing."""
    (_, p0), (_, p1) = a
    (_, q0), (_, q1) = b
    r = (p1[0] - p0[0], p1[1] - p0[1])
    s = (q1[0] - q0[0], q1[1] - q0[1])
    den = r[0] * s[1] - r[1] * s[0]
    if abs(den) < 1e-15:
        return 0.5, 0.5
    w = (q0[0] - p0[0], q0[1] - p0[1])
    u = (w[0] * s[1] - w[1] * s[0]) / den
    v = (w[0] * r[1] - w[1] * r[0]) / den
    return min(max(u, 0.0), 1.0), min(max(v, 0.0), 1.0)


# ------------------------------------------------------------ data types
@dataclass
class Circle:
    """An intersection circle (or arc, if ``closed`` is False).

    ``segments[k] = (tet, disk of A, disk of B)``; ``points[k]`` is the
    face point ``(face class, arc of A, arc of B)`` through which the
    circle leaves segment k, and ``faces[k]`` the pair of tet faces it
    uses there (exit side, entry side).
    """

    segments: list
    points: list
    faces: list
    closed: bool = True
    class_a: tuple | None = None
    class_b: tuple | None = None

    @property
    def length(self):
        return len(self.points)

    @property
    def essential_a(self):
        return None if self.class_a is None else any(self.class_a)

    @property
    def essential_b(self):
        return None if self.class_b is None else any(self.class_b)

    def walk(self, side):
        """The circle as a dual walk on surface A (side 0) or B (side 1)."""
        return [(p[1 + side], s[1 + side]) for s, p in zip(self.segments, self.points)]

    def as_dict(self):
        return {
            "length": self.length,
            "closed": self.closed,
            "tets": [s[0] for s in self.segments],
            "class_a": None if self.class_a is None else list(self.class_a),
            "class_b": None if self.class_b is None else list(self.class_b),
            "essential_a": self.essential_a,
            "essential_b": self.essential_b,
        }


@dataclass
class IntersectionPattern:
    a: str
    b: str
    circles: list = field(default_factory=list)
    arcs: list = field(default_factory=list)
    equal: bool = False
    perturbed: list = field(default_factory=list)
    surfaces: tuple = ()
    _geometry: dict = field(default_factory=dict, repr=False)

    def essential_circles(self, side=0):
        flag = "essential_a" if side == 0 else "essential_b"
        return [c for c in self.circles if getattr(c, flag)]

    def swapped(self) -> "IntersectionPattern":
        circles = []
        for c in self.circles:
            segs = [(t, db, da) for t, da, db in c.segments]
            pts = [(fc, kb, ka) for fc, ka, kb in c.points]
            circles.append(Circle(segs, pts, c.faces, c.closed, c.class_b, c.class_a))
        return IntersectionPattern(self.b, self.a, circles, self.arcs, self.equal, self.perturbed, self.surfaces[::-1])

    def as_dict(self):
        return {
            "a": self.a,
            "b": self.b,
            "equal": self.equal,
            "circles": [c.as_dict() for c in self.circles],
            "open_arcs": len(self.arcs),
            "perturbed_edges": list(self.perturbed),
        }


# ---------------------------------------------------------- intersection
def _perturb(A: RealizedSurface, B: RealizedSurface):
    shifted = {}
    for ec, pb in B.params.items():
        pa = A.params.get(ec)
        if pa is None:
            continue
        if any(abs(x - y) < 1e-12 for x in pa for y in pb):
            new = tuple(y + PERTURB * (j + 1) for j, y in enumerate(pb))
            if any(abs(x - y) < 1e-12 for x in pa for y in new):
                raise NotTransverse(f"crossings of edge class {ec} still coincide after perturbation")
            shifted[ec] = new
    if not shifted:
        return B, []
    return B.with_params(shifted), sorted(shifted)


def _face_index(S: RealizedSurface):
    idx = {}
    for key, arc in S.arcs.items():
        for did, tf, _ in arc.sides:
            idx.setdefault(tf, []).append((key, did))
    return idx


def _noncrossing_matchings(seq):
    if not seq:
        yield []
        return
    first = seq[0]
    for j in range(1, len(seq), 2):
        for left in _noncrossing_matchings(seq[1:j]):
            for right in _noncrossing_matchings(seq[j + 1 :]):
                yield [(first, seq[j])] + left + right


def _pair_points(pts, order_a, order_b):
    """Join the face points of one disk pair into non-crossing segments."""
    if len(pts) % 2:
        raise NotTransverse("a disk pair has an odd number of boundary crossings")
    if len(pts) == 2:
        return [tuple(pts)]
    seq = sorted(pts, key=order_a)
    rank_b = {p: i for i, p in enumerate(sorted(pts, key=order_b))}
    for m in _noncrossing_matchings(seq):
        ok = True
        for i, (p, q) in enumerate(m):
            lo, hi = sorted((rank_b[p], rank_b[q]))
            for r, s in m[i + 1 :]:
                if (lo < rank_b[r] < hi) != (lo < rank_b[s] < hi):
                    ok = False
        if ok:
            return m
    raise NotTransverse("disks meet in a pattern that is not realizable by segments")


def intersect_surfaces(A: RealizedSurface, B: RealizedSurface, *, names=("A", "B")) -> IntersectionPattern:
    """Circles of ``A`` and ``B`` with their homology classes on each side."""
    if A.window is not B.window and A.window != B.window:
        raise ValueError("surfaces live on different windows")
    if A.coords == B.coords:
        return IntersectionPattern(names[0], names[1], equal=True, surfaces=(A, B))
    B, perturbed = _perturb(A, B)
    T = A.window
    frame = _Frame(T)
    ia, ib = _face_index(A), _face_index(B)
    geo_a, geo_b = {}, {}
    crossing = {}
    by_pair = {}
    for tf in sorted(set(ia) & set(ib), key=repr):
        t, f = tf
        fc = T.face_class(t, f)
        for ka, da in ia[tf]:
            ga = geo_a.setdefault(ka, _arc_ends(A, frame, ka))
            for kb, db in ib[tf]:
                gb = geo_b.setdefault(kb, _arc_ends(B, frame, kb))
                if not _interleave(ga, gb):
                    continue
                P = (fc, ka, kb)
                crossing.setdefault(P, _cross_params(ga, gb))
                by_pair.setdefault((t, da, db), []).append((P, f))

    def boundary_pos(S, did, kidx, frac_of):
        steps = S.disk_steps[did]

        def pos(pf):
            P, f = pf
            for i, (key, tf, d) in enumerate(steps):
                if key == P[kidx] and tf[1] == f:
                    u = frac_of(P)
                    return i + (u if d > 0 else 1.0 - u)
            raise AssertionError("point not on disk boundary")

        return pos

    segments = []
    for (t, da, db), pts in sorted(by_pair.items(), key=repr):
        pts = sorted(set(pts), key=repr)
        pa = boundary_pos(A, da, 1, lambda P: crossing[P][0])
        pb = boundary_pos(B, db, 2, lambda P: crossing[P][1])
        for p, q in _pair_points(pts, pa, pb):
            segments.append(((t, da, db), (p, q)))
    # assemble: nodes are face points, incidences are (segment, end)
    inc = {}
    for sid, (_, ends) in enumerate(segments):
        for e, (P, _) in enumerate(ends):
            inc.setdefault(P, []).append((sid, e))
    for P, lst in inc.items():
        if len(lst) > 2:
            raise NotTransverse(f"face point {P} is met by {len(lst)} segments")
    used = set()
    circles, arcs = [], []

    def trace(sid, e):
        segs, points, faces = [], [], []
        closed = False
        while True:
            used.add(sid)
            seg, ends = segments[sid]
            segs.append(seg)
            P, fout = ends[1 - e]
            others = [x for x in inc[P] if x != (sid, 1 - e)]
            if not others:
                points.append(P)
                faces.append((fout, None))
                break
            nsid, ne = others[0]
            points.append(P)
            faces.append((fout, segments[nsid][1][ne][1]))
            if nsid in used:
                closed = True
                break
            sid, e = nsid, ne
        return segs, points, faces, closed

    for P in sorted(inc, key=repr):
        if len(inc[P]) == 1 and inc[P][0][0] not in used:
            sid, e = inc[P][0]
            segs, pts, faces, _ = trace(sid, e)
            arcs.append(Circle(segs, pts, faces, closed=False))
    for sid in range(len(segments)):
        if sid not in used:
            segs, pts, faces, closed = trace(sid, 0)
            if not closed:
                raise AssertionError("circle failed to close")
            circles.append(Circle(segs, pts, faces))
    bases = (_Bases(A), _Bases(B))
    for c in circles:
        c.class_a = bases[0].classify(c.segments[0][1], c.walk(0))
        c.class_b = bases[1].classify(c.segments[0][2], c.walk(1))
    pattern = IntersectionPattern(names[0], names[1], circles, arcs, False, perturbed, (A, B))
    pattern._geometry = {"crossing": crossing, "frame": frame, "geo": (geo_a, geo_b), "bases": bases}
    return pattern


class _Bases:
    """Homology bases per closed orientable component of a realized surface."""

    def __init__(self, S: RealizedSurface):
        self.cells = S.cell_surface()
        self.comp_of = {}
        self.comps = self.cells.components()
        for i, comp in enumerate(self.comps):
            for d in comp:
                self.comp_of[d] = i
        self._basis = {}

    def basis(self, disk):
        i = self.comp_of[disk]
        if i not in self._basis:
            comp = self.comps[i]
            try:
                self._basis[i] = self.cells.homology_basis(comp)
            except ValueError:
                self._basis[i] = None
        return self._basis[i]

    def classify(self, disk, walk):
        b = self.basis(disk)
        return None if b is None else b.classify(walk)


# --------------------------------------------------------- special class
@dataclass
class SpecialClass:
    torus: str
    xi: tuple
    witnesses: list

    def as_dict(self):
        return {"torus": self.torus, "xi": list(self.xi), "witnesses": list(self.witnesses)}


def special_class(torus: str, patterns) -> SpecialClass:
    """The common class, up to sign, of all essential circles on ``torus``."""
    found = {}
    for p in patterns:
        if p.a == torus:
            side = 0
        elif p.b == torus:
            side = 1
        else:
            raise ValueError(f"pattern {p.a}/{p.b} does not involve {torus}")
        partner = p.b if side == 0 else p.a
        for c in p.circles:
            cls = c.class_a if side == 0 else c.class_b
            if cls is None or not any(cls):
                continue
            found.setdefault(primitive_up_to_sign(cls), []).append(partner)
    if not found:
        raise NoEssentialIntersections(f"no essential circles on {torus}")
    if len(found) > 1:
        raise ConflictingWitnesses(f"circles on {torus} carry {len(found)} classes", sorted(found))
    (xi, partners), = found.items()
    return SpecialClass(torus, xi, sorted(set(partners)))


# ------------------------------------------------------ Seifert datum
def transverse_sides(S: RealizedSurface):
    """Per disk, the set of its tet's vertices on the positive side of S."""
    T = S.window
    pos = {}
    for d0 in S.disks:
        if d0.id in pos:
            continue
        pos[d0.id] = _disk_sides(d0)[0]
        stack = [d0.id]
        while stack:
            did = stack.pop()
            d = S.disks[did]
            for key, tf, _ in S.disk_steps[did]:
                u = key[1]
                inv = {r: l for l, r in T.face_vertex_map(*tf).items()}
                plus = inv[u] in pos[did]
                for odid, otf, _ in S.arcs[key].sides:
                    if (odid, otf) == (did, tf):
                        continue
                    oinv = {r: l for l, r in T.face_vertex_map(*otf).items()}
                    ou = oinv[u]
                    a, b = _disk_sides(S.disks[odid])
                    want = a if (ou in a) == plus else b
                    if odid in pos:
                        if pos[odid] != want:
                            raise OneSided(f"surface {S.name or ''} is one-sided")
                    else:
                        pos[odid] = want
                        stack.append(odid)
    return pos


def _disk_sides(d):
    from .normal import quad_sides

    if d.kind == "t":
        return frozenset({d.type}), frozenset(range(4)) - {d.type}
    s0, s1 = quad_sides(d.type)
    return frozenset(s0), frozenset(s1)


class _Regions:
    """Pieces of a surface cut along the intersection segments."""

    def __init__(self, S, pattern, side):
        self.S = S
        geo = pattern._geometry
        kidx = 1 + side
        self.points_on = {}
        for P in geo["crossing"]:
            self.points_on.setdefault(P[kidx], []).append(P)
        for k, lst in self.points_on.items():
            lst.sort(key=lambda P: geo["crossing"][P][side])
        self.partner = {}
        for c in pattern.circles:
            for i, seg in enumerate(c.segments):
                t = seg[0]
                enter = c.points[i - 1], c.faces[i - 1][1]
                leave = c.points[i], c.faces[i][0]
                a = (enter[0], (t, enter[1]))
                b = (leave[0], (t, leave[1]))
                self.partner[a] = b
                self.partner[b] = a
        self.uf = UnionFind()
        self.before, self.after = {}, {}
        for d in S.disks:
            toks = []
            for key, tf, direction in S.disk_steps[d.id]:
                pts = self.points_on.get(key, [])
                n = len(pts)
                order = range(n) if direction > 0 else range(n - 1, -1, -1)
                subs = list(range(n + 1)) if direction > 0 else list(range(n, -1, -1))
                toks.append(("sub", key, subs[0]))
                for j, pi in enumerate(order):
                    toks.append(("pt", pts[pi], tf))
                    toks.append(("sub", key, subs[j + 1]))
            for tok in toks:
                if tok[0] == "sub":
                    self.uf.add(tok)
            m = len(toks)
            for i, tok in enumerate(toks):
                if tok[0] == "pt":
                    occ = (tok[1], tok[2])
                    self.before[occ] = toks[i - 1]
                    self.after[occ] = toks[(i + 1) % m]
                elif toks[(i + 1) % m][0] == "sub":
                    self.uf.union(tok, toks[(i + 1) % m])
        for occ, other in self.partner.items():
            if occ not in self.before:
                raise AssertionError(f"occurrence {occ} missing from the disk boundaries")
            self.uf.union(self.before[occ], self.after[other])

    def region(self, tok):
        return self.uf.find(tok)


def _circle_sides(pattern, regions, sign, c, side):
    """Regions left and right of circle ``c`` on one surface, at its first exit point."""
    seg = c.segments[0]
    did = seg[1 + side]
    occ = (c.points[0], (seg[0], c.faces[0][0]))
    after, before = regions.after[occ], regions.before[occ]
    if sign[did] > 0:
        return regions.region(after), regions.region(before)
    return regions.region(before), regions.region(after)


@dataclass
class SeifertDatum:
    base: CellSurface
    euler_characteristic: int
    boundary_components: int
    orientable: bool
    fiber_class: tuple
    circles: int
    annuli: int
    rectangles: list

    @property
    def boundary_tori(self):
        return self.boundary_components

    def chi_identity(self) -> bool:
        return self.euler_characteristic == self.circles - self.annuli

    def as_dict(self):
        return {
            "euler_characteristic": self.euler_characteristic,
            "boundary_tori": self.boundary_components,
            "orientable": self.orientable,
            "fiber_class": [list(x) for x in self.fiber_class],
            "circles": self.circles,
            "annuli": self.annuli,
            "chi_identity": self.chi_identity(),
        }


def _half_side(frame, fc, line, line_u, half_end, plus_corner_is_positive):
    """Which normal side of an arc (``line``) the endpoint ``half_end`` lies on."""
    (_, p0), (_, p1) = line

    def side_of(pt):
        return math.copysign(1.0, (p1[0] - p0[0]) * (pt[1] - p0[1]) - (p1[1] - p0[1]) * (pt[0] - p0[0]))

    corner = frame.corner(fc, line_u)
    in_corner = side_of(half_end) == side_of(corner)
    return 1 if in_corner == plus_corner_is_positive else -1


def seifert_neighborhood(A: RealizedSurface, B: RealizedSurface, p: IntersectionPattern) -> SeifertDatum:
    """Base surface of the fibered neighbourhood of A and B.

    Each circle contributes a square and each annulus of A or B cut
    along the circles contributes a rectangle glued to the squares at
    its two ends; the corners of a square are the four quadrants around
    its circle.
    """
    if p.equal or not p.circles:
        raise NonParallelCircles("the pattern has no circles")
    if p.arcs:
        raise NonParallelCircles("the pattern has open arcs")
    A, B = p.surfaces
    xi = []
    for side in (0, 1):
        classes = [c.class_a if side == 0 else c.class_b for c in p.circles]
        if any(cl is None or not any(cl) for cl in classes):
            raise NonParallelCircles("some circle is inessential or unclassified")
        norm = {primitive_up_to_sign(cl) for cl in classes}
        if len(norm) != 1:
            raise NonParallelCircles(f"circles carry {len(norm)} classes on side {side}")
        xi.append(norm.pop())
    geo = p._geometry
    frame = geo["frame"]
    T = A.window
    surfs = (A, B)
    regions = (_Regions(A, p, 0), _Regions(B, p, 1))
    signs = (A.cell_surface().orientation(), B.cell_surface().orientation())
    if signs[0] is None or signs[1] is None:
        raise OneSided("seifert neighborhoods need orientable surfaces")
    pos = (transverse_sides(A), transverse_sides(B))
    plus_region = {}
    ends = {}
    beta = {}
    for ci, c in enumerate(p.circles):
        eps = []
        for side in (0, 1):
            cl = c.class_a if side == 0 else c.class_b
            e = 1 if tuple(cl) == xi[side] else -1
            eps.append(e)
            left, right = _circle_sides(p, regions[side], signs[side], c, side)
            plus, minus = (left, right) if e > 0 else (right, left)
            plus_region[(side, ci)] = (plus, minus)
            ends.setdefault((side, plus), []).append((ci, 1))
            ends.setdefault((side, minus), []).append((ci, -1))
        # normal side of each surface on which the other's + half-edge lies
        t, da, db = c.segments[0]
        P = c.points[0]
        fc, ka, kb = P
        fout = c.faces[0][0]
        inv = {r: l for l, r in T.face_vertex_map(t, fout).items()}
        for side in (0, 1):
            other = 1 - side
            S_o = surfs[other]
            k_self, k_other = (ka, kb) if side == 0 else (kb, ka)
            d_self, d_other = (da, db) if side == 0 else (db, da)
            steps = S_o.disk_steps[d_other]
            direction = next(dr for key, tf, dr in steps if key == k_other and tf == (t, fout))
            # left half of the other arc at P: traversed after P if the disk is positive
            after_is_hi = direction > 0
            left_is_hi = after_is_hi if signs[other][d_other] > 0 else not after_is_hi
            plus_is_hi = left_is_hi if eps[other] > 0 else not left_is_hi
            line = geo["geo"][side][k_self]
            half_end = geo["geo"][other][k_other][1 if plus_is_hi else 0][1]
            corner_positive = inv[k_self[1]] in pos[side][d_self]
            beta[(side, ci)] = _half_side(frame, fc, line, k_self[1], half_end, corner_positive)
    # cell complex of the base
    faces, edges = {}, {}

    def q(ci, s, t):
        return ("q", ci, s, t)

    for ci in range(len(p.circles)):
        for s in (1, -1):
            edges[("att", 0, ci, s)] = (q(ci, s, 1), q(ci, s, -1))
            edges[("att", 1, ci, s)] = (q(ci, 1, s), q(ci, -1, s))
        faces[("sq", ci)] = [
            (("att", 0, ci, 1), 1),
            (("att", 1, ci, -1), 1),
            (("att", 0, ci, -1), -1),
            (("att", 1, ci, 1), -1),
        ]
    rects = []
    for (side, reg), lst in sorted(ends.items(), key=repr):
        if len(lst) != 2:
            raise NonParallelCircles(f"a region of side {side} touches {len(lst)} circle sides")
        (c1, s1), (c2, s2) = lst
        rid = ("rect", side, len(rects))
        rects.append((side, (c1, s1), (c2, s2)))

        def corner(ci, s, nu):
            b = beta[(side, ci)]
            if side == 0:
                return q(ci, s, nu * b)
            return q(ci, nu * b, s)

        for nu in (1, -1):
            edges[(rid, nu)] = (corner(c1, s1, nu), corner(c2, s2, nu))
        att1, att2 = ("att", side, c1, s1), ("att", side, c2, s2)
        # the attaching edge runs from the +1 corner to the -1 corner
        d1 = 1 if edges[att1][0] == corner(c1, s1, 1) else -1
        d2 = 1 if edges[att2][0] == corner(c2, s2, 1) else -1
        faces[rid] = [(att1, -d1), ((rid, 1), 1), (att2, d2), ((rid, -1), -1)]
    base = CellSurface(faces, edges)
    comps = base.analyze()
    chi = sum(r.euler_characteristic for r in comps)
    nb = sum(r.boundary_components for r in comps)
    orientable = all(r.orientable for r in comps)
    return SeifertDatum(base, chi, nb, orientable, tuple(xi), len(p.circles), len(rects), rects)


# --------------------------------------------------- disk equivalence
@dataclass
class DiskPartition:
    tet: object
    classes: list
    witness_stage: dict

    def class_of(self, disk):
        for i, c in enumerate(self.classes):
            if disk in c:
                return i
        raise KeyError(disk)


def disk_equivalence(tet, family, disk_types) -> DiskPartition:
    """Classes of disks of ``tet`` under the co-membership relation.

    ``family[n]`` lists the components of the n-th region meeting the
    tetrahedron, each as a collection of disk labels; ``disk_types``
    maps a label to its normal disk type.  Two disks are related if they
    have the same type and share a component at some stage.
    """
    stages = [[frozenset(c) for c in stage] for stage in family]
    for n in range(len(stages) - 1):
        for comp in stages[n]:
            if not any(comp <= nxt for nxt in stages[n + 1]):
                raise NotMonotone(f"component {sorted(comp, key=repr)} of stage {n} is not contained in stage {n + 1}")
    uf = UnionFind()
    for d in disk_types:
        uf.add(d)
    for stage in stages:
        for comp in stage:
            by_type = {}
            for d in sorted(comp, key=repr):
                if d not in disk_types:
                    raise KeyError(f"disk {d} has no declared type")
                by_type.setdefault(disk_types[d], []).append(d)
            for same in by_type.values():
                for d in same[1:]:
                    uf.union(same[0], d)
    classes = sorted((sorted(g, key=repr) for g in uf.groups()), key=repr)
    witness = {}
    for i, cls in enumerate(classes):
        if len(cls) == 1:
            witness[i] = None
            continue
        members = set(cls)
        for n, stage in enumerate(stages):
            if any(members <= comp for comp in stage):
                witness[i] = n
                break
        else:
            raise NotMonotone(f"class {cls} never lies in one component; the family is not increasing")
    return DiskPartition(tet, [frozenset(c) for c in classes], witness)


# ----------------------------------------------------------- intervals
@dataclass
class IntervalHull:
    edge_class: object
    class_id: object
    hull: tuple
    shrunk: tuple

    def remap(self, x):
        lo, hi = self.hull
        nlo, nhi = self.shrunk
        if hi == lo:
            return nlo
        return nlo + (Fraction(x) - lo) * (nhi - nlo) / (hi - lo)


def disjointify_intervals(edge, classes, *, shrink=Fraction(9, 10)) -> list:
    """Shrink the convex hulls of crossing classes to pairwise disjoint intervals.

    Each hull is subdivided at the endpoints of all hulls; every class
    takes its longest gap and classes sharing a gap split it evenly.
    A class reduced to one point keeps that point.  Arithmetic is exact.
    """
    hulls = {}
    for cid in sorted(classes, key=repr):
        pts = [Fraction(x) for x in classes[cid]]
        if not pts:
            raise ValueError(f"class {cid} is empty")
        hulls[cid] = (min(pts), max(pts))
    cuts = sorted({x for h in hulls.values() for x in h})
    gaps = list(zip(cuts, cuts[1:]))
    choice = {}
    for cid, (lo, hi) in hulls.items():
        if lo == hi:
            continue
        inside = [g for g in gaps if lo <= g[0] and g[1] <= hi]
        best = max(inside, key=lambda g: (g[1] - g[0], -g[0]))
        choice.setdefault(best, []).append(cid)
    out = []
    for cid, (lo, hi) in hulls.items():
        if lo == hi:
            out.append(IntervalHull(edge, cid, (lo, hi), (lo, hi)))
    for (glo, ghi), cids in sorted(choice.items()):
        width = (ghi - glo) / len(cids)
        for i, cid in enumerate(cids):
            slot_lo = glo + i * width
            mid = slot_lo + width / 2
            half = width * shrink / 2
            out.append(IntervalHull(edge, cid, hulls[cid], (mid - half, mid + half)))
    out.sort(key=lambda h: repr(h.class_id))
    return out


def check_disjoint(hulls, classes) -> bool:
    """Exact post-check: pairwise disjoint, strictly inside, order preserving."""
    for h in hulls:
        lo, hi = h.hull
        nlo, nhi = h.shrunk
        if lo < hi and not (lo < nlo <= nhi < hi):
            return False
        pts = sorted(Fraction(x) for x in classes[h.class_id])
        images = [h.remap(x) for x in pts]
        if images != sorted(images) or (lo < hi and len(set(images)) != len(set(pts))):
            return False
    for i, a in enumerate(hulls):
        for b in hulls[i + 1 :]:
            if not (a.shrunk[1] < b.shrunk[0] or b.shrunk[1] < a.shrunk[0]):
                return False
    return True


# --------------------------------------------------------------- limits
@dataclass
class SurfaceSequenceLimit:
    sequence: list
    limit: dict
    stabilization: dict
    unstable: list
    verified_radius: int | None = None
    support: str = ""
    checks: dict = field(default_factory=dict)

    def coordinates(self):
        from .normal import NormalCoordinates

        return NormalCoordinates.from_dict({t: v for t, v in self.limit.items() if any(v)})

    def as_dict(self):
        return {
            "members": len(self.sequence),
            "support_tets": sum(1 for v in self.limit.values() if any(v)),
            "max_stabilization": max(self.stabilization.values(), default=0),
            "verified_radius": self.verified_radius,
            "support": self.support,
            "checks": self.checks,
        }


def limit_surface(sequence, *, region=None, tail: int = 2, lazy=None, center=None, radii=()) -> SurfaceSequenceLimit:
    """Per-tet coordinate stabilization of a sequence of normal surfaces.

    ``region`` restricts attention to a set of tets (default: the union of
    supports).  A tet is stable if its coordinates are constant over at
    least the last ``tail`` members.  With ``lazy`` and ``center`` the
    convergence conditions are checked on the balls of the given radii
    and the largest verified radius is reported.
    """
    seq = [dict(c.entries) for c in sequence]
    N = len(seq)
    if N == 0:
        raise ValueError("empty sequence")
    zero = (0,) * 7
    tets = set(region) if region is not None else {t for s in seq for t in s}
    stab, unstable, limit = {}, [], {}
    for t in sorted(tets, key=repr):
        vals = [s.get(t, zero) for s in seq]
        n0 = N - 1
        while n0 > 0 and vals[n0 - 1] == vals[-1]:
            n0 -= 1
        stab[t] = n0
        if N > 1 and n0 > N - min(tail, N):
            unstable.append(t)
        limit[t] = vals[-1]
    if unstable:
        raise Unstable(f"{len(unstable)} tets never stabilize, e.g. {unstable[0]}")
    result = SurfaceSequenceLimit(list(sequence), limit, stab, unstable)
    if lazy is not None and center is not None:
        verified = None
        for r in sorted(radii):
            W = lazy.expand_window(center, r)
            ball = [t for t in W.tets if t in limit]
            missing = [t for t in W.tets if t not in tets]
            if missing:
                break
            n0 = max((stab[t] for t in ball), default=0)
            # (i): from n0 on every member agrees with the limit on the ball
            ok_i = all(seq[n].get(t, zero) == limit[t] for n in range(n0, N) for t in ball)
            # (ii): members that agree with each other on the ball agree with the limit
            ok_ii = all(seq[-1].get(t, zero) == limit[t] for t in ball)
            if not (ok_i and ok_ii):
                break
            verified = r
        result.verified_radius = verified
        result.checks["matching_on_stable_stars"] = _matching_on(lazy, limit, stab, N, tail)
    far = [t for t, v in limit.items() if any(v) and stab[t] > 0]
    result.support = "Noncompact" if far else "Compact"
    return result


def _matching_on(lazy, limit, stab, N, tail):
    """Matching equations across faces between stabilized tets."""
    from .normal import arc_count

    bad = 0
    ids = set(limit)
    W = lazy.window_blocks(sorted({lazy.locate(t)[0] for t in ids}))
    for t in ids:
        for f in range(4):
            g = W.glued(t, f)
            if g is None or g[0] not in ids:
                continue
            u, perm = g
            for v in range(4):
                if v == f:
                    continue
                if arc_count(limit[t], f, v) != arc_count(limit[u], perm[f], perm[v]):
                    bad += 1
    return bad == 0


# ---------------------------------------------------------- limit ends
@dataclass
class EndComponent:
    kind: str
    ends: int
    planar: bool
    genus: int
    euler_characteristic: int
    compact: bool
    witness: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "kind": self.kind,
            "ends": self.ends,
            "planar": self.planar,
            "genus": self.genus,
            "euler_characteristic": self.euler_characteristic,
            "compact": self.compact,
            "witness": self.witness,
        }


@dataclass
class EndsReport:
    components: list
    windows: tuple
    c2_prime: int | None = None
    disks_checked: int = 0

    def kinds(self):
        return [c.kind for c in self.components]

    def as_dict(self):
        return {
            "components": [c.as_dict() for c in self.components],
            "windows": list(self.windows),
            "C2_prime": self.c2_prime,
            "subdisks_checked": self.disks_checked,
        }


def _restrict(c, tets):
    from .normal import NormalCoordinates

    tets = set(tets)
    return NormalCoordinates.from_dict({t: v for t, v in c.entries if t in tets})


def _component_ends(S, faces, core_tets):
    """Outer pieces of one component that reach the window boundary."""
    cells = S.cell_surface()
    outer = [d for d in faces if S.disks[d].tet not in core_tets]
    uf = UnionFind()
    for d in outer:
        uf.add(d)
    oset = set(outer)
    touches = set()
    for d in outer:
        for key, tf, _ in S.disk_steps[d]:
            sides = S.arcs[key].sides
            if len(sides) == 1:
                touches.add(d)
            for other, _, _ in sides:
                if other in oset:
                    uf.union(d, other)
    return len({uf.find(d) for d in touches}), cells


def classify_limit_ends(lazy, F, *, center=0, core: int = 1, outer=(3, 5), approximants=(), C2_prime=None, disk_radius: int = 2, max_seeds: int = 12, budget: int = 20000) -> EndsReport:
    """Ends, planarity and kind of each component of a limit surface.

    Ends are the pieces outside the core ball that reach the boundary of
    the outer window; the count must agree for both outer radii.  The
    diameter inequality for subdisks is checked on the approximants.
    """
    from .surface import disk_ball, realize_surface

    core_tets = set(lazy.expand_window(center, core).tets)
    per_radius = []
    for r in outer:
        W = lazy.expand_window(center, r)
        if W.num_tets > budget:
            raise BudgetExceeded(f"window of radius {r} has {W.num_tets} tets (budget {budget})")
        S = realize_surface(W, _restrict(F, W.tets))
        comps = []
        cells = S.cell_surface()
        for faces in cells.components():
            rep = cells.analyze_component(faces)
            core_hit = any(S.disks[d].tet in core_tets for d in faces)
            if not core_hit:
                continue
            ends, _ = _component_ends(S, faces, core_tets)
            comps.append((min(repr(S.disks[d].tet) for d in faces if S.disks[d].tet in core_tets), rep, ends))
        per_radius.append(sorted(comps, key=lambda x: x[0]))
    out = []
    first, last = per_radius[0], per_radius[-1]
    for i, (tag, rep, ends) in enumerate(last):
        stable = len(first) == len(last) and first[i][2] == ends
        compact = rep.boundary_components == 0
        genus = (2 - rep.euler_characteristic - rep.boundary_components) // 2 if rep.orientable else None
        planar = genus == 0
        witness = {}
        if compact:
            kind = "Torus" if rep.kind == "Torus" else "Violation"
            if kind == "Violation":
                witness = {"reason": "compact component is not a torus", "kind": rep.kind}
            ends = 0
        elif not stable:
            kind = "Violation"
            witness = {"reason": "end count not stable", "counts": [c[2] for c in first] + [ends]}
        elif not planar:
            kind = "Violation"
            witness = {"reason": "nonplanar", "genus": genus, "faces": len(rep.faces)}
        elif ends != 2:
            kind = "Violation"
            witness = {"reason": f"{ends} ends"}
        else:
            kind = "Annulus"
        out.append(EndComponent(kind, ends, bool(planar), genus if genus is not None else -1, rep.euler_characteristic, compact, witness))
    report = EndsReport(out, (core,) + tuple(outer))
    # diameter inequality on subdisks of the approximants
    worst, checked = None, 0
    for T_n in approximants:
        W = lazy.expand_window(center, outer[0])
        S = realize_surface(W, _restrict(T_n, W.tets))
        seeds = sorted({d.id for d in S.disks if d.tet in core_tets})
        step = max(1, len(seeds) // max_seeds)
        seeds = seeds[::step][:max_seeds]
        for seed in seeds:
            for rad in range(1, disk_radius + 1):
                D = disk_ball(S, seed, rad)
                rep = D.cell_surface().analyze()
                if len(rep) != 1 or rep[0].kind != "Disk" or not D.boundary_arcs():
                    continue
                excess = D.diam() - D.boundary_diam()
                checked += 1
                if worst is None or excess > worst[0]:
                    worst = (excess, seed, rad)
    if worst is not None:
        report.c2_prime = max(worst[0], 0)
        if C2_prime is not None and worst[0] > C2_prime:
            report.components.append(
                EndComponent("Violation", 0, True, 0, 1, True, {"reason": "disk diameter bound", "seed": worst[1], "radius": worst[2], "excess": worst[0]})
            )
    report.disks_checked = checked
    return report
