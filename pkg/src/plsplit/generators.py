"""Fixture complexes and example families.

Products ``B x I`` over an ordered 2-dimensional base are triangulated by
the staircase prism: over a base triangle with ordered corners a < b < c,

    T1 = [a0, b0, c0, c1],  T2 = [a0, b0, b1, c1],  T3 = [a0, a1, b1, c1].

Side squares over an ordered edge x < y are split as [x0, y0, y1] and
[x0, x1, y1] no matter which triangle they belong to, so neighbouring
prisms always glue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .complex import PeriodicSpec, TriangulationWindow, build_complex, perm_inverse
from .errors import InvalidGluing

PRISM = (
    ((0, 0), (1, 0), (2, 0), (2, 1)),
    ((0, 0), (1, 0), (1, 1), (2, 1)),
    ((0, 0), (0, 1), (1, 1), (2, 1)),
)


def _table_from_pairs(pairs, ntets):
    table = {t: [None] * 4 for t in range(ntets)}
    for (a, b), p in pairs:
        table[a[0]][a[1]] = (b[0], tuple(p))
        table[b[0]][b[1]] = (a[0], perm_inverse(tuple(p)))
    return table


def single_tet() -> TriangulationWindow:
    return build_complex({0: [None] * 4}, name="single-tet")


def double_s3() -> TriangulationWindow:
    """Two tetrahedra glued along their boundaries by the identity (4 vertices)."""
    idp = (0, 1, 2, 3)
    return build_complex({0: [(1, idp)] * 4, 1: [(0, idp)] * 4}, name="double-s3")


def one_vertex_s3() -> TriangulationWindow:
    """A two-tetrahedron, one-vertex triangulation of the 3-sphere."""
    pairs = [
        (((0, 0), (0, 1)), (1, 0, 2, 3)),
        (((0, 2), (1, 0)), (1, 2, 0, 3)),
        (((0, 3), (1, 1)), (0, 2, 3, 1)),
        (((1, 2), (1, 3)), (0, 1, 3, 2)),
    ]
    return build_complex(_table_from_pairs(pairs, 2), name="s3-1v")


def three_tet_closed() -> TriangulationWindow:
    """A closed three-tetrahedron pseudo-manifold (a cyclic chain capped on itself)."""
    idp = (0, 1, 2, 3)
    swap = (1, 0, 2, 3)
    pairs = [
        (((0, 3), (1, 3)), idp),
        (((1, 2), (2, 2)), idp),
        (((2, 3), (0, 2)), (0, 1, 3, 2)),
        (((0, 0), (0, 1)), swap),
        (((1, 0), (2, 1)), swap),
        (((1, 1), (2, 0)), swap),
    ]
    return build_complex(_table_from_pairs(pairs, 3), name="three-tet")


def tet_chain(n: int) -> TriangulationWindow:
    """``n`` tetrahedra glued in a line through faces 3 -> 0."""
    table = {t: [None] * 4 for t in range(n)}
    p = (3, 1, 2, 0)
    for t in range(n - 1):
        table[t][3] = (t + 1, p)
        table[t + 1][0] = (t, perm_inverse(p))
    return build_complex(table, name=f"chain{n}")


# ------------------------------------------------------------- bases
@dataclass
class Base:
    """An ordered 2-complex: triangles with corner labels and edge gluings.

    ``triangles[i]`` lists three vertex labels in increasing order
    (a, b, c).  ``edges[i]`` gives the edge ids of (ab, ac, bc); two
    triangle sides with the same id are glued preserving order.
    """

    triangles: list
    edges: list
    coords: dict = field(default_factory=dict)
    name: str = "base"
    cells: dict = field(default_factory=dict)

    def sides(self):
        out = {}
        for i, es in enumerate(self.edges):
            for s, e in enumerate(es):
                out.setdefault(e, []).append((i, s))
        for e, occ in out.items():
            if len(occ) > 2:
                raise InvalidGluing(f"base edge {e} used {len(occ)} times")
        return out

    def euler_characteristic(self):
        verts = set()
        for tri in self.triangles:
            verts.update(tri)
        return len(verts) - len(self.sides()) + len(self.triangles)


SIDE_CORNERS = ((0, 1), (0, 2), (1, 2))


def torus_base_1v() -> Base:
    """The one-vertex torus: two triangles, edges x (horizontal), y (vertical), d (diagonal)."""
    return Base(triangles=[(0, 0, 0), (0, 0, 0)], edges=[("x", "d", "y"), ("y", "d", "x")], name="T2-1v")


def grid_torus(n: int, tag: str = "") -> Base:
    """An n x n grid torus, each square cut along its main diagonal.

    Vertex ``(i, j)`` sits at (i, j) mod n; ordering is lexicographic on
    (i, j) which is compatible along every edge of the square grid.
    """
    if n < 3:
        raise ValueError("grid tori need n >= 3 to avoid doubled edges")
    tris, edges, coords, cells = [], [], {}, {}

    def vid(i, j):
        return (tag, i % n, j % n)

    def eid(p, q):
        return tuple(sorted((p, q)))

    for i in range(n):
        for j in range(n):
            # lower: (i,j),(i+1,j),(i+1,j+1); upper: (i,j),(i,j+1),(i+1,j+1)
            for corners in (((i, j), (i + 1, j), (i + 1, j + 1)), ((i, j), (i, j + 1), (i + 1, j + 1))):
                ids = [vid(*c) for c in corners]
                order = sorted(range(3), key=lambda k: ids[k])
                ids = [ids[k] for k in order]
                pts = [corners[k] for k in order]
                tris.append(tuple(ids))
                edges.append((eid(ids[0], ids[1]), eid(ids[0], ids[2]), eid(ids[1], ids[2])))
                coords[len(tris) - 1] = tuple(pts)
                cells[(tag, i, j, len(tris) % 2 == 0)] = len(tris) - 1
    return Base(tris, edges, coords, name=f"grid{n}{tag}", cells=cells)


# ------------------------------------------------------------ prism products
@dataclass(frozen=True)
class Prism:
    """One base triangle times one fiber edge.

    ``edges`` are the ids of the base sides (ab, ac, bc); ``fiber`` is the
    fiber edge id with endpoints ``lo < hi``.
    """

    key: object
    tri: object
    edges: tuple
    fiber: object
    lo: object
    hi: object


# faces of (T1, T2, T3) on side squares: side index -> ((tet, face) lower, (tet, face) upper)
_SIDE_FACES = {0: ((1, 3), (2, 3)), 1: ((0, 1), (2, 2)), 2: ((0, 0), (1, 0))}


def _canonical_face(k, f):
    """(corner, level) labels of the face of prism tet ``k`` opposite ``f``."""
    verts = PRISM[k]
    return [verts[i] for i in range(4) if i != f]


def prism_table(prisms, *, swapped=()):
    """Gluing table of the staircase triangulation of a list of prisms.

    Tet ids are ``(prism.key, k)`` for k = 0, 1, 2.  Side squares whose
    base edge id is in ``swapped`` are matched against squares with the
    roles of base and fiber exchanged, which lets a product over a disk
    be glued along its side to a product with the disk boundary as fiber.
    Also returns each tet's vertex list as (prism key, corner, level).
    """
    swapped = set(swapped)
    table = {}
    verts = {}
    sigs = {}

    def put(sig, tet, face, order):
        sigs.setdefault(sig, []).append((tet, face, order))

    for pr in prisms:
        ids = [(pr.key, k) for k in range(3)]
        for k, tid in enumerate(ids):
            table[tid] = [None] * 4
            verts[tid] = [(pr.key, c, lv) for c, lv in PRISM[k]]
        # internal faces: T1 opp c0 <-> T2 opp b1, T2 opp b0 <-> T3 opp a1
        for (ka, fa), (kb, fb) in (((0, 2), (1, 2)), ((1, 1), (2, 1))):
            la, lb = _canonical_face(ka, fa), _canonical_face(kb, fb)
            perm = [0] * 4
            for i, v in enumerate(PRISM[ka]):
                perm[i] = PRISM[kb].index(v) if v in lb else fb
            table[ids[ka]][fa] = (ids[kb], tuple(perm))
            table[ids[kb]][fb] = (ids[ka], _inv(tuple(perm)))
        # horizontal faces
        put(("h", pr.tri, pr.lo), ids[0], 3, [0, 1, 2])
        put(("h", pr.tri, pr.hi), ids[2], 0, [1, 2, 3])
        # side squares
        for s, e in enumerate(pr.edges):
            for pattern, (k, f) in enumerate(_SIDE_FACES[s]):
                order = [i for i in range(4) if i != f]
                if e in swapped:
                    sig = ("s", pr.fiber, e, 1 - pattern)
                else:
                    sig = ("s", e, pr.fiber, pattern)
                put(sig, ids[k], f, order)
    for sig, occ in sigs.items():
        if len(occ) == 1:
            continue
        if len(occ) != 2:
            raise InvalidGluing(f"prism face {sig} shared by {len(occ)} tets")
        (ta, fa, oa), (tb, fb, ob) = occ
        perm = [0] * 4
        for x, y in zip(oa, ob):
            perm[x] = y
        perm[fa] = fb
        table[ta][fa] = (tb, tuple(perm))
        table[tb][fb] = (ta, _inv(tuple(perm)))
    return table, verts


def _inv(p):
    return perm_inverse(p)


def relabel(table, verts=None):
    """Replace arbitrary tet ids by 0..n-1 in sorted order."""
    keys = sorted(table, key=repr)
    idx = {k: i for i, k in enumerate(keys)}
    out = {idx[k]: [None if g is None else (idx[g[0]], g[1]) for g in table[k]] for k in keys}
    vout = {idx[k]: verts[k] for k in keys} if verts is not None else None
    return out, vout, idx


def circle_fiber(m: int):
    """Fiber edges of a circle cut into ``m`` layers, as (id, lo, hi)."""
    if m < 1:
        raise ValueError("need at least one layer")
    return [(("f", i), ("fv", i), ("fv", (i + 1) % m)) for i in range(m)]


def interval_fiber(m: int):
    return [(("f", i), ("fv", i), ("fv", i + 1)) for i in range(m)]


def product_prisms(base: Base, fiber):
    out = []
    for fid, lo, hi in fiber:
        for i, es in enumerate(base.edges):
            out.append(Prism((base.name, i, fid), (base.name, i), tuple(es), fid, lo, hi))
    return out


@dataclass
class ProductComplex:
    """A product window together with the data needed to build vertical surfaces."""

    window: TriangulationWindow
    base: Base
    fiber: list
    index: dict
    verts: dict

    def tet(self, tri, fiber_id, k):
        return self.index[((self.base.name, tri, fiber_id), k)]


def product(base: Base, fiber, *, name: str = "") -> ProductComplex:
    table, verts = prism_table(product_prisms(base, fiber))
    table, vout, idx = relabel(table, verts)
    win = build_complex(table, name=name or f"{base.name}x{len(fiber)}")
    return ProductComplex(win, base, list(fiber), idx, vout)


def periodic_spec(block_prisms, *, swapped_of_block=None, name="periodic") -> PeriodicSpec:
    """Turn a block-indexed prism family into a :class:`PeriodicSpec`.

    ``block_prisms(k)`` must return the prisms of block ``k`` with keys of
    the form ``(k, local)``; ids of shared edges and vertices must be
    written in terms of ``k`` so neighbouring blocks glue.  Gluings may
    only reach the adjacent blocks.
    """
    prisms, swapped = [], set()
    for k in (-1, 0, 1):
        prisms.extend(block_prisms(k))
        if swapped_of_block is not None:
            swapped.update(swapped_of_block(k))
    table, _ = prism_table(prisms, swapped=swapped)
    locals_ = sorted({(key[1], kk) for (key, kk) in table if key[0] == 0}, key=repr)
    lidx = {lk: i for i, lk in enumerate(locals_)}
    block = {}
    for (key, kk), faces in table.items():
        if key[0] != 0:
            continue
        entry = []
        for g in faces:
            if g is None:
                entry.append(None)
                continue
            (pkey, pk), perm = g
            shift = pkey[0]
            entry.append((lidx[(pkey[1], pk)], perm, shift) if shift else (lidx[(pkey[1], pk)], perm))
        block[lidx[(key[1], kk)]] = entry
    spec = PeriodicSpec(block=block, bound=10**9, reach=1, name=name)
    spec.bound = _measured_bound(spec)
    spec.local_index = lidx
    return spec


def _measured_bound(spec) -> int:
    from .complex import LazyComplex

    return LazyComplex(spec).geometry_audit(radius=1)["max_vertex_degree"]


def torus_line_spec() -> PeriodicSpec:
    """T^2 x R, one layer of the one-vertex torus per block (6 tets)."""
    base = torus_base_1v()

    def block(k):
        return [
            Prism((k, i), ("T", i), tuple(es), ("f", k), ("fv", k), ("fv", k + 1))
            for i, es in enumerate(base.edges)
        ]

    return periodic_spec(block, name="T2xR")


def product_line_spec(base: Base, *, name: str = "") -> PeriodicSpec:
    """``base x R`` with one fiber layer per block."""

    def block(k):
        return [
            Prism((k, i), (base.name, i), tuple(es), ("f", k), ("fv", k), ("fv", k + 1))
            for i, es in enumerate(base.edges)
        ]

    spec = periodic_spec(block, name=name or f"{base.name}xR")
    spec.base = base
    return spec


def genus2_base(n: int = 3) -> Base:
    """Two n x n grid tori with the lower triangle of square (0, 0) removed
    from each, glued along the resulting boundary circles."""
    A, B = grid_torus(n, "A"), grid_torus(n, "B")
    ra, rb = A.cells[("A", 0, 0, False)], B.cells[("B", 0, 0, False)]
    ident = dict(zip(B.triangles[rb], A.triangles[ra]))
    tris, edges, coords, cells = [], [], {}, {}
    for src, skip, ren in ((A, ra, {}), (B, rb, ident)):
        back = {v: k for k, v in src.cells.items()}
        for i, tri in enumerate(src.triangles):
            if i == skip:
                continue
            ids = [ren.get(v, v) for v in tri]
            order = sorted(range(3), key=lambda k: ids[k])
            ids = [ids[k] for k in order]
            tris.append(tuple(ids))
            edges.append(tuple(tuple(sorted((ids[a], ids[b]))) for a, b in SIDE_CORNERS))
            coords[len(tris) - 1] = tuple(src.coords[i][k] for k in order)
            cells[back[i]] = len(tris) - 1
    base = Base(tris, edges, coords, name=f"genus2-{n}", cells=cells)
    base.sides()
    return base


# ---------------------------------------------------------- base curves
@dataclass
class BaseCurve:
    """A closed normal curve in a base, as arcs ``(triangle, corner cut off)``.

    ``crossings`` lists, for each arc, its two endpoints as
    ``(base edge, fraction from the lower vertex)``.
    """

    arcs: list
    crossings: list
    name: str = ""


def straight_curve(base: Base, n: int, direction, offset, *, tag: str = "A", name: str = "") -> BaseCurve:
    """The closed straight line ``offset + t * direction`` on a grid torus copy.

    The line must miss vertices and any removed triangle.
    """
    p, q = direction
    cx, cy = offset
    ts = set()
    for coef, c0 in ((p, cx), (q, cy), (q - p, cy - cx)):
        if coef == 0:
            continue
        lo, hi = sorted((c0, c0 + coef * n))
        for k in range(math.floor(lo), math.ceil(hi) + 1):
            t = (k - c0) / coef
            if 0 <= t < n:
                ts.add(round(t, 12))
    ts = sorted(ts)
    if len(ts) < 2:
        raise ValueError("line does not cross the grid")
    arcs, crossings = [], []
    for a, t0 in enumerate(ts):
        t1 = ts[a + 1] if a + 1 < len(ts) else ts[0] + n
        tm = (t0 + t1) / 2
        mx, my = cx + tm * p, cy + tm * q
        i, j = math.floor(mx), math.floor(my)
        upper = (my - j) > (mx - i)
        key = (tag, i % n, j % n, upper)
        if key not in base.cells:
            raise ValueError(f"line passes through removed triangle {key}")
        tri = base.cells[key]
        pts = base.coords[tri]
        sx, sy = i - i % n, j - j % n
        ends = []
        for t in (t0, t1):
            x, y = cx + t * p - sx, cy + t * q - sy
            ends.append(_locate_on_side(pts, (x, y)))
        (s1, f1), (s2, f2) = ends
        if s1 == s2:
            raise ValueError("degenerate arc")
        corner = (set(SIDE_CORNERS[s1]) & set(SIDE_CORNERS[s2])).pop()
        arcs.append((tri, corner))
        crossings.append(((base.edges[tri][s1], f1), (base.edges[tri][s2], f2)))
    return BaseCurve(arcs, crossings, name or f"line{p},{q}")


def _locate_on_side(pts, pt):
    for s, (u, v) in enumerate(SIDE_CORNERS):
        (x0, y0), (x1, y1) = pts[u], pts[v]
        cross = (x1 - x0) * (pt[1] - y0) - (y1 - y0) * (pt[0] - x0)
        if abs(cross) < 1e-9:
            dx, dy = x1 - x0, y1 - y0
            lam = ((pt[0] - x0) * dx + (pt[1] - y0) * dy) / (dx * dx + dy * dy)
            if -1e-12 < lam < 1 + 1e-12:
                if lam < 1e-9 or lam > 1 - 1e-9:
                    raise ValueError("line passes through a vertex")
                return s, round(lam, 10)
    raise ValueError(f"point {pt} is not on the triangle {pts}")


# ---------------------------------------------------- product surfaces
def _split_disk(corners, inside):
    """Disk type of a tet separating the vertices in ``inside``: (index, count) or None."""
    ins = [i for i in range(4) if inside(corners[i])]
    if len(ins) in (0, 4):
        return None
    if len(ins) == 1:
        return ins[0]
    if len(ins) == 3:
        return next(i for i in range(4) if i not in ins)
    from .normal import quad_of_pair

    return 4 + quad_of_pair(*ins)


def _add(coords, t, slot):
    vec = list(coords.get(t, (0,) * 7))
    vec[slot] += 1
    coords[t] = tuple(vec)


def vertical_surface(P: ProductComplex, curve: BaseCurve, *, name: str = ""):
    """``curve x fiber`` as normal coordinates, with crossing parameters.

    Every edge of the staircase projects to a base edge or a base vertex;
    an edge over a base edge crosses the surface at the same fraction as
    the base curve does.  Parameters are logits of those fractions in the
    direction of each edge class.
    """
    from .normal import NormalCoordinates

    T = P.window
    coords, params = {}, {}
    for (tri, corner), ends in zip(curve.arcs, curve.crossings):
        side_frac = {}
        for s in range(3):
            for e, lam in ends:
                if P.base.edges[tri][s] == e and s not in side_frac and _side_matches(P.base, tri, s, e):
                    side_frac[s] = lam
                    break
        for fid, _, _ in P.fiber:
            for k in range(3):
                t = P.tet(tri, fid, k)
                cs = [c for c, _ in PRISM[k]]
                slot = _split_disk(cs, lambda c: c == corner)
                _add(coords, t, slot)
                for a in range(4):
                    for b in range(a + 1, 4):
                        ca, cb = cs[a], cs[b]
                        if ca == cb:
                            continue
                        s = SIDE_CORNERS.index((ca, cb))
                        if s not in side_frac:
                            continue
                        ec, sign = T.edge_class(t, a, b)
                        params.setdefault(ec, {})[(tri, s, fid, k, a, b)] = sign * _logit(side_frac[s])
    ordered = {ec: tuple(sorted(set(v.values()))) for ec, v in params.items()}
    return NormalCoordinates.from_dict(coords), ordered


def _side_matches(base, tri, s, e):
    return base.edges[tri][s] == e


def _logit(lam):
    return math.log(lam / (1 - lam))


def horizontal_surface(P: ProductComplex, fiber_id):
    """The surface separating the two levels of one fiber layer."""
    from .normal import NormalCoordinates

    coords = {}
    for tri in range(len(P.base.triangles)):
        for k in range(3):
            slot = _split_disk([lv for _, lv in PRISM[k]], lambda lv: lv == 0)
            _add(coords, P.tet(tri, fiber_id, k), slot)
    return NormalCoordinates.from_dict(coords)


def fiber_walk(S, P: ProductComplex, tri, corner):
    """Closed dual walk on a vertical surface ``S`` along one fiber.

    Starts at the outermost disk over arc ``(tri, corner)`` and climbs
    through every layer; returns ``[(arc key, disk exited), ...]``.
    """
    walk = []
    disk = None
    for fid, _, _ in P.fiber:
        for k in range(3):
            t = P.tet(tri, fid, k)
            cands = [d for d in S.disks if d.tet == t]
            if disk is None:
                disk = cands[0]
            # leave through the internal face (k -> k + 1) or the top face
            face = (2, 1, 0)[k]
            for key, tf, _ in S.disk_steps[disk.id]:
                if tf == (t, face):
                    nxt = [did for did, f2, _ in S.arcs[key].sides if did != disk.id]
                    walk.append((key, disk.id))
                    disk = S.disks[nxt[0]]
                    break
            else:
                raise ValueError(f"disk {disk.id} has no arc on face {face} of tet {t}")
    return walk


# ------------------------------------------------------- periodic annulus
def _link_coordinates(lazy, spec, inside, blocks):
    """Boundary of a neighbourhood of the full subcomplex on vertices ``inside``.

    ``inside(label, level)`` decides membership of the vertex with base
    label ``label`` at fiber level ``level``.
    """
    from .normal import NormalCoordinates

    base = spec.base
    coords = {}
    for k in blocks:
        for i, tri in enumerate(base.triangles):
            for kk in range(3):
                verts = [(tri[c], k + lv) for c, lv in PRISM[kk]]
                slot = _split_disk(verts, lambda v: inside(*v))
                if slot is not None:
                    _add(coords, lazy.tet_id(k, spec.local_index[(i, kk)]), slot)
    return NormalCoordinates.from_dict(coords)


@dataclass
class PeriodicAnnulusFixture:
    """Stretched tori in (grid torus) x R converging to a pair of annuli.

    ``tori[n]`` bounds a neighbourhood of (column circle) x [-n, n]; as n
    grows the tori agree on every fixed ball with two vertical annuli.
    ``seeded[n]`` adds two row circles to that subcomplex, so its limit
    is a single component of genus one.
    """

    lazy: object
    spec: PeriodicSpec
    tori: list
    seeded: list

    def torus(self, n):
        return self.tori[n]


def periodic_annulus(count: int = 5, *, n: int = 3) -> PeriodicAnnulusFixture:
    from .complex import LazyComplex

    spec = product_line_spec(grid_torus(n, "G"), name=f"grid{n}xR")
    lazy = LazyComplex(spec)

    def column(m, extra=False):
        def inside(label, level):
            if label[1] == 0 and -m <= level <= m:
                return True
            # two horizontal rows add two tubes between the sides, hence a handle
            return extra and label[2] == 0 and level in (0, 2)

        return inside

    tori = [_link_coordinates(lazy, spec, column(m), range(-m - 1, m + 1)) for m in range(count)]
    seeded = [_link_coordinates(lazy, spec, column(m, True), range(-m - 1, m + 1)) for m in range(count)]
    return PeriodicAnnulusFixture(lazy, spec, tori, seeded)


# ------------------------------------------------------ motivating example
_FIBER = ("f", 0)


def _sv(c, r):
    return ("v", c, r)


def _strip_triangles(k):
    """Base triangles of block ``k``: a 4-row strip of width 2 with one tube.

    Two triangles are removed and their boundaries are joined by a tube,
    so each block adds one handle.
    """
    tris = []
    for c in (2 * k, 2 * k + 1):
        for b in range(3):
            if not (c == 2 * k and b == 0):
                tris.append((_sv(c, b), _sv(c, b + 1), _sv(c + 1, b + 1)))
            if not (c == 2 * k and b == 2):
                tris.append((_sv(c, b), _sv(c + 1, b), _sv(c + 1, b + 1)))
    h1 = [_sv(2 * k, 0), _sv(2 * k, 1), _sv(2 * k + 1, 1)]
    h2 = [_sv(2 * k + 1, 2), _sv(2 * k + 1, 3), _sv(2 * k, 2)]
    for i in range(3):
        x1, y1, x2, y2 = h1[i], h1[(i + 1) % 3], h2[i], h2[(i + 1) % 3]
        if i == 0:
            tris += [(x1, y1, y2), (x1, x2, y2)]
        else:
            tris += [(x1, y1, x2), (y1, x2, y2)]
    return [tuple(sorted(t)) for t in tris]


def _edge_ids(tri):
    return tuple(tuple(sorted((tri[a], tri[b]))) for a, b in SIDE_CORNERS)


@dataclass
class MotivatingExample:
    """Two solid cylinders glued to (strip with handles) x S^1 along annuli.

    ``region[local]`` names the piece of each local tet: ``X0`` and
    ``X1`` are the caps (cone disk x R), ``Y`` the circle bundle.
    ``corners[local](k)`` lists the vertex labels of that tet in block k.
    """

    lazy: object
    spec: PeriodicSpec
    region: dict
    corners: dict
    labels: dict = field(default_factory=lambda: {"X0": "Atoroidal", "Y": "Seifert", "X1": "Atoroidal"})

    def region_of(self, tet):
        return self.region[self.lazy.locate(tet)[1]]

    def link(self, inside, blocks):
        """Normal coordinates of the link of the vertices satisfying ``inside``."""
        from .normal import NormalCoordinates

        coords = {}
        for k in blocks:
            for lt, fn in self.corners.items():
                slot = _split_disk(fn(k), inside)
                if slot is not None:
                    _add(coords, self.lazy.tet_id(k, lt), slot)
        return NormalCoordinates.from_dict(coords)

    def annulus(self, side: int, blocks):
        """The annulus member parallel to the boundary of cap ``side`` (0 or 1)."""
        row = 0 if side == 0 else 3
        cone = f"cone{side}"
        return self.link(lambda v: v[0] == cone or (v[0] == "v" and v[2] == row), blocks)

    def tube_torus(self, k: int):
        """Vertical torus around the tube of block ``k`` (link of the hole boundary x S^1)."""
        ring = {_sv(2 * k, 0), _sv(2 * k, 1), _sv(2 * k + 1, 1)}
        return self.link(lambda v: v in ring, range(k - 1, k + 2))


def motivating_example() -> MotivatingExample:
    from .complex import LazyComplex

    def cap_prisms(k, side):
        row = 0 if side == 0 else 3
        out = []
        for j, c in enumerate((2 * k, 2 * k + 1)):
            lo, hi = _sv(c, row), _sv(c + 1, row)
            out.append(Prism((k, (f"X{side}", j)), (f"X{side}",), (_FIBER, ("g", side), ("g", side)), (lo, hi), lo, hi))
        return out

    def block(k):
        prisms = [
            Prism((k, ("Y", i)), ("Y", tri), _edge_ids(tri), _FIBER, ("fv", 0), ("fv", 0))
            for i, tri in enumerate(_strip_triangles(k))
        ]
        return prisms + cap_prisms(k, 0) + cap_prisms(k, 1)

    spec = periodic_spec(block, swapped_of_block=lambda k: {_FIBER}, name="motivating")
    region, corners = {}, {}
    tris0 = _strip_triangles(0)
    for (lkey, kk), lt in spec.local_index.items():
        region[lt] = "Y" if lkey[0] == "Y" else lkey[0]
        corners[lt] = _corner_fn(lkey, kk, tris0)
    return MotivatingExample(LazyComplex(spec), spec, region, corners)


def _shift(label, k):
    return ("v", label[1] + 2 * k, label[2])


def _corner_fn(lkey, kk, tris0):
    if lkey[0] == "Y":
        tri = tris0[lkey[1]]
        return lambda k: [_shift(tri[c], k) for c, _ in PRISM[kk]]
    side, j = int(lkey[0][1]), lkey[1]
    row = 0 if side == 0 else 3

    def fn(k):
        c = 2 * k + j
        out = []
        for corner, lv in PRISM[kk]:
            level = _sv(c + lv, row)
            # corners a and b of the cone disk are the fiber vertex
            out.append(level if corner < 2 else (f"cone{side}", c + lv))
        return out

    return fn
