"""Geometric realization of normal coordinates as a cell complex.

Copies of a disk type are stacked along the edges they cross.  Triangle
copies are numbered outward from their vertex; quad copies are numbered
starting next to the side of the quad that contains vertex 0.  Along a
tet edge ``a -> b`` the crossings therefore read: the ``t[a]`` triangles
at ``a``, then the quads, then the ``t[b]`` triangles at ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cellsurface import CellSurface
from .complex import TriangulationWindow
from .errors import Disconnected, NotNormal, QuadConflict
from .normal import NormalCoordinates, quad_sides, quad_type, slot_count


@dataclass(frozen=True)
class Disk:
    id: int
    tet: object
    kind: str  # "t" or "q"
    type: int
    copy: int


@dataclass
class Arc:
    """A normal arc, keyed by (face class, vertex cut off in rep labels, index)."""

    key: tuple
    ends: tuple  # crossings (ec, j) in canonical order
    sides: list = field(default_factory=list)  # (disk id, (tet, face), direction)


def default_params(n: int):
    """Equally spaced positions in (-1, 1)."""
    return tuple(-1.0 + (2 * j + 1) / n for j in range(n))


def disk_cycle(kind, typ):
    """Boundary of a disk as a cyclic list of ``(slot, next_slot, vertex, face)``.

    Each step is the arc from ``slot`` to ``next_slot``; it lies in ``face``
    and cuts off ``vertex``.
    """
    if kind == "t":
        v = typ
        ws = [w for w in range(4) if w != v]
        steps = []
        for i in range(3):
            w1, w2 = ws[i], ws[(i + 1) % 3]
            face = next(x for x in range(4) if x not in (v, w1, w2))
            steps.append(((v, w1), (v, w2), v, face))
        return steps
    (zero, p), (x, y) = quad_sides(typ)
    ring = [(zero, x), (zero, y), (p, y), (p, x)]
    steps = []
    for i in range(4):
        s1, s2 = ring[i], ring[(i + 1) % 4]
        u = (set(s1) & set(s2)).pop()
        face = next(q for q in range(4) if q not in set(s1) | set(s2))
        steps.append((s1, s2, u, face))
    return steps


class RealizedSurface:
    """Disks, arcs and edge crossings of a normal surface on a window."""

    def __init__(self, T: TriangulationWindow, c: NormalCoordinates, params=None, *, name=""):
        self.window = T
        self.coords = c
        self.name = name
        self.disks = []
        self.counts = {}
        self.slot_disks = {}  # (tet, a, b, index from a) -> disk id
        self.disk_steps = {}  # disk id -> list of (arc key, (tet, face), direction)
        self.disk_crossings = {}
        self.arcs = {}
        self._build(params)

    # ------------------------------------------------------------- build
    def _build(self, params):
        T = self.window
        d = self.coords.as_dict()
        for t in T.tets:
            vec = d.get(t)
            if vec is None:
                continue
            try:
                quad_type(vec)
            except QuadConflict as exc:
                raise QuadConflict(f"tet {t}: {exc}") from None
            for a in range(4):
                for b in range(a + 1, 4):
                    n = slot_count(vec, a, b)
                    ec = T.edge_class(t, a, b)[0]
                    old = self.counts.setdefault(ec, n)
                    if old != n:
                        raise NotNormal(f"edge class {ec} crossed {old} and {n} times; matching fails")
        for ec in list(self.counts):
            if self.counts[ec] == 0:
                del self.counts[ec]
        self.params = {}
        for ec, n in sorted(self.counts.items()):
            given = None if params is None else params.get(ec)
            if given is None:
                self.params[ec] = default_params(n)
            else:
                if len(given) != n:
                    raise ValueError(f"edge class {ec} needs {n} positions, got {len(given)}")
                self.params[ec] = tuple(float(x) for x in given)
        for t in T.tets:
            vec = d.get(t)
            if vec is None:
                continue
            for v in range(4):
                for cp in range(vec[v]):
                    self._add_disk(t, vec, "t", v, cp)
            k = quad_type(vec)
            if k is not None:
                for cp in range(vec[4 + k]):
                    self._add_disk(t, vec, "q", k, cp)
        for arc in self.arcs.values():
            t, f = arc.sides[0][1]
            interior = T.glued(t, f) is not None
            if interior and len(arc.sides) != 2:
                raise NotNormal(f"arc {arc.key} is unmatched across an interior face")

    def _slot_index(self, vec, kind, typ, cp, a, b):
        """Index of a disk's crossing on slot a->b, counted from a."""
        if kind == "t":
            return cp if typ == a else slot_count(vec, a, b) - 1 - cp
        side0, _ = quad_sides(typ)
        if a in side0:
            return vec[a] + cp
        return slot_count(vec, a, b) - 1 - (vec[b] + cp)

    def _crossing(self, t, vec, kind, typ, cp, a, b):
        ec, s = self.window.edge_class(t, a, b)
        idx = self._slot_index(vec, kind, typ, cp, a, b)
        n = self.counts[ec]
        return ec, (idx if s > 0 else n - 1 - idx)

    def _add_disk(self, t, vec, kind, typ, cp):
        T = self.window
        disk = Disk(len(self.disks), t, kind, typ, cp)
        self.disks.append(disk)
        steps, crossings = [], []
        for s1, s2, u, face in disk_cycle(kind, typ):
            c1 = self._crossing(t, vec, kind, typ, cp, *s1)
            c2 = self._crossing(t, vec, kind, typ, cp, *s2)
            crossings.append(c1)
            a, b = sorted(s1)
            self.slot_disks[(t, a, b, self._slot_index(vec, kind, typ, cp, a, b))] = disk.id
            w1 = s1[0] if s1[1] == u else s1[1]
            w2 = s2[0] if s2[1] == u else s2[1]
            fmap = T.face_vertex_map(t, face)
            r = self._slot_index(vec, kind, typ, cp, u, w1)
            key = (T.face_class(t, face), fmap[u], r)
            direction = 1 if fmap[w1] < fmap[w2] else -1
            ends = (c1, c2) if direction > 0 else (c2, c1)
            arc = self.arcs.get(key)
            if arc is None:
                arc = self.arcs[key] = Arc(key, ends)
            elif arc.ends != ends:
                raise NotNormal(f"arc {key} has inconsistent endpoints {arc.ends} vs {ends}")
            arc.sides.append((disk.id, (t, face), direction))
            steps.append((key, (t, face), direction))
        self.disk_steps[disk.id] = steps
        self.disk_crossings[disk.id] = crossings

    # ------------------------------------------------------------ queries
    @property
    def weight(self) -> int:
        return sum(self.counts.values())

    def crossing_param(self, crossing):
        ec, j = crossing
        return self.params[ec][j]

    def with_params(self, params) -> "RealizedSurface":
        merged = dict(self.params)
        merged.update(params)
        return RealizedSurface(self.window, self.coords, merged, name=self.name)

    def cell_surface(self) -> CellSurface:
        faces = {d.id: [(key, direction) for key, _, direction in self.disk_steps[d.id]] for d in self.disks}
        edges = {key: arc.ends for key, arc in self.arcs.items()}
        return CellSurface(faces, edges)

    def arc_side(self, key, tet_face):
        for did, tf, direction in self.arcs[key].sides:
            if tf == tet_face:
                return did, direction
        raise KeyError((key, tet_face))

    def disk_at(self, t, a, b, idx):
        """Disk of tet ``t`` crossing slot a->b at index ``idx`` counted from a."""
        if a > b:
            vec = self.coords.vector(t)
            a, b, idx = b, a, slot_count(vec, a, b) - 1 - idx
        return self.slot_disks[(t, a, b, idx)]

    def tets(self):
        return sorted({d.tet for d in self.disks}, key=lambda t: (0, t) if isinstance(t, int) else (1, str(t)))

    def __repr__(self):
        return f"RealizedSurface({self.name or 'unnamed'}, disks={len(self.disks)}, weight={self.weight})"


def realize_surface(T: TriangulationWindow, c: NormalCoordinates, params=None, *, name="") -> RealizedSurface:
    """Build disks and crossings; ``params`` optionally fixes positions per edge class."""
    return RealizedSurface(T, c, params, name=name)


@dataclass
class SurfaceReport:
    components: list
    weight: int

    @property
    def euler_characteristic(self):
        return sum(c.euler_characteristic for c in self.components)

    def kinds(self):
        return [c.kind for c in self.components]

    def as_dict(self):
        return {"weight": self.weight, "components": [c.as_dict() for c in self.components]}


def analyze_surface(S: RealizedSurface) -> SurfaceReport:
    """Components, Euler characteristics, orientability and kind."""
    return SurfaceReport(S.cell_surface().analyze(), S.weight)


def component_coordinates(S: RealizedSurface, faces) -> NormalCoordinates:
    """Normal coordinates of the disks listed in ``faces`` (disk ids)."""
    d = {}
    for did in faces:
        disk = S.disks[did]
        vec = list(d.get(disk.tet, (0,) * 7))
        vec[disk.type if disk.kind == "t" else 4 + disk.type] += 1
        d[disk.tet] = tuple(vec)
    return NormalCoordinates.from_dict(d)


def connected_components(S: RealizedSurface):
    """Normal coordinates of each connected component."""
    return [component_coordinates(S, comp) for comp in S.cell_surface().components()]


def orientation_double_cover(S: RealizedSurface) -> CellSurface:
    """Orientation cover of the realized cell complex (a torus over a Klein bottle)."""
    return S.cell_surface().orientation_cover()


def support_diameter(T: TriangulationWindow, tets) -> int:
    """Largest quasimetric distance between interior points of the given tets."""
    tets = sorted(set(tets), key=lambda t: (0, t) if isinstance(t, int) else (1, str(t)))
    best = 0
    for i, t in enumerate(tets):
        dist = T.tet_distances([t])
        for u in tets[i + 1 :]:
            if u not in dist:
                raise Disconnected(f"tets {t} and {u} are not connected in the window")
            best = max(best, dist[u])
    return best


def diam(S: RealizedSurface) -> int:
    return support_diameter(S.window, S.tets())


@dataclass
class NormalSubsurface:
    """A union of disks of a realized surface.

    Its boundary is the set of arcs with exactly one side in the region,
    together with arcs on the window boundary.
    """

    parent: RealizedSurface
    region: frozenset

    def boundary_arcs(self):
        out = []
        for key, arc in sorted(self.parent.arcs.items()):
            inside = [did in self.region for did, _, _ in arc.sides]
            if any(inside) and (not all(inside) or len(inside) == 1):
                out.append(key)
        return out

    def tets(self):
        return sorted({self.parent.disks[d].tet for d in self.region}, key=repr)

    def boundary_tets(self):
        out = set()
        for key in self.boundary_arcs():
            for did, _, _ in self.parent.arcs[key].sides:
                if did in self.region:
                    out.add(self.parent.disks[did].tet)
        return sorted(out, key=repr)

    def diam(self) -> int:
        return support_diameter(self.parent.window, self.tets())

    def boundary_diam(self) -> int:
        return support_diameter(self.parent.window, self.boundary_tets())

    def cell_surface(self) -> CellSurface:
        faces = {d: [(k, dr) for k, _, dr in self.parent.disk_steps[d]] for d in self.region}
        keys = {k for d in self.region for k, _, _ in self.parent.disk_steps[d]}
        return CellSurface(faces, {k: self.parent.arcs[k].ends for k in keys})


def disk_ball(S: RealizedSurface, seed: int, radius: int) -> NormalSubsurface:
    """Disks within ``radius`` dual steps of ``seed``."""
    dist = {seed: 0}
    frontier = [seed]
    for r in range(radius):
        nxt = []
        for d in frontier:
            for key, _, _ in S.disk_steps[d]:
                for other, _, _ in S.arcs[key].sides:
                    if other not in dist:
                        dist[other] = r + 1
                        nxt.append(other)
        frontier = nxt
    return NormalSubsurface(S, frozenset(dist))
