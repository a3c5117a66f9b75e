"""Tetrahedral complexes: face gluings, skeleta, lazy periodic expansion,
covering size and the combinatorial quasimetric.

Conventions
-----------
A gluing of face ``f`` of tetrahedron ``t`` is a pair ``(partner, perm)``:
vertex ``v`` of ``t`` is sent to vertex ``perm[v]`` of ``partner`` and face
``f`` (the face opposite vertex ``f``) lands on face ``perm[f]``.
Faces without a partner are boundary (``None``).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable

from ._intlin import UnionFind, rank_mod_p
from .errors import (
    BoundViolated,
    Disconnected,
    GeneratorExhausted,
    InvalidGluing,
    NotCovered,
)

Perm = tuple


def parse_perm(s: str) -> Perm:
    p = tuple(int(c) for c in s)
    if sorted(p) != [0, 1, 2, 3]:
        raise InvalidGluing(f"not a permutation of 0123: {s!r}")
    return p


def perm_str(p: Perm) -> str:
    return "".join(str(x) for x in p)


def perm_inverse(p: Perm) -> Perm:
    inv = [0] * 4
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def perm_sign(p: Perm) -> int:
    sign = 1
    p = list(p)
    for i in range(4):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def perm_from_map(mapping: dict) -> Perm:
    """Complete a partial injective map on {0..3} (3 entries) to a permutation."""
    out = dict(mapping)
    missing_src = [v for v in range(4) if v not in out]
    missing_dst = [v for v in range(4) if v not in out.values()]
    for s, d in zip(missing_src, missing_dst):
        out[s] = d
    return tuple(out[v] for v in range(4))


EDGE_SLOTS = tuple(itertools.combinations(range(4), 2))


@dataclass(frozen=True)
class TetGluing:
    tet_id: Hashable
    face_index: int
    partner_tet: Hashable | None
    partner_face: int | None
    vertex_permutation: Perm | None


@dataclass(frozen=True)
class PointLocus:
    """A point given relative to a cell: ``kind`` in {'v','e','f','t'}.

    For 'v'/'e'/'f' the index is a class id; for 't' it is a tet id.
    ``bary`` optionally carries barycentric coordinates over the tet's
    vertices; zero entries push the carrier down to a face, edge or vertex.
    """

    kind: str
    index: Hashable
    bary: tuple | None = None


class TriangulationWindow:
    """A finite, validated complex of glued tetrahedra.

    Immutable after construction.  ``gluings`` maps each tet id to a list of
    four entries, each ``None`` (boundary) or ``(partner, perm)``.
    """

    def __init__(self, gluings: dict, *, declared_bound: int | None = None, name: str = ""):
        self.name = name
        self.declared_bound = declared_bound
        self._glue = {t: list(v) for t, v in gluings.items()}
        self.tets = tuple(sorted(self._glue, key=_sort_key))
        self._validate()
        self._build_skeleta()
        self._orientation = self._orient()

    # ------------------------------------------------------------------ build
    def _validate(self):
        for t in self.tets:
            faces = self._glue[t]
            if len(faces) != 4:
                raise InvalidGluing(f"tet {t} must list four faces", t)
            for f, g in enumerate(faces):
                if g is None:
                    continue
                partner, perm = g
                perm = tuple(perm)
                faces[f] = (partner, perm)
                if sorted(perm) != [0, 1, 2, 3]:
                    raise InvalidGluing(f"tet {t} face {f}: bad permutation {perm}", t)
                if partner not in self._glue:
                    raise InvalidGluing(f"tet {t} face {f}: unknown partner {partner}", t)
                pf = perm[f]
                if partner == t and pf == f:
                    raise InvalidGluing(f"tet {t} face {f} glued to itself", t)
                back = self._glue[partner][pf]
                if back is None:
                    raise InvalidGluing(f"tet {t} face {f}: partner face {partner}/{pf} is boundary", t)
                if back[0] != t or tuple(back[1]) != perm_inverse(perm):
                    raise InvalidGluing(f"non-involutive gluing at tet {t} face {f} <-> {partner}/{pf}", t)

    def _build_skeleta(self):
        vuf = UnionFind()
        fuf = UnionFind()
        # edge union-find with orientation parity: node (t, a, b) a<b
        eparent = {}
        for t in self.tets:
            for v in range(4):
                vuf.add((_sort_key(t), v, t))
            for f in range(4):
                fuf.add((_sort_key(t), f, t))
            for a, b in EDGE_SLOTS:
                eparent[(t, a, b)] = ((t, a, b), 0)

        def efind(x):
            p, par = eparent[x]
            if p == x:
                return x, 0
            r, rp = efind(p)
            eparent[x] = (r, par ^ rp)
            return r, par ^ rp

        self.edge_self_reversed = set()
        for t in self.tets:
            for f, g in enumerate(self._glue[t]):
                if g is None:
                    continue
                partner, perm = g
                fuf.union((_sort_key(t), f, t), (_sort_key(partner), perm[f], partner))
                for v in range(4):
                    if v != f:
                        vuf.union((_sort_key(t), v, t), (_sort_key(partner), perm[v], partner))
                for a, b in EDGE_SLOTS:
                    if f in (a, b):
                        continue
                    pa, pb = perm[a], perm[b]
                    flip = 0
                    if pa > pb:
                        pa, pb = pb, pa
                        flip = 1
                    ra, xa = efind((t, a, b))
                    rb, xb = efind((partner, pa, pb))
                    if ra == rb:
                        if xa ^ xb ^ flip:
                            self.edge_self_reversed.add(ra)
                        continue
                    if _slot_key(rb) < _slot_key(ra):
                        ra, rb, xa, xb = rb, ra, xb, xa
                    eparent[rb] = (ra, xa ^ xb ^ flip)

        # vertices
        self.vertex_classes = []
        self._vertex_of = {}
        for grp in vuf.groups():
            idx = len(self.vertex_classes)
            members = [(x[2], x[1]) for x in grp]
            self.vertex_classes.append(members)
            for m in members:
                self._vertex_of[m] = idx
        # faces
        self.face_classes = []
        self._face_of = {}
        for grp in fuf.groups():
            idx = len(self.face_classes)
            members = [(x[2], x[1]) for x in grp]
            self.face_classes.append(members)
            for m in members:
                self._face_of[m] = idx
        # edges: class orientation follows the representative slot a->b
        groups = {}
        for t in self.tets:
            for a, b in EDGE_SLOTS:
                r, par = efind((t, a, b))
                groups.setdefault(r, []).append(((t, a, b), par))
        self.edge_classes = []
        self._edge_of = {}
        for r in sorted(groups, key=_slot_key):
            idx = len(self.edge_classes)
            self.edge_classes.append([m for m, _ in groups[r]])
            for m, par in groups[r]:
                self._edge_of[m] = (idx, 1 if par == 0 else -1)
        self.edge_self_reversed = {self._edge_of[r][0] for r in self.edge_self_reversed}

        # face class vertex maps: member (t,f) local vertex -> representative local vertex
        self._face_map = {}
        for members in self.face_classes:
            rep = members[0]
            self._face_map[rep] = {v: v for v in range(4) if v != rep[1]}
            t, f = rep
            g = self._glue[t][f]
            if g is not None:
                partner, perm = g
                if (partner, perm[f]) != rep:
                    self._face_map[(partner, perm[f])] = {perm[v]: v for v in range(4) if v != f}

    def _orient(self):
        sign = {}
        for start in self.tets:
            if start in sign:
                continue
            sign[start] = 1
            queue = deque([start])
            while queue:
                t = queue.popleft()
                for f, g in enumerate(self._glue[t]):
                    if g is None:
                        continue
                    partner, perm = g
                    want = -sign[t] * perm_sign(perm)
                    if partner in sign:
                        if sign[partner] != want:
                            return None
                    else:
                        sign[partner] = want
                        queue.append(partner)
        return sign

    # ------------------------------------------------------------- accessors
    def glued(self, t, f):
        return self._glue[t][f]

    def gluing_records(self) -> list[TetGluing]:
        out = []
        for t in self.tets:
            for f, g in enumerate(self._glue[t]):
                if g is None:
                    out.append(TetGluing(t, f, None, None, None))
                else:
                    out.append(TetGluing(t, f, g[0], g[1][f], g[1]))
        return out

    def gluing_table(self) -> dict:
        return {t: list(self._glue[t]) for t in self.tets}

    @property
    def orientation(self):
        return self._orientation

    @property
    def orientable(self) -> bool:
        return self._orientation is not None

    @property
    def num_tets(self):
        return len(self.tets)

    def vertex_class(self, t, v) -> int:
        return self._vertex_of[(t, v)]

    def edge_class(self, t, a, b) -> tuple[int, int]:
        """Return (class id, +1/-1): +1 iff slot a->b agrees with the class orientation."""
        if a < b:
            return self._edge_of[(t, a, b)]
        idx, s = self._edge_of[(t, b, a)]
        return idx, -s

    def face_class(self, t, f) -> int:
        return self._face_of[(t, f)]

    def face_vertex_map(self, t, f) -> dict:
        """Map tet-local vertices of face (t, f) to local labels of the class representative."""
        return self._face_map[(t, f)]

    def face_rep(self, fc):
        return self.face_classes[fc][0]

    def boundary_faces(self):
        return [(t, f) for t in self.tets for f in range(4) if self._glue[t][f] is None]

    def is_closed(self):
        return not self.boundary_faces()

    # ----------------------------------------------------------- incidence
    def tets_of_vertex(self, vc) -> frozenset:
        return frozenset(t for t, _ in self.vertex_classes[vc])

    def tet_vertices(self, t) -> tuple:
        return tuple(self._vertex_of[(t, v)] for v in range(4))

    def star(self, locus) -> frozenset:
        """Closed tetrahedra containing the point locus."""
        kind, idx = _carrier(locus)
        if kind == "t":
            if idx not in self._glue:
                raise NotCovered(f"tet {idx} not in window")
            return frozenset([idx])
        if kind == "v":
            return self.tets_of_vertex(idx)
        if kind == "e":
            return frozenset(t for t, _, _ in self.edge_classes[idx])
        if kind == "f":
            return frozenset(t for t, _ in self.face_classes[idx])
        raise ValueError(f"unknown cell kind {kind!r}")

    def adjacency(self) -> dict:
        """Tets sharing at least one point (i.e. a vertex class)."""
        if not hasattr(self, "_adj"):
            adj = {t: set() for t in self.tets}
            for members in self.vertex_classes:
                ts = sorted({t for t, _ in members}, key=_sort_key)
                for a in ts:
                    adj[a].update(ts)
            for t in adj:
                adj[t].discard(t)
            self._adj = {t: frozenset(s) for t, s in adj.items()}
        return self._adj

    def tet_distances(self, sources: Iterable) -> dict:
        adj = self.adjacency()
        dist = {}
        queue = deque()
        for s in sources:
            if s not in dist:
                dist[s] = 0
                queue.append(s)
        while queue:
            t = queue.popleft()
            for u in sorted(adj[t], key=_sort_key):
                if u not in dist:
                    dist[u] = dist[t] + 1
                    queue.append(u)
        return dist

    def edge_ring(self, ec):
        """Walk around an edge class.

        Returns ``(steps, closed)``; each step is ``(t, a, b, c, d)`` with
        ``a->b`` the slot oriented like the class, entering through the face
        opposite ``c`` and leaving through the face opposite ``d``.
        """
        t, a, b = self.edge_classes[ec][0]
        if self.edge_class(t, a, b)[1] < 0:
            a, b = b, a
        c, d = [x for x in range(4) if x not in (a, b)]
        start = (t, a, b, c, d)
        # rewind to a boundary face if there is one
        cur = start
        seen = set()
        while True:
            seen.add(cur)
            t, a, b, c, d = cur
            g = self._glue[t][c]
            if g is None:
                break
            partner, perm = g
            na, nb, nd = perm[a], perm[b], perm[c]
            nc = [x for x in range(4) if x not in (na, nb, nd)][0]
            prev = (partner, na, nb, nc, nd)
            if prev in seen:
                cur = start
                break
            cur = prev
        first = cur
        steps = [first]
        closed = False
        cur = first
        while True:
            t, a, b, c, d = cur
            g = self._glue[t][d]
            if g is None:
                break
            partner, perm = g
            na, nb, nc = perm[a], perm[b], perm[d]
            nd = [x for x in range(4) if x not in (na, nb, nc)][0]
            nxt = (partner, na, nb, nc, nd)
            if nxt == first:
                closed = True
                break
            steps.append(nxt)
            cur = nxt
            if len(steps) > 6 * len(self.tets) + 6:
                raise InvalidGluing(f"edge ring for class {ec} does not close")
        return steps, closed

    # ---------------------------------------------------------- metrics
    def quasi_distance(self, x, y) -> int:
        sx, sy = self.star(x), self.star(y)
        if sx & sy:
            return 0
        dist = self.tet_distances(sorted(sx, key=_sort_key))
        best = [dist[t] for t in sy if t in dist]
        if not best:
            raise Disconnected("no path inside the window; expand it")
        return min(best)

    def subset_size(self, cells, *, budget: int = 200_000) -> int:
        """Minimum number of closed tetrahedra covering every cell in ``cells``."""
        stars = []
        for c in cells:
            try:
                stars.append(self.star(c))
            except (KeyError, IndexError) as exc:
                raise NotCovered(f"cell {c} outside the window") from exc
        if not stars:
            return 0
        candidates = sorted(set().union(*stars), key=_sort_key)
        tried = 0
        for k in range(1, len(candidates) + 1):
            for combo in itertools.combinations(candidates, k):
                tried += 1
                if tried > budget:
                    raise NotCovered("set-cover search budget exhausted")
                chosen = set(combo)
                if all(chosen & s for s in stars):
                    return k
        raise NotCovered("cells cannot be covered")

    def geometry_audit(self) -> dict:
        degrees = [len(self.tets_of_vertex(v)) for v in range(len(self.vertex_classes))]
        report = {
            "tets": len(self.tets),
            "vertices": len(self.vertex_classes),
            "edges": len(self.edge_classes),
            "faces": len(self.face_classes),
            "boundary_faces": len(self.boundary_faces()),
            "max_vertex_degree": max(degrees) if degrees else 0,
            "orientable": self.orientable,
        }
        if self.declared_bound is not None:
            report["declared_bound"] = self.declared_bound
            if report["max_vertex_degree"] > self.declared_bound:
                raise BoundViolated(
                    f"vertex degree {report['max_vertex_degree']} exceeds bound {self.declared_bound}"
                )
        return report

    def euler_characteristic(self) -> int:
        return len(self.vertex_classes) - len(self.edge_classes) + len(self.face_classes) - len(self.tets)

    # ---------------------------------------------------------- homology
    def boundary_rows(self, dim):
        """Sparse boundary matrix rows: one {col: coeff} dict per ``dim``-cell."""
        rows = []
        if dim == 1:
            for members in self.edge_classes:
                t, a, b = members[0]
                va, vb = self._vertex_of[(t, a)], self._vertex_of[(t, b)]
                s = self.edge_class(t, a, b)[1]
                start, end = (va, vb) if s > 0 else (vb, va)
                row = {}
                row[end] = row.get(end, 0) + 1
                row[start] = row.get(start, 0) - 1
                rows.append({k: v for k, v in row.items() if v})
        elif dim == 2:
            for members in self.face_classes:
                t, f = members[0]
                vs = [v for v in range(4) if v != f]
                row = {}
                for i in range(3):
                    a, b = [vs[j] for j in range(3) if j != i]
                    ec, s = self.edge_class(t, a, b)
                    row[ec] = row.get(ec, 0) + (-1) ** i * s
                rows.append({k: v for k, v in row.items() if v})
        elif dim == 3:
            for t in self.tets:
                row = {}
                for f in range(4):
                    fc = self._face_of[(t, f)]
                    vs = [v for v in range(4) if v != f]
                    fmap = self._face_map[(t, f)]
                    img = [fmap[v] for v in vs]
                    s = _order_sign(img)
                    row[fc] = row.get(fc, 0) + (-1) ** f * s
                rows.append({k: v for k, v in row.items() if v})
        return rows

    def betti_numbers(self):
        """Ranks of H_0..H_3 (with a large prime standing in for Q)."""
        r1 = rank_mod_p(self.boundary_rows(1))
        r2 = rank_mod_p(self.boundary_rows(2))
        r3 = rank_mod_p(self.boundary_rows(3))
        c = [len(self.vertex_classes), len(self.edge_classes), len(self.face_classes), len(self.tets)]
        return [c[0] - r1, c[1] - r1 - r2, c[2] - r2 - r3, c[3] - r3]

    def components(self):
        uf = UnionFind([_sort_key(t) for t in self.tets])
        back = {_sort_key(t): t for t in self.tets}
        for t in self.tets:
            for g in self._glue[t]:
                if g is not None:
                    uf.union(_sort_key(t), _sort_key(g[0]))
        return [[back[k] for k in grp] for grp in uf.groups()]

    def subwindow(self, tets, name: str = "") -> "TriangulationWindow":
        keep = set(tets)
        table = {}
        for t in keep:
            table[t] = [g if g is not None and g[0] in keep else None for g in self._glue[t]]
        return TriangulationWindow(table, declared_bound=self.declared_bound, name=name)

    def boundary_euler_characteristic(self) -> int:
        """Euler characteristic of the boundary surface of the window."""
        faces = self.boundary_faces()
        verts, edges = set(), set()
        for t, f in faces:
            vs = [v for v in range(4) if v != f]
            verts.update(self._vertex_of[(t, v)] for v in vs)
            for a, b in itertools.combinations(vs, 2):
                edges.add(self.edge_class(t, a, b)[0])
        return len(verts) - len(edges) + len(faces)

    def __eq__(self, other):
        return isinstance(other, TriangulationWindow) and self.gluing_table() == other.gluing_table()

    def __hash__(self):
        return hash(self.tets)

    def __repr__(self):
        return f"TriangulationWindow({self.name or 'unnamed'}, tets={len(self.tets)})"


def _sort_key(t):
    return (0, t, "") if isinstance(t, int) else (1, 0, str(t))


def _slot_key(slot):
    t, a, b = slot
    return (_sort_key(t), a, b)


def _order_sign(seq):
    sign = 1
    s = list(seq)
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] > s[j]:
                sign = -sign
    return sign


def _carrier(locus):
    if isinstance(locus, PointLocus):
        return locus.kind, locus.index
    kind, idx = locus
    return kind, idx


# ---------------------------------------------------------------- builders
def build_complex(spec, *, declared_bound=None, name=""):
    """Build a validated window from a gluing table, or a lazy complex from a
    :class:`PeriodicSpec`."""
    if isinstance(spec, PeriodicSpec):
        return LazyComplex(spec)
    return TriangulationWindow(spec, declared_bound=declared_bound, name=name)


@dataclass
class PeriodicSpec:
    """A block of tets repeated along Z.

    ``block`` maps local tet index -> four entries, each ``None``, a local
    gluing ``(local_partner, perm)``, or a shifted gluing
    ``(local_partner, perm, shift)`` meaning the partner lives ``shift``
    blocks away.  ``reach`` bounds how many blocks a vertex star spans.
    """

    block: dict
    bound: int
    reach: int = 1
    name: str = "periodic"

    @property
    def size(self):
        return len(self.block)


class LazyComplex:
    """Deterministic, monotone expansion of a periodic complex.

    Tet ids are integers ``block * size + local``.
    """

    def __init__(self, spec: PeriodicSpec):
        self.spec = spec
        self._check_block()
        self.emitted = {}
        self.blocks = set()
        self._ensure_blocks(range(0, 1))

    def _check_block(self):
        n = self.spec.size
        for lt, faces in self.spec.block.items():
            if not 0 <= lt < n:
                raise InvalidGluing(f"local tet {lt} out of range")
            for f, g in enumerate(faces):
                if g is None:
                    continue
                partner, perm = g[0], tuple(g[1])
                shift = g[2] if len(g) > 2 else 0
                back = self.spec.block[partner][perm[f]]
                if back is None:
                    raise InvalidGluing(f"block tet {lt} face {f}: partner face is boundary")
                bshift = back[2] if len(back) > 2 else 0
                if back[0] != lt or tuple(back[1]) != perm_inverse(perm) or bshift != -shift:
                    raise InvalidGluing(f"non-involutive periodic gluing at block tet {lt} face {f}")

    def tet_id(self, block, local):
        return block * self.spec.size + local

    def locate(self, tet):
        return divmod(tet, self.spec.size)

    def _ensure_blocks(self, blocks):
        for b in sorted(blocks):
            if b in self.blocks:
                continue
            self.blocks.add(b)
            for lt, faces in self.spec.block.items():
                entry = []
                for g in faces:
                    if g is None:
                        entry.append(None)
                        continue
                    shift = g[2] if len(g) > 2 else 0
                    entry.append((self.tet_id(b + shift, g[0]), tuple(g[1])))
                self.emitted[self.tet_id(b, lt)] = entry

    def window_blocks(self, blocks, name="") -> TriangulationWindow:
        blocks = list(blocks)
        self._ensure_blocks(blocks)
        keep = {self.tet_id(b, lt) for b in blocks for lt in self.spec.block}
        table = {t: [g if g is not None and g[0] in keep else None for g in self.emitted[t]] for t in keep}
        return TriangulationWindow(table, declared_bound=self.spec.bound, name=name or self.spec.name)

    def expand_window(self, center, radius: int) -> TriangulationWindow:
        """All tets at quasimetric distance <= radius from the center tet."""
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        cb, _ = self.locate(center)
        if cb not in self.blocks:
            raise GeneratorExhausted(f"center {center} not expanded")
        span = (radius + 3) * self.spec.reach + self.spec.reach
        big = self.window_blocks(range(cb - span, cb + span + 1))
        dist = big.tet_distances([center])
        ball = [t for t, d in dist.items() if d <= radius + 1]
        return big.subwindow(ball, name=f"{self.spec.name}@{center}r{radius}")

    def geometry_audit(self, radius: int = 3, center=0) -> dict:
        cb, _ = self.locate(center)
        span = (radius + 2) * self.spec.reach
        big = self.window_blocks(range(cb - span - 2 * self.spec.reach, cb + span + 2 * self.spec.reach + 1))
        inner = {self.tet_id(b, lt) for b in range(cb - span, cb + span + 1) for lt in self.spec.block}
        degree = 0
        for vc, members in enumerate(big.vertex_classes):
            if any(t in inner for t, _ in members):
                degree = max(degree, len(big.tets_of_vertex(vc)))
        if degree > self.spec.bound:
            raise BoundViolated(f"vertex degree {degree} exceeds declared bound {self.spec.bound}")
        return {"declared_bound": self.spec.bound, "max_vertex_degree": degree, "radius": radius}
