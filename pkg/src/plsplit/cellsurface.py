"""Abstract 2-dimensional cell complexes: analysis, orientation covers, homology.

A :class:`CellSurface` is given by faces whose boundaries are cyclic lists
of ``(edge, direction)`` and edges with ordered endpoints.  Direction +1
means the face traverses the edge from its first to its second endpoint.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import gcd

from ._intlin import UnionFind


def _key(x):
    return repr(x)


@dataclass
class ComponentReport:
    faces: list
    vertices: int
    edges: int
    euler_characteristic: int
    orientable: bool
    boundary_components: int
    kind: str

    def as_dict(self):
        return {
            "faces": len(self.faces),
            "vertices": self.vertices,
            "edges": self.edges,
            "euler_characteristic": self.euler_characteristic,
            "orientable": self.orientable,
            "boundary_components": self.boundary_components,
            "kind": self.kind,
        }


def surface_kind(chi: int, orientable: bool, boundary: int) -> str:
    if boundary == 0:
        if chi == 2 and orientable:
            return "Sphere"
        if chi == 0:
            return "Torus" if orientable else "Klein"
        return "Other"
    if chi == 1 and boundary == 1:
        return "Disk"
    if chi == 0 and boundary == 2 and orientable:
        return "Annulus"
    return "Other"


class CellSurface:
    def __init__(self, faces: dict, edges: dict):
        self.faces = faces
        self.edges = edges
        self.incidence = {e: [] for e in edges}
        # incidences are (face, direction, position in the face's cycle)
        for f in sorted(faces, key=_key):
            for i, (e, d) in enumerate(faces[f]):
                self.incidence[e].append((f, d, i))
        for e, inc in self.incidence.items():
            if len(inc) > 2:
                raise ValueError(f"edge {e} has {len(inc)} incident faces")

    # ------------------------------------------------------------ structure
    def components(self):
        uf = UnionFind()
        keyed = {_key(f): f for f in self.faces}
        for k in keyed:
            uf.add(k)
        for inc in self.incidence.values():
            if len(inc) == 2:
                uf.union(_key(inc[0][0]), _key(inc[1][0]))
        return [[keyed[k] for k in grp] for grp in uf.groups()]

    def orientation(self, faces=None):
        """Signs per face making glued edges opposite, or None if one-sided."""
        faces = list(self.faces) if faces is None else list(faces)
        sign = {}
        for start in sorted(faces, key=_key):
            if start in sign:
                continue
            sign[start] = 1
            queue = deque([start])
            while queue:
                f = queue.popleft()
                for i, (e, d) in enumerate(self.faces[f]):
                    inc = self.incidence[e]
                    if len(inc) < 2:
                        continue
                    g, dg, _ = inc[1] if inc[0][::2] == (f, i) else inc[0]
                    want = -sign[f] * d * dg
                    if g in sign:
                        if sign[g] != want:
                            return None
                    else:
                        sign[g] = want
                        queue.append(g)
        return sign

    def boundary_edges(self, faces=None):
        fs = set(self.faces if faces is None else faces)
        return [e for e, inc in self.incidence.items() if len(inc) == 1 and inc[0][0] in fs]

    def _vertex_classes(self, faces):
        """Vertex classes of the given faces via corner identification."""
        uf = UnionFind()
        for f in faces:
            for e, _ in self.faces[f]:
                for v in self.edges[e]:
                    uf.add(_key(v))
        return len({uf.find(_key(v)) for f in faces for e, _ in self.faces[f] for v in self.edges[e]})

    def analyze_component(self, faces) -> ComponentReport:
        edge_set = {e for f in faces for e, _ in self.faces[f]}
        verts = {_key(v) for e in edge_set for v in self.edges[e]}
        V, E, F = len(verts), len(edge_set), len(faces)
        chi = V - E + F
        orientable = self.orientation(faces) is not None
        bd = self.boundary_edges(faces)
        uf = UnionFind()
        for e in bd:
            a, b = self.edges[e]
            uf.add(_key(a))
            uf.union(_key(a), _key(b))
        nb = len({uf.find(_key(self.edges[e][0])) for e in bd})
        return ComponentReport(faces, V, E, chi, orientable, nb, surface_kind(chi, orientable, nb))

    def analyze(self):
        comps = [self.analyze_component(c) for c in self.components()]
        return comps

    def euler_characteristic(self):
        verts = {_key(v) for e in self.edges for v in self.edges[e]}
        return len(verts) - len(self.edges) + len(self.faces)

    # ----------------------------------------------------- orientation cover
    def orientation_cover(self) -> "CellSurface":
        """The orientation double cover, with vertices identified through corners."""
        faces = {}
        edges = {}
        uf = UnionFind()
        # cover edge (e, s) joins (f, s) to (g, -s * df * dg) for incidences f, g
        for e, inc in self.incidence.items():
            for s in (1, -1):
                f = inc[0][0]
                if len(inc) == 2:
                    (f, df, _), (g, dg, _) = inc
                    t = -s * df * dg
                    for v in self.edges[e]:
                        uf.union(_key(((f, s), v)), _key(((g, t), v)))
                edges[(e, s)] = f
        for f, cyc in self.faces.items():
            for s in (1, -1):
                out = []
                for i, (e, d) in enumerate(cyc):
                    inc = self.incidence[e]
                    if len(inc) == 2 and inc[1][::2] == (f, i):
                        _, df, _ = inc[0]
                        lab = (e, -s * df * d)
                    else:
                        lab = (e, s)
                    out.append((lab, d * s))
                faces[(f, s)] = out if s == 1 else out[::-1]
        for (e, s), f in list(edges.items()):
            a, b = self.edges[e]
            edges[(e, s)] = (("v", uf.find(_key(((f, s), a)))), ("v", uf.find(_key(((f, s), b)))))
        return CellSurface(faces, edges)

    # -------------------------------------------------------------- homology
    def homology_basis(self, faces=None) -> "TorusBasis":
        faces = sorted(self.faces if faces is None else faces, key=_key)
        return TorusBasis(self, faces)


class TorusBasis:
    """Integer H_1 basis of a closed orientable component by tree-cotree.

    Dual loops ``gamma_l`` through the leftover edges form the basis; the
    coordinate of a dual walk along ``gamma_l`` is read off by counting
    signed crossings with the primal loop through the same leftover edge.
    """

    def __init__(self, surf: CellSurface, faces):
        self.surf = surf
        self.faces = faces
        sign = surf.orientation(faces)
        if sign is None:
            raise ValueError("homology basis needs an orientable component")
        self.sign = sign
        fset = set(faces)
        edges = sorted({e for f in faces for e, _ in surf.faces[f]}, key=_key)
        if any(len(surf.incidence[e]) != 2 for e in edges):
            raise ValueError("homology basis needs a closed component")
        # dual spanning tree
        parent = {faces[0]: None}
        queue = deque([faces[0]])
        cotree = set()
        while queue:
            f = queue.popleft()
            for e, _ in surf.faces[f]:
                for g, _, _ in surf.incidence[e]:
                    if g in fset and g not in parent:
                        parent[g] = (e, f)
                        cotree.add(e)
                        queue.append(g)
        self.dual_parent = parent
        # primal spanning tree avoiding dual tree edges
        adj = {}
        for e in edges:
            if e in cotree:
                continue
            a, b = surf.edges[e]
            adj.setdefault(_key(a), []).append((e, _key(b), 1))
            adj.setdefault(_key(b), []).append((e, _key(a), -1))
        root = min(adj) if adj else None
        vpar = {root: None}
        queue = deque([root] if root is not None else [])
        tree = set()
        while queue:
            v = queue.popleft()
            for e, w, d in adj[v]:
                if w not in vpar:
                    vpar[w] = (e, v, d)
                    tree.add(e)
                    queue.append(w)
        self.vpar = vpar
        self.leftover = [e for e in edges if e not in cotree and e not in tree]
        self.loops = [self._primal_loop(e) for e in self.leftover]
        self.norms = []
        for i, e in enumerate(self.leftover):
            val = self.pair(i, self.basis_walk(i))
            if abs(val) != 1:
                raise AssertionError("tree-cotree pairing is not unimodular")
            self.norms.append(val)

    @property
    def rank(self):
        return len(self.leftover)

    def _root_path(self, v):
        """Edges (with direction toward v) from the primal root to v."""
        path = []
        while self.vpar[v] is not None:
            e, u, d = self.vpar[v]
            path.append((e, d))
            v = u
        return path[::-1]

    def _primal_loop(self, e):
        a, b = (_key(x) for x in self.surf.edges[e])
        loop = {}
        # root -> a, then e, then b -> root
        for ee, d in self._root_path(a):
            loop[ee] = loop.get(ee, 0) + d
        loop[e] = loop.get(e, 0) + 1
        for ee, d in self._root_path(b):
            loop[ee] = loop.get(ee, 0) - d
        return {k: v for k, v in loop.items() if v}

    def _dual_root_path(self, f):
        steps = []
        while self.dual_parent[f] is not None:
            e, g = self.dual_parent[f]
            steps.append((e, g))
            f = g
        return steps[::-1]

    def basis_walk(self, i):
        """Dual loop through leftover edge i: a list of (edge, face exited)."""
        e = self.leftover[i]
        (f, _, _), (g, _, _) = self.surf.incidence[e]
        walk = list(self._dual_root_path(f))
        walk.append((e, f))
        back = self._dual_root_path(g)
        # walk back from g to the root: reverse the steps, exiting the child face
        for ee, parent in reversed(back):
            child = next(h for h, _, _ in self.surf.incidence[ee] if h != parent)
            walk.append((ee, child))
        return walk

    def _exit_sign(self, e, face):
        for f, d, _ in self.surf.incidence[e]:
            if f == face:
                return self.sign[f] * d
        raise ValueError(f"face {face} does not contain edge {e}")

    def pair(self, i, walk):
        loop = self.loops[i]
        total = 0
        for e, face in walk:
            if e in loop:
                total += loop[e] * self._exit_sign(e, face)
        return total

    def classify(self, walk):
        """Coordinates of a closed dual walk in the basis of dual loops."""
        return tuple(self.pair(i, walk) * self.norms[i] for i in range(self.rank))


def primitive_up_to_sign(v):
    """Normalize an integer vector so its first nonzero entry is positive."""
    v = tuple(v)
    for x in v:
        if x:
            return v if x > 0 else tuple(-y for y in v)
    return v


def is_primitive(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    return g == 1
