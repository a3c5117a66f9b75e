"""Independent oracles used by the test suite.

Nothing here calls into the package beyond reading a window's raw gluing
table, so agreement with the package is evidence rather than tautology.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from fractions import Fraction

import numpy as np

QUADS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


# ------------------------------------------------------------- skeleta
class _UF:
    def __init__(self):
        self.p = {}

    def find(self, x):
        self.p.setdefault(x, x)
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a, b):
        self.p[self.find(a)] = self.find(b)


def skeleta(table):
    """Vertex, edge and face classes of a gluing table ``{t: [None | (u, perm)]}``.

    Cells are written ``(t, sorted vertex tuple)``; each union-find maps a
    cell to its class representative.
    """
    verts, edges, faces = _UF(), _UF(), _UF()
    for t in table:
        for v in range(4):
            verts.find((t, (v,)))
        for e in itertools.combinations(range(4), 2):
            edges.find((t, e))
        for f in itertools.combinations(range(4), 3):
            faces.find((t, f))
    for t, row in table.items():
        for f, g in enumerate(row):
            if g is None:
                continue
            u, perm = g[0], g[1]
            face = tuple(v for v in range(4) if v != f)
            for v in face:
                verts.union((t, (v,)), (u, (perm[v],)))
            faces.union((t, face), (u, tuple(sorted(perm[v] for v in face))))
            for a, b in itertools.combinations(face, 2):
                edges.union((t, (a, b)), (u, tuple(sorted((perm[a], perm[b])))))
    return verts, edges, faces


def _edge_orientation(table):
    """Sign of each (t, (a, b)) relative to a chosen orientation of its class."""
    sign = {}
    adj = {}
    for t, row in table.items():
        for f, g in enumerate(row):
            if g is None:
                continue
            u, perm = g[0], g[1]
            face = [v for v in range(4) if v != f]
            for a, b in itertools.combinations(face, 2):
                pa, pb = perm[a], perm[b]
                s = 1 if pa < pb else -1
                adj.setdefault((t, (a, b)), []).append(((u, tuple(sorted((pa, pb)))), s))
    for start in adj.keys() | {(t, e) for t in table for e in itertools.combinations(range(4), 2)}:
        if start in sign:
            continue
        sign[start] = 1
        q = deque([start])
        while q:
            x = q.popleft()
            for y, s in adj.get(x, ()):
                if y not in sign:
                    sign[y] = sign[x] * s
                    q.append(y)
    return sign


def _face_orientation(table):
    sign = {}
    adj = {}
    for t, row in table.items():
        for f, g in enumerate(row):
            if g is None:
                continue
            u, perm = g[0], g[1]
            face = [v for v in range(4) if v != f]
            img = [perm[v] for v in face]
            order = sorted(range(3), key=lambda i: img[i])
            s = _perm_parity(order)
            adj.setdefault((t, tuple(face)), []).append(((u, tuple(sorted(img))), s))
    for t in table:
        for face in itertools.combinations(range(4), 3):
            start = (t, face)
            if start in sign:
                continue
            sign[start] = 1
            q = deque([start])
            while q:
                x = q.popleft()
                for y, s in adj.get(x, ()):
                    if y not in sign:
                        sign[y] = sign[x] * s
                        q.append(y)
    return sign


def _perm_parity(order):
    s = 1
    order = list(order)
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if order[i] > order[j]:
                s = -s
    return s


def betti_numbers(table):
    """Rational Betti numbers of a Delta-complex, by numpy SVD rank."""
    verts, edges, faces = skeleta(table)
    vcls = sorted({verts.find((t, (v,))) for t in table for v in range(4)}, key=repr)
    ecls = sorted({edges.find((t, e)) for t in table for e in itertools.combinations(range(4), 2)}, key=repr)
    fcls = sorted({faces.find((t, f)) for t in table for f in itertools.combinations(range(4), 3)}, key=repr)
    vi = {c: i for i, c in enumerate(vcls)}
    ei = {c: i for i, c in enumerate(ecls)}
    fi = {c: i for i, c in enumerate(fcls)}
    es = _edge_orientation(table)
    fs = _face_orientation(table)
    d1 = np.zeros((len(vcls), len(ecls)))
    for c in ecls:
        t, (a, b) = c
        s = es[c]
        d1[vi[verts.find((t, (b,)))], ei[c]] += s
        d1[vi[verts.find((t, (a,)))], ei[c]] -= s
    d2 = np.zeros((len(ecls), len(fcls)))
    for c in fcls:
        t, face = c
        s = fs[c]
        for k in range(3):
            e = tuple(x for j, x in enumerate(face) if j != k)
            d2[ei[edges.find((t, e))], fi[c]] += s * (-1) ** k * es[(t, e)]
    d3 = np.zeros((len(fcls), len(table)))
    for j, t in enumerate(table):
        for k in range(4):
            face = tuple(x for x in range(4) if x != k)
            fc = faces.find((t, face))
            d3[fi[fc], j] += (-1) ** k * fs[(t, face)]
    r1, r2, r3 = (_rank(m) for m in (d1, d2, d3))
    return [len(vcls) - r1, len(ecls) - r1 - r2, len(fcls) - r2 - r3, len(table) - r3]


def _rank(m):
    if m.size == 0:
        return 0
    return int(np.linalg.matrix_rank(m))


def euler_characteristic(table):
    verts, edges, faces = skeleta(table)
    nv = len({verts.find((t, (v,))) for t in table for v in range(4)})
    ne = len({edges.find((t, e)) for t in table for e in itertools.combinations(range(4), 2)})
    nf = len({faces.find((t, f)) for t in table for f in itertools.combinations(range(4), 3)})
    return nv - ne + nf - len(table)


# ------------------------------------------------------ normal surfaces
def arcs_at(vec, f, v):
    """Normal arcs on face f cutting off corner v."""
    n = vec[v]
    for k, ((a, b), (c, d)) in enumerate(QUADS):
        pair = {a: b, b: a, c: d, d: c}
        if pair[f] == v:
            n += vec[4 + k]
    return n


def crossings(vec, a, b):
    """Disks meeting edge ab of one tet."""
    n = vec[a] + vec[b]
    for k, (p, q) in enumerate(QUADS):
        if (a in p) != (b in p):
            n += vec[4 + k]
    return n


def tet_candidates(bound):
    for tri in itertools.product(range(bound + 1), repeat=4):
        yield tri + (0, 0, 0)
        for k in range(3):
            for q in range(1, bound + 1):
                yield tri + tuple(q if j == k else 0 for j in range(3))


def brute_force_solutions(table, bound, *, closed=False):
    """All embedded matching-equation solutions with coordinates <= bound.

    A depth-first scan over tets in a fixed order.  Per-tet candidates are
    bucketed by their arc counts on each face, so a tet glued to an
    assigned one only scans the compatible bucket; every face equation is
    then re-tested directly.
    """
    tets = list(table)
    pos = {t: i for i, t in enumerate(tets)}
    cands = list(tet_candidates(bound))
    buckets = [{} for _ in range(4)]
    for vec in cands:
        for f in range(4):
            buckets[f].setdefault(_face_arcs(vec, f), []).append(vec)
    out = []
    assign = {}

    def ok(i):
        t = tets[i]
        vec = assign[t]
        for f, g in enumerate(table[t]):
            if g is None:
                if closed and any(_face_arcs(vec, f)):
                    return False
                continue
            u, perm = g[0], g[1]
            if pos[u] > i:
                continue
            other = assign[u]
            for v in range(4):
                if v != f and arcs_at(vec, f, v) != arcs_at(other, perm[f], perm[v]):
                    return False
        return True

    def options(i):
        t = tets[i]
        for f, g in enumerate(table[t]):
            if g is not None and pos[g[0]] < i:
                u, perm = g[0], g[1]
                inv = {perm[v]: v for v in range(4)}
                need = {inv[w]: arcs_at(assign[u], perm[f], w) for w in range(4) if w != perm[f]}
                return buckets[f].get(tuple(need[v] for v in range(4) if v != f), [])
        return cands

    def rec(i):
        if i == len(tets):
            out.append(tuple(assign[t] for t in tets))
            return
        for vec in options(i):
            assign[tets[i]] = vec
            if ok(i):
                rec(i + 1)
        assign.pop(tets[i], None)

    rec(0)
    return {tuple((t, v) for t, v in zip(tets, sol) if any(v)) for sol in out}


def _face_arcs(vec, f):
    return tuple(arcs_at(vec, f, v) for v in range(4) if v != f)


def surface_euler(table, coords):
    """V - E + F of the normal cell decomposition, from coordinates alone."""
    verts, edges, faces = skeleta(table)
    d = dict(coords)
    seen_e, seen_f = set(), set()
    V = E = F = 0
    for t in table:
        vec = d.get(t, (0,) * 7)
        F += sum(vec)
        for a, b in itertools.combinations(range(4), 2):
            c = edges.find((t, (a, b)))
            if c not in seen_e:
                seen_e.add(c)
                V += crossings(vec, a, b)
        for f in range(4):
            face = tuple(x for x in range(4) if x != f)
            c = faces.find((t, face))
            if c not in seen_f:
                seen_f.add(c)
                E += sum(arcs_at(vec, f, v) for v in face)
    return V - E + F


def tet_diameter(table, tets):
    """Largest dual distance between tets, adjacency meaning a shared point."""
    verts, _, _ = skeleta(table)
    at = {}
    for t in table:
        for v in range(4):
            at.setdefault(verts.find((t, (v,))), set()).add(t)
    nbrs = {t: set().union(*(at[verts.find((t, (v,)))] for v in range(4))) - {t} for t in table}
    best = 0
    tets = list(tets)
    for s in tets:
        dist = {s: 0}
        q = deque([s])
        while q:
            x = q.popleft()
            for y in nbrs[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    q.append(y)
        best = max([best] + [dist[u] for u in tets])
    return best


# ---------------------------------------------------------- hyperbolic
def uhp_distance(z, w):
    return math.acosh(1 + abs(z - w) ** 2 / (2 * z.imag * w.imag))


def grid_min(f, lo, hi, n, dims):
    """Dense grid search followed by two rounds of local refinement."""
    best = None
    centers = [tuple([0.0] * dims)]
    width = hi - lo
    grids = [np.linspace(lo, hi, n)] * dims
    for _ in range(3):
        for pt in itertools.product(*grids):
            val = f(np.array(pt))
            if best is None or val < best[0]:
                best = (val, pt)
        width = width * 4 / n
        grids = [np.linspace(c - width, c + width, n) for c in best[1]]
    return best


# -------------------------------------------------------- base curves
def line_intersection_number(d1, d2):
    """Geometric intersection number of two straight closed lines on a torus."""
    return abs(d1[0] * d2[1] - d1[1] * d2[0])


def fraction_hulls(points):
    return [(Fraction(min(p)), Fraction(max(p))) for p in points]
