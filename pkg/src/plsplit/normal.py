"""Normal coordinates, matching equations and enumeration.

Each tetrahedron carries seven counts ``(t0, t1, t2, t3, q0, q1, q2)``:
triangle ``v`` links vertex ``v``; quad ``k`` separates the vertex pairs
{0,1}|{2,3}, {0,2}|{1,3}, {0,3}|{1,2} for k = 0, 1, 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .complex import EDGE_SLOTS, TriangulationWindow, _sort_key
from .errors import QuadConflict, WindowTooLarge

QUAD_PAIRS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))
DEFAULT_BUDGET = 10_000_000
VERTEX_MODE_MAX_TETS = 40


_QUAD_OF = {}
for _k, (_p, _q) in enumerate(QUAD_PAIRS):
    for _a, _b in (_p, _q):
        _QUAD_OF[(_a, _b)] = _QUAD_OF[(_b, _a)] = _k
# quads crossing edge ab: the two types other than the one pairing a with b
_CROSSING_QUADS = {ab: tuple(4 + k for k in range(3) if k != q) for ab, q in _QUAD_OF.items()}


def quad_of_pair(a: int, b: int) -> int:
    """Quad type whose sides are {a, b} and its complement."""
    try:
        return _QUAD_OF[(a, b)]
    except KeyError:
        raise ValueError((a, b)) from None


def quad_sides(k: int):
    """(side containing vertex 0, other side)."""
    return QUAD_PAIRS[k]


def arc_count(vec, f: int, v: int) -> int:
    """Normal arcs in face ``f`` cutting off vertex ``v``."""
    return vec[v] + vec[4 + _QUAD_OF[(v, f)]]


def slot_count(vec, a: int, b: int) -> int:
    """Disks of one tetrahedron meeting its edge ``ab``."""
    i, j = _CROSSING_QUADS[(a, b)]
    return vec[a] + vec[b] + vec[i] + vec[j]


def quad_type(vec):
    ks = [k for k in range(3) if vec[4 + k]]
    if len(ks) > 1:
        raise QuadConflict(f"quad types {ks} coexist")
    return ks[0] if ks else None


@dataclass(frozen=True)
class NormalCoordinates:
    """Sparse normal coordinates: only tetrahedra with nonzero vectors are kept."""

    entries: tuple

    @classmethod
    def from_dict(cls, d: dict) -> "NormalCoordinates":
        items = []
        for t, vec in d.items():
            vec = tuple(int(x) for x in vec)
            if len(vec) != 7 or min(vec) < 0:
                raise ValueError(f"bad vector for tet {t}: {vec}")
            if any(vec):
                items.append((t, vec))
        items.sort(key=lambda it: _sort_key(it[0]))
        return cls(tuple(items))

    @classmethod
    def empty(cls):
        return cls(())

    def as_dict(self) -> dict:
        return dict(self.entries)

    def vector(self, t):
        return self.as_dict().get(t, (0,) * 7)

    @property
    def support(self):
        return [t for t, _ in self.entries]

    def __add__(self, other):
        d = self.as_dict()
        for t, vec in other.entries:
            old = d.get(t, (0,) * 7)
            d[t] = tuple(x + y for x, y in zip(old, vec))
        return NormalCoordinates.from_dict(d)

    def scale(self, k: int):
        return NormalCoordinates.from_dict({t: tuple(k * x for x in v) for t, v in self.entries})

    def is_empty(self):
        return not self.entries

    def embedded(self) -> bool:
        return all(sum(1 for k in range(3) if v[4 + k]) <= 1 for _, v in self.entries)

    def translate(self, shift: int):
        return NormalCoordinates.from_dict({t + shift: v for t, v in self.entries})


def edge_weights(T: TriangulationWindow, c: NormalCoordinates) -> dict:
    """Crossings per edge class (max over slots; equal when matching holds)."""
    w = {}
    for t, vec in c.entries:
        for a, b in EDGE_SLOTS:
            n = slot_count(vec, a, b)
            if n:
                ec = T.edge_class(t, a, b)[0]
                w[ec] = max(w.get(ec, 0), n)
    return w


def weight(T: TriangulationWindow, c: NormalCoordinates) -> int:
    return sum(edge_weights(T, c).values())


def matching_violations(T: TriangulationWindow, c: NormalCoordinates, *, closed=False):
    """List of (tet, face, vertex, lhs, rhs) where a matching equation fails."""
    d = c.as_dict()
    zero = (0,) * 7
    out = []
    for t in T.tets:
        vec = d.get(t, zero)
        for f in range(4):
            g = T.glued(t, f)
            if g is None:
                if closed:
                    for v in range(4):
                        if v != f and arc_count(vec, f, v):
                            out.append((t, f, v, arc_count(vec, f, v), 0))
                continue
            partner, perm = g
            if (_sort_key(partner), perm[f]) < (_sort_key(t), f):
                continue
            pvec = d.get(partner, zero)
            for v in range(4):
                if v == f:
                    continue
                lhs, rhs = arc_count(vec, f, v), arc_count(pvec, perm[f], perm[v])
                if lhs != rhs:
                    out.append((t, f, v, lhs, rhs))
    return out


def satisfies_matching(T, c, *, closed=False) -> bool:
    return not matching_violations(T, c, closed=closed)


def is_closed(T, c) -> bool:
    d = c.as_dict()
    for t, f in T.boundary_faces():
        vec = d.get(t)
        if vec and any(arc_count(vec, f, v) for v in range(4) if v != f):
            return False
    return True


# ------------------------------------------------------------ enumeration
def _tet_order(T: TriangulationWindow):
    order, seen = [], set()
    for start in T.tets:
        if start in seen:
            continue
        seen.add(start)
        queue = [start]
        while queue:
            t = queue.pop(0)
            order.append(t)
            for f in range(4):
                g = T.glued(t, f)
                if g is not None and g[0] not in seen:
                    seen.add(g[0])
                    queue.append(g[0])
    return order


def enumerate_surfaces(
    T: TriangulationWindow,
    *,
    weight_bound: int | None = None,
    coord_bound: int | None = None,
    closed: bool = False,
    budget: int = DEFAULT_BUDGET,
):
    """All embedded solutions of the matching equations within the bounds.

    At least one of ``weight_bound`` (total edge crossings) or
    ``coord_bound`` (per-coordinate cap) must be given.  ``closed`` forces
    zero arcs on boundary faces.  Raises :class:`WindowTooLarge` once more
    than ``budget`` candidate vectors have been generated.
    """
    if weight_bound is None and coord_bound is None:
        raise ValueError("give weight_bound and/or coord_bound")
    if weight_bound is not None and weight_bound < 0:
        raise ValueError("weight bound must be nonnegative")
    cap = min(x for x in (weight_bound, coord_bound) if x is not None)
    W = weight_bound if weight_bound is not None else math.inf
    bounded = weight_bound is not None

    order = _tet_order(T)
    pos = {t: i for i, t in enumerate(order)}
    tet_edges = {t: [T.edge_class(t, a, b)[0] for a, b in EDGE_SLOTS] for t in order}
    assigned = {}
    edge_max = {}
    results = []
    counter = [0]

    def constraints(t):
        """Known arc counts per face: {face: {vertex: count}} plus self-gluings."""
        known = {}
        selfglue = []
        for f in range(4):
            g = T.glued(t, f)
            if g is None:
                if closed:
                    known[f] = {v: 0 for v in range(4) if v != f}
                continue
            partner, perm = g
            if partner == t:
                selfglue.append((f, perm))
            elif partner in assigned:
                pvec = assigned[partner]
                known[f] = {v: arc_count(pvec, perm[f], perm[v]) for v in range(4) if v != f}
        return known, selfglue

    def tet_candidates(t, base_weight):
        known, selfglue = constraints(t)
        edges = tet_edges[t]
        for k in (None, 0, 1, 2):
            qrange = [0] if k is None else range(1, cap + 1)
            for Q in qrange:
                fixed = {}
                ok = True
                for f, arcs in known.items():
                    for v, cnt in arcs.items():
                        need = cnt - (Q if k is not None and quad_of_pair(v, f) == k else 0)
                        if need < 0 or (v in fixed and fixed[v] != need):
                            ok = False
                            break
                        fixed[v] = need
                    if not ok:
                        break
                if not ok or any(x > cap for x in fixed.values()):
                    continue
                free = [v for v in range(4) if v not in fixed]
                vec = [0] * 7
                if k is not None:
                    vec[4 + k] = Q
                for v, x in fixed.items():
                    vec[v] = x
                # prune with the fixed part before enumerating free triangles
                if bounded and _lower_bound(vec, edges, edge_max, base_weight) > W:
                    continue
                yield from _fill_free(vec, free, 0, edges, base_weight, selfglue)

    def _fill_free(vec, free, i, edges, base_weight, selfglue):
        if i == len(free):
            counter[0] += 1
            if counter[0] > budget:
                raise WindowTooLarge(f"enumeration exceeded budget of {budget} candidates")
            for f, perm in selfglue:
                for v in range(4):
                    if v != f and arc_count(vec, f, v) != arc_count(vec, perm[f], perm[v]):
                        return
            yield tuple(vec)
            return
        v = free[i]
        for x in range(cap + 1):
            vec[v] = x
            if x and bounded and _lower_bound(vec, edges, edge_max, base_weight) > W:
                break
            yield from _fill_free(vec, free, i + 1, edges, base_weight, selfglue)
        vec[v] = 0

    sorted_order = sorted(order, key=_sort_key)
    skey = {t: _sort_key(t) for t in order}
    # unbounded mode: each edge class is charged to its first tet, linearly in the vector
    charged, coef = set(), {}
    for t in order:
        row = [0] * 7
        for (a, b), ec in zip(EDGE_SLOTS, tet_edges[t]):
            if ec not in charged:
                charged.add(ec)
                for j in range(7):
                    unit = [0] * 7
                    unit[j] = 1
                    row[j] += slot_count(unit, a, b)
        coef[t] = [(j, x) for j, x in enumerate(row) if x]

    zero = (0,) * 7

    def leaf(w):
        # slot counts agree across gluings, so the running total is the weight
        results.append((w, tuple([(t, assigned[t]) for t in sorted_order if assigned[t] != zero])))

    def rec(i, base_weight):
        if i == len(order):
            leaf(base_weight)
            return
        t = order[i]
        edges = tet_edges[t]
        for vec in list(tet_candidates(t, base_weight)):
            if not bounded:
                assigned[t] = vec
                rec(i + 1, base_weight + sum(x * vec[j] for j, x in coef[t]))
                continue
            saved = {}
            new_weight = base_weight
            for (a, b), ec in zip(EDGE_SLOTS, edges):
                n = slot_count(vec, a, b)
                old = edge_max.get(ec, 0)
                if n > old:
                    if ec not in saved:
                        saved[ec] = old
                    new_weight += n - old
                    edge_max[ec] = n
            if new_weight <= W:
                assigned[t] = vec
                rec(i + 1, new_weight)
            for ec, old in saved.items():
                if old:
                    edge_max[ec] = old
                else:
                    edge_max.pop(ec, None)
        assigned.pop(t, None)

    rec(0, 0)
    if all(isinstance(t, int) for t in order):
        # integer ids sort like their keys, so plain tuple order suffices
        results.sort()
    else:
        results.sort(key=lambda r: (r[0], tuple((skey[t], v) for t, v in r[1])))
    return [NormalCoordinates(ent) for _, ent in results]


def _lower_bound(vec, edges, edge_max, base_weight):
    extra = 0
    local = {}
    for (a, b), ec in zip(EDGE_SLOTS, edges):
        n = slot_count(vec, a, b)
        if n > local.get(ec, 0):
            local[ec] = n
    for ec, n in local.items():
        old = edge_max.get(ec, 0)
        if n > old:
            extra += n - old
    return base_weight + extra


def _coord_key(c):
    return tuple((_sort_key(t), v) for t, v in c.entries)


# -------------------------------------------------------- vertex solutions
def matching_matrix(T: TriangulationWindow, *, closed=False):
    """Rows of the matching system over columns ``7 * index(t) + i``."""
    idx = {t: i for i, t in enumerate(T.tets)}
    rows = []
    for t in T.tets:
        for f in range(4):
            g = T.glued(t, f)
            if g is None:
                if closed:
                    for v in range(4):
                        if v != f:
                            row = {}
                            _add_arc(row, idx[t], f, v, 1)
                            rows.append(row)
                continue
            partner, perm = g
            if (_sort_key(partner), perm[f]) < (_sort_key(t), f):
                continue
            for v in range(4):
                if v == f:
                    continue
                row = {}
                _add_arc(row, idx[t], f, v, 1)
                _add_arc(row, idx[partner], perm[f], perm[v], -1)
                row = {k: x for k, x in row.items() if x}
                if row:
                    rows.append(row)
    return rows


def _add_arc(row, ti, f, v, sign):
    for col in (7 * ti + v, 7 * ti + 4 + quad_of_pair(v, f)):
        row[col] = row.get(col, 0) + sign


def _admissible(support, ntets):
    for ti in range(ntets):
        if sum(1 for k in range(3) if (7 * ti + 4 + k) in support) > 1:
            return False
    return True


def vertex_surfaces(T: TriangulationWindow, *, closed=False, max_tets=VERTEX_MODE_MAX_TETS):
    """Extreme rays of the admissible matching cone, by filtered double description."""
    if len(T.tets) > max_tets:
        raise WindowTooLarge(f"vertex mode limited to {max_tets} tetrahedra")
    n = 7 * len(T.tets)
    rays = [{i: 1} for i in range(n)]
    for row in matching_matrix(T, closed=closed):
        pos, neg, zero = [], [], []
        for r in rays:
            s = sum(row.get(k, 0) * x for k, x in r.items())
            (pos if s > 0 else neg if s < 0 else zero).append((r, s))
        zsets = [frozenset(range(n)) - frozenset(r) for r, _ in pos + neg + zero]
        allrays = [r for r, _ in pos + neg + zero]
        new = [r for r, _ in zero]
        for i, (p, sp) in enumerate(pos):
            for j, (q, sq) in enumerate(neg):
                common = zsets[i] & zsets[len(pos) + j]
                supp = frozenset(p) | frozenset(q)
                if not _admissible(supp, len(T.tets)):
                    continue
                adjacent = True
                for kk, z in enumerate(zsets):
                    if kk in (i, len(pos) + j):
                        continue
                    if common <= z:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                comb = {}
                for k in supp:
                    val = -sq * p.get(k, 0) + sp * q.get(k, 0)
                    if val:
                        comb[k] = val
                g = 0
                for x in comb.values():
                    g = math.gcd(g, x)
                new.append({k: x // g for k, x in comb.items()})
        rays = new
    out = []
    for r in rays:
        d = {}
        for col, x in r.items():
            ti, i = divmod(col, 7)
            vec = list(d.get(T.tets[ti], (0,) * 7))
            vec[i] = x
            d[T.tets[ti]] = tuple(vec)
        out.append(NormalCoordinates.from_dict(d))
    out.sort(key=lambda c: (weight(T, c), _coord_key(c)))
    return out


def vertex_linking(T: TriangulationWindow, vc: int) -> NormalCoordinates:
    """Coordinates of the link of a vertex class."""
    d = {}
    for t, v in T.vertex_classes[vc]:
        vec = list(d.get(t, (0,) * 7))
        vec[v] += 1
        d[t] = tuple(vec)
    return NormalCoordinates.from_dict(d)
