"""Small exact linear-algebra kernels over Z and F_p.

Matrices here are plain lists of lists of Python ints; sizes are desk-scale
(a few hundred rows), so clarity beats speed.
"""

from __future__ import annotations

PRIME = 2_147_483_647


class UnionFind:
    def __init__(self, items=()):
        self.parent = {}
        for x in items:
            self.parent[x] = x

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x

    def find(self, x):
        self.add(x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        # deterministic: smaller representative wins
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True

    def groups(self):
        out = {}
        for x in sorted(self.parent):
            out.setdefault(self.find(x), []).append(x)
        return [out[k] for k in sorted(out)]


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith(a):
    """Smith normal form with transforms.

    Returns ``(d, u, uinv, v, vinv)`` with ``u @ a @ v == d`` (diagonal,
    nonnegative, each entry dividing the next) and the inverses tracked
    alongside so no integer inversion is ever needed.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    d = [row[:] for row in a]
    u, uinv = identity(m), identity(m)
    v, vinv = identity(n), identity(n)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]
        for row in uinv:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def add_row(src, dst, k):
        # row dst += k * row src
        if k == 0:
            return
        d[dst] = [x + k * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]
        for row in uinv:
            row[src] -= k * row[dst]

    def add_col(src, dst, k):
        # col dst += k * col src
        if k == 0:
            return
        for row in d:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]
        vinv[src] = [x - k * y for x, y in zip(vinv[src], vinv[dst])]

    def negate_row(i):
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]
        for row in uinv:
            row[i] = -row[i]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero absolute value in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if d[i][j] and (best is None or abs(d[i][j]) < best[0]):
                    best = (abs(d[i][j]), i, j)
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if d[i][t]:
                    q = d[i][t] // d[t][t]
                    add_row(t, i, -q)
                    if d[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if d[t][j]:
                    q = d[t][j] // d[t][t]
                    add_col(t, j, -q)
                    if d[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # divisibility condition
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if d[i][j] % d[t][t]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(bad, t, 1)
        if d[t][t] < 0:
            negate_row(t)
        t += 1
    return d, u, uinv, v, vinv


def matmul(a, b):
    if not a:
        return []
    cols = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def matvec(a, x):
    return [sum(p * q for p, q in zip(row, x)) for row in a]


def rank_mod_p(rows, p=PRIME):
    """Rank over F_p of a sparse matrix given as a list of {col: value} dicts."""
    pivots = {}
    rank = 0
    for row in rows:
        r = {c: v % p for c, v in row.items() if v % p}
        while r:
            c = min(r)
            if c in pivots:
                prow = pivots[c]
                f = r[c]
                for cc, vv in prow.items():
                    nv = (r.get(cc, 0) - f * vv) % p
                    if nv:
                        r[cc] = nv
                    else:
                        r.pop(cc, None)
            else:
                inv = pow(r[c], p - 2, p)
                pivots[c] = {cc: (vv * inv) % p for cc, vv in r.items()}
                rank += 1
                break
    return rank
