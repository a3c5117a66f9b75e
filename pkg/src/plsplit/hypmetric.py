"""Hyperbolic metric on the 2-skeleton: each face is the ideal triangle (0, 1, inf).

Points on a side are located by signed arclength from the side's incircle
tangency point, increasing toward the side's larger vertex.  The three
vertices of a face class are mapped to 0, 1, inf in the increasing order
of their labels in the class representative.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .complex import TriangulationWindow
from .errors import NotNormal, SameSide

LENGTH_TOL = 1e-9
GRAD_TOL = 1e-8
DRIFT_BOUND = 50.0
PROBE_DECREASE = 1e-9

# model sides by which two of the ideal vertices (0, 1, inf) they join
SIDE_0I, SIDE_1I, SIDE_01 = "0i", "1i", "01"


class Ordering(Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class Status(Enum):
    CONVERGED = "Converged"
    CUSP_DRIFT = "CuspDrift"


@dataclass(frozen=True)
class EdgePosition:
    """A point on an edge class; ``side`` (two face-rep labels) disambiguates
    faces whose sides share an edge class."""

    edge_class: int
    param: float
    side: tuple | None = None


@dataclass(frozen=True, order=True)
class PLArea:
    weight: int
    length: float

    def __post_init__(self):
        if self.weight < 0 or self.length < 0:
            raise ValueError("PL area components are nonnegative")


def compare_pl_area(a: PLArea, b: PLArea, tol: float = LENGTH_TOL) -> Ordering:
    """Lexicographic comparison, weight first, lengths equal within ``tol``."""
    if a.weight != b.weight:
        return Ordering.LESS if a.weight < b.weight else Ordering.GREATER
    if abs(a.length - b.length) <= tol:
        return Ordering.EQUAL
    return Ordering.LESS if a.length < b.length else Ordering.GREATER


# ------------------------------------------------------------- model geometry
def model_point(side: str, s: float) -> complex:
    if side == SIDE_0I:
        return complex(0.0, math.exp(s))
    if side == SIDE_1I:
        return complex(1.0, math.exp(s))
    if side == SIDE_01:
        return complex(0.5 + 0.5 * math.tanh(s), 0.5 / math.cosh(s))
    raise ValueError(f"unknown side {side!r}")


def _model_derivative(side: str, s: float) -> complex:
    if side in (SIDE_0I, SIDE_1I):
        return complex(0.0, math.exp(s))
    sech = 1.0 / math.cosh(s)
    return complex(0.5 * sech * sech, -0.5 * sech * math.tanh(s))


def hyperbolic_distance(z: complex, w: complex) -> float:
    """Upper half-plane distance, via the half-angle form of cosh d = 1 + |z-w|^2/(2 y1 y2)."""
    return 2.0 * math.asinh(abs(z - w) / (2.0 * math.sqrt(z.imag * w.imag)))


# larger ideal vertex of each side, in the order 0 < 1 < inf
_SIDE_VERTICES = {SIDE_0I: ("0", "i"), SIDE_1I: ("1", "i"), SIDE_01: ("0", "1")}


def _cusp_heights(side1, s1, side2, s2):
    """Log-heights of both points after moving the shared ideal vertex to inf.

    In that frame the two sides are vertical lines one unit apart, and a
    point's log-height is its parameter, negated when the shared vertex is
    the smaller end of its side.
    """
    if side1 == side2:
        raise SameSide("normal arcs join distinct sides")
    shared = (set(_SIDE_VERTICES[side1]) & set(_SIDE_VERTICES[side2])).pop()
    e1 = 1.0 if _SIDE_VERTICES[side1][1] == shared else -1.0
    e2 = 1.0 if _SIDE_VERTICES[side2][1] == shared else -1.0
    return e1 * s1, e2 * s2, e1, e2


def _q2(h1, h2):
    # sinh(d/2)^2 for points (0, e^h1) and (1, e^h2); no cancellation near the cusp
    return 0.25 * math.exp(-(h1 + h2)) + math.sinh(0.5 * (h1 - h2)) ** 2


def model_arc_length(side1: str, s1: float, side2: str, s2: float) -> float:
    h1, h2, _, _ = _cusp_heights(side1, s1, side2, s2)
    return 2.0 * math.asinh(math.sqrt(_q2(h1, h2)))


def model_arc_gradient(side1: str, s1: float, side2: str, s2: float):
    """Length and its partial derivatives in s1 and s2."""
    h1, h2, e1, e2 = _cusp_heights(side1, s1, side2, s2)
    Q = _q2(h1, h2)
    length = 2.0 * math.asinh(math.sqrt(Q))
    if Q == 0.0:
        return length, 0.0, 0.0
    a = 0.25 * math.exp(-(h1 + h2))
    b = 0.5 * math.sinh(h1 - h2)
    scale = 1.0 / (math.sqrt(Q) * math.sqrt(1.0 + Q))
    return length, scale * e1 * (-a + b), scale * e2 * (-a - b)


def model_side(labels, x, y) -> str:
    """Model side for face-rep labels ``x, y`` of a face with vertex labels ``labels``."""
    lo, mid, hi = sorted(labels)
    pair = {x, y}
    if pair == {lo, hi}:
        return SIDE_0I
    if pair == {mid, hi}:
        return SIDE_1I
    if pair == {lo, mid}:
        return SIDE_01
    raise ValueError(f"{x},{y} is not a side of face with labels {labels}")


# --------------------------------------------------------------- metric data
class JRMetricData:
    """Side identifications of every face class with the model triangle.

    ``offsets`` maps ``(face_class, (x, y))`` (rep labels, x < y) to a real
    shift; the default of 0 everywhere gives the regular structure.  The
    flip of a side is +1 when the edge class orientation runs from x to y.
    """

    def __init__(self, T: TriangulationWindow, offsets: dict | None = None):
        self.window = T
        self.offsets = dict(offsets or {})
        self.sides = {}
        for fc, members in enumerate(T.face_classes):
            t, f = members[0]
            labels = tuple(v for v in range(4) if v != f)
            for x, y in ((labels[0], labels[1]), (labels[0], labels[2]), (labels[1], labels[2])):
                ec, s = T.edge_class(t, x, y)
                off = float(self.offsets.get((fc, (x, y)), 0.0))
                self.sides[(fc, (x, y))] = (ec, model_side(labels, x, y), s, off)

    @property
    def regular(self) -> bool:
        return all(v == 0 for v in self.offsets.values())

    def face_labels(self, fc):
        t, f = self.window.face_rep(fc)
        return tuple(v for v in range(4) if v != f)

    def side_info(self, fc, x, y):
        """(edge class, model side, flip, offset) for rep labels x, y."""
        return self.sides[(fc, (min(x, y), max(x, y)))]

    def locate(self, fc, pos: EdgePosition):
        if pos.side is not None:
            x, y = pos.side
            info = self.side_info(fc, x, y)
            if info[0] != pos.edge_class:
                raise ValueError(f"side {pos.side} of face {fc} is not on edge class {pos.edge_class}")
            return (min(x, y), max(x, y)), info
        hits = [
            (key[1], info) for key, info in self.sides.items() if key[0] == fc and info[0] == pos.edge_class
        ]
        if not hits:
            raise ValueError(f"edge class {pos.edge_class} is not on face {fc}")
        if len(hits) > 1:
            raise ValueError(f"face {fc} meets edge class {pos.edge_class} twice; give a side")
        return hits[0]

    def model_param(self, info, theta):
        _, side, flip, off = info
        return side, flip * theta + off

    def isometry_signature(self, tets):
        """Canonical form of the sub-complex on ``tets`` with its side shears."""
        return isometry_signature(self, tets)


def arc_length(metric: JRMetricData, face: int, p: EdgePosition, q: EdgePosition) -> float:
    """Hyperbolic length of the geodesic arc joining two points on distinct sides."""
    (sp, ip), (sq, iq) = metric.locate(face, p), metric.locate(face, q)
    if sp == sq:
        raise SameSide(f"both points on side {sp} of face {face}")
    a, s1 = metric.model_param(ip, p.param)
    b, s2 = metric.model_param(iq, q.param)
    return model_arc_length(a, s1, b, s2)


# ------------------------------------------------------------ arc systems
@dataclass
class ArcSystem:
    """Arcs in model triangles with endpoints tied to shared variables.

    Each arc is ``(side1, ref1, side2, ref2)``; a ref is ``("var", i, flip,
    offset)`` for ``flip * x[i] + offset`` or ``("fix", value)``.
    """

    arcs: list
    nvars: int

    def _value(self, ref, x):
        if ref[0] == "fix":
            return ref[1]
        _, i, flip, off = ref
        return flip * x[i] + off

    def length(self, x) -> float:
        return sum(
            model_arc_length(s1, self._value(r1, x), s2, self._value(r2, x)) for s1, r1, s2, r2 in self.arcs
        )

    def gradient(self, x):
        g = np.zeros(self.nvars)
        total = 0.0
        for s1, r1, s2, r2 in self.arcs:
            length, g1, g2 = model_arc_gradient(s1, self._value(r1, x), s2, self._value(r2, x))
            total += length
            if r1[0] == "var":
                g[r1[1]] += r1[2] * g1
            if r2[0] == "var":
                g[r2[1]] += r2[2] * g2
        return total, g


def surface_arc_system(metric: JRMetricData, S):
    """Variables are the crossing positions of S, in edge-class then index order."""
    T = metric.window
    if T is not S.window:
        raise ValueError("metric and surface live on different windows")
    for did, crossings in S.disk_crossings.items():
        if len({c[0] for c in crossings}) != len(crossings):
            raise NotNormal(f"disk {did} meets an edge class twice")
    index = {}
    x0 = []
    for ec in sorted(S.counts):
        for j, p in enumerate(S.params[ec]):
            index[(ec, j)] = len(x0)
            x0.append(p)
    arcs = []
    for key, arc in sorted(S.arcs.items()):
        fc, u, _ = key
        labels = metric.face_labels(fc)
        w1, w2 = sorted(v for v in labels if v != u)
        refs = []
        for (x, y), crossing in (((u, w1), arc.ends[0]), ((u, w2), arc.ends[1])):
            ec, side, flip, off = metric.side_info(fc, x, y)
            if ec != crossing[0]:
                raise AssertionError("arc endpoint not on the expected edge class")
            refs.append((side, ("var", index[crossing], flip, off)))
        arcs.append((refs[0][0], refs[0][1], refs[1][0], refs[1][1]))
    return ArcSystem(arcs, len(x0)), index, np.array(x0, dtype=float)


def pl_area(metric: JRMetricData, S) -> PLArea:
    """Weight and total arc length of a realized surface."""
    if not S.disks:
        return PLArea(0, 0.0)
    system, _, x0 = surface_arc_system(metric, S)
    return PLArea(S.weight, system.length(x0))


# ------------------------------------------------------------- minimization
@dataclass
class MinimizeResult:
    x: np.ndarray
    length: float
    status: Status
    iterations: int
    history: list

    @property
    def converged(self):
        return self.status is Status.CONVERGED


def _hessian(system: ArcSystem, x, g0, h=1e-6):
    n = len(x)
    H = np.zeros((n, n))
    for i in range(n):
        xp = x.copy()
        xp[i] += h
        xm = x.copy()
        xm[i] -= h
        H[:, i] = (system.gradient(xp)[1] - system.gradient(xm)[1]) / (2 * h)
    return 0.5 * (H + H.T)


def _probe(system, x, f, g):
    """Unit step along the normalized descent direction, kept only on a
    strict relative decrease.  This is what exposes drift into a cusp,
    where gradients underflow long before lengths stop shrinking."""
    norm = np.linalg.norm(g)
    if norm == 0.0:
        return None
    xp = x - g / norm
    fp, gp = system.gradient(xp)
    if fp < f * (1.0 - PROBE_DECREASE):
        return xp, fp, gp
    return None


def minimize_arc_system(system: ArcSystem, x0, *, max_iter: int = 500, drift_bound: float = DRIFT_BOUND):
    """Damped Newton with Armijo backtracking; lengths never increase."""
    x = np.array(x0, dtype=float)
    f, g = system.gradient(x)
    history = [f]
    if system.nvars == 0:
        return MinimizeResult(x, f, Status.CONVERGED, 0, history)
    for it in range(max_iter):
        if np.max(np.abs(x)) > drift_bound:
            return MinimizeResult(x, f, Status.CUSP_DRIFT, it, history)
        moved = None
        if np.max(np.abs(g)) >= GRAD_TOL:
            moved = _newton_step(system, x, f, g)
        if moved is None:
            moved = _probe(system, x, f, g)
            if moved is None:
                return MinimizeResult(x, f, Status.CONVERGED, it, history)
        x, f, g = moved
        history.append(f)
    status = Status.CUSP_DRIFT if np.max(np.abs(x)) > drift_bound else Status.CONVERGED
    return MinimizeResult(x, f, status, max_iter, history)


def _newton_step(system, x, f, g):
    H = _hessian(system, x, g)
    step = None
    lam = 0.0
    for _ in range(40):
        try:
            A = H + lam * np.eye(len(x))
            np.linalg.cholesky(A)
            step = -np.linalg.solve(A, g)
            break
        except np.linalg.LinAlgError:
            lam = max(2 * lam, 1e-8 * (1 + np.max(np.abs(np.diag(H)))))
    if step is None or not np.all(np.isfinite(step)) or g @ step >= 0:
        step = -g
    t = 1.0
    while t > 1e-16:
        xn = x + t * step
        fn, gn = system.gradient(xn)
        if fn <= f + 1e-4 * t * (g @ step):
            return xn, fn, gn
        t *= 0.5
    return None


def minimize_length(metric: JRMetricData, S, **kw):
    """Minimize total arc length over all crossing positions of S.

    Returns ``(positions, length, status)`` where ``positions`` maps each
    edge class to its tuple of optimized parameters.
    """
    system, index, x0 = surface_arc_system(metric, S)
    res = minimize_arc_system(system, x0, **kw)
    positions = {ec: [0.0] * n for ec, n in S.counts.items()}
    for (ec, j), i in index.items():
        positions[ec][j] = float(res.x[i])
    return {ec: tuple(v) for ec, v in positions.items()}, res.length, res.status


# ------------------------------------------------------------ isometry types
def isometry_signature(metric: JRMetricData, tets):
    """Canonical relabeling of the face-connected sub-complex on ``tets``.

    Tries every start tet and vertex relabeling, numbers tets breadth first
    through internal gluings and keeps the least encoding.  The encoding
    carries the gluing pattern and the shear of every internal side, which
    is zero for regular metric data.
    """
    T = metric.window
    tets = list(tets)
    inside = set(tets)
    best = None
    perms = list(itertools.permutations(range(4)))
    for start in tets:
        for p0 in perms:
            order = [start]
            relabel = {start: p0}
            code = []
            i = 0
            while i < len(order):
                t = order[i]
                pt = relabel[t]
                inv = [0] * 4
                for a, b in enumerate(pt):
                    inv[b] = a
                for nf in range(4):
                    f = inv[nf]
                    g = T.glued(t, f)
                    if g is None or g[0] not in inside:
                        code.append((-1,))
                        continue
                    partner, perm = g
                    if partner not in relabel:
                        # new tet: relabel so the glued face reads like ours
                        relabel[partner] = tuple(pt[perm.index(v)] for v in range(4))
                        order.append(partner)
                    pp = relabel[partner]
                    glue = tuple(pp[perm[inv[v]]] for v in range(4))
                    shear = _face_shear(metric, t, f)
                    code.append((order.index(partner), glue, shear))
                i += 1
            if len(order) < len(tets):
                continue
            enc = tuple(code)
            if best is None or enc < best:
                best = enc
    return best


def _face_shear(metric, t, f):
    T = metric.window
    fc = T.face_class(t, f)
    total = 0.0
    for key, info in metric.sides.items():
        if key[0] == fc:
            total += abs(info[3])
    return round(total, 9)
