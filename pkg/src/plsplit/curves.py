"""Curves in general position with the 2-skeleton, and their normalization."""

from __future__ import annotations

from dataclasses import dataclass, field

from .complex import TriangulationWindow
from .errors import NotGeneralPosition


@dataclass(frozen=True)
class NormalCurve:
    """A cyclic (``closed``) or linear sequence of ``(tet, entry face, exit face)``.

    Length counts crossings with the 2-skeleton.  A curve that normalizes
    away completely keeps the tet it shrank into and is flagged trivial.
    """

    segments: tuple
    closed: bool = True
    trivial: bool = False
    home: object = None

    @property
    def length(self) -> int:
        if not self.segments:
            return 0
        return len(self.segments) if self.closed else len(self.segments) - 1

    def is_normal(self) -> bool:
        ends = self.segments if self.closed else self.segments[1:-1]
        return all(a != b for _, a, b in ends)

    def tets(self):
        return [t for t, _, _ in self.segments]


def check_general_position(T: TriangulationWindow, segments, closed=True):
    """Consecutive segments must pass through glued faces."""
    n = len(segments)
    pairs = range(n) if closed else range(n - 1)
    for i in pairs:
        t, _, out = segments[i]
        u, inn, _ = segments[(i + 1) % n]
        g = T.glued(t, out)
        if g is None or g[0] != u or g[1][out] != inn:
            raise NotGeneralPosition(f"segment {i} leaves tet {t} through face {out} but segment {i + 1} does not enter there")


@dataclass
class NormalizeResult:
    curve: NormalCurve
    moves: list = field(default_factory=list)


def normalize_curve(T: TriangulationWindow, segments, *, closed=True) -> NormalizeResult:
    """Remove face backtracks until every segment joins distinct faces.

    A backtrack enters and leaves a tet through the same face; dropping it
    merges its neighbours and shortens the curve by two crossings.
    """
    segs = [tuple(s) for s in segments]
    if not segs:
        raise NotGeneralPosition("empty curve")
    if len(segs) == 1 and segs[0][1] is None:
        # a loop that never leaves its tet
        return NormalizeResult(NormalCurve((), closed, True, segs[0][0]), [])
    check_general_position(T, segs, closed)
    moves = []
    home = segs[0][0]
    changed = True
    while changed:
        changed = False
        n = len(segs)
        for i in range(n):
            t, a, b = segs[i]
            if a != b:
                continue
            if not closed and (i == 0 or i == n - 1):
                continue
            if n == 1:
                continue
            if closed and n == 2:
                # the curve runs into one tet and straight back: it is trivial
                moves.append(("backtrack", i, t, a))
                home = segs[(i + 1) % n][0]
                segs = []
                changed = False
                break
            moves.append(("backtrack", i, t, a))
            if closed:
                # rotate so the backtrack sits at index 1
                segs = segs[i - 1 :] + segs[: i - 1] if i else segs[-1:] + segs[:-1]
                i = 1
            pt, pa, _ = segs[i - 1]
            _, _, nb = segs[i + 1]
            home = pt
            segs = segs[: i - 1] + [(pt, pa, nb)] + segs[i + 2 :]
            changed = True
            break
    if not segs:
        return NormalizeResult(NormalCurve((), closed, True, home), moves)
    return NormalizeResult(NormalCurve(tuple(segs), closed), moves)
