"""Text formats for complexes and surfaces, and JSON report emission.

``.tri`` (finite complex)::

    # comments start with '#'
    name double-s3
    bound 4
    tet 0: 0->1/0123 1->1/0123 2->1/0123 3->bd

Each face token is ``<face>-><tet>/<perm>`` or ``<face>->bd``; the perm
is four digits giving the images of vertices 0..3.

Periodic generator (same file type)::

    periodic name=T2xR bound=12 reach=1
    block=0: 0->4/3012 1->3/0123 2->1/0123 3->2/1230,shift=-1

``.nsc`` (normal coordinates), one line per tet with nonzero vector::

    surf fiber tet 3: 0 0 0 1 0 0 0
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from pathlib import Path

from . import __version__
from .complex import LazyComplex, PeriodicSpec, TriangulationWindow, build_complex, parse_perm, perm_str
from .errors import InvalidGluing, ParseError
from .normal import NormalCoordinates

_FACE = re.compile(r"^(\d)->(?:(bd)|(-?[A-Za-z0-9_]+)/([0-3]{4})(?:,shift=(-?\d+))?)$")


def _tet_id(tok: str):
    return int(tok) if re.fullmatch(r"-?\d+", tok) else tok


def _parse_faces(tokens, lineno, allow_shift):
    faces = [None] * 4
    seen = set()
    for tok in tokens:
        m = _FACE.match(tok)
        if not m:
            raise ParseError(f"bad face token {tok!r}", lineno)
        f = int(m.group(1))
        if f > 3 or f in seen:
            raise ParseError(f"face {f} out of range or repeated", lineno)
        seen.add(f)
        if m.group(2):
            continue
        try:
            perm = parse_perm(m.group(4))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        shift = m.group(5)
        if shift is not None and not allow_shift:
            raise ParseError("shift is only allowed in periodic blocks", lineno)
        partner = _tet_id(m.group(3))
        faces[f] = (partner, perm, int(shift)) if shift else (partner, perm)
    if len(seen) != 4:
        raise ParseError("every tet lists four faces", lineno)
    return faces


def parse_tri(text: str):
    """Parse a ``.tri`` document into a window or a lazy periodic complex."""
    lines = text.splitlines()
    name, bound = "", None
    tet_line = {}
    table = {}
    periodic = None
    block = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("periodic"):
            periodic = {"name": "periodic", "bound": None, "reach": 1}
            for kv in line.split()[1:]:
                if "=" not in kv:
                    raise ParseError(f"expected key=value, got {kv!r}", lineno)
                k, v = kv.split("=", 1)
                if k not in periodic:
                    raise ParseError(f"unknown periodic key {k!r}", lineno)
                periodic[k] = v if k == "name" else _int(v, lineno)
            continue
        if line.startswith("block="):
            if periodic is None:
                raise ParseError("block line before 'periodic' header", lineno)
            head, _, rest = line.partition(":")
            local = _int(head[len("block=") :], lineno)
            if local in block:
                raise ParseError(f"block tet {local} listed twice", lineno)
            block[local] = _parse_faces(rest.split(), lineno, True)
            continue
        word, _, rest = line.partition(" ")
        if word == "name":
            name = rest.strip()
        elif word == "bound":
            bound = _int(rest.strip(), lineno)
        elif word == "tet":
            head, colon, body = rest.partition(":")
            if not colon:
                raise ParseError("missing ':' after tet id", lineno)
            t = _tet_id(head.strip())
            if t in table:
                raise ParseError(f"tet {t} listed twice", lineno)
            table[t] = _parse_faces(body.split(), lineno, False)
            tet_line[t] = lineno
        else:
            raise ParseError(f"unknown directive {word!r}", lineno)
    if periodic is not None:
        if table:
            raise ParseError("a file holds either tets or a periodic block, not both")
        if periodic["bound"] is None:
            raise ParseError("periodic complexes must declare bound=")
        spec = PeriodicSpec(block=block, bound=periodic["bound"], reach=periodic["reach"], name=periodic["name"])
        try:
            return LazyComplex(spec)
        except InvalidGluing as exc:
            raise ParseError(str(exc)) from None
    try:
        return build_complex(table, declared_bound=bound, name=name)
    except InvalidGluing as exc:
        raise ParseError(str(exc), tet_line.get(exc.tet)) from None


def _int(tok, lineno):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", lineno) from None


def _face_token(f, g):
    if g is None:
        return f"{f}->bd"
    tok = f"{f}->{g[0]}/{perm_str(g[1])}"
    if len(g) > 2 and g[2]:
        tok += f",shift={g[2]}"
    return tok


def emit_tri(obj) -> str:
    if isinstance(obj, LazyComplex):
        spec = obj.spec
        out = [f"periodic name={spec.name} bound={spec.bound} reach={spec.reach}"]
        for lt in sorted(spec.block):
            toks = " ".join(_face_token(f, g) for f, g in enumerate(spec.block[lt]))
            out.append(f"block={lt}: {toks}")
        return "\n".join(out) + "\n"
    T: TriangulationWindow = obj
    out = []
    if T.name:
        out.append(f"name {T.name}")
    if T.declared_bound is not None:
        out.append(f"bound {T.declared_bound}")
    for t in T.tets:
        toks = " ".join(_face_token(f, T.glued(t, f)) for f in range(4))
        out.append(f"tet {t}: {toks}")
    return "\n".join(out) + "\n"


def read_tri(path):
    return parse_tri(Path(path).read_text())


def write_tri(obj, path):
    Path(path).write_text(emit_tri(obj))


# ------------------------------------------------------------------- .nsc
def parse_nsc(text: str) -> dict:
    """Parse ``surf`` lines into an ordered dict of name -> NormalCoordinates."""
    surfaces = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"surf\s+(\S+)\s+tet\s+(\S+)\s*:\s*(.*)", line)
        if not m:
            raise ParseError("expected 'surf <name> tet <id>: t0 t1 t2 t3 q0 q1 q2'", lineno)
        name, t, body = m.group(1), _tet_id(m.group(2)), m.group(3).split()
        if len(body) != 7:
            raise ParseError(f"expected 7 coordinates, got {len(body)}", lineno)
        vec = tuple(_int(x, lineno) for x in body)
        if min(vec) < 0:
            raise ParseError("coordinates are nonnegative", lineno)
        d = surfaces.setdefault(name, {})
        if t in d:
            raise ParseError(f"tet {t} repeated for surface {name}", lineno)
        d[t] = vec
    return {name: NormalCoordinates.from_dict(d) for name, d in surfaces.items()}


def emit_nsc(surfaces: dict) -> str:
    out = []
    for name, c in surfaces.items():
        if " " in name:
            raise ValueError("surface names cannot contain spaces")
        if c.is_empty():
            out.append(f"# surf {name} is empty")
        for t, vec in c.entries:
            out.append(f"surf {name} tet {t}: " + " ".join(str(x) for x in vec))
    return "\n".join(out) + "\n"


def read_nsc(path):
    return parse_nsc(Path(path).read_text())


def write_nsc(surfaces, path):
    Path(path).write_text(emit_nsc(surfaces))


# ------------------------------------------------------------------ reports
def _clean(obj):
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return str(obj)
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):
        return _clean(obj.item())
    return obj


def digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def report_json(payload: dict, *, inputs=()) -> str:
    """Deterministic JSON: sorted keys, floats at 12 significant digits."""
    body = {"tool": "plsplit", "version": __version__, "inputs": {str(p): digest(p) for p in inputs}}
    body.update(payload)
    return json.dumps(_clean(body), sort_keys=True, indent=2) + "\n"
