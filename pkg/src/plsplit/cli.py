"""Command-line front end: example generators, module dispatch and JSON reports.

Exit status is 0 on success, 1 on a validation or parse error and 2 when
a search budget runs out.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .errors import BudgetExceeded, PLSplitError, UnknownExample, WindowTooLarge
from .io import emit_nsc, emit_tri, read_nsc, read_tri, report_json

COMMANDS = ("gen", "enum", "minimize", "intersect", "special", "cut", "check", "pipeline")
EXAMPLES = ("motivating", "product", "periodic-annulus")
DEFAULT_BUDGET = 2_000_000


class ValidationError(PLSplitError):
    pass


@dataclass
class CommandSpec:
    command: str
    inputs: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    out: str | None = None

    def validate(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        for k, v in self.params.items():
            if isinstance(v, (int, float)) and not isinstance(v, bool) and v < 0:
                raise ValidationError(f"{k} must be nonnegative")
        for p in self.inputs:
            if not Path(p).is_file():
                raise ValidationError(f"no such file: {p}")
        return self


# ------------------------------------------------------------ generators
def _kv(params, key, default, lo=None, hi=None):
    v = int(params.get(key, default))
    if (lo is not None and v < lo) or (hi is not None and v > hi):
        raise ValidationError(f"{key}={v} outside [{lo}, {hi}]")
    return v


def generate_example(name: str, params: dict | None = None, out_dir=None) -> dict:
    """Build a named example family and optionally write its files.

    Returns ``{filename: text}``.  ``motivating`` takes ``radius`` (blocks
    on each side of block 0, 0..4); ``product`` takes ``genus`` (1 or 2),
    ``n`` (grid size) and ``layers``; ``periodic-annulus`` takes ``n``,
    the number of tori.
    """
    from . import generators as g

    params = dict(params or {})
    files = {}
    if name == "motivating":
        r = _kv(params, "radius", 1, 0, 4)
        M = g.motivating_example()
        blocks = range(-r, r + 1)
        W = M.lazy.window_blocks(blocks, name=f"motivating-r{r}")
        files["motivating.tri"] = emit_tri(M.lazy)
        files[f"motivating-r{r}.tri"] = emit_tri(W)
        files[f"motivating-r{r}.nsc"] = emit_nsc({"A0": M.annulus(0, blocks), "A1": M.annulus(1, blocks)})
        regions = {}
        for t in W.tets:
            regions.setdefault(M.region_of(t), []).append(t)
        files[f"motivating-r{r}.regions.json"] = report_json(
            {"regions": regions, "labels": M.labels, "members": {"A0": "Annulus", "A1": "Annulus"}}
        )
    elif name == "product":
        genus = _kv(params, "genus", 2, 1, 2)
        n = _kv(params, "n", 4 if genus == 2 else 3, 3, 8)
        layers = _kv(params, "layers", 1, 1, 4)
        base = g.genus2_base(n) if genus == 2 else g.grid_torus(n, "A")
        P = g.product(base, g.circle_fiber(layers))
        stem = f"product-g{genus}-n{n}-m{layers}"
        files[f"{stem}.tri"] = emit_tri(P.window)
        surfs = {}
        for key, (d, o) in {"h": ((1, 0), (0.137, 1.52)), "v": ((0, 1), (1.41, 0.263))}.items():
            surfs[key] = g.vertical_surface(P, g.straight_curve(base, n, d, o))[0]
        files[f"{stem}.nsc"] = emit_nsc(surfs)
    elif name == "periodic-annulus":
        count = _kv(params, "n", 5, 1, 12)
        fx = g.periodic_annulus(count)
        files["periodic-annulus.tri"] = emit_tri(fx.lazy)
        W = fx.lazy.window_blocks(range(-count - 1, count + 1), name=f"periodic-annulus-{count}")
        files[f"periodic-annulus-{count}.tri"] = emit_tri(W)
        for m, c in enumerate(fx.tori):
            files[f"torus{m}.nsc"] = emit_nsc({f"torus{m}": c})
    else:
        raise UnknownExample(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for fname, text in files.items():
            (out / fname).write_text(text)
    return files


# ------------------------------------------------------------- commands
def _window(obj, radius):
    from .complex import LazyComplex

    if isinstance(obj, LazyComplex):
        return obj.expand_window(obj.tet_id(0, 0), radius)
    return obj


def _finite(path, radius=1):
    return _window(read_tri(path), radius)


def _surfaces(spec, T, count=None):
    from .surface import realize_surface

    if len(spec.inputs) < 2:
        raise ValidationError(f"{spec.command} needs a .tri and a .nsc file")
    surfs = read_nsc(spec.inputs[1])
    if count is not None and len(surfs) < count:
        raise ValidationError(f"{spec.command} needs at least {count} surfaces")
    return {k: realize_surface(T, c, name=k) for k, c in surfs.items()}


def _cmd_gen(spec):
    name = spec.params.get("example")
    files = generate_example(name, spec.params.get("gen_params"), spec.params.get("out_dir"))
    return {"example": name, "files": sorted(files)}


def _cmd_enum(spec):
    from .normal import enumerate_surfaces, weight

    T = _finite(spec.inputs[0], spec.params["radius"])
    w = spec.params.get("weight")
    if w is None:
        raise ValidationError("enum needs --weight")
    sols = enumerate_surfaces(T, weight_bound=w, budget=spec.params["budget"])
    rows = [{"weight": weight(T, c), "coords": [[t, list(v)] for t, v in c.entries]} for c in sols]
    return {"window": T.name, "tets": T.num_tets, "count": len(rows), "solutions": rows}


def _cmd_minimize(spec):
    from .hypmetric import JRMetricData, minimize_length

    T = _finite(spec.inputs[0], spec.params["radius"])
    metric = JRMetricData(T)
    out = {}
    for k, S in _surfaces(spec, T).items():
        pos, length, status = minimize_length(metric, S)
        out[k] = {"length": length, "status": status.name, "positions": {str(ec): list(v) for ec, v in sorted(pos.items())}}
    return {"window": T.name, "surfaces": out}


def _cmd_intersect(spec):
    from .interplay import intersect_surfaces

    T = _finite(spec.inputs[0], spec.params["radius"])
    S = _surfaces(spec, T, 2)
    names = list(S)
    pats = [intersect_surfaces(S[a], S[b], names=(a, b)).as_dict() for i, a in enumerate(names) for b in names[i + 1 :]]
    return {"window": T.name, "patterns": pats}


def _cmd_special(spec):
    from .jsj import census_from_surfaces

    T = _finite(spec.inputs[0], spec.params["radius"])
    if len(spec.inputs) < 2:
        raise ValidationError("special needs a .tri and a .nsc file")
    census = census_from_surfaces(T, read_nsc(spec.inputs[1]))
    return {"census": census.as_dict()}


def _cmd_cut(spec):
    from .jsj import cut_along

    T = _finite(spec.inputs[0], spec.params["radius"])
    out = {}
    for k, S in _surfaces(spec, T).items():
        res = cut_along(T, S)
        out[k] = dict(res.as_dict(), chi_identity=res.chi_identity())
    return {"window": T.name, "cuts": out}


def _census(spec, T):
    from .jsj import census_from_surfaces, torus_census

    if len(spec.inputs) > 1:
        return census_from_surfaces(T, read_nsc(spec.inputs[1]))
    w = spec.params.get("weight")
    if w is None:
        raise ValidationError("give --weight or a .nsc census file")
    return torus_census(T, w, budget=spec.params["budget"])


def _consts(spec, census):
    from .jsj import HypothesisConstants

    ks = {k: spec.params[k] for k in ("C1", "C2", "C3", "C4") if spec.params.get(k) is not None}
    if "C1" not in ks and census.members:
        ks["C1"] = max(m.weight for m in census.members)
    return HypothesisConstants(**ks)


def _cmd_check(spec):
    from .jsj import check_hypotheses

    src = read_tri(spec.inputs[0])
    T = _window(src, spec.params["radius"])
    census = _census(spec, T)
    consts = _consts(spec, census)
    hyps = spec.params.get("hyp") or "ABCD"
    verdicts = [check_hypotheses(src, consts, h, census, budget=spec.params["budget"]).as_dict() for h in hyps]
    return {"window": T.name, "census": census.as_dict(), "constants": consts.as_dict(), "verdicts": verdicts}


def _cmd_pipeline(spec):
    from .jsj import census_from_surfaces, check_hypotheses

    src = read_tri(spec.inputs[0])
    T = _window(src, spec.params["radius"])
    report = {"window": T.name, "tets": T.num_tets, "betti": list(T.betti_numbers())}
    census = _census(spec, T)
    consts = _consts(spec, census)
    report["census"] = census.as_dict()
    report["constants"] = consts.as_dict()
    report["verdicts"] = [check_hypotheses(src, consts, h, census, budget=spec.params["budget"]).as_dict() for h in "ABCD"]
    return report


_DISPATCH = {
    "gen": _cmd_gen,
    "enum": _cmd_enum,
    "minimize": _cmd_minimize,
    "intersect": _cmd_intersect,
    "special": _cmd_special,
    "cut": _cmd_cut,
    "check": _cmd_check,
    "pipeline": _cmd_pipeline,
}


def run(spec: CommandSpec) -> int:
    """Dispatch one command, write its report and return the exit status."""
    try:
        spec.validate()
        payload = _DISPATCH[spec.command](spec)
    except (BudgetExceeded, WindowTooLarge) as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 2
    except (PLSplitError, ValueError, OSError) as exc:
        where = f"{spec.inputs[0]}: " if spec.inputs and getattr(exc, "line", None) is not None else ""
        print(f"error: {where}{exc}", file=sys.stderr)
        return 1
    bounds = {k: v for k, v in spec.params.items() if k not in ("gen_params", "out_dir")}
    text = report_json({"command": spec.command, "bounds": bounds, "result": payload}, inputs=spec.inputs)
    if spec.out and spec.command != "gen":
        Path(spec.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# ------------------------------------------------------------- argparse
def _nonneg(s):
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def _nonneg_float(s):
    v = float(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    env = os.environ.get("PLSPLIT_BUDGET")
    budget_default = int(env) if env and env.isdigit() else DEFAULT_BUDGET
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--weight", type=_nonneg, help="weight bound")
    common.add_argument("--radius", type=_nonneg, default=1, help="window radius for periodic inputs")
    for k in ("C1", "C2", "C3", "C4"):
        common.add_argument(f"--{k}", type=_nonneg_float, help=f"hypothesis constant {k}")
    common.add_argument("--budget", type=_nonneg, default=budget_default, help="search budget (default $PLSPLIT_BUDGET)")
    common.add_argument("--out", help="report path, or output directory for gen")

    p = argparse.ArgumentParser(prog="plsplit", description="Normal surfaces and splitting checks on triangulations.")
    p.add_argument("--version", action="version", version=f"plsplit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    g = sub.add_parser("gen", parents=[common], help="write an example family")
    g.add_argument("example", help="|".join(EXAMPLES))
    g.add_argument("params", nargs="*", help="key=value parameters")
    helps = {
        "enum": "enumerate normal surfaces up to --weight",
        "minimize": "minimize arc length of each surface in a .nsc file",
        "intersect": "intersection patterns of all surface pairs",
        "special": "census labels and special classes",
        "cut": "cut along each surface and report the pieces",
        "check": "bounded check of hypotheses A-D",
        "pipeline": "census plus all hypothesis checks",
    }
    for name, text in helps.items():
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("tri", help=".tri file (finite or periodic)")
        if name != "enum":
            s.add_argument("nsc", nargs="?" if name in ("check", "pipeline") else None, help=".nsc file")
        if name == "check":
            s.add_argument("--hyp", default="ABCD", help="hypotheses to check, e.g. A or BC")
    return p


def spec_from_args(ns) -> CommandSpec:
    params = {"budget": ns.budget, "radius": ns.radius, "weight": ns.weight}
    for k in ("C1", "C2", "C3", "C4"):
        params[k] = getattr(ns, k)
    if ns.command == "gen":
        kv = {}
        for tok in ns.params:
            k, eq, v = tok.partition("=")
            if not eq:
                raise ValidationError(f"expected key=value, got {tok!r}")
            kv[k] = v
        params.update(example=ns.example, gen_params=kv, out_dir=ns.out)
        return CommandSpec("gen", [], params, ns.out)
    if ns.command == "check":
        params["hyp"] = ns.hyp.upper()
        if set(params["hyp"]) - set("ABCD"):
            raise ValidationError("--hyp takes letters from ABCD")
    inputs = [ns.tri] + ([ns.nsc] if getattr(ns, "nsc", None) else [])
    return CommandSpec(ns.command, inputs, params, ns.out)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        spec = spec_from_args(ns)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return run(spec)


if __name__ == "__main__":
    sys.exit(main())
