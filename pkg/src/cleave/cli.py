"""Command line entry point: `cleave gen|verify|compose|blueprint|theta|graphs|render`."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields

import numpy as np

from . import blueprint as bp
from . import fullgraph as fg
from . import tolerances
from .errors import CleaveError
from .estructure import IString, theta
from .harness import SUITES, RunConfig, verify
from .operad import CleavageElement, compose_i
from .regions import SphereRegion, set_engine
from .render import render_svg
from .sampling import SampleStats, random_element
from .trees import check_perm


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _ints(text: str) -> tuple[int, ...]:
    """'2-5' or '2,3,5' or '4'."""
    text = text.strip()
    if "-" in text:
        lo, hi = (int(x) for x in text.split("-", 1))
        return tuple(range(lo, hi + 1))
    return tuple(int(x) for x in text.split(",") if x)


def _load_json(src: str | None):
    if src is None or src == "-":
        return json.load(sys.stdin)
    if src.lstrip().startswith(("{", "[")):
        return json.loads(src)
    with open(src) as fh:
        return json.load(fh)


def _load_lines(src: str | None) -> list:
    if src is not None and src != "-" and src.lstrip().startswith(("{", "[")):
        data = json.loads(src)
        return data if isinstance(data, list) else [data]
    fh = sys.stdin if src in (None, "-") else open(src)
    try:
        return [json.loads(line) for line in fh if line.strip()]
    finally:
        if fh is not sys.stdin:
            fh.close()


def _config(args) -> RunConfig:
    base = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            base = json.load(fh)
        known = {f.name for f in fields(RunConfig)}
        unknown = set(base) - known
        if unknown:
            raise SystemExit(f"unknown config keys: {sorted(unknown)}")
        for key in ("n", "k"):
            if key in base:
                base[key] = tuple(base[key]) if isinstance(base[key], list) else (int(base[key]),)
    over = {"n": _ints(args.n) if args.n else None, "k": _ints(args.k) if args.k else None,
            "trials": args.trials, "seed": args.seed, "mesh_level": args.mesh_level, "eps": args.eps}
    base.update({k: v for k, v in over.items() if v is not None})
    for key in ("workers", "mutate", "law"):
        if getattr(args, key, None):
            base[key] = getattr(args, key)
    return RunConfig(**base)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", help="sphere dimension(s): 1, 2 or 1-2")
    p.add_argument("--k", help="arity or arities, e.g. 4, 2-5 or 2,4")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--mesh-level", type=int, dest="mesh_level")
    p.add_argument("--eps", type=float, help="sidedness tolerance")
    p.add_argument("--config", help="JSON file with run settings; flags override it")
    p.add_argument("--json", dest="json_in", help="input JSON: a path, '-' for stdin, or a literal")


def cmd_gen(args) -> int:
    cfg = _config(args)
    stats = SampleStats()
    rng = np.random.default_rng(cfg.seed)
    for t in range(cfg.trials):
        n = int(rng.choice(cfg.n))
        k = int(rng.choice(cfg.k))
        a = random_element(n, k, rng, stats=stats)
        _emit({"trial": t, "element": a.to_json()})
    _emit({"stats": stats.to_json()})
    return 0


def cmd_verify(args) -> int:
    cfg = _config(args)
    rep = verify(cfg, args.suite)
    _emit(rep.to_json())
    return 0 if rep.ok else 1


def cmd_compose(args) -> int:
    d = _load_json(args.json_in)
    f = CleavageElement.from_json(d["f"])
    g = CleavageElement.from_json(d["g"])
    try:
        _emit({"element": compose_i(f, int(d["i"]), g).to_json()})
    except CleaveError as exc:
        _emit({"error": type(exc).__name__, "detail": str(exc)})
        return 1
    return 0


def _figure_element() -> CleavageElement:
    from .cleaving import DecoratedTree
    from .geometry import kappa, make_hyperplane
    from .trees import BinaryTree, Leaf, Node
    t = BinaryTree(Node(Node(Leaf(1), Leaf(2)), Node(Leaf(3), Leaf(4))))
    nu = np.array([-1.0, 0.2, 0.1])
    decs = (make_hyperplane((1, 0, 0), 0), kappa(nu / np.linalg.norm(nu), 0.6), make_hyperplane((0, 1, 0), 0))
    return CleavageElement(DecoratedTree(t, decs, SphereRegion.full(2)))


def _elements(args) -> list[CleavageElement]:
    if args.figure:
        return [_figure_element()]
    out = []
    for d in _load_lines(args.json_in):
        d = d.get("element", d)
        if "decorations" in d:
            out.append(CleavageElement.from_json(d))
    return out


def cmd_blueprint(args) -> int:
    for a in _elements(args):
        row = {"k": a.arity, "blueprint_components": bp.blueprint_components(a),
               "complement_components": bp.complement_components(a)}
        row["invariant"] = row["complement_components"] - row["blueprint_components"]
        if not args.stats:
            row["partition"] = bp.blueprint(a).partition()
            row["fibers"] = bp.fiber_sizes(a)
        _emit(row)
    return 0


def cmd_theta(args) -> int:
    sigma = check_perm(_ints(args.sigma), len(_ints(args.sigma)))
    k = len(sigma)
    iota = IString(k, _ints(args.istring))
    pairs = [(np.asarray(s, dtype=float), float(r)) for s, r in json.loads(args.pairs)]
    n = len(pairs[0][0]) - 1 if pairs else (int(args.n) if args.n else 2)
    U = SphereRegion.from_json(_load_json(args.json_in), n) if args.json_in else SphereRegion.full(n)
    try:
        a = theta(U, sigma, iota, pairs)
    except CleaveError as exc:
        _emit({"error": type(exc).__name__, "detail": str(exc), "step": getattr(exc, "step", None)})
        return 1
    _emit({"element": a.to_json()})
    return 0


def cmd_graphs(args) -> int:
    n = int(args.n or 2)
    ks = _ints(args.k) if args.k else (3,)
    for k in ks:
        if args.count:
            _emit({"n": n, "k": k, "count": fg.count(n, k)})
            continue
        for G in fg.enumerate_graphs(n, k):
            _emit({**G.to_json(), "sigma": list(fg.to_permutation(G)), "degree": fg.degree(G)})
    return 0


def cmd_render(args) -> int:
    els = _elements(args)
    if len(els) != 1:
        raise SystemExit("render takes exactly one element")
    _emit(render_svg(els[0], args.out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cleave", description="Cleavage operad toolkit")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="random cleaving elements as JSON lines")
    _common(g)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="run a law/invariant suite")
    v.add_argument("suite", choices=SUITES)
    _common(v)
    v.add_argument("--workers", type=int)
    v.add_argument("--mutate", action="store_true", help="inject a known bug (harness self-test)")
    v.add_argument("--law", help="run only this law of the suite, e.g. assoc-seq or c")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compose", help='compose {"f":..., "i":..., "g":...}')
    _common(c)
    c.set_defaults(func=cmd_compose)

    b = sub.add_parser("blueprint", help="blueprint and complement component counts")
    _common(b)
    b.add_argument("--stats", action="store_true", help="counts only")
    b.add_argument("--figure", action="store_true", help="use the built-in nested S^2 configuration")
    b.set_defaults(func=cmd_blueprint)

    t = sub.add_parser("theta", help="build Theta(sigma, iota, pairs)")
    _common(t)
    t.add_argument("--sigma", required=True)
    t.add_argument("--istring", required=True)
    t.add_argument("--pairs", required=True, help='JSON list of [[s...], r]')
    t.set_defaults(func=cmd_theta)

    gr = sub.add_parser("graphs", help="enumerate the full graph operad")
    _common(gr)
    gr.add_argument("--count", action="store_true")
    gr.set_defaults(func=cmd_graphs)

    r = sub.add_parser("render", help="SVG picture of one element")
    _common(r)
    r.add_argument("--out", required=True)
    r.add_argument("--figure", action="store_true")
    r.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "mesh_level", None) is not None:
        set_engine("exact", args.mesh_level)
    if getattr(args, "eps", None) is not None:
        tolerances.set_tolerances(side=args.eps)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
