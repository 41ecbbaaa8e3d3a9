"""fraisse-lab command line: JSON lines on stdout, short summaries on stderr.

Exit codes: 0 success, 1 a violation (or failed check) was found, 2 usage or
resource errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from fractions import Fraction

from . import amalgam, core, katetov, ngon, sir
from .errors import DepthCaveat, FraisseError, InternalInvariantViolation
from .io import load, to_dot, to_json


def _emit(obj):
    sys.stdout.write(json.dumps(obj, sort_keys=True, default=str) + "\n")


def _say(msg):
    sys.stderr.write(msg + "\n")


def _menu(text):
    if not text:
        return None
    return tuple(Fraction(t) for t in text.split(","))


def _perm(text):
    text = text.strip()
    if text.startswith("{"):
        return {int(k): int(v) for k, v in json.loads(text).items()}
    out = {}
    for item in text.split(","):
        k, _, v = item.partition(":")
        out[int(k)] = int(v)
    return out


def _tag(name, n=None):
    if name == "ngon":
        return core.NGon(n or 3)
    return {"graph": core.GRAPH, "poset": core.POSET, "metric": core.METRIC}[name]


# -- commands ---------------------------------------------------------------------------------

def cmd_validate(args):
    s = load(args.file)
    bad = core.validate(s)
    _emit({"command": "validate", "ok": bad is None, "violation": None if bad is None else
           {"message": bad.message, "witness": bad.witness}})
    _say("ok" if bad is None else f"violation: {bad.message}")
    return 0 if bad is None else 1


def cmd_amalgamate(args):
    kind = sir.SirKind.parse(args.kind)
    base, ea, eb = load(args.base), load(args.ext_a), load(args.ext_b)
    a = amalgam.ExtensionType(base, ea)
    b = amalgam.ExtensionType(base, eb)
    am = amalgam.canonical_amalgam(kind, a, b)
    _emit(dict(command="amalgamate", kind=str(kind), **am.to_json()))
    _say(f"amalgam over {len(base)} base vertices: {len(am.result)} vertices")
    return 0


def cmd_katetov(args):
    kind = sir.SirKind.parse(args.kind)
    X = load(args.file)
    tower = katetov.build_tower(kind, X, args.m, args.k, _menu(args.menu), bound=args.search_bound)
    _emit(dict(command="katetov", **tower.to_json()))
    rep = katetov.check_richness(tower, kind=kind, menu=_menu(args.menu), max_base=args.max_base)
    _emit({"command": "katetov", "richness": rep.to_json()})
    _say(f"levels {[len(L) for L in tower.levels]}, richness complete: {rep.complete}")
    return 0 if rep.complete else 1


def cmd_lift(args):
    kind = sir.SirKind.parse(args.kind)
    X = load(args.tower)
    f = _perm(args.perm)
    if not core.is_embedding(X, X, f):
        _say("the permutation is not an automorphism of the base")
        return 2
    tower = katetov.build_tower(kind, X, args.m, args.k, _menu(args.menu), bound=args.search_bound)
    lift = katetov.lift_automorphism(kind, tower, f)
    _emit({"command": "lift", "sizes": [len(L) for L in tower.levels], "maps": lift.to_json()})
    if args.k >= 1:
        E1 = tower.levels[1]
        for v in E1.vertices:
            w = katetov.finite_determination_witness(kind, tower, f, [v])
            _emit({"command": "lift", "vertex": v, "image": lift[1][v], "witness": sorted(w.C),
                   "checked": w.checked})
    _say(f"lifted through {len(tower.levels) - 1} level(s)")
    return 0


def cmd_sir_check(args):
    kind = sir.SirKind.parse(args.kind)
    ambient = katetov.default_approximant(kind, rounds=args.rounds, seed=args.seed)
    rel = sir.mutant(kind) if args.mutant else None
    rep = sir.check_axioms(kind, ambient, trials=args.trials, seed=args.seed, relation=rel)
    for line in rep.to_json():
        _emit(line)
    _say(f"{kind}{' (mutant)' if args.mutant else ''}: {rep.violations} violations "
         f"in {args.trials} trials per axiom, ambient of {len(ambient)} vertices")
    return 0 if rep.ok else 1


def cmd_ngon(args):
    if args.ngon_cmd == "complete":
        G = load(args.file)
        rep = ngon.free_completion(args.n, G, args.depth)
        _emit(dict(command="ngon complete", **rep.to_json(), fragment=to_json(rep.fragment),
                   girth=_num(ngon.girth(rep.fragment)), diameter=_num(ngon.diameter(rep.fragment))))
        if args.dot:
            with open(args.dot, "w") as fh:
                fh.write(to_dot(rep.fragment, rep.vertex_round))
        _say(f"{rep.rounds} round(s), fixpoint: {rep.fixpoint}, {len(rep.fragment)} vertices")
        return 0
    if args.ngon_cmd == "strong":
        X, Y = load(args.x_file), load(args.y_file)
        cert = ngon.is_n_strong(args.n, X, Y, bound=args.strong_bound)
        _emit(dict(command="ngon strong", **cert.to_json()))
        _say(f"strong: {cert.verdict} (min relative characteristic {cert.value})")
        return 0
    G = load(args.file)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DepthCaveat)
        v = ngon.eval_fk(G, args.k, args.x, args.y)
    caveat = [str(w.message) for w in caught if issubclass(w.category, DepthCaveat)]
    _emit({"command": "ngon fk", "k": args.k, "x": args.x, "y": args.y, "value": v,
           "caveat": caveat or None})
    return 0


def _num(x):
    return None if x == ngon.INF else x


def cmd_saturate(args):
    tag = _tag(args.class_, args.n)
    kind = sir.SirKind.parse(args.kind) if args.kind else sir.default_kind(tag)
    if tag.kind == "metric":
        X = core.metric([0], {})
    elif tag.kind == "ngon":
        X = core.cycle(2 * tag.n, tag)
    else:
        X = core.empty(tag)
    chain = katetov.saturate(kind, X, args.m, args.rounds, base_bound=args.base_bound,
                             seed=args.seed if args.random else None, menu=_menu(args.menu))
    _emit({"command": "saturate", "class": str(tag), "sizes": [len(L) for L in chain],
           "structure": to_json(chain[-1])})
    _say(f"chain sizes {[len(L) for L in chain]}")
    return 0


def cmd_bnf(args):
    A, B = load(args.a), load(args.b)
    res = katetov.back_and_forth_iso(A, B, args.depth)
    _emit(dict(command="bnf-iso", **res.to_json()))
    _say("equivalent" if res.equivalent else "distinguished")
    return 0 if res.equivalent else 1


def cor57(n: int = 3, out=_emit) -> bool:
    """An order-2 automorphism of the 2n-cycle lifted through one n-gon Katětov step."""
    tag = core.NGon(n)
    X = core.cycle(2 * n, tag)
    f = {v: (-v) % (2 * n) for v in X.vertices}
    kind = sir.NGonStrong(n)
    tower = katetov.build_tower(kind, X, 1, 1, bound=len(X) + 1)
    lift = katetov.lift_automorphism(kind, tower, f)
    E1, g = tower.levels[1], lift[1]
    checks = {
        "f_is_automorphism": core.is_embedding(X, X, f),
        "f_has_order_2": all(f[f[v]] == v for v in X.vertices) and f != {v: v for v in X.vertices},
        "lift_is_automorphism": core.is_embedding(E1, E1, g),
        "lift_restricts_to_f": all(g[v] == f[v] for v in X.vertices),
        "lift_has_order_2": all(g[g[v]] == v for v in E1.vertices),
        "girth_ok": ngon.girth(E1) >= 2 * n,
    }
    out({"command": "demo cor57", "n": n, "fragment": len(X), "catalog": len(tower.steps[0].catalog),
         "E1": len(E1), "moved": sum(1 for v in E1.vertices if g[v] != v), "checks": checks,
         "lift": [[v, g[v]] for v in E1.vertices]})
    return all(checks.values())


def cmd_demo(args):
    ok = cor57(args.n)
    _say("cor57: " + ("all checks passed" if ok else "a check failed"))
    return 0 if ok else 1


# -- parser ---------------------------------------------------------------------------------------

def build_parser():
    env_seed = int(os.environ.get("FRAISSE_LAB_SEED", "0"))
    p = argparse.ArgumentParser(prog="fraisse-lab", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=env_seed)
    p.add_argument("--search-bound", type=int, default=16)
    p.add_argument("--strong-bound", type=int, default=ngon.STRONG_BOUND)
    # the same options may also follow the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--search-bound", type=int, default=argparse.SUPPRESS)
    common.add_argument("--strong-bound", type=int, default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="cmd", required=True)
    _add = sub.add_parser
    sub.add_parser = lambda *a, **kw: _add(*a, parents=[common], **kw)

    s = sub.add_parser("validate")
    s.add_argument("file")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("amalgamate")
    s.add_argument("--kind", required=True)
    s.add_argument("base")
    s.add_argument("ext_a")
    s.add_argument("ext_b")
    s.set_defaults(fn=cmd_amalgamate)

    s = sub.add_parser("katetov")
    s.add_argument("--kind", required=True)
    s.add_argument("-m", type=int, default=1)
    s.add_argument("-k", type=int, default=1)
    s.add_argument("--menu")
    s.add_argument("--max-base", type=int, default=None)
    s.add_argument("file")
    s.set_defaults(fn=cmd_katetov)

    s = sub.add_parser("lift")
    s.add_argument("--kind", required=True)
    s.add_argument("-m", type=int, default=1)
    s.add_argument("-k", type=int, default=1)
    s.add_argument("--menu")
    s.add_argument("tower", help="base structure E_0 of the tower")
    s.add_argument("perm", help='automorphism as "0:1,1:0" or a JSON object')
    s.set_defaults(fn=cmd_lift)

    s = sub.add_parser("sir-check")
    s.add_argument("--kind", required=True)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--rounds", type=int, default=3)
    s.add_argument("--mutant", action="store_true")
    s.set_defaults(fn=cmd_sir_check)

    s = sub.add_parser("ngon")
    ns = s.add_subparsers(dest="ngon_cmd", required=True)
    _nadd = ns.add_parser
    ns.add_parser = lambda *a, **kw: _nadd(*a, parents=[common], **kw)
    c = ns.add_parser("complete")
    c.add_argument("-n", type=int, required=True)
    c.add_argument("--depth", type=int, default=1)
    c.add_argument("--dot")
    c.add_argument("file")
    c = ns.add_parser("strong")
    c.add_argument("-n", type=int, required=True)
    c.add_argument("x_file")
    c.add_argument("y_file")
    c = ns.add_parser("fk")
    c.add_argument("-n", type=int, required=True)
    c.add_argument("-k", type=int, required=True)
    c.add_argument("file")
    c.add_argument("x", type=int)
    c.add_argument("y", type=int)
    s.set_defaults(fn=cmd_ngon)

    s = sub.add_parser("saturate")
    s.add_argument("--class", dest="class_", required=True, choices=["graph", "poset", "metric", "ngon"])
    s.add_argument("--kind")
    s.add_argument("-n", type=int, default=3)
    s.add_argument("-m", type=int, default=1)
    s.add_argument("--rounds", type=int, default=3)
    s.add_argument("--base-bound", type=int, default=2)
    s.add_argument("--menu")
    s.add_argument("--random", action="store_true", help="seeded random adjacency (graphs)")
    s.set_defaults(fn=cmd_saturate)

    s = sub.add_parser("bnf-iso")
    s.add_argument("--depth", type=int, default=2)
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(fn=cmd_bnf)

    s = sub.add_parser("demo")
    ds = s.add_subparsers(dest="demo", required=True)
    c = ds.add_parser("cor57")
    c.add_argument("-n", type=int, default=3)
    s.set_defaults(fn=cmd_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    for name in ("search_bound", "strong_bound"):
        if getattr(args, name) < 1:
            _say(f"--{name.replace('_', '-')} must be positive")
            return 2
    try:
        return args.fn(args)
    except InternalInvariantViolation as e:
        _emit({"error": "InternalInvariantViolation", "message": str(e)})
        _say(f"invariant violated: {e}")
        return 1
    except (FraisseError, ValueError, KeyError, OSError) as e:
        _emit({"error": type(e).__name__, "message": str(e)})
        _say(f"error: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
