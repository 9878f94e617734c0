"""Command-line entry point: ``submax {solve,simulate,verify,lowerbound,gen,bench}``.

Exit status is 0 iff every bound the command asserts holds.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from .constraints import check_downward_closed, matroid_axiom_check
from .core import EXHAUSTIVE_CAP, check_nonneg_and_zero, check_submodular, tabulate
from .errors import SubmaxError
from .experiments import OFFLINE_ALGORITHMS, ONLINE_ALGORITHMS, ExperimentConfig, emit_report, run_experiment
from .instances import CONSTRAINT_FAMILIES, FUNCTION_FAMILIES, generate_corpus, generate_instance, load_instance, write_corpus
from .lowerbound import large_gadget_upper_bound, two_gadget_lower_bound
from .offline import submod_max_cardinality, submod_max_knapsack, submod_max_psystem
from .unconstrained import FmvBackend


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=d(0), help="master seed")
    parser.add_argument("--cap", type=int, default=d(EXHAUSTIVE_CAP), help="largest n for exhaustive work")
    parser.add_argument("--format", choices=("json", "csv"), default=d("json"), help="report format")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="submax", description="Non-monotone submodular maximization toolkit")
    _global_flags(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)

    for name, algs in (("solve", OFFLINE_ALGORITHMS), ("simulate", ONLINE_ALGORITHMS)):
        sp = sub.add_parser(name, parents=[common], help=f"{name} an instance file")
        sp.add_argument("--instance", required=True)
        sp.add_argument("--algorithm", required=True, choices=algs)
        sp.add_argument("--k", type=int)
        sp.add_argument("--p", type=float)
        sp.add_argument("--budget", type=int)
        sp.add_argument("--fmv", choices=("random", "local", "exact"), default="exact")
        sp.add_argument("--trials", type=int, default=1 if name == "solve" else 1000)
        sp.add_argument("--passes", type=int)
        sp.add_argument("--fast", action="store_true", help="knapsack: second pass on top candidates only")
        sp.add_argument("--report", help="write the report here instead of stdout")

    sp = sub.add_parser("verify", parents=[common], help="property suites on instance files")
    sp.add_argument("instances", nargs="+")
    sp.add_argument("--samples", type=int, default=20_000, help="sampled checks above the cap")

    sp = sub.add_parser("lowerbound", parents=[common], help="exact optimal online payoff on the two-set gadget")
    sp.add_argument("--hide-top", action="store_true", help="top elements are indistinguishable on arrival")

    sp = sub.add_parser("gen", parents=[common], help="generate an instance corpus")
    sp.add_argument("--function", default="coverage_minus_cost", choices=FUNCTION_FAMILIES)
    sp.add_argument("--constraint", default="none", choices=CONSTRAINT_FAMILIES)
    sp.add_argument("--n", type=int, default=10)
    sp.add_argument("--count", type=int, default=10)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("bench", parents=[common], help="time offline algorithms on generated instances")
    sp.add_argument("--n", type=int, nargs="+", default=[10, 20, 40])
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--fmv", choices=("random", "local", "exact"), default="local")
    return ap


def _out(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


def cmd_run(args) -> int:
    cfg = ExperimentConfig(args.algorithm, instance_path=args.instance, k=args.k, p=args.p, budget=args.budget,
                           trials=args.trials, fmv=args.fmv, seed=args.seed, cap=args.cap, fast=args.fast,
                           passes=args.passes)
    rep = run_experiment(cfg)
    text = emit_report(rep, args.report, args.format)
    if args.report is None:
        _out(text)
    return 0 if rep.passed is not False else 1


def cmd_verify(args) -> int:
    ok = True
    rows = []
    for path in args.instances:
        inst = load_instance(path)
        f = tabulate(inst.build_function())
        mode = "exhaustive" if inst.n <= args.cap else "sampled"
        kw = dict(mode=mode, samples=args.samples, seed=args.seed, cap=args.cap)
        checks = {"nonneg": check_nonneg_and_zero(f, **kw), "submodular": check_submodular(f, **kw)}
        system = inst.build_constraint()
        if system is not None and inst.n <= args.cap:
            checks["downward_closed"] = check_downward_closed(system, cap=args.cap)
            if system.is_matroid:
                checks["matroid"] = matroid_axiom_check(system, cap=args.cap)
        for name, r in checks.items():
            ok &= bool(r)
            rows.append({"instance": path, "check": name, "mode": mode, "holds": r.holds,
                         "checked": r.checked, "witness": r.witness})
    if args.format == "json":
        _out(json.dumps(rows, indent=1, default=str) + "\n")
    else:
        _out("instance,check,mode,holds,checked\n")
        for r in rows:
            _out(f"{r['instance']},{r['check']},{r['mode']},{r['holds']},{r['checked']}\n")
    return 0 if ok else 1


def cmd_lowerbound(args) -> int:
    start = time.perf_counter()
    v = two_gadget_lower_bound(reveal_top=not args.hide_top)
    out = {"value": str(v), "float": float(v), "opt": 3, "ratio": str(v / 3),
           "seconds": time.perf_counter() - start, "reveal_top": not args.hide_top,
           "k4_upper_bound": large_gadget_upper_bound(4)}
    if args.format == "json":
        _out(json.dumps(out, indent=1) + "\n")
    else:
        _out(",".join(out) + "\n" + ",".join(str(x) for x in out.values()) + "\n")
    if args.hide_top:
        return 0
    return 0 if v == Fraction(8, 3) else 1


def cmd_gen(args) -> int:
    insts = generate_corpus(args.function, args.constraint, args.count, args.seed, args.n, args.k, args.p)
    spec = {"function": args.function, "constraint": args.constraint, "n": args.n, "count": args.count,
            "k": args.k, "p": args.p, "seed": args.seed}
    manifest = write_corpus(insts, args.out, spec)
    _out(f"{manifest}\n")
    return 0


def cmd_bench(args) -> int:
    rows = []
    for n in args.n:
        for cons, alg in (("uniform", "card"), ("partition", "psys"), ("knapsack", "knapsack")):
            inst = generate_instance("coverage_minus_cost" if n <= 16 else "coverage", cons, n, args.seed,
                                     k=args.k)
            f = inst.build_function()
            system = inst.build_constraint()
            backend = FmvBackend(args.fmv, seed=args.seed)
            start = time.perf_counter()
            if alg == "card":
                res = submod_max_cardinality(f, None, args.k, backend)
            elif alg == "psys":
                res = submod_max_psystem(f, None, system, 1, backend)
            else:
                res = submod_max_knapsack(f, system, None, backend, fast=n > 12)
            rows.append({"n": n, "algorithm": alg, "value": res.value, "queries": f.query_count,
                         "seconds": round(time.perf_counter() - start, 4)})
    if args.format == "json":
        _out(json.dumps(rows, indent=1) + "\n")
    else:
        _out("n,algorithm,value,queries,seconds\n")
        for r in rows:
            _out(",".join(str(r[c]) for c in ("n", "algorithm", "value", "queries", "seconds")) + "\n")
    return 0


COMMANDS = {"solve": cmd_run, "simulate": cmd_run, "verify": cmd_verify, "lowerbound": cmd_lowerbound,
            "gen": cmd_gen, "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (SubmaxError, ValueError, OSError) as exc:
        sys.stderr.write(f"submax: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
