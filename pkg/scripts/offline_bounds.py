"""Worst observed ratio x certified factor for the offline algorithms on generated corpora.

A value >= 1 in the ``worst`` column means the guarantee held on every instance.

    python3 scripts/offline_bounds.py --count 50 --n 10 --fmv exact
"""

import argparse
import time

from submax.bruteforce import brute_force_opt
from submax.constraints import p_parameter
from submax.core import tabulate
from submax.instances import generate_instance
from submax.offline import submod_max_cardinality, submod_max_knapsack, submod_max_psystem
from submax.rng import Rng
from submax.unconstrained import FmvBackend

FAMILIES = ("coverage", "cut", "coverage_minus_cost")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=30)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--fmv", default="exact", choices=("exact", "local", "random"))
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    backend = FmvBackend(args.fmv, seed=args.seed)
    print(f"{'algorithm':10s} {'family':20s} {'worst':>8s} {'mean':>8s} {'factor':>8s} {'sec':>6s}")
    for alg, cons in (("card", "uniform"), ("psys", "intersection"), ("knapsack", "knapsack")):
        for fam in FAMILIES:
            start, scaled = time.perf_counter(), []
            for i in range(args.count):
                inst = generate_instance(fam, cons, args.n, args.seed, i, k=args.k, p=2)
                f, c = tabulate(inst.build_function()), inst.build_constraint()
                opt = brute_force_opt(f, c).opt_value
                rng = Rng(args.seed, i, 7)
                if alg == "card":
                    res = submod_max_cardinality(f, k=args.k, backend=backend, rng=rng)
                elif alg == "psys":
                    res = submod_max_psystem(f, system=c, p=float(p_parameter(c, cap=args.n)), backend=backend, rng=rng)
                else:
                    res = submod_max_knapsack(f, c, backend=backend, rng=rng)
                scaled.append(res.value * res.bound / opt if opt > 0 else float("inf"))
            finite = [s for s in scaled if s != float("inf")]
            mean = sum(finite) / len(finite) if finite else float("nan")
            print(f"{alg:10s} {fam:20s} {min(scaled):8.3f} {mean:8.3f} {res.bound:8.3f} "
                  f"{time.perf_counter() - start:6.1f}")


if __name__ == "__main__":
    main()
