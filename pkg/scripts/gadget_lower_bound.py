"""Optimal online payoff on the two-set cover gadget, and shipped policies on larger gadgets.

    python3 scripts/gadget_lower_bound.py --k 4 6 8 --trials 2000
"""

import argparse

import numpy as np

from submax.bruteforce import brute_force_opt
from submax.constraints import UniformMatroid
from submax.lowerbound import large_gadget_upper_bound, random_gadget, two_gadget_lower_bound
from submax.rng import Rng
from submax.secretary import (AdviceCardinalityPolicy, MatroidSecretaryPolicy, Stream, SubmodularSecretariesPolicy,
                              run_policy)


def policy(name, g, k, rng):
    n = g.n
    if name == "card-secretary":
        return SubmodularSecretariesPolicy(g, k, rng)
    if name == "card-advice":
        return AdviceCardinalityPolicy(g, k, brute_force_opt(g, UniformMatroid(n, k)).opt_value, rng)
    return MatroidSecretaryPolicy(g, UniformMatroid(n, k), k, rng)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, nargs="+", default=[4, 6])
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for reveal in (True, False):
        v = two_gadget_lower_bound(reveal_top=reveal)
        print(f"two-set gadget, top labels {'visible' if reveal else 'hidden '}: {v} = {float(v):.6f} (OPT = 3)")
    print(f"\n{'k':>3s} {'policy':16s} {'mean':>8s} {'se':>7s} {'17k/12':>8s} {'OPT':>4s}")
    for k in args.k:
        g0, _ = random_gadget(k, Rng(args.seed))
        opt = brute_force_opt(g0, UniformMatroid(g0.n, k)).opt_value
        for name in ("card-secretary", "card-advice", "matroid-secretary"):
            vals = []
            for t in range(args.trials):
                g, _ = random_gadget(k, Rng(args.seed, t, 2))
                S = run_policy(policy(name, g, k, Rng(args.seed, t, 1)), Stream.uniform(g.n, Rng(args.seed, t, 0)))
                vals.append(g.value(S))
            arr = np.asarray(vals)
            print(f"{k:3d} {name:16s} {arr.mean():8.3f} {arr.std(ddof=1) / np.sqrt(len(arr)):7.3f} "
                  f"{large_gadget_upper_bound(k):8.3f} {opt:4g}")


if __name__ == "__main__":
    main()
