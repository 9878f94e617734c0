"""Monte Carlo competitive ratios of the secretary algorithms as the stream grows.

Instances are modular with distinct weights, so OPT is exact at every size:
the top-k sum for the cardinality algorithms and the sum of group maxima for
the partition algorithms. Contiguous-partition streams permute the groups and
the order inside each group; every other stream is a uniform permutation.

    python3 scripts/secretary_scaling.py --n 100 400 1600 --k 4 --trials 400
"""

import argparse
import time

from submax.constraints import PartitionMatroid
from submax.core import ModularFunction
from submax.rng import Rng
from submax.secretary import (PartitionContiguousPolicy, PartitionGeneralPolicy, Stream,
                              SubmodularSecretariesPolicy, monte_carlo_eval)


def instance(n, k, seed):
    rng = Rng(seed, n, 3)
    weights = [1.0 + x for x in rng.permutation(n)]
    groups = [list(range(g, n, k)) for g in range(k)]
    return ModularFunction(weights), PartitionMatroid(groups)


def contiguous_stream(part):
    def make(rng):
        order = []
        for g in rng.permutation(len(part.groups)):
            members = part.groups[g]
            order.extend(members[i] for i in rng.permutation(len(members)))
        return Stream(order)
    return make


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[100, 400])
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--trials", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"{'n':>6s} {'algorithm':18s} {'mean/OPT':>9s} {'se':>7s} {'sec':>6s}")
    for n in args.n:
        f, part = instance(n, args.k, args.seed)
        w = sorted(f.weights, reverse=True)
        top_k = sum(w[:args.k])
        group_max = sum(max(f.weights[e] for e in g) for g in part.groups)
        runs = [
            ("card-secretary", top_k, lambda r: SubmodularSecretariesPolicy(f, args.k, r), None),
            ("partition-contig", group_max, lambda r: PartitionContiguousPolicy(f, part, r), contiguous_stream(part)),
            ("partition-general", group_max, lambda r: PartitionGeneralPolicy(f, part, r), None),
        ]
        for name, opt, factory, streams in runs:
            start = time.perf_counter()
            mc = monte_carlo_eval(factory, f, args.trials, args.seed, stream_factory=streams,
                                  feasible=None if name == "card-secretary" else part.independent_mask)
            print(f"{n:6d} {name:18s} {mc.mean / opt:9.4f} {mc.stderr / opt:7.4f} {time.perf_counter() - start:6.1f}")


if __name__ == "__main__":
    main()
