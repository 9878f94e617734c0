"""Exhaustive optimum over a feasible family: the test oracle for every bound."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .constraints import IndependenceSystem, KnapsackConstraint, UniformMatroid
from .core import TOL, SetFunction, lex_key, members
from .errors import CapExceeded

CAP_SIMPLE = 16
CAP_ORACLE = 14


@dataclass
class BruteForceResult:
    opt_value: float
    opt_mask: int
    feasible_count: int
    enumerated_count: int

    @property
    def opt_set(self) -> tuple[int, ...]:
        return members(self.opt_mask)


def brute_force_opt(f: SetFunction, feasible: IndependenceSystem | Callable[[int], bool] | None = None,
                    cap: int | None = None) -> BruteForceResult:
    """Max of ``f`` over feasible subsets; ties go to the smallest set (fewest
    elements, then lexicographic).

    ``feasible`` is an independence system, a predicate on bitmasks, or None
    for the unconstrained problem. The default cap is 16 elements for
    cardinality, knapsack and unconstrained problems and 14 otherwise.
    """
    if cap is None:
        simple = feasible is None or isinstance(feasible, (UniformMatroid, KnapsackConstraint))
        cap = CAP_SIMPLE if simple else CAP_ORACLE
    if f.n > cap:
        raise CapExceeded(f"brute force capped at {cap} elements, got {f.n}")
    if feasible is None:
        pred = None
    elif isinstance(feasible, IndependenceSystem):
        pred = feasible.independent_mask
    else:
        pred = feasible
    best, best_v = 0, f.value(0)
    count = 1
    for mask in range(1, 1 << f.n):
        if pred is not None and not pred(mask):
            continue
        count += 1
        v = f.value(mask)
        if v > best_v + TOL:
            best, best_v = mask, v
        elif v >= best_v - TOL and lex_key(mask) < lex_key(best):
            best, best_v = mask, max(v, best_v)
    return BruteForceResult(best_v, best, count, 1 << f.n)
