"""Offline constrained maximization: greedy primitives and multi-pass algorithms.

Tie-breaking is by lowest element index in every greedy step, and by
the smallest set (fewest elements, then lexicographic) when choosing among
candidate solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from .constraints import IndependenceSystem, KnapsackConstraint
from .core import TOL, SetFunction, lex_key, members, to_mask
from .errors import InvalidParameter
from .rng import Rng
from .unconstrained import FmvBackend


def _mask(f: SetFunction, X) -> int:
    if X is None:
        return (1 << f.n) - 1
    return X if isinstance(X, int) else to_mask(X, f.n)


@dataclass
class GreedyTrace:
    picked: list[int] = field(default_factory=list)
    deltas: list[float] = field(default_factory=list)
    discarded: list[int] = field(default_factory=list)

    @property
    def mask(self) -> int:
        return sum(1 << e for e in self.picked)

    @property
    def selected(self) -> tuple[int, ...]:
        return tuple(sorted(self.picked))

    @property
    def value(self) -> float:
        return sum(self.deltas)

    def prefixes(self) -> list[int]:
        """Masks of ``S_0 = {}, S_1, ..., S_t``."""
        out, m = [0], 0
        for e in self.picked:
            m |= 1 << e
            out.append(m)
        return out


def _argmax_marginal(f: SetFunction, S: int, fS: float, cands: Iterable[int]) -> tuple[int, float]:
    best, best_gain = -1, -math.inf
    for e in cands:
        gain = f.value(S | (1 << e)) - fS
        if gain > best_gain:
            best, best_gain = e, gain
    return best, best_gain


def greedy_cardinality(f: SetFunction, X=None, k: int = 1, stop_nonpositive: bool = False) -> GreedyTrace:
    """Add the max-marginal element until ``min(k, |X|)`` elements are chosen.

    Negative-marginal steps are taken unless ``stop_nonpositive`` is set (the
    half-bound guarantee only covers the default).
    """
    if k < 0:
        raise InvalidParameter("k must be non-negative")
    X = _mask(f, X)
    trace = GreedyTrace()
    S, fS = 0, 0.0
    remaining = list(members(X))
    while len(trace.picked) < k and remaining:
        e, gain = _argmax_marginal(f, S, fS, remaining)
        if stop_nonpositive and gain <= 0:
            break
        S |= 1 << e
        fS += gain
        trace.picked.append(e)
        trace.deltas.append(gain)
        remaining.remove(e)
    return trace


def greedy_psystem(f: SetFunction, X, system: IndependenceSystem) -> GreedyTrace:
    """Greedy under an independence system, running until ``S`` is a basis of ``X``.

    Elements that stop fitting are moved to ``discarded`` (they never fit again
    since the family is downward closed).
    """
    X = _mask(f, X)
    trace = GreedyTrace()
    S, fS = 0, 0.0
    remaining = list(members(X))
    while True:
        fits = []
        for e in remaining:
            if system.can_add(S, e):
                fits.append(e)
            else:
                trace.discarded.append(e)
        remaining = fits
        if not remaining:
            return trace
        e, gain = _argmax_marginal(f, S, fS, remaining)
        S |= 1 << e
        fS += gain
        trace.picked.append(e)
        trace.deltas.append(gain)
        remaining.remove(e)


@dataclass
class Candidate:
    label: str
    mask: int
    value: float

    @property
    def members(self) -> tuple[int, ...]:
        return members(self.mask)


@dataclass
class MultiPassResult:
    passes: list[tuple]
    candidates: list[Candidate]
    chosen: int
    value: float
    bound: float = math.nan
    bound_formula: str = ""

    @property
    def chosen_set(self) -> tuple[int, ...]:
        return members(self.chosen)

    @property
    def all_values(self) -> list[float]:
        return [c.value for c in self.candidates]


def best_candidate(cands: list[Candidate]) -> Candidate:
    best = cands[0]
    for c in cands[1:]:
        if c.value > best.value + TOL:
            best = c
        elif c.value >= best.value - TOL and lex_key(c.mask) < lex_key(best.mask):
            best = c
    return best


def _finish(f: SetFunction, passes, cands, bound, formula) -> MultiPassResult:
    best = best_candidate(cands)
    return MultiPassResult(passes, cands, best.mask, f.value(best.mask), bound, formula)


def _backend_rng(backend: FmvBackend, rng: Rng | None) -> Rng | None:
    if not backend.randomized:
        return None
    return rng if rng is not None else Rng(backend.seed)


def cardinality_bound(alpha: float) -> float:
    return 4.0 + alpha


def psystem_bound(p: float, alpha: float) -> float:
    return (1.0 + alpha) * (p + 2.0 + 1.0 / p)


def psystem_two_pass_bound(p: float, alpha: float) -> float:
    """Factor when only two greedy passes are run.

    Two passes give ``max f(S_i) >= (1 - eps) OPT / (2(p+1))`` unless
    ``f(S_1 & C*) >= eps OPT``; balancing against ``alpha/eps`` gives
    ``alpha + 2(p+1)``.
    """
    return alpha + 2.0 * (p + 1.0)


def knapsack_bound(alpha: float) -> float:
    return 4.0 + alpha


def submod_max_cardinality(f: SetFunction, X=None, k: int = 1, backend: FmvBackend | None = None,
                           rng: Rng | None = None) -> MultiPassResult:
    """Two greedy passes plus one unconstrained pass; best of ``S_1``, ``S_1'``, ``S_2``."""
    if k < 1:
        raise InvalidParameter("k must be at least 1")
    backend = backend or FmvBackend()
    brng = _backend_rng(backend, rng)
    X = _mask(f, X)
    S1 = greedy_cardinality(f, X, k).mask
    S1p = backend.run(f, S1, brng)
    S2 = greedy_cardinality(f, X & ~S1, k).mask
    cands = [Candidate("S1", S1, f.value(S1)), Candidate("S1'", S1p, f.value(S1p)),
             Candidate("S2", S2, f.value(S2))]
    return _finish(f, [(S1, S1p), (S2, None)], cands, cardinality_bound(backend.alpha), "4 + alpha")


def submod_max_psystem(f: SetFunction, X=None, system: IndependenceSystem | None = None, p: float = 1,
                       backend: FmvBackend | None = None, passes: int | None = None,
                       rng: Rng | None = None) -> MultiPassResult:
    """``ceil(p) + 1`` greedy passes on shrinking ground sets, each followed by the backend.

    ``passes=2`` runs the cheaper variant whose guarantee is
    :func:`psystem_two_pass_bound`.
    """
    if system is None:
        raise InvalidParameter("an independence system is required")
    if p < 1:
        raise InvalidParameter("p must be at least 1")
    backend = backend or FmvBackend()
    brng = _backend_rng(backend, rng)
    n_passes = passes if passes is not None else math.ceil(p) + 1
    if n_passes < 1:
        raise InvalidParameter("need at least one pass")
    Xi = _mask(f, X)
    out, cands = [], []
    for i in range(1, n_passes + 1):
        Si = greedy_psystem(f, Xi, system).mask
        Sip = backend.run(f, Si, brng)
        out.append((Si, Sip))
        cands.append(Candidate(f"S{i}", Si, f.value(Si)))
        cands.append(Candidate(f"S{i}'", Sip, f.value(Sip)))
        Xi &= ~Si
    if n_passes >= math.ceil(p) + 1:
        bound, formula = psystem_bound(p, backend.alpha), "(1 + alpha)(p + 2 + 1/p)"
    elif n_passes == 2:
        bound, formula = psystem_two_pass_bound(p, backend.alpha), "alpha + 2(p + 1)"
    else:
        bound, formula = math.inf, "none"
    return _finish(f, out, cands, bound, formula)


def _knapsack_args(sizes, budget) -> KnapsackConstraint:
    if isinstance(sizes, KnapsackConstraint):
        return sizes
    return KnapsackConstraint(sizes, budget)


def density_greedy_extension(f: SetFunction, knap: KnapsackConstraint, X: int, U: int) -> list[int]:
    """Prefixes ``S_1, S_2, ...`` of the gain-per-size greedy started from ``U``.

    Stops once the best density is non-positive or nothing is left to
    consider; an element that would overflow the budget is dropped for good.
    """
    c = knap.sizes
    S, fS, used = U, f.value(U), knap.size(U)
    avail = X & ~U
    out = []
    while avail:
        best, theta, best_val = -1, -math.inf, 0.0
        for e in members(avail):
            v = f.value(S | (1 << e))
            d = (v - fS) / c[e]
            if d > theta:
                best, theta, best_val = e, d, v
        if theta <= 0:
            break
        avail &= ~(1 << best)
        if used + c[best] <= knap.budget:
            S |= 1 << best
            fS, used = best_val, used + c[best]
            out.append(S)
    return out


def knapsack_candidate_collection(f: SetFunction, sizes, budget: int | None = None, X=None) -> list[int]:
    """Candidate sets (as masks) for the knapsack half-bound.

    Every feasible set of at most three elements, plus every prefix of the
    density-greedy extension of each feasible three-element seed. Duplicates
    are dropped, first occurrence kept.
    """
    knap = _knapsack_args(sizes, budget)
    X = _mask(f, X)
    elems = members(X)
    seen: dict[int, None] = {}
    seeds = []
    for r in range(4):
        for combo in combinations(elems, r):
            U = sum(1 << e for e in combo)
            if knap.independent_mask(U):
                seen.setdefault(U)
                if r == 3:
                    seeds.append(U)
    for U in seeds:
        for S in density_greedy_extension(f, knap, X, U):
            seen.setdefault(S)
    return list(seen)


def _best_in(f: SetFunction, masks: list[int]) -> Candidate:
    return best_candidate([Candidate("", m, f.value(m)) for m in masks])


def submod_max_knapsack(f: SetFunction, sizes, budget: int | None = None, backend: FmvBackend | None = None,
                        X=None, fast: bool = False, top_m: int = 8, rng: Rng | None = None) -> MultiPassResult:
    """Nested enumeration-greedy for a knapsack.

    For each first-pass candidate ``T``: ``T`` itself, the backend on ``T``,
    and the best second-pass candidate built on ``X - T``. In ``fast`` mode
    only the ``top_m`` most valuable first-pass candidates get a second pass
    and the bound is not certified.
    """
    knap = _knapsack_args(sizes, budget)
    backend = backend or FmvBackend()
    brng = _backend_rng(backend, rng)
    X = _mask(f, X)
    first = [Candidate("T", m, f.value(m)) for m in knapsack_candidate_collection(f, knap, X=X)]
    if fast:
        ordered = sorted(first, key=lambda c: (-c.value, lex_key(c.mask)))
        second_for = {c.mask for c in ordered[:top_m]}
    else:
        second_for = {c.mask for c in first}
    cands, passes = [], []
    for T in first:
        Tp = backend.run(f, T.mask, brng)
        cands.append(T)
        cands.append(Candidate("T'", Tp, f.value(Tp)))
        U2 = None
        if T.mask in second_for:
            second = knapsack_candidate_collection(f, knap, X=X & ~T.mask)
            best2 = _best_in(f, second)
            U2 = best2.mask
            cands.append(Candidate("U2", best2.mask, best2.value))
        passes.append((T.mask, Tp, U2))
    bound = math.inf if fast else knapsack_bound(backend.alpha)
    return _finish(f, passes, cands, bound, "none" if fast else "4 + alpha")
