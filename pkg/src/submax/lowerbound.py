"""Best possible online payoff on small hidden-information instances.

A game is a list of scenarios, each a probability, a set function, an arrival
order and the token the policy observes for each arriving element. A policy
sees the tokens so far and its own past decisions, and accepts at most ``k``
arrivals. :func:`optimal_policy_value` solves the game exactly by backward
induction: at each position the scenarios still consistent with the observed
tokens are split by the next token, and for each branch the better of
accepting and rejecting is taken. Values are exact fractions.

For ``cover(R, S)`` gadgets the observed token of an element is its label
(``"1B"``, ``"2TB"``, ...), so the policy learns which element arrived, and
therefore ``r``, only once an ``i_TB`` element shows up. With
``reveal_top=False`` top elements are all seen as ``"TB"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Callable, Hashable, Iterable, Sequence

from .core import CoverGadget, SetFunction, canonical
from .errors import CapExceeded
from .rng import Rng

GAME_CAP = 200_000


@dataclass(frozen=True)
class Scenario:
    prob: Fraction
    f: SetFunction
    order: tuple[int, ...]
    tokens: tuple[Hashable, ...]


def optimal_policy_value(scenarios: Sequence[Scenario], k: int, cap: int = GAME_CAP) -> Fraction:
    """Exact optimal expected payoff over all online policies accepting at most ``k`` arrivals.

    Randomized policies cannot beat the best deterministic one, so the
    maximization is over deterministic decisions.
    """
    if not scenarios:
        return Fraction(0)
    if len(scenarios) > cap:
        raise CapExceeded(f"{len(scenarios)} scenarios exceed the cap of {cap}")
    T = len(scenarios[0].order)
    if any(len(s.order) != T for s in scenarios):
        raise ValueError("all scenarios need the same stream length")
    total = sum(s.prob for s in scenarios)

    @lru_cache(maxsize=None)
    def payoff(idx: int, accepted: tuple[int, ...]) -> Fraction:
        s = scenarios[idx]
        mask = 0
        for pos in accepted:
            mask |= 1 << s.order[pos]
        return Fraction(s.f.value(mask))

    @lru_cache(maxsize=None)
    def value(group: frozenset, t: int, accepted: tuple[int, ...]) -> Fraction:
        # expected payoff weighted by scenario probability (not normalized)
        if t == T:
            return sum((scenarios[i].prob * payoff(i, accepted) for i in group), Fraction(0))
        branches: dict = {}
        for i in group:
            branches.setdefault(scenarios[i].tokens[t], []).append(i)
        out = Fraction(0)
        for members_ in branches.values():
            sub = frozenset(members_)
            best = value(sub, t + 1, accepted)
            if len(accepted) < k:
                best = max(best, value(sub, t + 1, accepted + (t,)))
            out += best
        return out

    return value(frozenset(range(len(scenarios))), 0, ()) / total


def gadget_token(label: str, reveal_top: bool) -> str:
    if label.endswith("TB") and not reveal_top:
        return "TB"
    return label


def cover_gadget_game(R: Iterable[int], S_choices: Sequence[Iterable[int]], reveal_top: bool = True,
                      order_filter: Callable[[tuple[str, ...]], bool] | None = None) -> list[Scenario]:
    """Scenarios for ``cover(R, S)`` with ``S`` uniform over ``S_choices`` and a uniform arrival order.

    ``order_filter`` receives the arriving labels and can restrict the orders
    (remaining orders stay equally likely).
    """
    R = canonical(R)
    raw = []
    for S in S_choices:
        g = CoverGadget(R, S)
        for order in permutations(range(g.n)):
            labels = tuple(g.ground.label(e) for e in order)
            if order_filter is not None and not order_filter(labels):
                continue
            raw.append((g, order, tuple(gadget_token(l, reveal_top) for l in labels)))
    if not raw:
        return []
    p = Fraction(1, len(raw))
    return [Scenario(p, g, order, toks) for g, order, toks in raw]


def fixed_instance_game(f: SetFunction) -> list[Scenario]:
    """All arrival orders of one known function; tokens are element ids."""
    orders = list(permutations(range(f.n)))
    p = Fraction(1, len(orders))
    return [Scenario(p, f, o, o) for o in orders]


def two_gadget_lower_bound(reveal_top: bool = True) -> Fraction:
    """Optimal online payoff on ``cover({1,2},{r})`` with ``r`` uniform and ``k = 2``."""
    return optimal_policy_value(cover_gadget_game((1, 2), [(1,), (2,)], reveal_top), 2)


def random_gadget(k: int, rng: Rng, with_matching: bool = True) -> tuple[CoverGadget, list[tuple[int, int]] | None]:
    """``cover({1..k}, S)`` with ``|S| = k/2`` uniform.

    With ``with_matching`` the set is built from a uniform perfect matching on
    ``1..k`` by picking one endpoint per edge (this gives the same uniform law
    on ``S``) and the matching is returned for policies allowed to see it.
    """
    if k < 2 or k % 2:
        raise ValueError("k must be even and at least 2")
    perm = [x + 1 for x in rng.permutation(k)]
    if with_matching:
        matching = [(perm[2 * i], perm[2 * i + 1]) for i in range(k // 2)]
        S = [pair[rng.below(2)] for pair in matching]
        return CoverGadget(range(1, k + 1), S), matching
    return CoverGadget(range(1, k + 1), perm[: k // 2]), None


def large_gadget_upper_bound(k: int) -> float:
    return 17.0 * k / 12.0
