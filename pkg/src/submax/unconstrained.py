"""Unconstrained maximization over a restricted ground set.

Each routine returns some ``T <= S`` approximately maximizing ``f`` over the
subsets of ``S``. :class:`FmvBackend` bundles one routine with its claimed
factor ``alpha`` so the constrained algorithms can take it as a plug-in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .core import TOL, SetFunction, lex_key, members, to_mask
from .errors import CapExceeded, InvalidParameter
from .rng import Rng


def _as_mask(f: SetFunction, S) -> int:
    return S if isinstance(S, int) else to_mask(S, f.n)


def random_subset_mask(f: SetFunction, S: int, rng: Rng) -> int:
    out = 0
    for e in members(S):
        if rng.random() < 0.5:
            out |= 1 << e
    return out


def fmv_random_subset(f: SetFunction, S: Iterable[int] | int, seed: int | Rng = 0) -> tuple[int, ...]:
    """Keep each element of ``S`` independently with probability 1/2.

    Coins are drawn in ascending element order.
    """
    rng = seed if isinstance(seed, Rng) else Rng(seed)
    return members(random_subset_mask(f, _as_mask(f, S), rng))


def local_search_mask(f: SetFunction, S: int, epsilon: float = 1e-3) -> int:
    elems = members(S)
    if not elems:
        return 0
    best_e = max(elems, key=lambda e: (f.value(1 << e), -e))
    A = 1 << best_e
    fa = f.value(A)
    factor = 1.0 + epsilon / len(elems) ** 2
    improved = True
    while improved:
        improved = False
        for e in elems:
            if not A & (1 << e):
                v = f.value(A | (1 << e))
                if v > factor * fa:
                    A, fa, improved = A | (1 << e), v, True
                    break
        if improved:
            continue
        for e in elems:
            if A & (1 << e):
                v = f.value(A & ~(1 << e))
                if v > factor * fa:
                    A, fa, improved = A & ~(1 << e), v, True
                    break
    rest = S & ~A
    return rest if f.value(rest) > fa else A


def fmv_local_search(f: SetFunction, S: Iterable[int] | int, epsilon: float = 1e-3) -> tuple[int, ...]:
    """Deterministic single-element local search.

    Starts from the best singleton of ``S`` and adds (first) or removes an
    element whenever that raises the value by more than a ``1 + epsilon/|S|^2``
    factor. Returns the better of the local optimum and its complement in
    ``S``; this is a 1/3-approximation up to the epsilon slack.
    """
    return members(local_search_mask(f, _as_mask(f, S), epsilon))


def exact_mask(f: SetFunction, S: int, cap: int = 20) -> int:
    k = bin(S).count("1")
    if k > cap:
        raise CapExceeded(f"exact maximization capped at {cap} elements, got {k}")
    best, best_v = 0, f.value(0)
    sub = S
    while sub:
        v = f.value(sub)
        if v > best_v + TOL:
            best, best_v = sub, v
        elif v >= best_v - TOL and lex_key(sub) < lex_key(best):
            best, best_v = sub, max(best_v, v)
        sub = (sub - 1) & S
    return best


def fmv_exact(f: SetFunction, S: Iterable[int] | int, cap: int = 20) -> tuple[int, ...]:
    """Exact argmax over subsets of ``S``; ties go to the smallest (fewest elements, then lexicographic)."""
    return members(exact_mask(f, _as_mask(f, S), cap))


_ALPHA = {"random": 4.0, "local": 3.0, "exact": 1.0}


@dataclass(frozen=True)
class FmvBackend:
    """An unconstrained maximizer plus its approximation factor.

    ``kind`` is ``"random"``, ``"local"`` or ``"exact"``.
    """

    kind: str = "exact"
    seed: int = 0
    epsilon: float = 1e-3
    cap: int = 20

    def __post_init__(self):
        if self.kind not in _ALPHA:
            raise InvalidParameter(f"unknown backend {self.kind!r}")

    @property
    def alpha(self) -> float:
        return _ALPHA[self.kind]

    @property
    def randomized(self) -> bool:
        return self.kind == "random"

    def run(self, f: SetFunction, S: int, rng: Rng | None = None) -> int:
        if self.kind == "random":
            return random_subset_mask(f, S, rng if rng is not None else Rng(self.seed))
        if self.kind == "local":
            return local_search_mask(f, S, self.epsilon)
        return exact_mask(f, S, self.cap)
