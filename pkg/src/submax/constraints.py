"""Downward-closed feasibility structures and exhaustive rank machinery."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import EXHAUSTIVE_CAP, PropertyReport, members, to_mask
from .errors import CapExceeded


class IndependenceSystem:
    """Base for downward-closed families over ``0..n-1``.

    Subclasses implement :meth:`independent_mask`; :meth:`can_add` may be
    overridden with a cheaper incremental test.
    """

    kind = "abstract"
    is_matroid = False

    def __init__(self, n: int):
        self.n = n

    def independent_mask(self, mask: int) -> bool:
        raise NotImplementedError

    def can_add(self, mask: int, e: int) -> bool:
        return self.independent_mask(mask | (1 << e))

    def is_independent(self, subset: Iterable[int]) -> bool:
        return self.independent_mask(to_mask(subset, self.n))

    def to_spec(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n})"


def is_independent(system: IndependenceSystem, subset: Iterable[int]) -> bool:
    return system.is_independent(subset)


class UniformMatroid(IndependenceSystem):
    kind = "uniform"
    is_matroid = True

    def __init__(self, n: int, k: int):
        if k < 0:
            raise ValueError("k must be non-negative")
        super().__init__(n)
        self.k = k

    def independent_mask(self, mask: int) -> bool:
        return bin(mask).count("1") <= self.k

    def to_spec(self) -> dict:
        return {"kind": "uniform", "k": self.k}


class PartitionMatroid(IndependenceSystem):
    """At most one element from each group; groups partition the ground set."""

    kind = "partition"
    is_matroid = True

    def __init__(self, groups: Sequence[Iterable[int]]):
        groups = [tuple(sorted(int(e) for e in g)) for g in groups]
        flat = [e for g in groups for e in g]
        n = len(flat)
        if sorted(flat) != list(range(n)):
            raise ValueError("groups must be disjoint and cover 0..n-1")
        super().__init__(n)
        self.groups = groups
        self.group_of = [0] * n
        for gi, g in enumerate(groups):
            for e in g:
                self.group_of[e] = gi
        self._group_masks = [sum(1 << e for e in g) for g in groups]

    def independent_mask(self, mask: int) -> bool:
        for gm in self._group_masks:
            x = mask & gm
            if x & (x - 1):
                return False
        return True

    def can_add(self, mask: int, e: int) -> bool:
        if mask & (1 << e):
            return self.independent_mask(mask)
        return not (mask & self._group_masks[self.group_of[e]]) and self.independent_mask(mask)

    def to_spec(self) -> dict:
        return {"kind": "partition", "groups": [list(g) for g in self.groups]}


class GraphicMatroid(IndependenceSystem):
    """Edges of a multigraph are the elements; independent sets are forests.

    Self-loops are allowed and are dependent on their own.
    """

    kind = "graphic"
    is_matroid = True

    def __init__(self, vertices: int, edges: Sequence[tuple[int, int]]):
        super().__init__(len(edges))
        self.vertices = vertices
        self.edges = [(int(u), int(v)) for u, v in edges]
        for u, v in self.edges:
            if not (0 <= u < vertices and 0 <= v < vertices):
                raise ValueError(f"edge ({u}, {v}) outside vertex range")

    def independent_mask(self, mask: int) -> bool:
        parent = list(range(self.vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in members(mask):
            u, v = self.edges[i]
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent[ru] = rv
        return True

    def to_spec(self) -> dict:
        return {"kind": "graphic", "vertices": self.vertices, "edges": [list(e) for e in self.edges]}


class IntersectionSystem(IndependenceSystem):
    """Sets independent in every member system."""

    kind = "intersection"

    def __init__(self, members_: Sequence[IndependenceSystem]):
        if not members_:
            raise ValueError("need at least one member system")
        n = members_[0].n
        if any(m.n != n for m in members_):
            raise ValueError("member systems must share a ground set")
        super().__init__(n)
        self.members = list(members_)
        self.is_matroid = len(self.members) == 1 and self.members[0].is_matroid

    def independent_mask(self, mask: int) -> bool:
        return all(m.independent_mask(mask) for m in self.members)

    def can_add(self, mask: int, e: int) -> bool:
        return all(m.can_add(mask, e) for m in self.members)

    def to_spec(self) -> dict:
        return {"kind": "intersection", "members": [m.to_spec() for m in self.members]}


class KnapsackConstraint(IndependenceSystem):
    """Total integer size within budget."""

    kind = "knapsack"

    def __init__(self, sizes: Sequence[int], budget: int):
        sizes = [int(c) for c in sizes]
        if any(c <= 0 for c in sizes):
            raise ValueError("knapsack sizes must be positive integers")
        if budget < 0:
            raise ValueError("budget must be non-negative")
        super().__init__(len(sizes))
        self.sizes = sizes
        self.budget = int(budget)

    def size(self, mask: int) -> int:
        c = self.sizes
        return sum(c[i] for i in members(mask))

    def independent_mask(self, mask: int) -> bool:
        return self.size(mask) <= self.budget

    def feasible(self, subset: Iterable[int]) -> bool:
        return self.is_independent(subset)

    def to_spec(self) -> dict:
        return {"kind": "knapsack", "sizes": list(self.sizes), "budget": self.budget}


# ---------------------------------------------------------------------------
# exhaustive rank machinery


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise CapExceeded(f"exhaustive enumeration needs at most {cap} elements, got {n}")


def _submasks(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def rank_and_lower_rank(system: IndependenceSystem, subset: Iterable[int],
                        cap: int = EXHAUSTIVE_CAP) -> tuple[int, int]:
    """Sizes of the largest and smallest bases (maximal independent subsets) of ``subset``."""
    S = to_mask(subset, system.n)
    elems = members(S)
    _check_cap(len(elems), cap)
    r, rho = 0, None
    for A in _submasks(S):
        if not system.independent_mask(A):
            continue
        if any(not A & (1 << e) and system.can_add(A, e) for e in elems):
            continue
        size = bin(A).count("1")
        r = max(r, size)
        rho = size if rho is None else min(rho, size)
    return r, rho if rho is not None else 0


@dataclass
class RankProfile:
    """``rank[S]`` and ``lower_rank[S]`` for every subset ``S`` (by bitmask)."""

    rank: list[int]
    lower_rank: list[int]


def rank_profile(system: IndependenceSystem, cap: int = EXHAUSTIVE_CAP) -> RankProfile:
    """Rank and lower rank of every subset of the ground set.

    Each independent ``A`` is a basis of exactly the sets ``S`` with
    ``A <= S <= A | blocked(A)``, where ``blocked(A)`` holds the outside
    elements that cannot be added to ``A``; sweeping those intervals covers
    every (basis, set) pair once.
    """
    n = system.n
    _check_cap(n, cap)
    full = (1 << n) - 1
    rank = [0] * (1 << n)
    lower = [n + 1] * (1 << n)
    for A in range(1 << n):
        if not system.independent_mask(A):
            continue
        blocked = 0
        for e in range(n):
            if not A & (1 << e) and not system.can_add(A, e):
                blocked |= 1 << e
        size = bin(A).count("1")
        for extra in _submasks(blocked & full):
            S = A | extra
            if size > rank[S]:
                rank[S] = size
            if size < lower[S]:
                lower[S] = size
    return RankProfile(rank, lower)


def p_parameter(system: IndependenceSystem, cap: int = EXHAUSTIVE_CAP) -> Fraction:
    """Exact ``max_S r(S) / rho(S)`` over sets with ``rho(S) > 0``."""
    prof = rank_profile(system, cap)
    best = Fraction(1)
    for r, rho in zip(prof.rank, prof.lower_rank):
        if rho > 0 and Fraction(r, rho) > best:
            best = Fraction(r, rho)
    return best


def matroid_axiom_check(system: IndependenceSystem, cap: int = EXHAUSTIVE_CAP) -> PropertyReport:
    """Exhaustively verify the matroid axioms.

    Exchange is checked through the equivalent statement that every set has
    all its bases of one size; a set with bases ``A`` and ``B``, ``|A| < |B|``,
    is a witness that no element of ``B - A`` extends ``A``.
    """
    n = system.n
    _check_cap(n, cap)
    if not system.independent_mask(0):
        return PropertyReport(False, 1, {"axiom": "empty set independent"})
    checked = 0
    for A in range(1 << n):
        if not system.independent_mask(A):
            continue
        for e in members(A):
            checked += 1
            if not system.independent_mask(A & ~(1 << e)):
                return PropertyReport(False, checked, {"axiom": "downward closure",
                                                       "A": members(A), "removed": e})
    prof = rank_profile(system, cap)
    for S in range(1 << n):
        checked += 1
        if prof.rank[S] != prof.lower_rank[S]:
            small, big = _two_bases(system, S, prof.lower_rank[S], prof.rank[S])
            return PropertyReport(False, checked, {"axiom": "exchange", "A": members(small), "B": members(big)})
    return PropertyReport(True, checked)


def _two_bases(system: IndependenceSystem, S: int, small_size: int, big_size: int) -> tuple[int, int]:
    elems = members(S)
    small = big = None
    for A in _submasks(S):
        if not system.independent_mask(A):
            continue
        if any(not A & (1 << e) and system.can_add(A, e) for e in elems):
            continue
        size = bin(A).count("1")
        if size == small_size and (small is None or A < small):
            small = A
        if size == big_size and (big is None or A < big):
            big = A
    return small, big


def check_downward_closed(system: IndependenceSystem, cap: int = EXHAUSTIVE_CAP) -> PropertyReport:
    _check_cap(system.n, cap)
    if not system.independent_mask(0):
        return PropertyReport(False, 1, {"A": ()})
    checked = 0
    for A in range(1 << system.n):
        if not system.independent_mask(A):
            continue
        for e in members(A):
            checked += 1
            if not system.independent_mask(A & ~(1 << e)):
                return PropertyReport(False, checked, {"A": members(A), "removed": e})
    return PropertyReport(True, checked)
