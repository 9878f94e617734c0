"""Set functions over an indexed ground set.

Elements are the integers ``0..n-1``. The public contract for subsets is a
sorted tuple of indices; internally subsets travel as int bitmasks
(bit ``i`` set means element ``i`` is present), which is what
:meth:`SetFunction.value` takes.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import CapExceeded, InvalidSubset
from .rng import Rng

TOL = 1e-9
EXHAUSTIVE_CAP = 14


def to_mask(subset: Iterable[int], n: int) -> int:
    mask = 0
    for e in subset:
        e = int(e)
        if not 0 <= e < n:
            raise InvalidSubset(f"element {e} outside ground set of size {n}")
        mask |= 1 << e
    return mask


def members(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def canonical(subset: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(set(int(e) for e in subset)))


def lex_key(mask: int) -> tuple[int, tuple[int, ...]]:
    """Tie-break key: fewer elements first, then lexicographic on sorted members."""
    return bin(mask).count("1"), members(mask)


@dataclass(frozen=True)
class GroundSet:
    n: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("ground set size must be non-negative")
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("need one label per element")

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def label(self, e: int) -> str:
        return self.labels[e] if self.labels else str(e)

    def index(self, label: str) -> int:
        if self.labels is None:
            return int(label)
        return self.labels.index(label)


class SetFunction:
    """Value oracle for a set function with ``f(empty) = 0``.

    Every call to :meth:`value` (and everything built on it) bumps
    ``query_count`` by one. The counter is guarded by a lock so one oracle can
    be shared between threads.
    """

    kind = "abstract"

    def __init__(self, n: int, labels: Sequence[str] | None = None):
        self.ground = GroundSet(n, tuple(labels) if labels is not None else None)
        self.n = n
        self.query_count = 0
        self._lock = threading.Lock()

    def _value(self, mask: int) -> float:
        raise NotImplementedError

    def value(self, mask: int) -> float:
        if mask >> self.n:
            raise InvalidSubset(f"mask {mask:#x} has bits outside ground set of size {self.n}")
        with self._lock:
            self.query_count += 1
        return self._value(mask)

    def __call__(self, subset: Iterable[int]) -> float:
        return self.value(to_mask(subset, self.n))

    def marginal_mask(self, mask: int, e: int) -> float:
        bit = 1 << e
        if mask & bit:
            return 0.0
        return self.value(mask | bit) - self.value(mask)

    def table(self) -> np.ndarray:
        """Values of every subset, indexed by bitmask (counts ``2^n`` queries)."""
        with self._lock:
            self.query_count += 1 << self.n
        return np.asarray(self._all_values(), dtype=float)

    def _all_values(self):
        """Uncounted values of all ``2^n`` subsets; subclasses may vectorize."""
        return [self._value(m) for m in range(1 << self.n)]

    def to_spec(self) -> dict:
        raise NotImplementedError(f"{type(self).__name__} has no file representation")

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n})"


def _bits(n: int) -> np.ndarray:
    """``(2^n, n)`` 0/1 matrix; row ``m`` holds the bits of mask ``m``."""
    m = np.arange(1 << n, dtype=np.int64)
    return ((m[:, None] >> np.arange(n)) & 1).astype(float)


def evaluate(f: SetFunction, subset: Iterable[int]) -> float:
    return f(subset)


def marginal(f: SetFunction, subset: Iterable[int], e: int) -> float:
    """``f(S + e) - f(S)``; zero when ``e`` is already in ``S``."""
    if not 0 <= e < f.n:
        raise InvalidSubset(f"element {e} outside ground set of size {f.n}")
    return f.marginal_mask(to_mask(subset, f.n), e)


class RestrictedFunction(SetFunction):
    """``A -> f(S | A) - f(S)`` for a pinned set ``S``."""

    kind = "restricted"

    def __init__(self, base: SetFunction, pinned: int):
        super().__init__(base.n, base.ground.labels)
        self.base = base
        self.pinned = pinned
        self._offset = base.value(pinned)

    def _value(self, mask: int) -> float:
        return self.base.value(self.pinned | mask) - self._offset


def restrict(f: SetFunction, subset: Iterable[int]) -> RestrictedFunction:
    return RestrictedFunction(f, to_mask(subset, f.n))


class TabulatedFunction(SetFunction):
    """Caches every value of ``base`` up front; lookups are list indexing.

    Queries still count against this oracle, so algorithm oracle complexity is
    reported the same as with the untabulated function.
    """

    def __init__(self, base: SetFunction):
        super().__init__(base.n, base.ground.labels)
        self.base = base
        self.kind = base.kind
        self._table = np.asarray(base._all_values(), dtype=float).tolist()

    def _value(self, mask: int) -> float:
        return self._table[mask]

    def _all_values(self):
        return self._table

    def to_spec(self) -> dict:
        return self.base.to_spec()


def tabulate(f: SetFunction, cap: int = 22) -> SetFunction:
    if isinstance(f, TabulatedFunction) or f.n > cap:
        return f
    return TabulatedFunction(f)


class CallableFunction(SetFunction):
    """Wraps a Python callable taking a sorted index tuple."""

    kind = "callable"

    def __init__(self, n: int, fn: Callable[[tuple[int, ...]], float], labels=None):
        super().__init__(n, labels)
        self.fn = fn

    def _value(self, mask: int) -> float:
        return float(self.fn(members(mask)))


class ModularFunction(SetFunction):
    kind = "modular"

    def __init__(self, weights: Sequence[float]):
        weights = [float(w) for w in weights]
        if any(w < 0 for w in weights):
            raise ValueError("modular weights must be non-negative")
        super().__init__(len(weights))
        self.weights = weights

    def _value(self, mask: int) -> float:
        w = self.weights
        total = 0.0
        i = 0
        while mask:
            if mask & 1:
                total += w[i]
            mask >>= 1
            i += 1
        return total

    def _all_values(self):
        return _bits(self.n) @ np.asarray(self.weights, dtype=float)

    def to_spec(self) -> dict:
        return {"kind": "modular", "weights": list(self.weights)}


class CoverageFunction(SetFunction):
    """Weight of the union of the point sets of the chosen elements."""

    kind = "coverage"

    def __init__(self, m: int, sets: Sequence[Iterable[int]], weights: Sequence[float] | None = None,
                 labels=None):
        super().__init__(len(sets), labels)
        self.m = m
        self.sets = [canonical(s) for s in sets]
        for s in self.sets:
            if s and not (0 <= s[0] and s[-1] < m):
                raise ValueError(f"covered point outside universe of size {m}")
        if weights is not None:
            weights = [float(w) for w in weights]
            if len(weights) != m or any(w < 0 for w in weights):
                raise ValueError("need one non-negative weight per point")
        self.weights = weights
        self._point_masks = [sum(1 << p for p in s) for s in self.sets]

    def covered(self, mask: int) -> int:
        pm = self._point_masks
        u = 0
        i = 0
        while mask:
            if mask & 1:
                u |= pm[i]
            mask >>= 1
            i += 1
        return u

    def _covered_table(self) -> np.ndarray | None:
        if self.m > 63:
            return None
        cov = np.zeros(1 << self.n, dtype=np.uint64)
        for i, pm in enumerate(self._point_masks):
            cov[1 << i: 2 << i] = cov[: 1 << i] | np.uint64(pm)
        return cov

    def _all_values(self):
        cov = self._covered_table()
        if cov is None:
            return super()._all_values()
        if self.weights is None:
            return np.bitwise_count(cov).astype(float)
        out = np.zeros(len(cov))
        for p, w in enumerate(self.weights):
            out += w * ((cov >> np.uint64(p)) & np.uint64(1))
        return out

    def _value(self, mask: int) -> float:
        u = self.covered(mask)
        if self.weights is None:
            return float(bin(u).count("1"))
        w = self.weights
        return sum(w[p] for p in members(u))

    def to_spec(self) -> dict:
        return {"kind": "coverage", "m": self.m, "sets": [list(s) for s in self.sets],
                "weights": None if self.weights is None else list(self.weights)}


class CoverageMinusCostFunction(SetFunction):
    """Coverage minus a modular cost.

    Submodular for any costs; non-negativity requires ``coverage(S) >= cost(S)``
    for every ``S``, which is checked exhaustively on construction up to
    ``validate_cap`` elements.
    """

    kind = "coverage_minus_cost"

    def __init__(self, coverage: CoverageFunction, costs: Sequence[float], validate_cap: int = EXHAUSTIVE_CAP):
        super().__init__(coverage.n, coverage.ground.labels)
        costs = [float(c) for c in costs]
        if len(costs) != coverage.n or any(c < 0 for c in costs):
            raise ValueError("need one non-negative cost per element")
        self.coverage = coverage
        self.costs = costs
        if self.n <= validate_cap:
            worst = float(np.min(self._all_values()))
            if worst < -TOL:
                raise ValueError(f"costs make the function negative (min value {worst})")

    def _value(self, mask: int) -> float:
        c = self.costs
        return self.coverage._value(mask) - sum(c[i] for i in members(mask))

    def _all_values(self):
        cov = np.asarray(self.coverage._all_values(), dtype=float)
        return cov - _bits(self.n) @ np.asarray(self.costs, dtype=float)

    def to_spec(self) -> dict:
        spec = self.coverage.to_spec()
        spec["kind"] = "coverage_minus_cost"
        spec["costs"] = list(self.costs)
        return spec


class CutFunction(SetFunction):
    """Total weight of undirected edges with exactly one endpoint in ``S``."""

    kind = "cut"

    def __init__(self, n: int, edges: Sequence[tuple]):
        super().__init__(n)
        norm = []
        for e in edges:
            u, v = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            if not (0 <= u < n and 0 <= v < n) or w < 0:
                raise ValueError(f"bad edge {e!r}")
            norm.append((u, v, w))
        self.edges = norm

    def _value(self, mask: int) -> float:
        total = 0.0
        for u, v, w in self.edges:
            if ((mask >> u) ^ (mask >> v)) & 1:
                total += w
        return total

    def _all_values(self):
        b = _bits(self.n)
        out = np.zeros(1 << self.n)
        for u, v, w in self.edges:
            out += w * (b[:, u] != b[:, v])
        return out

    def to_spec(self) -> dict:
        return {"kind": "cut", "n": self.n, "edges": [[u, v, w] for u, v, w in self.edges]}


class CoverGadget(CoverageFunction):
    """The ``cover(R, S)`` coverage instance.

    For each ``i`` in ``R`` there is a bottom point ``iB`` and a top point
    ``iT``. Elements are ``i_B = {iB}`` for every ``i`` in ``R`` (in ascending
    order of ``i``), followed by ``i_TB = {iB, iT}`` for every ``i`` in ``S``.
    Labels are ``"<i>B"`` and ``"<i>TB"``.
    """

    kind = "cover_gadget"

    def __init__(self, R: Iterable[int], S: Iterable[int]):
        R = canonical(R)
        S = canonical(S)
        if not set(S) <= set(R):
            raise ValueError("S must be a subset of R")
        pos = {i: j for j, i in enumerate(R)}
        sets = [[2 * pos[i]] for i in R] + [[2 * pos[i], 2 * pos[i] + 1] for i in S]
        labels = [f"{i}B" for i in R] + [f"{i}TB" for i in S]
        super().__init__(2 * len(R), sets, labels=labels)
        self.R = R
        self.S = S

    def index(self, label: str) -> int:
        return self.ground.index(label)

    def mask_of(self, labels: Iterable[str]) -> int:
        return sum(1 << self.index(lab) for lab in labels)

    def to_spec(self) -> dict:
        return {"kind": "cover_gadget", "R": list(self.R), "S": list(self.S)}


# ---------------------------------------------------------------------------
# property checkers


@dataclass
class PropertyReport:
    holds: bool
    checked: int = 0
    witness: dict | None = field(default=None)

    def __bool__(self) -> bool:
        return self.holds


def _exhaustive_table(f: SetFunction, cap: int) -> np.ndarray:
    if f.n > cap:
        raise CapExceeded(f"exhaustive check needs n <= {cap}, got {f.n}")
    return f.table()


def _random_mask(rng: Rng, pool: int) -> int:
    out = 0
    for e in members(pool):
        if rng.coin():
            out |= 1 << e
    return out


def check_submodular(f: SetFunction, mode: str = "exhaustive", samples: int = 10_000, seed: int = 0,
                     cap: int = EXHAUSTIVE_CAP, tol: float = TOL) -> PropertyReport:
    """Diminishing returns ``f_S(e) >= f_T(e)`` for ``S <= T``, ``e`` not in ``T``.

    Exhaustive mode checks every pair ``T = S + b`` (equivalent to the full
    condition by chaining along a path from ``S`` to ``T``). Sampled mode draws
    random triples ``S <= T``, ``e``.
    """
    n = f.n
    if mode == "exhaustive":
        t = _exhaustive_table(f, cap)
        idx = np.arange(1 << n)
        checked = 0
        for a in range(n):
            for b in range(n):
                if a == b:
                    continue
                ab = (1 << a) | (1 << b)
                s = idx[(idx & ab) == 0]
                gain_small = t[s | (1 << a)] - t[s]
                gain_big = t[s | ab] - t[s | (1 << b)]
                bad = np.nonzero(gain_small < gain_big - tol)[0]
                checked += len(s)
                if len(bad):
                    S = int(s[bad[0]])
                    return PropertyReport(False, checked, {
                        "S": members(S), "T": members(S | (1 << b)), "e": a,
                        "gain_S": float(gain_small[bad[0]]), "gain_T": float(gain_big[bad[0]])})
        return PropertyReport(True, checked)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = Rng(seed)
    full = (1 << n) - 1
    checked = 0
    for _ in range(samples):
        T = _random_mask(rng, full)
        rest = members(full & ~T)
        if not rest:
            continue
        S = _random_mask(rng, T)
        e = rest[rng.below(len(rest))]
        gs, gt = f.marginal_mask(S, e), f.marginal_mask(T, e)
        checked += 1
        if gs < gt - tol:
            return PropertyReport(False, checked, {"S": members(S), "T": members(T), "e": e,
                                                   "gain_S": gs, "gain_T": gt})
    return PropertyReport(True, checked)


def check_nonneg_and_zero(f: SetFunction, mode: str = "exhaustive", samples: int = 10_000, seed: int = 0,
                          cap: int = EXHAUSTIVE_CAP, tol: float = TOL) -> PropertyReport:
    zero = f.value(0)
    if abs(zero) > tol:
        return PropertyReport(False, 1, {"S": (), "value": zero})
    if mode == "exhaustive":
        t = _exhaustive_table(f, cap)
        bad = np.nonzero(t < -tol)[0]
        if len(bad):
            return PropertyReport(False, len(t), {"S": members(int(bad[0])), "value": float(t[bad[0]])})
        return PropertyReport(True, len(t))
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = Rng(seed)
    full = (1 << f.n) - 1
    for i in range(samples):
        S = _random_mask(rng, full)
        v = f.value(S)
        if v < -tol:
            return PropertyReport(False, i + 1, {"S": members(S), "value": v})
    return PropertyReport(True, samples)


def check_monotone(f: SetFunction, mode: str = "exhaustive", samples: int = 10_000, seed: int = 0,
                   cap: int = EXHAUSTIVE_CAP, tol: float = TOL) -> PropertyReport:
    n = f.n
    if mode == "exhaustive":
        t = _exhaustive_table(f, cap)
        idx = np.arange(1 << n)
        checked = 0
        for e in range(n):
            s = idx[(idx & (1 << e)) == 0]
            drop = t[s | (1 << e)] < t[s] - tol
            checked += len(s)
            bad = np.nonzero(drop)[0]
            if len(bad):
                S = int(s[bad[0]])
                return PropertyReport(False, checked, {"S": members(S), "e": e,
                                                       "f_S": float(t[S]), "f_S_plus_e": float(t[S | (1 << e)])})
        return PropertyReport(True, checked)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = Rng(seed)
    full = (1 << n) - 1
    checked = 0
    for _ in range(samples):
        S = _random_mask(rng, full)
        rest = members(full & ~S)
        if not rest:
            continue
        e = rest[rng.below(len(rest))]
        checked += 1
        if f.marginal_mask(S, e) < -tol:
            return PropertyReport(False, checked, {"S": members(S), "e": e})
    return PropertyReport(True, checked)
