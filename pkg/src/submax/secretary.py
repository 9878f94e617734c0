"""Random-order online algorithms with irrevocable accept/reject decisions.

A policy sees one element per step through :meth:`OnlinePolicy.observe` and
answers accept or reject. Accepted elements are never dropped. Algorithms
that the analysis phrases as "run several copies and output one of them" pick
the copy up front and simulate the others as shadow state, so only the chosen
copy's accepts are committed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .constraints import IndependenceSystem, PartitionMatroid
from .core import SetFunction, members
from .errors import ContractViolation, InvalidParameter
from .offline import submod_max_cardinality
from .rng import Rng
from .unconstrained import FmvBackend

ADVICE_FACTOR = 21.0
SECRETARIES_FACTOR = 1417.0
CONTIGUOUS_FACTOR = 3.0 + 6.0 * math.e
MATROID_EPSILON = 0.4


def grid_levels(k: int) -> int:
    """``ceil(log2(2k))``: the last exponent of the halving threshold grid."""
    return math.ceil(math.log2(2 * k))


def matroid_advice_factor(k: int) -> float:
    return 40.0 * (1 + grid_levels(k))


# ---------------------------------------------------------------------------
# streams


class Stream:
    """An arrival order over ``0..n-1``; iterating yields ``(position, element)``."""

    def __init__(self, order: Iterable[int], seed: int | None = None):
        self.order = tuple(int(e) for e in order)
        if sorted(self.order) != list(range(len(self.order))):
            raise ValueError("stream order must be a permutation of 0..n-1")
        self.seed = seed

    @classmethod
    def uniform(cls, n: int, rng: Rng | int) -> "Stream":
        rng = rng if isinstance(rng, Rng) else Rng(rng)
        return cls(rng.permutation(n), rng.seed)

    @classmethod
    def grouped(cls, groups: Sequence[Sequence[int]], rng: Rng | int,
                group_order: Sequence[int] | None = None) -> "Stream":
        """Each group contiguous and internally shuffled; groups in ``group_order``."""
        rng = rng if isinstance(rng, Rng) else Rng(rng)
        group_order = range(len(groups)) if group_order is None else group_order
        order = []
        for gi in group_order:
            g = list(groups[gi])
            order.extend(g[i] for i in rng.permutation(len(g)))
        return cls(order, rng.seed)

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(enumerate(self.order))


# ---------------------------------------------------------------------------
# policy contract


class OnlinePolicy:
    """Base class: subclasses implement ``_decide(element, position) -> bool``."""

    def __init__(self, n: int):
        self.n = n
        self.selected_mask = 0
        self._next_position = 0

    @property
    def selected(self) -> tuple[int, ...]:
        return members(self.selected_mask)

    def observe(self, element: int, position: int) -> bool:
        if position != self._next_position:
            raise ContractViolation(f"expected position {self._next_position}, got {position}")
        self._next_position += 1
        accept = bool(self._decide(element, position))
        if accept:
            self.selected_mask |= 1 << element
        return accept

    def _decide(self, element: int, position: int) -> bool:
        raise NotImplementedError


def run_policy(policy: OnlinePolicy, stream: Stream,
               feasible: Callable[[int], bool] | None = None) -> int:
    """Feed the whole stream; verify irrevocability (and feasibility) after every step."""
    prev = policy.selected_mask
    for pos, e in stream:
        policy.observe(e, pos)
        cur = policy.selected_mask
        if cur & prev != prev:
            raise ContractViolation(f"selection shrank at position {pos}")
        if feasible is not None and not feasible(cur):
            raise ContractViolation(f"selection {members(cur)} infeasible at position {pos}")
        prev = cur
    return policy.selected_mask


# ---------------------------------------------------------------------------
# Dynkin


def dynkin_sample_size(n: int) -> int:
    return int(n / math.e)


class DynkinPolicy(OnlinePolicy):
    """Observe ``floor(n/e)`` values, then take the first one strictly above all of them."""

    def __init__(self, n: int, valuation: Callable[[int], float] | Sequence[float]):
        super().__init__(n)
        self.valuation = valuation if callable(valuation) else valuation.__getitem__
        self.sample_size = dynkin_sample_size(n)
        self.best_seen = -math.inf
        self.done = False

    def _decide(self, element, position):
        if self.done:
            return False
        v = self.valuation(element)
        if position < self.sample_size:
            self.best_seen = max(self.best_seen, v)
            return False
        if v > self.best_seen:
            self.done = True
            return True
        return False


def dynkin(stream: Stream, valuation) -> int | None:
    pol = DynkinPolicy(len(stream), valuation)
    sel = pol.selected if run_policy(pol, stream) else ()
    return sel[0] if sel else None


# ---------------------------------------------------------------------------
# cardinality


class ThresholdPolicy(OnlinePolicy):
    """Accept any element whose marginal is at least ``tau``, up to ``k`` accepts."""

    def __init__(self, f: SetFunction, tau: float, k: int):
        if k < 1:
            raise InvalidParameter("k must be at least 1")
        if tau < 0:
            raise InvalidParameter("tau must be non-negative")
        super().__init__(f.n)
        self.f, self.tau, self.k = f, tau, k
        self.count = 0

    def _decide(self, e, position):
        if self.count >= self.k:
            return False
        if self.f.marginal_mask(self.selected_mask, e) >= self.tau:
            self.count += 1
            return True
        return False


def threshold_online(f: SetFunction, stream: Stream, tau: float, k: int) -> tuple[int, ...]:
    pol = ThresholdPolicy(f, tau, k)
    run_policy(pol, stream)
    return pol.selected


class AdviceCardinalityPolicy(OnlinePolicy):
    """Online version of the three-candidate cardinality algorithm, given an estimate ``Z`` of OPT.

    Threshold ``tau = Z/(7k)``. ``S1`` is the threshold pass, ``S1'`` keeps
    each ``S1`` accept with probability 1/2, and ``S2`` is the threshold pass
    over the elements ``S1`` passed on. ``branch`` (0, 1, 2 for ``S1``,
    ``S1'``, ``S2``) is drawn uniformly before any arrival unless given.
    """

    BRANCHES = ("S1", "S1'", "S2")

    def __init__(self, f: SetFunction, k: int, Z: float, rng: Rng, branch: int | None = None):
        if k < 1:
            raise InvalidParameter("k must be at least 1")
        super().__init__(f.n)
        self.f, self.k, self.Z = f, k, max(float(Z), 0.0)
        self.tau = self.Z / (7 * k)
        self.rng = rng
        self.branch = rng.below(3) if branch is None else branch
        self.s1 = self.s2 = 0
        self.n1 = self.n2 = 0

    def _decide(self, e, position):
        f, tau = self.f, self.tau
        if self.n1 < self.k and f.marginal_mask(self.s1, e) >= tau:
            self.s1 |= 1 << e
            self.n1 += 1
            if self.branch == 0:
                return True
            if self.branch == 1:
                return self.rng.coin()
            return False
        if self.branch == 2 and self.n2 < self.k and f.marginal_mask(self.s2, e) >= tau:
            self.s2 |= 1 << e
            self.n2 += 1
            return True
        return False


def advice_online_cardinality(f: SetFunction, stream: Stream, k: int, Z: float,
                              seed: int | Rng = 0, branch: int | None = None) -> tuple[int, ...]:
    rng = seed if isinstance(seed, Rng) else Rng(seed)
    pol = AdviceCardinalityPolicy(f, k, Z, rng, branch)
    run_policy(pol, stream)
    return pol.selected


def greedy_offline_solver(k: int) -> Callable[[SetFunction, int], int]:
    """Offline step for the sample: the cardinality algorithm with the exact backend (factor 5)."""
    def solve(f: SetFunction, X: int) -> int:
        if not X:
            return 0
        return submod_max_cardinality(f, X, k, FmvBackend("exact")).chosen
    return solve


class SubmodularSecretariesPolicy(OnlinePolicy):
    """Coin flip between Dynkin on singleton values and sample-then-advice.

    Tails: the first ``m ~ Bin(n, 1/2)`` arrivals are only observed; the
    offline solver runs on them and its value ``f(A1)`` becomes the advice
    ``Z`` for :class:`AdviceCardinalityPolicy` on the rest of the stream.
    """

    def __init__(self, f: SetFunction, k: int, rng: Rng,
                 offline: Callable[[SetFunction, int], int] | None = None, n: int | None = None):
        if k < 1:
            raise InvalidParameter("k must be at least 1")
        super().__init__(f.n if n is None else n)
        self.f, self.k, self.rng = f, k, rng
        self.offline = offline or greedy_offline_solver(k)
        self.heads = rng.coin()
        self.sample = 0
        self.Z = None
        if self.heads:
            self.inner: OnlinePolicy | None = DynkinPolicy(self.n, lambda e: f.value(1 << e))
            self.m = None
        else:
            self.m = rng.binomial(self.n, 0.5)
            self.inner = None
            if self.m == 0:
                self._start_advice()

    def _start_advice(self):
        A1 = self.offline(self.f, self.sample)
        self.Z = self.f.value(A1)
        self.inner = AdviceCardinalityPolicy(self.f, self.k, self.Z, self.rng)

    def _decide(self, e, position):
        if self.heads:
            return self.inner.observe(e, position)
        if position < self.m:
            self.sample |= 1 << e
            if position == self.m - 1:
                self._start_advice()
            return False
        return self.inner.observe(e, position - self.m)


def submodular_secretaries(f: SetFunction, stream: Stream, k: int, seed: int | Rng = 0,
                           offline=None) -> tuple[int, ...]:
    rng = seed if isinstance(seed, Rng) else Rng(seed)
    pol = SubmodularSecretariesPolicy(f, k, rng, offline, n=len(stream))
    run_policy(pol, stream)
    return pol.selected


# ---------------------------------------------------------------------------
# partition matroid

MODES = ("A", "B", "C")


def _coin_accepts(mode: str, heads: bool) -> bool:
    return heads if mode in ("A", "B") else not heads


class _ModePolicy(OnlinePolicy):
    """Shared A/B/C bookkeeping.

    ``tentative`` is the set the mode-A/C process builds and the valuation is
    taken against. In mode B every tentative accept is kept with probability
    1/2 at arrival, so ``selected`` is a random subset of ``tentative``.
    ``coins`` holds one pre-drawn coin per attempt slot (group or epoch);
    passing the same list to an A and a C policy couples them.
    """

    def __init__(self, f: SetFunction, partition: PartitionMatroid, rng: Rng, mode: str | None,
                 coins: Sequence[bool] | None, slots: int):
        super().__init__(f.n)
        self.f, self.partition, self.rng = f, partition, rng
        self.mode = MODES[rng.below(3)] if mode is None else mode
        if self.mode not in MODES:
            raise InvalidParameter(f"unknown mode {mode!r}")
        self.coins = list(coins) if coins is not None else [rng.coin() for _ in range(slots)]
        self.tentative = 0

    def _attempt(self, e: int, slot: int) -> bool:
        if not _coin_accepts(self.mode, self.coins[slot]):
            return False
        self.tentative |= 1 << e
        if self.mode == "B":
            return self.rng.coin()
        return True


class PartitionContiguousPolicy(_ModePolicy):
    """Per-group Dynkin under the marginal valuation, gated by the mode coin.

    Requires each group to arrive as one contiguous block.
    """

    def __init__(self, f: SetFunction, groups: Sequence[Sequence[int]] | PartitionMatroid, rng: Rng,
                 mode: str | None = None, coins: Sequence[bool] | None = None):
        part = groups if isinstance(groups, PartitionMatroid) else PartitionMatroid(groups)
        super().__init__(f, part, rng, mode, coins, len(part.groups))
        self.current = None
        self.finished: set[int] = set()
        self._in_group = 0
        self._base = 0
        self._base_value = 0.0
        self._dynkin: DynkinPolicy | None = None

    def _decide(self, e, position):
        g = self.partition.group_of[e]
        if g != self.current:
            if g in self.finished:
                raise ContractViolation(f"group {g} arrived again after it was left")
            if self.current is not None:
                self.finished.add(self.current)
            self.current = g
            self._in_group = 0
            self._base = self.tentative
            self._base_value = self.f.value(self._base)
            base, base_value, f = self._base, self._base_value, self.f
            self._dynkin = DynkinPolicy(len(self.partition.groups[g]),
                                        lambda x: f.value(base | (1 << x)) - base_value)
        pos = self._in_group
        self._in_group += 1
        if self._dynkin.observe(e, pos):
            return self._attempt(e, g)
        return False


@dataclass
class EpochSchedule:
    """``N_0 ~ Bin(n, 1/2)`` sample positions then ``k`` epochs of ``Bin(n, 1/(100k))`` each.

    ``bounds[j]`` is the half-open position range of epoch ``j+1``; ranges past
    the stream end are truncated.
    """

    n: int
    sample: int
    lengths: list[int]
    bounds: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        if not self.bounds:
            start = min(self.sample, self.n)
            for L in self.lengths:
                end = min(start + L, self.n)
                self.bounds.append((start, end))
                start = end

    @classmethod
    def draw(cls, n: int, k: int, rng: Rng) -> "EpochSchedule":
        sample = rng.binomial(n, 0.5)
        lengths = [rng.binomial(n, 1.0 / (100 * k)) for _ in range(k)]
        return cls(n, sample, lengths)

    def epoch_of(self, position: int) -> int | None:
        """1-based epoch index of ``position``; 0 for the sample, None past the last epoch."""
        if position < self.sample:
            return 0
        for j, (a, b) in enumerate(self.bounds, start=1):
            if a <= position < b:
                return j
        return None


class PartitionGeneralPolicy(_ModePolicy):
    """Epoch-based partition-matroid secretary for fully random arrival order.

    In epoch ``j`` the valuation is the marginal against the tentative set at
    the start of the epoch. The first arrival that beats every earlier
    same-group element from before the epoch (all valued under the current
    valuation), from a group with no tentative element yet, triggers the
    epoch's single coin-gated attempt.
    """

    def __init__(self, f: SetFunction, groups: Sequence[Sequence[int]] | PartitionMatroid, rng: Rng,
                 mode: str | None = None, coins: Sequence[bool] | None = None,
                 schedule: EpochSchedule | None = None, n: int | None = None):
        part = groups if isinstance(groups, PartitionMatroid) else PartitionMatroid(groups)
        k = len(part.groups)
        super().__init__(f, part, rng, mode, coins, k + 1)
        n = f.n if n is None else n
        self.schedule = schedule if schedule is not None else EpochSchedule.draw(n, k, rng)
        self.history: list[int] = []
        self._epoch = 0
        self._attempted = False
        self._epoch_start = 0
        self._base = 0
        self._base_value = 0.0
        self._cache: dict[int, float] = {}
        self._taken_groups: set[int] = set()

    def _value(self, e: int) -> float:
        v = self._cache.get(e)
        if v is None:
            v = self.f.value(self._base | (1 << e)) - self._base_value
            self._cache[e] = v
        return v

    def _decide(self, e, position):
        j = self.schedule.epoch_of(position)
        self.history.append(e)
        if j is None or j == 0:
            return False
        if j != self._epoch:
            self._epoch = j
            self._attempted = False
            self._epoch_start = position
            self._base = self.tentative
            self._base_value = self.f.value(self._base)
            self._cache = {}
        if self._attempted:
            return False
        g = self.partition.group_of[e]
        if g in self._taken_groups:
            return False
        before = self.history[:self._epoch_start]
        group_of = self.partition.group_of
        best_before = max((self._value(x) for x in before if group_of[x] == g), default=-math.inf)
        if self._value(e) <= best_before:
            return False
        self._attempted = True
        accepted = self._attempt(e, j)
        if self.tentative & (1 << e):
            self._taken_groups.add(g)
        return accepted


def partition_contiguous_secretary(f: SetFunction, groups, stream: Stream, seed: int | Rng = 0,
                                   mode: str | None = None) -> tuple[int, ...]:
    rng = seed if isinstance(seed, Rng) else Rng(seed)
    pol = PartitionContiguousPolicy(f, groups, rng, mode)
    run_policy(pol, stream)
    return pol.selected


def partition_general_secretary(f: SetFunction, groups, stream: Stream, seed: int | Rng = 0,
                                mode: str | None = None) -> tuple[int, ...]:
    rng = seed if isinstance(seed, Rng) else Rng(seed)
    pol = PartitionGeneralPolicy(f, groups, rng, mode, n=len(stream))
    run_policy(pol, stream)
    return pol.selected


# ---------------------------------------------------------------------------
# general matroid


@dataclass(frozen=True)
class TauGrid:
    """Thresholds ``w1, w1/2, ..., w1/2^ceil(log2 2k)``."""

    w1: float
    k: int

    @property
    def values(self) -> list[float]:
        return [self.w1 / 2 ** i for i in range(grid_levels(self.k) + 1)]

    def __len__(self) -> int:
        return grid_levels(self.k) + 1


def two_bucket_threshold(f: SetFunction, order: Iterable[int], system: IndependenceSystem, tau: float,
                         epsilon: float = MATROID_EPSILON) -> tuple[int, int]:
    """Both buckets of the threshold pass, as masks."""
    s1 = s2 = 0
    t = epsilon * tau
    for e in order:
        if system.can_add(s1, e) and f.marginal_mask(s1, e) >= t:
            s1 |= 1 << e
        elif system.can_add(s2, e) and f.marginal_mask(s2, e) >= t:
            s2 |= 1 << e
    return s1, s2


def matroid_threshold_offline(f: SetFunction, order: Iterable[int], system: IndependenceSystem, tau: float,
                              epsilon: float = MATROID_EPSILON, seed: int | Rng = 0) -> tuple[int, ...]:
    """Two-bucket threshold pass; returns one bucket chosen uniformly at random."""
    rng = seed if isinstance(seed, Rng) else Rng(seed)
    s1, s2 = two_bucket_threshold(f, order, system, tau, epsilon)
    return members(s1 if rng.below(2) == 0 else s2)


class MatroidThresholdPolicy(OnlinePolicy):
    """Online two-bucket threshold pass committing to a pre-drawn bucket."""

    def __init__(self, f: SetFunction, system: IndependenceSystem, tau: float, rng: Rng,
                 epsilon: float = MATROID_EPSILON, bucket: int | None = None):
        super().__init__(f.n)
        self.f, self.system, self.tau, self.epsilon = f, system, tau, epsilon
        self.bucket = rng.below(2) if bucket is None else bucket
        self.s1 = self.s2 = 0

    def _decide(self, e, position):
        t = self.epsilon * self.tau
        f, sys = self.f, self.system
        if sys.can_add(self.s1, e) and f.marginal_mask(self.s1, e) >= t:
            self.s1 |= 1 << e
            return self.bucket == 0
        if sys.can_add(self.s2, e) and f.marginal_mask(self.s2, e) >= t:
            self.s2 |= 1 << e
            return self.bucket == 1
        return False


class MatroidSecretaryPolicy(OnlinePolicy):
    """Halving-threshold matroid secretary.

    Without advice: observe the first ``Bin(n, 1/2)`` arrivals, let ``W`` be
    their best singleton value, draw ``i`` uniformly from
    ``0..2+ceil(log2 2k)`` and run the two-bucket pass on the rest with
    ``tau = W/2^i``. With advice ``w1`` (the true best singleton value): no
    sampling, ``tau`` drawn uniformly from :class:`TauGrid`.
    """

    def __init__(self, f: SetFunction, system: IndependenceSystem, k: int, rng: Rng,
                 w1: float | None = None, n: int | None = None, epsilon: float = MATROID_EPSILON):
        if k < 1:
            raise InvalidParameter("matroid rank k must be at least 1")
        super().__init__(f.n if n is None else n)
        self.f, self.system, self.k, self.rng, self.epsilon = f, system, k, rng, epsilon
        self.advice = w1 is not None
        if self.advice:
            grid = TauGrid(float(w1), k).values
            self.tau = grid[rng.below(len(grid))]
            self.m = 0
            self.inner = MatroidThresholdPolicy(f, system, self.tau, rng, epsilon)
        else:
            self.m = rng.binomial(self.n, 0.5)
            self.exponent = rng.below(3 + grid_levels(k))
            self.W = 0.0
            self.tau = None
            self.inner = None
            if self.m == 0:
                self._start()

    def _start(self):
        self.tau = self.W / 2 ** self.exponent
        self.inner = MatroidThresholdPolicy(self.f, self.system, self.tau, self.rng, self.epsilon)

    def _decide(self, e, position):
        if position < self.m:
            self.W = max(self.W, self.f.value(1 << e))
            if position == self.m - 1:
                self._start()
            return False
        return self.inner.observe(e, position - self.m)


def matroid_secretary(f: SetFunction, stream: Stream, system: IndependenceSystem, k: int,
                      seed: int | Rng = 0, w1: float | None = None) -> tuple[int, ...]:
    rng = seed if isinstance(seed, Rng) else Rng(seed)
    pol = MatroidSecretaryPolicy(f, system, k, rng, w1=w1, n=len(stream))
    run_policy(pol, stream)
    return pol.selected


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass
class MonteCarloResult:
    mean: float
    stderr: float
    values: list[float]
    seed: int

    @property
    def trials(self) -> int:
        return len(self.values)


def monte_carlo_eval(policy_factory: Callable[[Rng], OnlinePolicy], f: SetFunction, trials: int,
                     seed: int = 0, stream_factory: Callable[[Rng], Stream] | None = None,
                     feasible: Callable[[int], bool] | None = None) -> MonteCarloResult:
    """Run independent trials and summarize ``f`` of the final selections.

    Trial ``t`` draws its arrival order from ``Rng(seed, t, 0)`` and hands
    ``Rng(seed, t, 1)`` to the policy factory, so results depend only on
    ``seed`` and are identical however trials are scheduled.
    """
    if trials < 1:
        raise InvalidParameter("need at least one trial")
    values = []
    for t in range(trials):
        srng = Rng(seed, t, 0)
        stream = stream_factory(srng) if stream_factory else Stream.uniform(f.n, srng)
        pol = policy_factory(Rng(seed, t, 1))
        values.append(f.value(run_policy(pol, stream, feasible)))
    arr = np.asarray(values)
    stderr = float(arr.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return MonteCarloResult(float(arr.mean()), stderr, values, seed)
