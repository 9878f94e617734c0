import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import cardinality_corpus, feasible_masks, psystem_corpus, table_opt
from submax.constraints import KnapsackConstraint, PartitionMatroid, UniformMatroid, p_parameter
from submax.core import CallableFunction, CoverageFunction, CoverGadget, ModularFunction, members, tabulate
from submax.errors import InvalidParameter
from submax.instances import gen_coverage, gen_coverage_minus_cost, gen_knapsack
from submax.offline import (density_greedy_extension, greedy_cardinality, greedy_psystem,
                            knapsack_candidate_collection, psystem_two_pass_bound, submod_max_cardinality,
                            submod_max_knapsack, submod_max_psystem)
from submax.rng import Rng
from submax.unconstrained import FmvBackend


def reference_greedy(f, X: list[int], k: int) -> list[int]:
    """Independent re-implementation: plain lists, ties to the smallest index."""
    chosen: list[int] = []
    for _ in range(min(k, len(X))):
        base = f(chosen)
        best = None
        for e in sorted(set(X) - set(chosen)):
            g = f(sorted(chosen + [e])) - base
            if best is None or g > best[0]:
                best = (g, e)
        chosen.append(best[1])
    return chosen


def cardinality_fn(n):
    return CallableFunction(n, lambda s: float(len(s)))


def test_greedy_modular_tie_rule():
    tr = greedy_cardinality(cardinality_fn(5), range(5), 2)
    assert tr.picked == [0, 1] and tr.value == 2


def test_tightness_instance():
    f = cardinality_fn(4)
    S = greedy_cardinality(f, range(4), 2).selected
    C = (2, 3)
    assert f(S) == 0.5 * f(sorted(set(S) | set(C)))


def test_greedy_matches_reference_on_coverage():
    rng = Rng(21)
    for _ in range(10):
        f = gen_coverage(10, rng)
        assert greedy_cardinality(f, None, 3).picked == reference_greedy(f, list(range(10)), 3)


@given(st.integers(0, 2**32), st.integers(1, 6))
@settings(max_examples=40, deadline=None)
def test_greedy_matches_reference_nonmonotone(seed, k):
    rng = Rng(seed)
    f = gen_coverage_minus_cost(8, rng)
    X = [e for e in range(8) if rng.coin()]
    tr = greedy_cardinality(f, X, k)
    assert tr.picked == reference_greedy(f, X, k)
    assert sum(tr.deltas) == pytest.approx(f(tr.selected))
    assert len(tr.picked) == min(k, len(X))


def test_greedy_takes_negative_steps_unless_asked():
    cov = CoverageFunction(2, [[0], [0], [1]])
    f = CallableFunction(3, lambda s: cov(s) - 0.5 * (1 in s) * (0 in s))
    assert len(greedy_cardinality(f, None, 3).picked) == 3
    assert len(greedy_cardinality(f, None, 3, stop_nonpositive=True).picked) == 2


def test_greedy_psystem_uniform_equals_cardinality():
    rng = Rng(2)
    for _ in range(5):
        f = gen_coverage_minus_cost(9, rng)
        assert greedy_psystem(f, None, UniformMatroid(9, 3)).picked == greedy_cardinality(f, None, 3).picked


def test_greedy_psystem_partition_one_per_group():
    f = gen_coverage(8, Rng(3))
    part = PartitionMatroid([[0, 2, 4, 6], [1, 3, 5, 7]])
    S = greedy_psystem(f, None, part).selected
    assert sorted(part.group_of[e] for e in S) == [0, 1]
    S = greedy_psystem(f, [0, 2], part).selected
    assert len(S) == 1


def test_greedy_psystem_certificate():
    """Deltas non-increasing, maximality, and the partition of C built from A_i = {e in C - S_i : S_i + e feasible}."""
    checked = 0
    for f, system, _ in psystem_corpus()[:30]:
        p = float(p_parameter(system))
        tr = greedy_psystem(f, None, system)
        assert all(a >= b - 1e-9 for a, b in zip(tr.deltas, tr.deltas[1:]))
        S = tr.mask
        assert all(not system.can_add(S, e) for e in range(f.n) if not S >> e & 1)
        prefixes = tr.prefixes()
        feas = np.flatnonzero(feasible_masks(system, f.n))
        for C in feas[:: max(1, len(feas) // 40)]:
            C = int(C)
            A = [sum(1 << e for e in members(C & ~Si) if system.independent_mask(Si | 1 << e)) for Si in prefixes]
            assert A[0] == C and A[-1] == 0
            total = 0
            for i in range(1, len(prefixes)):
                Ci = A[i - 1] & ~A[i]
                pi = bin(Ci).count("1")
                total += pi
                assert total <= i * p + 1e-9
                Sprev = prefixes[i - 1]
                gains = sum(f.value(Sprev | 1 << e) - f.value(Sprev) for e in members(Ci))
                assert pi * tr.deltas[i - 1] >= gains - 1e-9
            checked += 1
    assert checked > 100


def test_cardinality_gadget_and_consistency():
    g = CoverGadget((1, 2), (2,))
    res = submod_max_cardinality(g, None, 2, FmvBackend("exact"))
    assert res.value == 3
    assert res.value == max(res.all_values)
    assert [c.label for c in res.candidates] == ["S1", "S1'", "S2"]
    assert res.bound == 5
    with pytest.raises(InvalidParameter):
        submod_max_cardinality(g, None, 0)


def test_cardinality_small_X_monotone():
    f = gen_coverage(8, Rng(4))
    res = submod_max_cardinality(f, [1, 4], 3)
    assert res.chosen_set == (1, 4)


def test_cardinality_candidates_feasible_and_best():
    for f, k in cardinality_corpus(200)[:80]:
        for kind in ("exact", "local", "random"):
            res = submod_max_cardinality(f, None, k, FmvBackend(kind), Rng(1))
            assert all(bin(c.mask).count("1") <= k for c in res.candidates)
            assert res.value == max(res.all_values)
            assert res.candidates[0].mask & res.candidates[2].mask == 0


def test_psystem_bounds_and_errors():
    f = gen_coverage(6, Rng(5))
    res = submod_max_psystem(f, None, PartitionMatroid([[0, 1, 2], [3, 4, 5]]), 1, FmvBackend("exact"))
    assert res.bound == 8 and len(res.passes) == 2
    assert submod_max_psystem(f, None, UniformMatroid(6, 2), 3, FmvBackend("exact")).bound == 2 * (3 + 2 + 1 / 3)
    with pytest.raises(InvalidParameter):
        submod_max_psystem(f, None, UniformMatroid(6, 2), 0.5)
    with pytest.raises(InvalidParameter):
        submod_max_psystem(f, None, None, 1)
    assert len(submod_max_psystem(f, None, UniformMatroid(6, 2), 2.5).passes) == 4


def test_psystem_two_pass_variant_bound():
    worst = math.inf
    for f, system, _ in psystem_corpus():
        p = float(p_parameter(system))
        res = submod_max_psystem(f, None, system, p, FmvBackend("exact"), passes=2)
        if p > 1:
            assert res.bound == psystem_two_pass_bound(p, 1.0)
        assert all(system.independent_mask(c.mask) for c in res.candidates)
        opt = table_opt(f.table(), feasible_masks(system, f.n))
        worst = min(worst, res.value / opt * psystem_two_pass_bound(p, 1.0))
    assert worst >= 1 - 1e-9


def test_knapsack_collection_small():
    f = gen_coverage(3, Rng(6))
    coll = knapsack_candidate_collection(f, [1, 1, 1], 3)
    assert set(coll) == set(range(8))


def test_density_greedy_unit_sizes_is_plain_greedy():
    rng = Rng(7)
    for _ in range(5):
        f = gen_coverage(7, rng)
        knap = KnapsackConstraint([1] * 7, 7)
        prefixes = density_greedy_extension(f, knap, (1 << 7) - 1, 0)
        tr = greedy_cardinality(f, None, len(prefixes), stop_nonpositive=True)
        assert prefixes == tr.prefixes()[1:]


def test_density_greedy_drops_overflowing_elements():
    f = ModularFunction([10, 1, 1])
    prefixes = density_greedy_extension(f, KnapsackConstraint([3, 1, 1], 2), 0b111, 0)
    assert prefixes == [0b010, 0b110]


def test_knapsack_tiny_budget_and_large_budget():
    f = gen_coverage(5, Rng(8))
    res = submod_max_knapsack(f, [3, 3, 4, 5, 3], 2)
    assert res.chosen == 0 and res.value == 0
    rng = Rng(9)
    for _ in range(4):
        g = tabulate(gen_coverage_minus_cost(7, rng))
        sizes = [1 + rng.below(3) for _ in range(7)]
        res = submod_max_knapsack(g, sizes, sum(sizes), FmvBackend("exact"))
        assert res.value >= table_opt(g.table(), np.ones(128, bool)) / 5 - 1e-9


def test_knapsack_fast_mode_feasible():
    rng = Rng(10)
    f = tabulate(gen_coverage_minus_cost(11, rng))
    knap = gen_knapsack(11, rng)
    res = submod_max_knapsack(f, knap, None, FmvBackend("local"), fast=True)
    assert knap.independent_mask(res.chosen)
    assert all(knap.independent_mask(c.mask) for c in res.candidates)
    assert res.value == max(res.all_values)
