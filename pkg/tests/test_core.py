import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from submax.core import (CallableFunction, CoverageFunction, CoverageMinusCostFunction, CoverGadget, CutFunction,
                         ModularFunction, check_monotone, check_nonneg_and_zero, check_submodular, evaluate,
                         marginal, members, restrict, tabulate, to_mask)
from submax.errors import CapExceeded, InvalidSubset
from submax.instances import gen_coverage, gen_coverage_minus_cost, gen_cut
from submax.rng import Rng


def gadget():
    return CoverGadget((1, 2), (2,))


def test_gadget_layout_and_opt_pair():
    g = gadget()
    assert g.n == 3
    assert [g.ground.label(e) for e in range(3)] == ["1B", "2B", "2TB"]
    assert g(g.mask_of(["1B", "2TB"]) and members(g.mask_of(["1B", "2TB"]))) == 3
    assert max(g.value(1 << e) for e in range(3)) == 2
    best = max(g.value(m) for m in range(8) if bin(m).count("1") <= 2)
    assert best == 3


def test_evaluate_examples():
    g = gadget()
    assert evaluate(g, [g.index("1B"), g.index("2TB")]) == 3
    assert evaluate(g, []) == 0
    cov = CoverageFunction(4, [[1, 2], [2, 3]])
    assert evaluate(cov, [0, 1]) == 3


def test_evaluate_rejects_bad_subset():
    g = gadget()
    with pytest.raises(InvalidSubset):
        evaluate(g, [5])
    with pytest.raises(InvalidSubset):
        g.value(1 << 3)
    with pytest.raises(InvalidSubset):
        to_mask([-1], 3)


def test_marginal_examples():
    cut = CutFunction(2, [(0, 1)])
    assert marginal(cut, [], 0) == 1
    g = gadget()
    assert marginal(g, [g.index("2TB")], g.index("2B")) == 0
    assert marginal(g, [0, 1], 1) == 0


def test_restrict_examples():
    g = gadget()
    r = restrict(g, [g.index("2TB")])
    assert r([g.index("1B")]) == 1
    assert r([]) == 0
    ident = restrict(g, [])
    assert all(ident.value(m) == g.value(m) for m in range(8))


def test_query_count_increments_once_per_eval():
    g = gadget()
    g([0])
    g.value(3)
    marginal(g, [0], 1)
    assert g.query_count == 4


def test_query_count_threadsafe():
    f = tabulate(gadget())
    f.query_count = 0

    def work():
        for _ in range(2000):
            f.value(5)
    ts = [threading.Thread(target=work) for _ in range(4)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    assert f.query_count == 8000


def test_check_submodular_examples():
    assert check_submodular(CoverageFunction(5, [[0, 1], [1, 2], [3], [0, 4]]))
    sq = CallableFunction(3, lambda s: len(s) ** 2)
    rep = check_submodular(sq)
    assert not rep.holds
    w = rep.witness
    assert w["gain_S"] < w["gain_T"]
    S, T, e = to_mask(w["S"], 3), to_mask(w["T"], 3), w["e"]
    assert S & ~T == 0 and not (T >> e) & 1
    cut = gen_cut(6, Rng(1))
    assert check_submodular(cut)


def test_sampled_mode_finds_supermodular_violation():
    sq = CallableFunction(6, lambda s: len(s) ** 2)
    assert not check_submodular(sq, mode="sampled", samples=500, seed=1).holds
    assert check_submodular(gen_cut(20, Rng(2)), mode="sampled", samples=2000).holds


def test_exhaustive_cap():
    big = ModularFunction([1.0] * 15)
    with pytest.raises(CapExceeded):
        check_submodular(big)
    with pytest.raises(CapExceeded):
        check_nonneg_and_zero(big)


def test_nonneg_and_monotone_examples():
    g = gadget()
    assert check_nonneg_and_zero(g)
    assert check_monotone(g)
    tri = CutFunction(3, [(0, 1), (1, 2), (0, 2)])
    rep = check_monotone(tri)
    assert not rep.holds and rep.witness is not None
    cov = CoverageFunction(4, [[0], [1, 2], [3]])
    assert check_monotone(CoverageMinusCostFunction(cov, [0, 0, 0]))
    assert not check_nonneg_and_zero(CallableFunction(2, lambda s: 1.0)).holds


def test_coverage_minus_cost_rejects_negative():
    cov = CoverageFunction(2, [[0], [1]])
    with pytest.raises(ValueError):
        CoverageMinusCostFunction(cov, [2.0, 0.0])


def test_shipped_families_properties():
    rng = Rng(5)
    fams = [gen_coverage(9, rng), gen_cut(9, rng), gen_coverage_minus_cost(9, rng), gadget(),
            CoverageFunction(4, [[0, 1], [1, 2], [3]], weights=[0.5, 1.0, 2.0, 0.25])]
    for f in fams:
        assert check_nonneg_and_zero(f)
        assert check_submodular(f)


def test_restriction_preserves_submodularity():
    rng = Rng(8)
    for _ in range(5):
        f = gen_coverage_minus_cost(8, rng)
        for pinned in ([0], [1, 3], [2, 4, 6]):
            assert check_submodular(restrict(f, pinned))


def test_subadditivity_on_disjoint_pairs():
    rng = Rng(12)
    for f in (gen_cut(10, rng), gen_coverage_minus_cost(10, rng)):
        T = f.table()
        n = f.n
        a = np.arange(1 << n)
        for A in range(0, 1 << n, 7):
            B = a[(a & A) == 0]
            assert (T[A] + T[B] >= T[A | B] - 1e-9).all()


def test_vectorized_tables_match_pointwise():
    rng = Rng(3)
    fams = [gen_coverage(8, rng), gen_cut(8, rng), gen_coverage_minus_cost(8, rng),
            ModularFunction([1, 0.5, 2, 0, 3]), CoverageFunction(3, [[0], [0, 1], [2]], weights=[1.5, 2, 0.25])]
    for f in fams:
        assert np.allclose(f.table(), [f._value(m) for m in range(1 << f.n)])
        t = tabulate(f)
        assert all(t.value(m) == pytest.approx(f._value(m)) for m in range(1 << f.n))


@given(st.lists(st.integers(0, 9), max_size=10))
def test_members_roundtrip(xs):
    m = to_mask(xs, 10)
    assert members(m) == tuple(sorted(set(xs)))


@given(st.integers(0, 2**32))
@settings(max_examples=30, deadline=None)
def test_coverage_lattice_inequality(seed):
    f = gen_coverage(6, Rng(seed))
    rng = Rng(seed, 1)
    for _ in range(50):
        S, T = rng.below(64), rng.below(64)
        assert f.value(S) + f.value(T) >= f.value(S | T) + f.value(S & T) - 1e-9
