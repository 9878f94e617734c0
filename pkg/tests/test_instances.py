import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from submax.core import check_nonneg_and_zero, check_submodular
from submax.errors import InvalidConfig
from submax.instances import (CONSTRAINT_FAMILIES, FUNCTION_FAMILIES, Instance, generate_corpus,
                              generate_instance, load_instance, save_instance, write_corpus)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FUNCTION_FAMILIES), st.sampled_from(CONSTRAINT_FAMILIES),
       st.integers(4, 9), st.integers(0, 10_000))
def test_round_trip_preserves_values_and_feasibility(fam, cons, n, seed):
    inst = generate_instance(fam, cons, n, seed, k=2, p=2)
    back = Instance.loads(inst.dumps())
    assert back == inst
    f, g = inst.build_function(), back.build_function()
    assert all(f.value(m) == g.value(m) for m in range(1 << n))
    c, d = inst.build_constraint(), back.build_constraint()
    if c is None:
        assert d is None
    else:
        assert all(c.independent_mask(m) == d.independent_mask(m) for m in range(1 << n))


def test_file_round_trip(tmp_path):
    inst = generate_instance("cut", "graphic", 7, 4)
    save_instance(inst, tmp_path / "a.json")
    assert load_instance(tmp_path / "a.json") == inst


def test_empty_corpus(tmp_path):
    manifest = write_corpus(generate_corpus("coverage", count=0), tmp_path)
    data = json.loads(manifest.read_text())
    assert data["count"] == 0 and data["instances"] == []
    assert sorted(p.name for p in tmp_path.iterdir()) == ["manifest.json"]


def test_same_seed_same_files(tmp_path):
    spec = {"function": "coverage_minus_cost", "constraint": "partition"}
    for d in ("a", "b"):
        write_corpus(generate_corpus("coverage_minus_cost", "partition", count=5, seed=17, n=8), tmp_path / d, spec)
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert len(names) == 6
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    other = generate_corpus("coverage_minus_cost", "partition", count=5, seed=18, n=8)
    assert [i.dumps() for i in other] != [load_instance(tmp_path / "a" / n).dumps() for n in names[:5]]


def test_coverage_minus_cost_corpus_passes_checks():
    corpus = generate_corpus("coverage_minus_cost", count=100, seed=3, n=10)
    assert len(corpus) == 100
    for inst in corpus:
        f = inst.build_function()
        assert check_nonneg_and_zero(f) and check_submodular(f)
        assert inst.meta["seed"] == 3


def test_bad_specs():
    with pytest.raises(InvalidConfig):
        Instance.from_dict({"n": 3})
    with pytest.raises(InvalidConfig):
        Instance.from_dict({"n": 2, "function": {"kind": "mystery"}}).build_function()
    with pytest.raises(InvalidConfig):
        Instance.from_dict({"n": 3, "function": {"kind": "modular", "weights": [1, 2]}}).build_function()
    with pytest.raises(InvalidConfig):
        generate_instance("quadratic", "none", 5, 0)
