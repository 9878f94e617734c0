import csv
import io
import json
from fractions import Fraction

import pytest

from submax.bruteforce import brute_force_opt
from submax.cli import main
from submax.constraints import UniformMatroid
from submax.core import CoverGadget, CutFunction, ModularFunction
from submax.errors import CapExceeded, InvalidConfig
from submax.experiments import ExperimentConfig, RunReport, emit_report, run_experiment
from submax.instances import Instance, save_instance
from submax.lowerbound import (cover_gadget_game, fixed_instance_game, large_gadget_upper_bound,
                               optimal_policy_value, random_gadget, two_gadget_lower_bound)
from submax.rng import Rng
from submax.secretary import (AdviceCardinalityPolicy, DynkinPolicy, MatroidSecretaryPolicy, Stream,
                              SubmodularSecretariesPolicy, run_policy)


# ---------------------------------------------------------------------------
# brute force


def test_brute_force_gadget_two_elements():
    g = CoverGadget((1, 2), (2,))
    res = brute_force_opt(g, UniformMatroid(g.n, 2))
    assert res.opt_value == 3
    assert res.opt_mask == g.mask_of(["1B", "2TB"])


def test_brute_force_empty_family():
    f = ModularFunction([1.0, 2.0, 3.0])
    res = brute_force_opt(f, lambda m: m == 0)
    assert (res.opt_value, res.opt_set, res.feasible_count) == (0.0, (), 1)
    assert res.enumerated_count == 8


def test_brute_force_modular_top_k():
    w = [0.5, -1.0, 4.0, 2.0, 0.0, 3.5]
    f = ModularFunction([max(x, 0.0) for x in w])
    for k in range(1, 7):
        res = brute_force_opt(f, UniformMatroid(6, k))
        assert res.opt_value == pytest.approx(sum(sorted((x for x in w if x > 0), reverse=True)[:k]))


def test_brute_force_cap():
    f = ModularFunction([1.0] * 17)
    with pytest.raises(CapExceeded):
        brute_force_opt(f)
    with pytest.raises(CapExceeded):
        brute_force_opt(ModularFunction([1.0] * 15), lambda m: True)


# ---------------------------------------------------------------------------
# optimal online payoff


def test_two_gadget_value_is_eight_thirds():
    v = two_gadget_lower_bound()
    assert v == Fraction(8, 3)
    assert v < brute_force_opt(CoverGadget((1, 2), (1,)), UniformMatroid(3, 2)).opt_value


def test_hidden_top_labels_lose_more():
    assert two_gadget_lower_bound(reveal_top=False) == Fraction(5, 2)


def test_top_element_first_recovers_opt():
    game = cover_gadget_game((1, 2), [(1,), (2,)], order_filter=lambda labels: labels[0].endswith("TB"))
    assert optimal_policy_value(game, 2) == 3


def test_known_instance_with_room_for_everything():
    f = CutFunction(4, [(0, 1, 1), (1, 2, 2), (2, 3, 1), (0, 3, 3)])
    assert optimal_policy_value(fixed_instance_game(f), 4) == Fraction(brute_force_opt(f).opt_value)


def test_game_cap():
    with pytest.raises(CapExceeded):
        optimal_policy_value(fixed_instance_game(ModularFunction([1.0] * 4)), 1, cap=10)


def test_random_gadget_law():
    counts = {}
    for t in range(3000):
        g, matching = random_gadget(4, Rng(5, t))
        S = tuple(sorted(int(lab[:-2]) for lab in g.ground.labels if lab.endswith("TB")))
        assert len(S) == 2 and all(sum(x in pair for x in S) == 1 for pair in matching)
        counts[S] = counts.get(S, 0) + 1
    assert len(counts) == 6
    assert min(counts.values()) > 400
    with pytest.raises(ValueError):
        random_gadget(3, Rng(0))


@pytest.mark.parametrize("name", ["card-secretary", "card-advice", "matroid-secretary", "dynkin"])
def test_shipped_policies_below_large_gadget_bound(name):
    k, trials = 4, 1500
    values = []
    for t in range(trials):
        g, _ = random_gadget(k, Rng(9, t, 2))
        n = g.n
        rng = Rng(9, t, 1)
        if name == "card-secretary":
            pol = SubmodularSecretariesPolicy(g, k, rng)
        elif name == "card-advice":
            pol = AdviceCardinalityPolicy(g, k, brute_force_opt(g, UniformMatroid(n, k)).opt_value, rng)
        elif name == "matroid-secretary":
            pol = MatroidSecretaryPolicy(g, UniformMatroid(n, k), k, rng)
        else:
            pol = DynkinPolicy(n, lambda e, g=g: g.value(1 << e))
        S = run_policy(pol, Stream.uniform(n, Rng(9, t, 0)))
        assert bin(S).count("1") <= k
        values.append(g.value(S))
    mean = sum(values) / trials
    sd = (sum((v - mean) ** 2 for v in values) / (trials - 1)) ** 0.5
    assert mean <= large_gadget_upper_bound(k) + 3 * sd / trials ** 0.5


# ---------------------------------------------------------------------------
# experiments and reports


def _gadget_instance():
    g = CoverGadget((1, 2), (2,))
    return Instance.from_objects(g, UniformMatroid(g.n, 2))


def test_experiment_ratio_against_opt_three():
    rep = run_experiment(ExperimentConfig("card", _gadget_instance(), k=2))
    assert rep.opt == 3
    assert rep.ratio == pytest.approx(rep.value / 3)
    assert rep.bound_factor == 5 and rep.passed
    assert "4 + alpha" in rep.bound_formula and "alpha = 1.0" in rep.bound_formula


def test_report_round_trip(tmp_path):
    rep = run_experiment(ExperimentConfig("card-secretary", _gadget_instance(), k=2, trials=50, seed=3))
    text = emit_report(rep, tmp_path / "r.json")
    back = RunReport.from_dict(json.loads(text))
    assert back == rep
    assert emit_report(back) == text


def test_report_determined_by_config():
    cfg = ExperimentConfig("card-advice", _gadget_instance(), k=2, trials=40, seed=11)
    a, b = run_experiment(cfg), run_experiment(cfg)
    a.elapsed_s = b.elapsed_s = 0.0
    assert a == b


def test_csv_rows_match_trials():
    rep = run_experiment(ExperimentConfig("card-secretary", _gadget_instance(), k=2, trials=37))
    rows = list(csv.reader(io.StringIO(emit_report(rep, fmt="csv"))))
    assert len(rows) == 1 + 37


def test_unknown_algorithm_and_format():
    with pytest.raises(InvalidConfig):
        run_experiment(ExperimentConfig("nope", _gadget_instance()))
    with pytest.raises(InvalidConfig):
        run_experiment(ExperimentConfig("card"))
    rep = run_experiment(ExperimentConfig("card", _gadget_instance(), k=2))
    with pytest.raises(InvalidConfig):
        emit_report(rep, fmt="xml")


# ---------------------------------------------------------------------------
# command line


def test_cli_exit_codes(tmp_path, capsys):
    path = tmp_path / "gadget.json"
    save_instance(_gadget_instance(), path)
    assert main(["lowerbound"]) == 0
    assert main(["lowerbound", "--hide-top"]) == 0  # variant with no asserted bound
    capsys.readouterr()
    assert main(["--seed", "2", "solve", "--instance", str(path), "--algorithm", "card", "--k", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["opt"] == 3
    assert main(["simulate", "--instance", str(path), "--algorithm", "card-advice", "--k", "2",
                 "--trials", "20", "--format", "csv"]) == 0
    assert main(["solve", "--instance", str(tmp_path / "missing.json"), "--algorithm", "card", "--k", "2"]) == 2
    corpus = tmp_path / "corpus"
    assert main(["gen", "--n", "6", "--count", "3", "--out", str(corpus)]) == 0
    assert main(["verify", *map(str, sorted(corpus.glob("inst_*.json")))]) == 0

