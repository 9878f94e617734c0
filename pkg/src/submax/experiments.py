"""Experiment configs, runs and machine-readable reports."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .bruteforce import brute_force_opt
from .constraints import IndependenceSystem, IntersectionSystem, KnapsackConstraint, PartitionMatroid, \
    UniformMatroid, p_parameter, rank_and_lower_rank
from .core import TOL, tabulate
from .errors import InvalidConfig
from .instances import Instance, load_instance
from .offline import submod_max_cardinality, submod_max_knapsack, submod_max_psystem
from .rng import Rng
from .secretary import (ADVICE_FACTOR, CONTIGUOUS_FACTOR, SECRETARIES_FACTOR, AdviceCardinalityPolicy,
                        DynkinPolicy, MatroidSecretaryPolicy, PartitionContiguousPolicy, PartitionGeneralPolicy,
                        Stream, SubmodularSecretariesPolicy, matroid_advice_factor, monte_carlo_eval)
from .unconstrained import FmvBackend

OFFLINE_ALGORITHMS = ("card", "psys", "knapsack")
ONLINE_ALGORITHMS = ("card-secretary", "card-advice", "partition-contig", "partition-general",
                     "matroid-secretary", "matroid-advice", "dynkin")


@dataclass
class ExperimentConfig:
    algorithm: str
    instance: Instance | None = None
    instance_path: str | None = None
    k: int | None = None
    p: float | None = None
    budget: int | None = None
    trials: int = 1
    fmv: str = "exact"
    seed: int = 0
    cap: int = 14
    fast: bool = False
    passes: int | None = None

    def load(self) -> Instance:
        if self.instance is not None:
            return self.instance
        if self.instance_path is None:
            raise InvalidConfig("config names no instance")
        return load_instance(self.instance_path)


@dataclass
class RunReport:
    algorithm: str
    seed: int
    n: int
    value: float
    stderr: float = 0.0
    trials: int = 1
    opt: float | None = None
    ratio: float | None = None
    bound_factor: float | None = None
    bound_formula: str = ""
    bound_value: float | None = None
    passed: bool | None = None
    query_count: int = 0
    chosen: list[int] = field(default_factory=list)
    candidates: list[dict] = field(default_factory=list)
    trial_values: list[float] = field(default_factory=list)
    params: dict = field(default_factory=dict)
    elapsed_s: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(**d)


def _rank(system: IndependenceSystem, n: int, cap: int) -> int:
    if isinstance(system, UniformMatroid):
        return min(system.k, n)
    if isinstance(system, PartitionMatroid):
        return len(system.groups)
    return rank_and_lower_rank(system, range(n), cap=max(cap, n))[0]


def _check(mean: float, stderr: float, target: float | None) -> bool | None:
    if target is None:
        return None
    return mean >= target - 3 * stderr - TOL


def run_experiment(cfg: ExperimentConfig) -> RunReport:
    """Run one configured experiment and compare against brute-force OPT when ``n <= cap``."""
    if cfg.algorithm not in OFFLINE_ALGORITHMS + ONLINE_ALGORITHMS:
        raise InvalidConfig(f"unknown algorithm {cfg.algorithm!r}")
    inst = cfg.load()
    f = tabulate(inst.build_function()) if inst.n <= 20 else inst.build_function()
    system = inst.build_constraint()
    start = time.perf_counter()
    rep = RunReport(cfg.algorithm, cfg.seed, inst.n, 0.0,
                    params={"k": cfg.k, "p": cfg.p, "budget": cfg.budget, "fmv": cfg.fmv,
                            "trials": cfg.trials, "fast": cfg.fast})
    feasible = None
    if cfg.algorithm in OFFLINE_ALGORITHMS:
        feasible = _run_offline(cfg, f, system, rep)
    else:
        feasible = _run_online(cfg, f, system, rep)
    if inst.n <= cfg.cap:
        q = f.query_count
        bf = brute_force_opt(f, feasible, cap=max(cfg.cap, 16))
        f.query_count = q
        rep.opt = bf.opt_value
        rep.ratio = rep.value / bf.opt_value if bf.opt_value > 0 else 1.0
        if rep.bound_factor is not None and math.isfinite(rep.bound_factor):
            rep.bound_value = bf.opt_value / rep.bound_factor
            rep.passed = _check(rep.value, rep.stderr, rep.bound_value)
    rep.elapsed_s = time.perf_counter() - start
    return rep


def _run_offline(cfg: ExperimentConfig, f, system, rep: RunReport):
    n = f.n
    if cfg.algorithm == "card":
        k = cfg.k if cfg.k is not None else getattr(system, "k", None)
        if k is None:
            raise InvalidConfig("card needs --k or a uniform constraint")
        feasible = UniformMatroid(n, k)
        solve = lambda backend, rng: submod_max_cardinality(f, None, k, backend, rng)
    elif cfg.algorithm == "psys":
        if system is None:
            raise InvalidConfig("psys needs a constraint in the instance")
        p = cfg.p
        if p is None:
            p = float(p_parameter(system, cap=max(cfg.cap, n))) if n <= max(cfg.cap, 14) else None
            if p is None:
                raise InvalidConfig("pass --p for instances above the exhaustive cap")
        rep.params["p"] = p
        feasible = system
        solve = lambda backend, rng: submod_max_psystem(f, None, system, p, backend, cfg.passes, rng)
    else:
        if isinstance(system, KnapsackConstraint):
            knap = system if cfg.budget is None else KnapsackConstraint(system.sizes, cfg.budget)
        else:
            raise InvalidConfig("knapsack needs a knapsack constraint in the instance")
        feasible = knap
        solve = lambda backend, rng: submod_max_knapsack(f, knap, None, backend, None, cfg.fast, 8, rng)
    values = []
    res = None
    for t in range(max(1, cfg.trials)):
        backend = FmvBackend(cfg.fmv, seed=cfg.seed)
        res = solve(backend, Rng(cfg.seed, t))
        values.append(res.value)
        if not backend.randomized:
            break
    rep.value = sum(values) / len(values)
    if len(values) > 1:
        mean = rep.value
        rep.stderr = math.sqrt(sum((v - mean) ** 2 for v in values) / (len(values) - 1) / len(values))
    rep.trials = len(values)
    rep.trial_values = values
    rep.chosen = list(res.chosen_set)
    rep.candidates = [{"label": c.label, "set": list(c.members), "value": c.value} for c in res.candidates]
    rep.bound_factor = res.bound
    rep.bound_formula = f"OPT / ({res.bound_formula}), alpha = {FmvBackend(cfg.fmv).alpha}"
    rep.query_count = f.query_count
    return feasible


def _run_online(cfg: ExperimentConfig, f, system, rep: RunReport):
    n = f.n
    alg = cfg.algorithm
    stream_factory = None
    feasible = system
    factor, formula = None, ""
    if alg in ("card-secretary", "card-advice"):
        k = cfg.k if cfg.k is not None else getattr(system, "k", None)
        if k is None:
            raise InvalidConfig(f"{alg} needs --k or a uniform constraint")
        feasible = UniformMatroid(n, k)
        if alg == "card-secretary":
            factory = lambda rng: SubmodularSecretariesPolicy(f, k, rng)
            factor, formula = SECRETARIES_FACTOR, "OPT / 1417"
        else:
            if n > cfg.cap:
                raise InvalidConfig("card-advice uses brute-force OPT as advice; n exceeds the cap")
            Z = brute_force_opt(f, feasible, cap=max(cfg.cap, 16)).opt_value
            factory = lambda rng: AdviceCardinalityPolicy(f, k, Z, rng)
            factor, formula = ADVICE_FACTOR, "OPT / 21 (advice Z = OPT)"
    elif alg in ("partition-contig", "partition-general"):
        if not isinstance(system, PartitionMatroid):
            raise InvalidConfig(f"{alg} needs a partition constraint")
        if alg == "partition-contig":
            factory = lambda rng: PartitionContiguousPolicy(f, system, rng)
            stream_factory = lambda rng: Stream.grouped(system.groups, rng)
            factor, formula = CONTIGUOUS_FACTOR, "OPT / (3 + 6e)"
        else:
            factory = lambda rng: PartitionGeneralPolicy(f, system, rng)
            formula = "O(1), constant not stated; measured only"
    elif alg in ("matroid-secretary", "matroid-advice"):
        if system is None or isinstance(system, KnapsackConstraint) or isinstance(system, IntersectionSystem):
            raise InvalidConfig(f"{alg} needs a matroid constraint")
        k = cfg.k if cfg.k is not None else _rank(system, n, cfg.cap)
        rep.params["k"] = k
        if alg == "matroid-advice":
            w1 = max(f.value(1 << e) for e in range(n)) if n else 0.0
            factory = lambda rng: MatroidSecretaryPolicy(f, system, k, rng, w1=w1)
            factor, formula = matroid_advice_factor(k), "OPT / (40 (1 + ceil(log2 2k)))"
        else:
            factory = lambda rng: MatroidSecretaryPolicy(f, system, k, rng)
            formula = "O(log k), constant not stated; measured only"
    else:
        feasible = UniformMatroid(n, 1)
        factory = lambda rng: DynkinPolicy(n, lambda e: f.value(1 << e))
        singles = [f.value(1 << e) for e in range(n)]
        if len(set(singles)) == len(singles):
            factor, formula = math.e, "max singleton / e"
        else:
            formula = "tied singleton values; not asserted"
    check = feasible.independent_mask if feasible is not None else None
    mc = monte_carlo_eval(factory, f, max(1, cfg.trials), cfg.seed, stream_factory, check)
    rep.value, rep.stderr, rep.trials, rep.trial_values = mc.mean, mc.stderr, mc.trials, mc.values
    rep.bound_factor = factor
    rep.bound_formula = formula
    rep.query_count = f.query_count
    if alg == "dynkin":
        # compared against the best singleton, not the constrained optimum
        w1 = max(singles) if singles else 0.0
        rep.opt = w1
        rep.ratio = rep.value / w1 if w1 > 0 else 1.0
        if factor is not None:
            rep.bound_value = w1 / factor
            rep.passed = _check(rep.value, rep.stderr, rep.bound_value)
        rep.params["skip_brute_force"] = True
    return feasible


def emit_report(report: RunReport, path=None, fmt: str = "json") -> str:
    """Serialize a report as JSON or CSV; writes to ``path`` when given.

    CSV has one row per trial value for simulation runs and one row per
    candidate for offline runs, with the summary fields repeated on each row.
    """
    if fmt == "json":
        text = json.dumps(report.to_dict(), indent=1, sort_keys=True) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        summary = ["algorithm", "seed", "n", "value", "stderr", "opt", "ratio", "bound_value", "passed"]
        w = csv.writer(buf)
        if report.algorithm in ONLINE_ALGORITHMS:
            w.writerow(["trial", "trial_value"] + summary)
            for t, v in enumerate(report.trial_values):
                w.writerow([t, v] + [getattr(report, s) for s in summary])
        else:
            w.writerow(["label", "set", "candidate_value"] + summary)
            for c in report.candidates:
                w.writerow([c["label"], " ".join(map(str, c["set"])), c["value"]]
                           + [getattr(report, s) for s in summary])
        text = buf.getvalue()
    else:
        raise InvalidConfig(f"unknown report format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text
