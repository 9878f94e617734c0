"""JSON instance files and reproducible instance generators.

An instance file is a JSON object::

    {
      "n": 10,
      "function": {"kind": ..., ...},
      "constraint": {"kind": ..., ...},      # optional
      "meta": {...}                          # optional, free-form
    }

Function kinds and their fields:

* ``modular``: ``weights`` (list of n non-negative numbers)
* ``coverage``: ``m`` (universe size), ``sets`` (n lists of points),
  ``weights`` (m point weights, or null for unit weights)
* ``coverage_minus_cost``: the coverage fields plus ``costs`` (n numbers)
* ``cut``: ``n``, ``edges`` (list of ``[u, v, weight]``)
* ``cover_gadget``: ``R`` and ``S`` (lists of ints, S a subset of R)

Constraint kinds:

* ``uniform``: ``k``
* ``partition``: ``groups`` (list of lists partitioning 0..n-1)
* ``graphic``: ``vertices``, ``edges`` (list of ``[u, v]``; edge i is element i)
* ``intersection``: ``members`` (list of constraint objects)
* ``knapsack``: ``sizes`` (n positive ints), ``budget`` (int)
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .constraints import (GraphicMatroid, IndependenceSystem, IntersectionSystem, KnapsackConstraint,
                          PartitionMatroid, UniformMatroid)
from .core import (EXHAUSTIVE_CAP, CoverageFunction, CoverageMinusCostFunction, CoverGadget, CutFunction,
                   ModularFunction, SetFunction, check_nonneg_and_zero, check_submodular)
from .errors import GenerationFailed, InvalidConfig
from .rng import Rng


def function_from_spec(spec: dict) -> SetFunction:
    kind = spec.get("kind")
    if kind == "modular":
        return ModularFunction(spec["weights"])
    if kind == "coverage":
        return CoverageFunction(spec["m"], spec["sets"], spec.get("weights"))
    if kind == "coverage_minus_cost":
        cov = CoverageFunction(spec["m"], spec["sets"], spec.get("weights"))
        return CoverageMinusCostFunction(cov, spec["costs"])
    if kind == "cut":
        return CutFunction(spec["n"], [tuple(e) for e in spec["edges"]])
    if kind == "cover_gadget":
        return CoverGadget(spec["R"], spec["S"])
    raise InvalidConfig(f"unknown function kind {kind!r}")


def constraint_from_spec(spec: dict | None, n: int) -> IndependenceSystem | None:
    if spec is None:
        return None
    kind = spec.get("kind")
    if kind == "uniform":
        return UniformMatroid(n, spec["k"])
    if kind == "partition":
        return PartitionMatroid(spec["groups"])
    if kind == "graphic":
        return GraphicMatroid(spec["vertices"], [tuple(e) for e in spec["edges"]])
    if kind == "intersection":
        return IntersectionSystem([constraint_from_spec(m, n) for m in spec["members"]])
    if kind == "knapsack":
        return KnapsackConstraint(spec["sizes"], spec["budget"])
    raise InvalidConfig(f"unknown constraint kind {kind!r}")


@dataclass
class Instance:
    n: int
    function: dict
    constraint: dict | None = None
    meta: dict = field(default_factory=dict)

    def build_function(self) -> SetFunction:
        f = function_from_spec(self.function)
        if f.n != self.n:
            raise InvalidConfig(f"function has {f.n} elements, instance says {self.n}")
        return f

    def build_constraint(self) -> IndependenceSystem | None:
        c = constraint_from_spec(self.constraint, self.n)
        if c is not None and c.n != self.n:
            raise InvalidConfig(f"constraint has {c.n} elements, instance says {self.n}")
        return c

    def to_dict(self) -> dict:
        d = {"n": self.n, "function": self.function}
        if self.constraint is not None:
            d["constraint"] = self.constraint
        if self.meta:
            d["meta"] = self.meta
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Instance":
        if "n" not in d or "function" not in d:
            raise InvalidConfig("instance needs 'n' and 'function'")
        return cls(int(d["n"]), d["function"], d.get("constraint"), d.get("meta", {}))

    @classmethod
    def from_objects(cls, f: SetFunction, constraint: IndependenceSystem | None = None, **meta) -> "Instance":
        return cls(f.n, f.to_spec(), constraint.to_spec() if constraint is not None else None, meta)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "Instance":
        return cls.from_dict(json.loads(text))


def load_instance(path) -> Instance:
    return Instance.loads(Path(path).read_text())


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(inst.dumps() + "\n")


# ---------------------------------------------------------------------------
# generators


def _subset(rng: Rng, m: int, p: float) -> list[int]:
    return [x for x in range(m) if rng.random() < p]


def gen_modular(n: int, rng: Rng, high: int = 10) -> ModularFunction:
    return ModularFunction([rng.below(high + 1) for _ in range(n)])


def gen_coverage(n: int, rng: Rng, m: int | None = None, density: float = 0.3) -> CoverageFunction:
    m = m or 2 * n
    return CoverageFunction(m, [_subset(rng, m, density) for _ in range(n)])


def gen_cut(n: int, rng: Rng, p_edge: float = 0.5, max_weight: int = 3) -> CutFunction:
    edges = [(u, v, 1 + rng.below(max_weight)) for u in range(n) for v in range(u + 1, n) if rng.random() < p_edge]
    return CutFunction(n, edges)


def gen_coverage_minus_cost(n: int, rng: Rng, m: int | None = None, density: float = 0.3,
                            cost_scale: float = 0.8, attempts: int = 200) -> CoverageMinusCostFunction:
    """Coverage minus per-element costs, resampled until non-negative everywhere.

    Costs are a random fraction (up to ``cost_scale``) of each element's own
    coverage, rounded to quarters so values stay exactly representable.
    """
    m = m or 2 * n
    for _ in range(attempts):
        cov = gen_coverage(n, rng, m, density)
        costs = [round(4 * cost_scale * rng.random() * cov._value(1 << i)) / 4 for i in range(n)]
        try:
            return CoverageMinusCostFunction(cov, costs)
        except ValueError:
            continue
    raise GenerationFailed(f"no non-negative coverage-minus-cost instance in {attempts} attempts")


def gen_partition_groups(n: int, k: int, rng: Rng) -> list[list[int]]:
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n groups")
    perm = rng.permutation(n)
    groups = [[perm[i]] for i in range(k)]
    for e in perm[k:]:
        groups[rng.below(k)].append(e)
    return [sorted(g) for g in groups]


def gen_graphic(n: int, rng: Rng, vertices: int | None = None) -> GraphicMatroid:
    vertices = vertices or max(2, (n + 1) // 2 + 1)
    edges = []
    for _ in range(n):
        u = rng.below(vertices)
        v = rng.below(vertices - 1)
        edges.append((u, v if v < u else v + 1))
    return GraphicMatroid(vertices, edges)


def gen_knapsack(n: int, rng: Rng, max_size: int = 5, fraction: float = 0.4) -> KnapsackConstraint:
    sizes = [1 + rng.below(max_size) for _ in range(n)]
    return KnapsackConstraint(sizes, max(1, int(fraction * sum(sizes))))


FUNCTION_FAMILIES = ("modular", "coverage", "cut", "coverage_minus_cost")
CONSTRAINT_FAMILIES = ("none", "uniform", "partition", "graphic", "intersection", "knapsack")


def gen_function(family: str, n: int, rng: Rng) -> SetFunction:
    if family == "modular":
        return gen_modular(n, rng)
    if family == "coverage":
        return gen_coverage(n, rng)
    if family == "cut":
        return gen_cut(n, rng)
    if family == "coverage_minus_cost":
        return gen_coverage_minus_cost(n, rng)
    raise InvalidConfig(f"unknown function family {family!r}")


def gen_constraint(family: str, n: int, rng: Rng, k: int = 3, p: int = 2) -> IndependenceSystem | None:
    if family == "none":
        return None
    if family == "uniform":
        return UniformMatroid(n, k)
    if family == "partition":
        return PartitionMatroid(gen_partition_groups(n, k, rng))
    if family == "graphic":
        return gen_graphic(n, rng)
    if family == "intersection":
        return IntersectionSystem([PartitionMatroid(gen_partition_groups(n, k, rng)) for _ in range(p)])
    if family == "knapsack":
        return gen_knapsack(n, rng)
    raise InvalidConfig(f"unknown constraint family {family!r}")


def generate_instance(function: str, constraint: str, n: int, seed: int, index: int = 0,
                      k: int = 3, p: int = 2, attempts: int = 50) -> Instance:
    """One instance from ``Rng(seed, index)``; exhaustively property-checked when ``n <= 14``."""
    rng = Rng(seed, index)
    for _ in range(attempts):
        f = gen_function(function, n, rng)
        if n <= EXHAUSTIVE_CAP and not (check_nonneg_and_zero(f) and check_submodular(f)):
            continue
        c = gen_constraint(constraint, n, rng, k, p)
        return Instance.from_objects(f, c, family=function, constraint_family=constraint,
                                     seed=seed, index=index, k=k, p=p)
    raise GenerationFailed(f"{function} instance failed property checks {attempts} times")


def generate_corpus(function: str, constraint: str = "none", count: int = 10, seed: int = 0, n: int = 10,
                    k: int = 3, p: int = 2) -> list[Instance]:
    return [generate_instance(function, constraint, n, seed, i, k, p) for i in range(count)]


def write_corpus(instances: list[Instance], out_dir, spec: dict | None = None) -> Path:
    """Write ``inst_XXXX.json`` files plus ``manifest.json``; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for i, inst in enumerate(instances):
        name = f"inst_{i:04d}.json"
        save_instance(inst, out / name)
        files.append({"file": name, "seed": inst.meta.get("seed"), "index": inst.meta.get("index")})
    manifest = out / "manifest.json"
    manifest.write_text(json.dumps({"spec": spec or {}, "count": len(files), "instances": files},
                                   indent=1, sort_keys=True) + "\n")
    return manifest
