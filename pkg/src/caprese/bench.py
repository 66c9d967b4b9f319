"""Seeded Monte Carlo experiments on synthetic progressions.

A plan fixes the topology family, sample sizes, noise levels, shrinkage
coefficients and replicate counts. Model r is drawn from
``SeedSequence([seed, 0, r])``; its dataset d at sample size s and noise nu
comes from ``SeedSequence([seed, 1, r, d, s, round(nu * 1e6)])``. Seeds
depend on values, not on positions in the plan, so adding a grid point
never changes the data behind the other cells, and all algorithms in a
cell see the same datasets.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from functools import partial
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .genotype import validate_probabilities
from .metrics import edge_confusion, ted
from .parallel import indexed_map
from .probability import empirical_tables
from .reconstruct import ALGORITHMS, reconstruct_tables
from .synthesis import (GeneratorConfig, apply_noise, make_rng, random_dag, random_forest,
                        random_tree, sample)

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

KINDS = ("tree", "forest", "dag")
# exact: reconstruction equals the truth; excess: truth edges beyond one parent
# per event (nonzero only for DAGs)
METRICS = ("ted", "hamming", "fp", "fn", "exact", "excess")
_GENERATORS = {"tree": random_tree, "forest": random_forest, "dag": random_dag}


@dataclass(frozen=True)
class ExperimentPlan:
    kind: str = "tree"
    n: int = 20
    k: int = 1
    samples: tuple = (50, 100, 150, 200, 250)
    nus: tuple = (0.0,)
    lams: tuple = (0.01,)
    replicates: int = 100
    datasets: int = 1  # datasets per model
    seed: int = 0
    algos: tuple = ALGORITHMS
    p_min: float = 0.05
    p_max: float = 0.95
    max_depth: int | None = None
    name: str = "plan"

    def __post_init__(self):
        for attr in ("samples", "nus", "lams", "algos"):
            value = getattr(self, attr)
            if isinstance(value, (str, int, float)):
                value = (value,)
            object.__setattr__(self, attr, tuple(value))
            if not getattr(self, attr):
                raise ConfigError(f"plan field {attr!r} must be a nonempty list")
        object.__setattr__(self, "samples", tuple(int(s) for s in self.samples))
        object.__setattr__(self, "nus", tuple(float(v) for v in self.nus))
        object.__setattr__(self, "lams", tuple(float(v) for v in self.lams))
        if self.kind not in KINDS:
            raise ConfigError(f"unknown topology kind {self.kind!r}")
        if self.replicates < 1 or self.datasets < 1:
            raise ConfigError("replicates and datasets per model must be >= 1")
        if any(s < 1 for s in self.samples):
            raise ConfigError("sample sizes must be positive")
        if any(not 0.0 <= v <= 1.0 for v in self.nus):
            raise ConfigError("noise levels must lie in [0, 1]")
        if any(not 0.0 <= v <= 1.0 for v in self.lams):
            raise ConfigError("lambda values must lie in [0, 1]")
        bad = [a for a in self.algos if a not in ALGORITHMS]
        if bad:
            raise ConfigError(f"unknown algorithms {bad}")
        # raises ConfigError for inconsistent generator settings
        self.generator_config()

    def generator_config(self) -> GeneratorConfig:
        return GeneratorConfig(n=self.n, k=self.k, p_min=self.p_min, p_max=self.p_max,
                               seed=self.seed, max_depth=self.max_depth)

    def cells(self) -> list:
        """(algo, lam, nu, s) for every reported cell; oncotree has no lambda."""
        out = []
        for algo in self.algos:
            lams = self.lams if algo == "caprese" else (None,)
            for lam in lams:
                for nu in self.nus:
                    for s in self.samples:
                        out.append((algo, lam, nu, s))
        return out

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown plan fields {sorted(unknown)}")
        return cls(**d)


def load_plan(path) -> ExperimentPlan:
    """Read a plan from a JSON or TOML file (by extension)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".toml":
        data = tomllib.loads(text)
        data = data.get("plan", data)
    else:
        data = json.loads(text)
    if "preset" in data:
        base = PRESETS[data.pop("preset")].to_dict()
        base.update(data)
        data = base
    return ExperimentPlan.from_dict(data)


PRESETS = {
    # small enough for a laptop or CI run
    "desk": ExperimentPlan(n=10, samples=(50, 150), nus=(0.0, 0.05), lams=(0.01, 0.5),
                           replicates=10, name="desk"),
    # TED versus samples, noise-free, small lambda
    "samples": ExperimentPlan(samples=(50, 100, 150, 200, 250), lams=(0.01,), replicates=100,
                              datasets=10, name="samples"),
    "samples-forest": ExperimentPlan(kind="forest", k=3, samples=(50, 100, 150, 200, 250),
                                     lams=(0.01,), replicates=100, datasets=10,
                                     name="samples-forest"),
    # TED surface over lambda and noise at 150 samples
    "lambda": ExperimentPlan(samples=(150,), nus=tuple(round(0.025 * i, 3) for i in range(9)),
                             lams=tuple(round(0.05 * i, 2) for i in range(21)), algos=("caprese",),
                             replicates=100, datasets=10, name="lambda"),
    # TED versus samples and noise with lambda = 1/2
    "noise": ExperimentPlan(samples=(50, 100, 150, 200, 250),
                            nus=tuple(round(0.025 * i, 3) for i in range(9)), lams=(0.5,),
                            replicates=100, datasets=10, name="noise"),
    # conjunctive DAGs: false positives and negatives
    "dag": ExperimentPlan(kind="dag", n=10, samples=(50, 100, 150, 200), lams=(0.5,),
                          algos=("caprese",), replicates=100, datasets=10, name="dag"),
}


@dataclass
class Cell:
    algo: str
    lam: float | None
    nu: float
    s: int
    count: int = 0
    invalid: int = 0
    mean: dict = field(default_factory=dict)
    std: dict = field(default_factory=dict)
    error: str | None = None
    values: dict = field(default_factory=dict, repr=False)  # per-dataset metrics, in replicate order

    def key(self):
        return (self.algo, self.lam, self.nu, self.s)


@dataclass
class ExperimentReport:
    plan: ExperimentPlan
    cells: list
    seeds: dict  # replicate -> model seed words
    timings: dict = field(default_factory=dict)
    worst: dict = field(default_factory=dict)  # cell key -> (ted, truth, reconstruction)

    def cell(self, algo, lam, nu, s) -> Cell:
        for c in self.cells:
            if c.key() == (algo, lam if algo == "caprese" else None, nu, s):
                return c
        raise KeyError((algo, lam, nu, s))

    def mean(self, metric, algo, lam, nu, s) -> float:
        return self.cell(algo, lam, nu, s).mean[metric]

    def surface(self, metric="ted", algo="caprese") -> dict:
        """{(lam, nu, s): mean} for one algorithm."""
        return {(c.lam, c.nu, c.s): c.mean[metric] for c in self.cells if c.algo == algo}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["algo", "lambda", "nu", "samples", "count", "invalid"]
        for m in METRICS:
            header += [f"{m}_mean", f"{m}_std"]
        w.writerow(header + ["error"])
        for c in self.cells:
            row = [c.algo, "" if c.lam is None else c.lam, c.nu, c.s, c.count, c.invalid]
            for m in METRICS:
                row += [_fmt(c.mean.get(m)), _fmt(c.std.get(m))]
            w.writerow(row + [c.error or ""])
        return buf.getvalue()

    def to_dict(self):
        return {
            "plan": self.plan.to_dict(),
            "seeds": {str(r): list(words) for r, words in self.seeds.items()},
            "cells": [
                {"algo": c.algo, "lambda": c.lam, "nu": c.nu, "samples": c.s, "count": c.count,
                 "invalid": c.invalid, "mean": {m: _json_num(v) for m, v in c.mean.items()},
                 "std": {m: _json_num(v) for m, v in c.std.items()}, "error": c.error}
                for c in self.cells
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def write(self, out_dir, dot=False) -> list:
        """Write report.csv, report.json and timing.json (plus DOT dumps of the
        worst replicate per cell when ``dot``). Returns the paths written.

        Wall-clock timings live in their own file so the report files stay
        byte-identical between runs.
        """
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = [out / "report.csv", out / "report.json", out / "timing.json"]
        paths[0].write_text(self.to_csv())
        paths[1].write_text(self.to_json())
        paths[2].write_text(json.dumps(self.timings, indent=2) + "\n")
        if dot:
            for (algo, lam, nu, s), (score, truth, rec) in sorted(self.worst.items(), key=str):
                stem = f"worst_{algo}_lam{lam}_nu{nu}_s{s}"
                for tag, forest in (("truth", truth), ("reconstructed", rec)):
                    p = out / f"{stem}_{tag}.dot"
                    p.write_text(forest.to_dot())
                    paths.append(p)
        return paths


def _fmt(v):
    if v is None:
        return ""
    return "nan" if math.isnan(v) else f"{v:.6g}"


def _json_num(v):
    return None if v is None or math.isnan(v) else float(v)


def model_seed(plan, r):
    return (plan.seed, 0, r)


def data_seed(plan, r, d, s, nu):
    return (plan.seed, 1, r, d, s, int(round(nu * 1e6)))


def _run_model(r, plan):
    """All datasets and cells for model r: {cell key: [(metrics, invalid, truth, rec)]}."""
    model = _GENERATORS[plan.kind](plan.generator_config(), rng=make_rng(*model_seed(plan, r)))
    truth_forest = model.to_forest() if model.is_tree() else None
    out, errors = {}, {}
    for d in range(plan.datasets):
        for nu in plan.nus:
            for s in plan.samples:
                rng = make_rng(*data_seed(plan, r, d, s, nu))
                data = apply_noise(sample(model, s, rng), nu, rng)
                invalid = bool(validate_probabilities(data))
                tables = empirical_tables(data)
                for key in plan.cells():
                    algo, lam, cnu, cs = key
                    if cnu != nu or cs != s:
                        continue
                    try:
                        rec = reconstruct_tables(tables, algo, 0.5 if lam is None else lam)
                        conf = edge_confusion(model, rec)
                        metrics = {
                            "ted": float(ted(truth_forest, rec)) if truth_forest else math.nan,
                            "hamming": float(len(model.edges() ^ rec.edges())),
                            "fp": float(conf.false_positive),
                            "fn": float(conf.false_negative),
                            "exact": float(model.edges() == rec.edges()),
                            "excess": float(len(model.edges()) - model.n),
                        }
                    except Exception as exc:  # a failed cell is recorded, not fatal
                        errors.setdefault(key, f"{type(exc).__name__}: {exc}")
                        continue
                    out.setdefault(key, []).append((metrics, invalid, truth_forest, rec))
    return out, errors


def run_plan(plan: ExperimentPlan, jobs=1, keep_worst=False) -> ExperimentReport:
    """Generate, sample, corrupt, reconstruct and score every cell of the plan.

    Datasets failing validation are still reconstructed from their empirical
    tables and counted in the cell's ``invalid`` column.
    """
    t0 = time.perf_counter()
    results = indexed_map(partial(_run_model, plan=plan), range(plan.replicates), jobs)
    cells = []
    worst = {}
    for key in plan.cells():
        rows = []
        err = None
        for per_model, errors in results:
            rows += per_model.get(key, [])
            err = err or errors.get(key)
        cell = Cell(*key, count=len(rows), invalid=sum(r[1] for r in rows), error=err)
        for m in METRICS:
            vals = np.array([r[0][m] for r in rows], dtype=float)
            cell.values[m] = vals
            if len(vals) == 0 or np.isnan(vals).all():
                cell.mean[m] = cell.std[m] = math.nan
            else:
                cell.mean[m] = float(vals.mean())
                cell.std[m] = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
        if keep_worst and rows and rows[0][2] is not None:
            best = max(range(len(rows)), key=lambda i: (rows[i][0]["ted"], -i))
            worst[key] = (rows[best][0]["ted"], rows[best][2], rows[best][3])
        cells.append(cell)
    seeds = {r: model_seed(plan, r) for r in range(plan.replicates)}
    timings = {"total_seconds": time.perf_counter() - t0, "jobs": jobs}
    return ExperimentReport(plan, cells, seeds, timings, worst)


def lambda_sweep(n, s, nu_list, lambda_grid, R, seed=0, kind="tree", datasets=1, jobs=1):
    """Mean TED of CAPRESE over a (lambda, nu) grid at one sample size.

    Returns ``(lams, nus, surface)`` with ``surface[i][j]`` the mean TED at
    ``lams[i]`` and ``nus[j]``.
    """
    plan = ExperimentPlan(kind=kind, n=n, k=3 if kind == "forest" else 1, samples=(s,),
                          nus=tuple(nu_list), lams=tuple(lambda_grid), replicates=R,
                          datasets=datasets, seed=seed, algos=("caprese",), name="lambda")
    report = run_plan(plan, jobs=jobs)
    surf = report.surface("ted")
    lams, nus = plan.lams, plan.nus
    return lams, nus, [[surf[(lam, nu, s)] for nu in nus] for lam in lams]


def sweep_csv(lams, nus, surface) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lambda", *(f"nu={nu}" for nu in nus)])
    for lam, row in zip(lams, surface):
        w.writerow([lam, *(_fmt(v) for v in row)])
    return buf.getvalue()
