"""Acceptance criteria, each at its stated tolerance.

Every test prints one PASS/FAIL (or SKIP) line (collected again in the terminal
summary). Nothing here is tuned to the outcome: seeds are the package
defaults (master seed 0) and tolerances are the stated ones.
"""

import math
import os
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

from caprese.bench import ExperimentPlan, model_seed, run_plan
from caprese.bootstrap import nonparametric_bootstrap
from caprese.branching import max_branching, total_weight
from caprese.forest import ProgressionForest
from caprese.genotype import ROOT, read_matrix
from caprese.metrics import ted
from caprese.probability import NoiseSpec, ProbabilityTables, corrupt_tables
from caprese.reconstruct import caprese, caprese_from_tables, filter_reattaches
from caprese.synthesis import (GeneratorConfig, exact_distribution, exact_tables, make_rng,
                               random_forest, random_tree, sample)
from conftest import record
from oracles import best_arborescence_weight, brute_ted, cause_inequality_filter


def test_criterion_1_convergence():
    plan = ExperimentPlan(n=10, samples=(5000,), lams=(0.01,), replicates=100, algos=("caprese",))
    cell = run_plan(plan).cells[0]
    frac = float(np.mean(cell.values["ted"] == 0))
    ok = record(1, frac >= 0.95, f"TED=0 in {frac:.0%} of 100 trees (n=10, s=5000), need >= 95%")
    assert ok


def test_criterion_2_sample_size_curve():
    plan = ExperimentPlan(n=20, samples=(50, 250), lams=(0.01,), replicates=100)
    rep = run_plan(plan)
    c50 = rep.mean("ted", "caprese", 0.01, 0.0, 50)
    o50 = rep.mean("ted", "oncotree", None, 0.0, 50)
    c250 = rep.mean("ted", "caprese", 0.01, 0.0, 250)
    o250 = rep.mean("ted", "oncotree", None, 0.0, 250)
    checks = [abs(c50 - 6) <= 2, abs(o50 - 13) <= 3, c250 <= 1, abs(o250 - 6) <= 2]
    ok = record(2, all(checks),
                f"s=50: caprese {c50:.2f} (6+-2), oncotree {o50:.2f} (13+-3); "
                f"s=250: caprese {c250:.2f} (<=1), oncotree {o250:.2f} (6+-2)")
    assert ok


def test_criterion_3_lambda_direction():
    plan = ExperimentPlan(n=20, samples=(150,), nus=(0.0, 0.05, 0.10), lams=(0.01, 0.5),
                          replicates=50, algos=("caprese",))
    rep = run_plan(plan)
    m = {(lam, nu): rep.mean("ted", "caprese", lam, nu, 150) for lam in plan.lams for nu in plan.nus}
    checks = [m[(0.01, 0.0)] <= m[(0.5, 0.0)],
              m[(0.5, 0.05)] <= m[(0.01, 0.05)],
              m[(0.5, 0.10)] <= m[(0.01, 0.10)]]
    detail = ", ".join(f"nu={nu}: {m[(0.01, nu)]:.2f} vs {m[(0.5, nu)]:.2f}" for nu in plan.nus)
    ok = record(3, all(checks), f"mean TED lambda=0.01 vs 0.5 at s=150: {detail}")
    assert ok


def test_criterion_4_corrupted_exact_tables():
    models = [random_tree(GeneratorConfig(n=20), rng=make_rng(*model_seed(ExperimentPlan(), r)))
              for r in range(100)]
    tables = [exact_tables(model) for model in models]
    hits = {}
    for nu in (0.05, 0.15, 0.25):
        ep = nu / 2
        assert ep < math.sqrt(0.05) * (1 - nu)  # the stated premise
        hits[nu] = sum(caprese_from_tables(corrupt_tables(t, NoiseSpec.uniform(nu)), 0.01) ==
                       model.to_forest() for t, model in zip(tables, models))
    ok = record(4, all(h == 100 for h in hits.values()),
                "exact recoveries of 100 trees: " +
                ", ".join(f"nu={nu}: {h}" for nu, h in hits.items()) + " (need 100 each)")
    assert ok


def _check_branching(rng):
    for _ in range(200):
        k = int(rng.integers(2, 7))
        nodes = [ROOT, *"abcde"[:k - 1]]
        w = {(u, v): float(rng.normal()) for u in nodes for v in nodes[1:]
             if u != v and (u == ROOT or rng.random() < 0.8)}
        if not math.isclose(total_weight(max_branching(w, ROOT), w),
                            best_arborescence_weight(w, nodes, ROOT), abs_tol=1e-9):
            return False
    return True


def _random_forest(rng, labels):
    parent, placed = {}, [ROOT]
    for v in rng.permutation(labels):
        parent[str(v)] = placed[int(rng.integers(len(placed)))]
        placed.append(str(v))
    return ProgressionForest(tuple(labels), parent)


def _check_ted(rng):
    for _ in range(200):
        x = _random_forest(rng, list("abcd")[:int(rng.integers(1, 5))])
        y = _random_forest(rng, list("abce")[:int(rng.integers(1, 5))])
        if ted(x, y) != brute_ted(x, y):
            return False
    return True


def _chi_square_pvalue(model, rng):
    dist = exact_distribution(model)
    m = sample(model, 100000, rng)
    keys = sorted(dist)
    slot = {k: i for i, k in enumerate(keys)}
    observed = np.zeros(len(keys))
    for row in m.data:
        key = tuple(v for v, b in zip(model.nodes, row) if b)
        if key not in slot:  # a genotype the model cannot produce
            return 0.0
        observed[slot[key]] += 1
    return float(stats.chisquare(observed, np.array([dist[k] for k in keys]) * m.s).pvalue)


def _check_sampler():
    models = [random_tree(GeneratorConfig(n=n), rng=make_rng(5, 2, n)) for n in (2, 3, 4)]
    models.append(random_forest(GeneratorConfig(n=4, k=2), rng=make_rng(5, 2, 0)))
    pvalues = [_chi_square_pvalue(model, make_rng(5, 3, i)) for i, model in enumerate(models)]
    return all(p > 0.01 for p in pvalues), pvalues


def _random_tables(rng, n):
    """Tables of a random joint distribution over the 2^n genotypes."""
    codes = np.arange(2 ** n)
    patterns = ((codes[:, None] >> np.arange(n)) & 1).astype(float)
    probs = rng.dirichlet(np.full(2 ** n, 0.5))
    marginal = patterns.T @ probs
    joint = patterns.T @ (patterns * probs[:, None])
    full = np.ones((n + 1, n + 1))
    full[1:, 1:] = joint
    full[0, 1:] = full[1:, 0] = marginal
    return ProbabilityTables((ROOT, *"abcde"[:n]), np.concatenate([[1.0], marginal]), full)


def _check_filter(rng):
    for _ in range(1000):
        t = _random_tables(rng, int(rng.integers(2, 6)))
        for j in t.events:
            if filter_reattaches(t, j) != cause_inequality_filter(t, j):
                return False
    return True


def test_criterion_5_oracle_equivalences():
    a = _check_branching(make_rng(5, 0))
    b = _check_ted(make_rng(5, 1))
    c, pvals = _check_sampler()
    d = _check_filter(make_rng(5, 4))
    ok = record(5, a and b and c and d,
                f"(a) branching vs enumeration {a}; (b) TED vs exhaustive mapping {b}; "
                f"(c) sampler chi-square min p={min(pvals):.3f} {c}; (d) filter vs cause inequality {d}")
    assert ok


def test_criterion_6_dag_study():
    plan = ExperimentPlan(kind="dag", n=10, samples=(50, 100, 150, 200), lams=(0.5,),
                          replicates=100, algos=("caprese",))
    rep = run_plan(plan)
    fp = [rep.mean("fp", "caprese", 0.5, 0.0, s) for s in plan.samples]
    fn = [rep.mean("fn", "caprese", 0.5, 0.0, s) for s in plan.samples]
    last = rep.cell("caprese", 0.5, 0.0, 200)
    ratio = last.values["fn"].mean() / last.values["excess"].mean()
    corr = float(np.corrcoef(last.values["fn"], last.values["excess"])[0, 1])
    decreasing = all(a > b for a, b in zip(fp, fp[1:]))
    checks = [decreasing, fp[-1] <= 0.5, all(v > 0 for v in fn), 0.5 <= ratio <= 2, corr >= 0.5]
    ok = record(6, all(checks),
                "mean FP by s=" + "/".join(f"{v:.2f}" for v in fp) +
                f" (decreasing {decreasing}, <=0.5 at 200: {fp[-1] <= 0.5}); mean FN " +
                "/".join(f"{v:.2f}" for v in fn) +
                f"; FN/excess-edges ratio {ratio:.2f}, correlation {corr:.2f}")
    assert ok


def _ovarian_path():
    env = os.environ.get("CAPRESE_OVARIAN")
    if env:
        return Path(env)
    p = Path(__file__).parent / "fixtures" / "ovarian.csv"
    return p if p.exists() else None


def test_criterion_7_ovarian_case():
    path = _ovarian_path()
    if path is None or not path.exists():
        record(7, None, "ovarian CGH fixture not available (set CAPRESE_OVARIAN)")
        pytest.skip("ovarian fixture absent")
    m = read_matrix(path)
    paths = []
    for lam in (0.01, 0.5):
        f = caprese(m, lam)
        paths.append(f.parent.get("8p-") == "8q+" and f.parent.get("Xp-") == "8p-")
    rep = nonparametric_bootstrap(m, "caprese", 0.5, B=1000, seed=0)
    edge = rep.confidence("8q+", "8p-")
    checks = [all(paths), abs(edge - 0.62) <= 0.08, abs(rep.overall_confidence - 0.086) <= 0.02]
    ok = record(7, all(checks), f"path 8q+->8p-->Xp- at both lambdas {all(paths)}; "
                f"edge confidence {edge:.3f} (0.62+-0.08); overall {rep.overall_confidence:.3f} "
                "(0.086+-0.02)")
    assert ok
