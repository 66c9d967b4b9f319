"""Bootstrap confidence for reconstructed progression models.

Non-parametric: resample patients with replacement. Parametric: sample
fresh datasets from the reconstructed model, corrupt them with the given
false-positive and false-negative rates, and reconstruct again. Either way,
replicate i draws from ``SeedSequence([seed, i])``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from functools import partial

from .forest import ProgressionForest
from .genotype import ROOT, GenotypeMatrix, validate_probabilities
from .parallel import indexed_map
from .probability import NoiseSpec, empirical_tables
from .reconstruct import reconstruct_tables
from .synthesis import GenerativeModel, apply_errors, fit_alpha, make_rng, sample

MODES = ("nonparametric", "parametric")


@dataclass(frozen=True)
class BootstrapReport:
    mode: str
    algo: str
    lam: float | None
    B: int
    seed: int
    reference: ProgressionForest
    overall_confidence: float
    edge_confidence: dict  # (u, v) -> fraction, over every ordered pair incl. root edges
    invalid: int = 0
    invalid_replicates: tuple = ()
    eps_plus: float | None = None
    eps_minus: float | None = None
    samples: int | None = None
    labels: tuple = field(default=(), repr=False)

    def confidence(self, u, v) -> float:
        return self.edge_confidence.get((u, v), 0.0)

    def to_dict(self):
        d = {
            "mode": self.mode,
            "algo": self.algo,
            "lambda": self.lam,
            "B": self.B,
            "seed": self.seed,
            "samples": self.samples,
            "overall_confidence": self.overall_confidence,
            "invalid_replicates": list(self.invalid_replicates),
            "reference": self.reference.to_dict(),
            "edge_confidence": [
                {"from": u, "to": v, "confidence": c}
                for (u, v), c in sorted(self.edge_confidence.items(), key=_edge_key(self.labels))
            ],
        }
        if self.mode == "parametric":
            d["eps_plus"], d["eps_minus"] = self.eps_plus, self.eps_minus
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def edge_table_csv(self) -> str:
        """Square table: row = source (root first), column = target event."""
        labels = self.labels
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["from\\to", *labels[1:]])
        for u in labels:
            w.writerow([u, *("" if u == v else f"{self.confidence(u, v):.3f}" for v in labels[1:])])
        return buf.getvalue()


def _edge_key(labels):
    rank = {lab: i for i, lab in enumerate(labels)}
    return lambda item: (rank[item[0][0]], rank[item[0][1]])


def _replicate_edges(data: GenotypeMatrix, algo, lam):
    """Reconstruct one replicate. Returns (edges or None if invalid)."""
    if validate_probabilities(data):
        return None
    return reconstruct_tables(empirical_tables(data), algo, lam).edges()


def _np_replicate(i, m, seed, algo, lam):
    rng = make_rng(seed, i)
    rows = rng.integers(0, m.s, size=m.s)
    return _replicate_edges(m.take_rows(rows), algo, lam)


def _p_replicate(i, model, s, noise, seed, algo, lam):
    rng = make_rng(seed, i)
    data = sample(model, s, rng)
    data = apply_errors(data, noise.eps_plus, noise.eps_minus, rng)
    return _replicate_edges(data, algo, lam)


def _tally(results, reference, mode, algo, lam, seed, **extra):
    labels = (ROOT, *reference.nodes)
    ref_edges = reference.edges()
    counts = {}
    matches = 0
    invalid = []
    for i, edges in enumerate(results):
        if edges is None:
            invalid.append(i)
            continue
        matches += edges == ref_edges
        for e in edges:
            counts[e] = counts.get(e, 0) + 1
    B = len(results)
    conf = {}
    for u in labels:
        for v in labels[1:]:
            if u != v:
                conf[(u, v)] = counts.get((u, v), 0) / B
    return BootstrapReport(
        mode=mode, algo=algo, lam=lam if algo == "caprese" else None, B=B, seed=seed,
        reference=reference, overall_confidence=matches / B, edge_confidence=conf,
        invalid=len(invalid), invalid_replicates=tuple(invalid), labels=labels, **extra,
    )


def _check(B, algo):
    if B < 1:
        raise ValueError("need at least one bootstrap replicate")
    if algo not in ("caprese", "oncotree"):
        raise ValueError(f"unknown algorithm {algo!r}")


def nonparametric_bootstrap(m: GenotypeMatrix, algo="caprese", lam=0.5, B=1000, seed=0,
                            reference: ProgressionForest | None = None, jobs=1) -> BootstrapReport:
    """Resample the s rows of ``m`` B times and reconstruct each resample.

    ``reference`` defaults to the reconstruction from ``m`` itself. Resamples
    that fail validation count as non-matches and contribute no edges.
    """
    _check(B, algo)
    if reference is None:
        reference = reconstruct_tables(empirical_tables(m), algo, lam)
    fn = partial(_np_replicate, m=m, seed=seed, algo=algo, lam=lam)
    results = indexed_map(fn, range(B), jobs)
    return _tally(results, reference, "nonparametric", algo, lam, seed, samples=m.s)


def parametric_bootstrap(reference: ProgressionForest, s: int, noise: NoiseSpec = NoiseSpec(),
                         algo="caprese", lam=0.5, B=1000, seed=0, data: GenotypeMatrix | None = None,
                         model: GenerativeModel | None = None, jobs=1) -> BootstrapReport:
    """Sample B datasets of s rows from the reference model and reconstruct each.

    Edge probabilities come from ``model`` when given, else they are fitted
    on ``data`` as alpha(u -> v) = P(v) / P(u) along the reference edges.
    """
    _check(B, algo)
    if s < 1:
        raise ValueError("need at least one sample per replicate")
    if model is None:
        if data is None:
            raise ValueError("parametric bootstrap needs a fitted model or data to fit one")
        model = fit_alpha(reference, data)
    fn = partial(_p_replicate, model=model, s=s, noise=noise, seed=seed, algo=algo, lam=lam)
    results = indexed_map(fn, range(B), jobs)
    return _tally(results, reference, "parametric", algo, lam, seed, samples=s,
                  eps_plus=noise.eps_plus, eps_minus=noise.eps_minus)


def report_from_dict(d) -> dict:
    """Edge confidences of a serialized report as ``{(u, v): c}``."""
    return {(e["from"], e["to"]): float(e["confidence"]) for e in d["edge_confidence"]}
