"""Progression-forest inference: CAPRESE and the oncotree baseline."""

from __future__ import annotations

import numpy as np

from .branching import max_branching
from .errors import ValidationError
from .estimators import ScoreMatrix, alpha_matrix, beta_matrix, weight_matrix
from .forest import ProgressionForest
from .genotype import ROOT, GenotypeMatrix, validate_probabilities
from .probability import ProbabilityTables, empirical_tables

ALGORITHMS = ("caprese", "oncotree")


def require_valid(m: GenotypeMatrix):
    violations = validate_probabilities(m)
    if violations:
        raise ValidationError(violations)


def caprese(m: GenotypeMatrix, lam: float = 0.5) -> ProgressionForest:
    """Reconstruct a progression forest from a validated genotype matrix."""
    require_valid(m)
    return caprese_from_tables(empirical_tables(m), lam)


def filter_reattaches(t: ProbabilityTables, j) -> bool:
    """True when no more frequent event beats the root's correlation with ``j``.

    For every x with P(x) > P(j) the filter compares
    1/(1+P(j)) against P(x)/(P(x)+P(j)) * P(x,j)/(P(x)P(j)).
    """
    jdx = t.index(j)
    p = t.marginal
    pj = p[jdx]
    root_score = 1.0 / (1.0 + pj)
    for x in range(1, len(t.labels)):
        if x == jdx or not p[x] > pj:
            continue
        if not root_score > t.joint[x, jdx] / ((p[x] + pj) * pj):
            return False
    return True


def candidate_parents(t: ProbabilityTables, lam: float, restrict_frequency: bool = True):
    """Map each event to the events allowed as its parent.

    A candidate i for j has m(i->j) > 0 and m(i->j) > m(j->i); with
    ``restrict_frequency`` it must also be strictly more frequent than j.
    """
    m = (1.0 - lam) * alpha_matrix(t) + lam * beta_matrix(t)
    p = t.marginal[1:]
    events = t.events
    out = {}
    for j, ev in enumerate(events):
        cands = []
        for i in range(len(events)):
            if i == j or not (m[i, j] > 0 and m[i, j] > m[j, i]):
                continue
            if restrict_frequency and not p[i] > p[j]:
                continue
            cands.append(events[i])
        out[ev] = cands
    return out


def caprese_from_tables(t: ProbabilityTables, lam: float = 0.5) -> ProgressionForest:
    """Run the reconstruction on probability tables directly.

    Steps: score every ordered pair with m = (1-lam) alpha + lam beta; give
    each event its best-scoring admissible parent (ties broken by larger
    beta, then smallest label); then send to the root every event whose
    upstream events all lose against the root in the filter.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    events = t.events
    pos = {e: i for i, e in enumerate(events)}
    m = (1.0 - lam) * alpha_matrix(t) + lam * beta_matrix(t)
    b = beta_matrix(t)
    p = t.marginal[1:]
    notes = []

    for i in range(len(events)):
        for j in range(i + 1, len(events)):
            if p[i] == p[j] and m[i, j] > 0 and m[j, i] > 0:
                notes.append(f"{events[i]} and {events[j]} are equally frequent; "
                             "neither direction is admitted")

    parent, scores = {}, {}
    for ev, cands in candidate_parents(t, lam).items():
        j = pos[ev]
        if not cands:
            parent[ev] = ROOT
            continue
        top = max(m[pos[c], j] for c in cands)
        tied = [c for c in cands if m[pos[c], j] == top]
        if len(tied) > 1:
            best_b = max(b[pos[c], j] for c in tied)
            tied = sorted(c for c in tied if b[pos[c], j] == best_b)
            notes.append(f"tie for parent of {ev} among {', '.join(tied)}; chose {tied[0]}")
        parent[ev] = tied[0]
        scores[ev] = float(top)

    for ev in events:
        if parent[ev] != ROOT and filter_reattaches(t, ev):
            parent[ev] = ROOT
            scores.pop(ev, None)
    return ProgressionForest(events, parent, scores, tuple(notes))


def oncotree(m: GenotypeMatrix) -> ProgressionForest:
    """Maximum-weight branching over the events plus the root."""
    require_valid(m)
    return oncotree_from_tables(empirical_tables(m))


def oncotree_from_tables(t: ProbabilityTables, log=np.log) -> ProgressionForest:
    w = ScoreMatrix("w", t.labels, weight_matrix(t, log=log))
    parent = max_branching(w, ROOT)
    scores = {v: w[p, v] for v, p in parent.items()}
    return ProgressionForest(t.events, parent, scores)


def reconstruct(m: GenotypeMatrix, algo: str, lam: float = 0.5) -> ProgressionForest:
    if algo == "caprese":
        return caprese(m, lam)
    if algo == "oncotree":
        return oncotree(m)
    raise ValueError(f"unknown algorithm {algo!r}")


def reconstruct_tables(t: ProbabilityTables, algo: str, lam: float = 0.5) -> ProgressionForest:
    if algo == "caprese":
        return caprese_from_tables(t, lam)
    if algo == "oncotree":
        return oncotree_from_tables(t)
    raise ValueError(f"unknown algorithm {algo!r}")
