"""Pairwise scores: probability-raising (alpha), correlation (beta), their
shrinkage-like blend (m) and the oncotree edge weight (w)."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import RootNotScorable
from .genotype import ROOT
from .probability import ProbabilityTables

KINDS = ("alpha", "beta", "m", "w")


def _check_pair(a, b):
    if a == ROOT or b == ROOT:
        raise RootNotScorable("probability raising of the root event is not defined")
    if a == b:
        raise ValueError("an event is not scored against itself")


def _dependence(pa, pb, pab):
    return pab - pa * pb


def _ratio(num, den):
    # 0/0 means no evidence either way.
    return 0.0 if den == 0 else num / den


def _alpha(pa, pb, pab):
    # (P(b|a) - P(b|~a)) / (P(b|a) + P(b|~a)), multiplied through by
    # P(a)(1 - P(a)) so that it shares its numerator with beta.
    d = _dependence(pa, pb, pab)
    return min(1.0, max(-1.0, _ratio(d, pab * (1.0 - 2.0 * pa) + pa * pb)))


def _beta(pa, pb, pab):
    return _ratio(_dependence(pa, pb, pab), pab + pa * pb)


def alpha(t: ProbabilityTables, a, b) -> float:
    _check_pair(a, b)
    return _alpha(t.p(a), t.p(b), t.pj(a, b))


def beta(t: ProbabilityTables, a, b) -> float:
    _check_pair(a, b)
    return _beta(t.p(a), t.p(b), t.pj(a, b))


def shrinkage_score(t: ProbabilityTables, a, b, lam) -> float:
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    return (1.0 - lam) * alpha(t, a, b) + lam * beta(t, a, b)


def oncotree_weight(t: ProbabilityTables, a, b) -> float:
    """log[P(a)/(P(a)+P(b)) * P(a,b)/(P(a)P(b))]; -inf when a and b never co-occur."""
    if b == ROOT:
        raise ValueError("edges into the root are not weighted")
    pa, pb, pab = t.p(a), t.p(b), t.pj(a, b)
    if a == ROOT:
        return math.log(1.0 / (1.0 + pb))
    if pab <= 0.0:
        return -math.inf
    return math.log(pab / ((pa + pb) * pb))


def correlation_score(pa, pb, pab):
    """exp(w): the quantity compared by the independent-progressions filter."""
    return pab / ((pa + pb) * pb)


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    """values[i, j] scores the edge labels[i] -> labels[j].

    The diagonal is NaN. For kind ``w`` the labels start with the root, the
    root column is NaN and unusable edges (no co-occurrence) are -inf; use
    ``usable`` rather than comparing against the sentinel.
    """

    kind: str
    labels: tuple
    values: np.ndarray
    lam: float | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def usable(self):
        return np.isfinite(self.values)

    def __getitem__(self, pair):
        a, b = pair
        return float(self.values[self.labels.index(a), self.labels.index(b)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("," + ",".join(self.labels) + "\n")
        for lab, row in zip(self.labels, self.values):
            cells = ["" if math.isnan(v) else repr(float(v)) for v in row]
            buf.write(lab + "," + ",".join(cells) + "\n")
        return buf.getvalue()


def pair_arrays(t: ProbabilityTables, include_root=False):
    lo = 0 if include_root else 1
    p = t.marginal[lo:]
    return p[:, None], p[None, :], t.joint[lo:, lo:]


def alpha_matrix(t):
    pa, pb, pab = pair_arrays(t)
    d = pab - pa * pb
    den = pab * (1.0 - 2.0 * pa) + pa * pb
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den == 0, 0.0, d / np.where(den == 0, 1.0, den))
    out = np.clip(out, -1.0, 1.0)
    np.fill_diagonal(out, np.nan)
    return out


def beta_matrix(t):
    pa, pb, pab = pair_arrays(t)
    d = pab - pa * pb
    den = pab + pa * pb
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den == 0, 0.0, d / np.where(den == 0, 1.0, den))
    np.fill_diagonal(out, np.nan)
    return out


def weight_matrix(t, log=np.log):
    pa, pb, pab = pair_arrays(t, include_root=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = pab / ((pa + pb) * pb)
        out = np.where(pab > 0, log(np.where(pab > 0, ratio, 1.0)), -np.inf)
    # Root edges in closed form: P(root, j) = P(j) and P(root) = 1 give
    # 1/(1+P(j)), finite even for an event that never occurs.
    out[0, 1:] = log(1.0 / (1.0 + t.marginal[1:]))
    np.fill_diagonal(out, np.nan)
    out[:, 0] = np.nan
    return out


def score_all(t: ProbabilityTables, kind: str, lam: float | None = None) -> ScoreMatrix:
    if kind == "alpha":
        return ScoreMatrix(kind, t.events, alpha_matrix(t))
    if kind == "beta":
        return ScoreMatrix(kind, t.events, beta_matrix(t))
    if kind == "m":
        if lam is None or not 0.0 <= lam <= 1.0:
            raise ValueError(f"kind 'm' needs lambda in [0, 1], got {lam}")
        return ScoreMatrix(kind, t.events, (1.0 - lam) * alpha_matrix(t) + lam * beta_matrix(t), lam)
    if kind == "w":
        return ScoreMatrix(kind, t.labels, weight_matrix(t))
    raise ValueError(f"unknown score kind {kind!r}")
