"""Marginal and pairwise-joint probability tables over events plus the root."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivisionGuard
from .genotype import ROOT, GenotypeMatrix


@dataclass(frozen=True, eq=False)
class ProbabilityTables:
    """Dense tables indexed by ``labels``; index 0 is always the root.

    ``joint[i, i]`` equals ``marginal[i]`` and the root row of ``joint``
    equals ``marginal``.
    """

    labels: tuple
    marginal: np.ndarray
    joint: np.ndarray

    def __post_init__(self):
        marginal = np.array(self.marginal, dtype=float)
        joint = np.array(self.joint, dtype=float)
        n = len(self.labels)
        if self.labels[0] != ROOT or marginal.shape != (n,) or joint.shape != (n, n):
            raise ValueError("tables must be indexed with the root first")
        marginal.setflags(write=False)
        joint.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "marginal", marginal)
        object.__setattr__(self, "joint", joint)
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})

    @property
    def events(self):
        return self.labels[1:]

    def index(self, label):
        return self._index[label]

    def p(self, a):
        return float(self.marginal[self._index[a]])

    def pj(self, a, b):
        return float(self.joint[self._index[a], self._index[b]])

    @classmethod
    def from_event_tables(cls, events, marginal, joint):
        """Build tables from event-only arrays, adding the root row/column."""
        marginal = np.asarray(marginal, dtype=float)
        joint = np.asarray(joint, dtype=float)
        n = len(events)
        full_m = np.empty(n + 1)
        full_m[0] = 1.0
        full_m[1:] = marginal
        full_j = np.empty((n + 1, n + 1))
        full_j[1:, 1:] = joint
        full_j[0, :] = full_m
        full_j[:, 0] = full_m
        return cls((ROOT,) + tuple(events), full_m, full_j)


@dataclass(frozen=True)
class NoiseSpec:
    eps_plus: float = 0.0
    eps_minus: float = 0.0

    def __post_init__(self):
        for name in ("eps_plus", "eps_minus"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise ValueError(f"{name} must lie in [0, 1), got {v}")
        if self.eps_plus + self.eps_minus >= 1.0:
            raise ValueError("eps_plus + eps_minus must be < 1")

    @classmethod
    def uniform(cls, nu):
        """Uniform noise: each entry is re-drawn as a fair coin with probability nu."""
        if not 0.0 <= nu < 1.0:
            raise ValueError(f"nu must lie in [0, 1), got {nu}")
        return cls(nu / 2.0, nu / 2.0)


def empirical_tables(m: GenotypeMatrix) -> ProbabilityTables:
    x = m.data.astype(np.int64)
    counts = x.T @ x
    return ProbabilityTables.from_event_tables(m.events, np.diag(counts) / m.s, counts / m.s)


def conditional(t: ProbabilityTables, b, a, negated=False) -> float:
    """P(b | a), or P(b | not a) when ``negated``."""
    pa = t.p(a)
    pab = t.pj(a, b)
    if negated:
        if pa >= 1.0:
            raise DivisionGuard(f"P({a}) = 1: cannot condition on its absence")
        return (t.p(b) - pab) / (1.0 - pa)
    if pa <= 0.0:
        raise DivisionGuard(f"P({a}) = 0: cannot condition on it")
    return pab / pa


def corrupt_tables(t: ProbabilityTables, noise: NoiseSpec) -> ProbabilityTables:
    """Tables observed after independent false positives/negatives on every event.

    The root is a modeling device and is not corrupted.
    """
    ep, em = noise.eps_plus, noise.eps_minus
    p = t.marginal[1:]
    pij = t.joint[1:, 1:]
    p_star = p * (1 - em) + (1 - p) * ep
    union = p[:, None] + p[None, :] - pij
    pij_star = pij * (1 - em) ** 2 + (union - pij) * (1 - em) * ep + (1 - union) * ep ** 2
    np.fill_diagonal(pij_star, p_star)
    return ProbabilityTables.from_event_tables(t.events, p_star, pij_star)
