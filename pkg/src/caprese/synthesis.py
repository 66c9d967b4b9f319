"""Random generative models (trees, forests, conjunctive DAGs), sampling,
exact tree-induced distributions and uniform noise.

All randomness goes through ``numpy.random.Generator`` on PCG64. Streams
for replicate ``i`` of master seed ``S`` come from ``SeedSequence([S, i])``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, FitError, SizeError
from .forest import ProgressionForest
from .genotype import ROOT, GenotypeMatrix
from .probability import ProbabilityTables

MAX_EXACT_EVENTS = 20


def make_rng(*seed_words) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(w) for w in seed_words])))


def _as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return make_rng(seed)


@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    k: int = 1
    p_min: float = 0.05
    p_max: float = 0.95
    seed: int = 0
    max_depth: int | None = None  # default: max(2, ceil(log2 n)) per tree
    max_parents: int = 3  # dag only

    def __post_init__(self):
        if not 0.0 < self.p_min <= self.p_max < 1.0:
            raise ConfigError("need 0 < p_min <= p_max < 1")
        if self.n < 2:
            raise ConfigError("need at least two events")
        if self.k < 1:
            raise ConfigError("need at least one tree")
        if self.max_parents < 1:
            raise ConfigError("max_parents must be >= 1")


@dataclass(frozen=True, eq=False)
class GenerativeModel:
    """Topology plus per-node success probabilities.

    ``parents[v]`` is a tuple of parent labels (``(ROOT,)`` for top-level
    events); trees and forests have exactly one parent per node. ``alpha[v]``
    is the probability that v fires once all its parents have fired.
    """

    kind: str
    nodes: tuple
    parents: dict
    alpha: dict
    seed: int | None = None
    order: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.kind not in ("tree", "forest", "dag"):
            raise ConfigError(f"unknown model kind {self.kind!r}")
        parents = {v: tuple(ps) for v, ps in self.parents.items()}
        if set(parents) != set(self.nodes) or set(self.alpha) != set(self.nodes):
            raise ConfigError("parents and alpha must cover every node")
        if self.kind != "dag" and any(len(ps) != 1 for ps in parents.values()):
            raise ConfigError("tree and forest models need exactly one parent per node")
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "parents", parents)
        object.__setattr__(self, "alpha", {v: float(a) for v, a in self.alpha.items()})
        object.__setattr__(self, "order", _topological(self.nodes, parents))

    @property
    def n(self):
        return len(self.nodes)

    def edges(self) -> frozenset:
        return frozenset((p, v) for v, ps in self.parents.items() for p in ps)

    def edge_alpha(self) -> dict:
        return {(p, v): self.alpha[v] for v, ps in self.parents.items() for p in ps}

    def is_tree(self):
        return all(len(ps) == 1 for ps in self.parents.values())

    def to_forest(self) -> ProgressionForest:
        if not self.is_tree():
            raise ConfigError("a DAG with conjunctive parents is not a forest")
        return ProgressionForest(self.nodes, {v: ps[0] for v, ps in self.parents.items()},
                                 dict(self.alpha))

    def to_dict(self):
        return {
            "kind": self.kind,
            "seed": self.seed,
            "nodes": list(self.nodes),
            "edges": [{"from": p, "to": v, "alpha": self.alpha[v]}
                      for v in self.nodes for p in self.parents[v]],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d):
        parents, alpha = {}, {}
        for e in d["edges"]:
            parents.setdefault(e["to"], []).append(e["from"])
            alpha[e["to"]] = e["alpha"]
        return cls(d.get("kind", "tree"), tuple(d["nodes"]), parents, alpha, d.get("seed"))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _topological(nodes, parents):
    order, placed = [], {ROOT}
    pending = list(nodes)
    while pending:
        ready = [v for v in pending if all(p in placed for p in parents[v])]
        if not ready:
            raise ConfigError("model graph has a cycle or a dangling parent")
        for v in ready:
            order.append(v)
            placed.add(v)
        pending = [v for v in pending if v not in placed]
    return tuple(order)


def default_depth(n):
    return max(2, math.ceil(math.log2(n)))


def event_labels(n):
    width = len(str(n))
    return tuple(f"e{i:0{width}d}" for i in range(1, n + 1))


def _grow_tree(labels, depth, rng, p_min, p_max):
    """One tree: a root at level 1 and every other event on a level in 2..depth."""
    labels = list(labels)
    if len(labels) - 1 < depth - 1:
        raise ConfigError(f"{len(labels)} events cannot fill {depth} levels")
    perm = rng.permutation(len(labels))
    root, rest = labels[perm[0]], [labels[i] for i in perm[1:]]
    upper = depth - 1  # number of levels below the root
    levels = np.empty(len(rest), dtype=int)
    levels[:upper] = np.arange(2, depth + 1)
    levels[upper:] = rng.integers(2, depth + 1, size=len(rest) - upper)
    by_level = {1: [root]}
    for ev, lv in zip(rest, levels):
        by_level.setdefault(int(lv), []).append(ev)
    parents = {root: (ROOT,)}
    for lv in range(2, depth + 1):
        above = by_level[lv - 1]
        for ev in by_level[lv]:
            parents[ev] = (above[rng.integers(len(above))],)
    alpha = {ev: float(rng.uniform(p_min, p_max)) for ev in [root] + rest}
    return parents, alpha


def random_tree(cfg: GeneratorConfig, rng=None) -> GenerativeModel:
    rng = _as_rng(cfg.seed if rng is None else rng)
    labels = event_labels(cfg.n)
    depth = cfg.max_depth or default_depth(cfg.n)
    parents, alpha = _grow_tree(labels, depth, rng, cfg.p_min, cfg.p_max)
    return GenerativeModel("tree", labels, parents, alpha, cfg.seed)


def random_forest(cfg: GeneratorConfig, rng=None) -> GenerativeModel:
    """k trees of at least two events each, joined at the root.

    Group sizes are a uniformly random composition of n into k parts of
    size >= 2; events are shuffled before being cut into groups.
    """
    if cfg.k == 1:
        return random_tree(cfg, rng)
    if cfg.n < 2 * cfg.k:
        raise ConfigError(f"{cfg.k} trees of >= 2 events need n >= {2 * cfg.k}")
    rng = _as_rng(cfg.seed if rng is None else rng)
    labels = event_labels(cfg.n)
    spare = cfg.n - 2 * cfg.k
    # stars and bars: choose k-1 bar positions among spare + k - 1 slots
    bars = np.sort(rng.choice(spare + cfg.k - 1, size=cfg.k - 1, replace=False))
    cuts = np.diff(np.concatenate(([-1], bars, [spare + cfg.k - 1]))) - 1
    sizes = cuts + 2
    order = rng.permutation(cfg.n)
    parents, alpha, start = {}, {}, 0
    for size in sizes:
        group = [labels[i] for i in order[start:start + size]]
        start += size
        depth = cfg.max_depth or default_depth(len(group))
        depth = min(depth, len(group))
        p, a = _grow_tree(group, depth, rng, cfg.p_min, cfg.p_max)
        parents.update(p)
        alpha.update(a)
    return GenerativeModel("forest", labels, parents, alpha, cfg.seed)


def random_dag(cfg: GeneratorConfig, rng=None) -> GenerativeModel:
    """Conjunctive DAG: the first event of a random order hangs off the root,
    every later event gets 1..max_parents parents among its predecessors."""
    rng = _as_rng(cfg.seed if rng is None else rng)
    labels = event_labels(cfg.n)
    order = [labels[i] for i in rng.permutation(cfg.n)]
    parents = {order[0]: (ROOT,)}
    for i, ev in enumerate(order[1:], start=1):
        count = int(rng.integers(1, min(cfg.max_parents, i) + 1))
        chosen = rng.choice(i, size=count, replace=False)
        parents[ev] = tuple(sorted(order[c] for c in chosen))
    alpha = {ev: float(rng.uniform(cfg.p_min, cfg.p_max)) for ev in order}
    return GenerativeModel("dag", labels, parents, alpha, cfg.seed)


def sample(model: GenerativeModel, s: int, seed=0) -> GenotypeMatrix:
    """Draw s genotypes top-down: a node fires with its alpha once all its
    parents fired."""
    if s < 1:
        raise ValueError("need at least one sample")
    rng = _as_rng(seed)
    col = {v: i for i, v in enumerate(model.nodes)}
    x = np.zeros((s, model.n), dtype=bool)
    u = rng.random((s, model.n))
    for v in model.order:
        ready = np.ones(s, dtype=bool)
        for p in model.parents[v]:
            if p != ROOT:
                ready &= x[:, col[p]]
        x[:, col[v]] = ready & (u[:, col[v]] < model.alpha[v])
    return GenotypeMatrix(model.nodes, x.astype(np.uint8))


def exact_distribution(model: GenerativeModel) -> dict:
    """Genotype -> probability over all 2^n subsets (as tuples of labels).

    Only subsets with positive probability are listed; every other subset
    has probability zero.
    """
    patterns, probs = _exact_arrays(model)
    keep = probs > 0
    out = {}
    for bits, pr in zip(patterns[keep], probs[keep]):
        out[tuple(v for v, b in zip(model.nodes, bits) if b)] = float(pr)
    return out


def _exact_arrays(model):
    if not model.is_tree():
        raise ConfigError("exact distributions are available for trees and forests only")
    n = model.n
    if n > MAX_EXACT_EVENTS:
        raise SizeError(f"exact distribution limited to {MAX_EXACT_EVENTS} events, got {n}")
    codes = np.arange(2 ** n, dtype=np.int64)
    patterns = ((codes[:, None] >> np.arange(n)) & 1).astype(bool)
    probs = np.ones(len(codes))
    col = {v: i for i, v in enumerate(model.nodes)}
    for v, (p,) in model.parents.items():
        a = model.alpha[v]
        here = patterns[:, col[v]]
        up = np.ones(len(codes), dtype=bool) if p == ROOT else patterns[:, col[p]]
        # present: needs the parent and succeeds; absent: fails if parent present
        probs *= np.where(here, np.where(up, a, 0.0), np.where(up, 1.0 - a, 1.0))
    return patterns, probs


def exact_tables(model: GenerativeModel) -> ProbabilityTables:
    patterns, probs = _exact_arrays(model)
    keep = probs > 0
    x = patterns[keep].astype(float)
    w = probs[keep]
    joint = x.T @ (x * w[:, None])
    return ProbabilityTables.from_event_tables(model.nodes, np.diag(joint).copy(), joint)


def path_tables(model: GenerativeModel) -> ProbabilityTables:
    """Closed-form tables for trees: marginals are root-path products and
    P(u, v) = P(u) P(v) / P(lca(u, v))."""
    if not model.is_tree():
        raise ConfigError("closed-form tables need a tree or forest")
    parent = {v: ps[0] for v, ps in model.parents.items()}
    marg = {ROOT: 1.0}
    for v in model.order:
        marg[v] = marg[parent[v]] * model.alpha[v]

    def ancestors(v):
        chain = [v]
        while v != ROOT:
            v = parent[v]
            chain.append(v)
        return chain

    chains = {v: ancestors(v) for v in model.nodes}
    n = model.n
    joint = np.empty((n, n))
    for i, u in enumerate(model.nodes):
        up = set(chains[u])
        for j, v in enumerate(model.nodes):
            lca = next(a for a in chains[v] if a in up)
            joint[i, j] = marg[u] * marg[v] / marg[lca]
    return ProbabilityTables.from_event_tables(model.nodes, [marg[v] for v in model.nodes], joint)


def apply_noise(m: GenotypeMatrix, nu: float, seed=0) -> GenotypeMatrix:
    """With probability nu, replace each entry by a fair coin flip."""
    if not 0.0 <= nu <= 1.0:
        raise ValueError(f"nu must lie in [0, 1], got {nu}")
    if nu == 0:
        return m
    rng = _as_rng(seed)
    hit = rng.random(m.data.shape) < nu
    coin = rng.random(m.data.shape) < 0.5
    data = np.where(hit, coin, m.data.astype(bool))
    return GenotypeMatrix(m.events, data.astype(np.uint8))


def apply_errors(m: GenotypeMatrix, eps_plus: float, eps_minus: float, seed=0) -> GenotypeMatrix:
    """Flip 0 -> 1 with probability eps_plus and 1 -> 0 with probability eps_minus."""
    if eps_plus == 0 and eps_minus == 0:
        return m
    rng = _as_rng(seed)
    u = rng.random(m.data.shape)
    x = m.data.astype(bool)
    data = np.where(x, u >= eps_minus, u < eps_plus)
    return GenotypeMatrix(m.events, data.astype(np.uint8))


def fit_alpha(forest: ProgressionForest, m: GenotypeMatrix) -> GenerativeModel:
    """Tree model with alpha(u -> v) = P(v) / P(u) estimated from ``m``."""
    freq = dict(zip(m.events, m.data.mean(axis=0)))
    freq[ROOT] = 1.0
    alpha = {}
    for v, p in forest.parent.items():
        if freq[p] == 0:
            raise FitError(f"parent {p} of {v} never occurs")
        a = freq[v] / freq[p]
        if not 0.0 < a <= 1.0:
            raise FitError(f"fitted alpha({p}->{v}) = {a:.4g} lies outside (0, 1]")
        alpha[v] = float(a)
    kind = "tree" if len(forest.roots()) == 1 else "forest"
    return GenerativeModel(kind, forest.nodes, {v: (p,) for v, p in forest.parent.items()}, alpha)
