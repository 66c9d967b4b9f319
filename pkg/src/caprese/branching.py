"""Maximum-weight spanning arborescence (Chu-Liu/Edmonds) with a fixed root."""

from __future__ import annotations

import math

import numpy as np

from .errors import Unreachable


def _label_rank(labels, root):
    # Ties prefer the root, then the lexicographically smallest label.
    order = sorted((lab for lab in labels if lab != root))
    rank = {lab: i + 1 for i, lab in enumerate(order)}
    rank[root] = 0
    return rank


def _edges_from(weights, labels):
    """Finite (u, v, w) triples from a ScoreMatrix-like object or a dict."""
    if isinstance(weights, dict):
        return [(u, v, float(w)) for (u, v), w in weights.items() if math.isfinite(w)]
    values = np.asarray(weights.values)
    out = []
    for i, u in enumerate(labels):
        for j, v in enumerate(labels):
            w = values[i, j]
            if i != j and np.isfinite(w):
                out.append((u, v, float(w)))
    return out


def max_branching(weights, root, labels=None) -> dict:
    """Return ``{child: parent}`` for the maximum total-weight arborescence.

    ``weights`` is either a mapping ``{(u, v): w}`` or a score matrix with
    ``labels`` and ``values`` (row = tail). Non-finite weights mark unusable
    edges and are never selected. Every node other than ``root`` receives a
    parent; ``Unreachable`` is raised when that is impossible.
    """
    if labels is None:
        if isinstance(weights, dict):
            labels = sorted({x for e in weights for x in e} | {root}, key=str)
        else:
            labels = list(weights.labels)
    labels = list(labels)
    if root not in labels:
        raise ValueError(f"root {root!r} is not among the nodes")
    rank = _label_rank(labels, root)
    idx = {lab: i for i, lab in enumerate(labels)}
    edges = []
    for u, v, w in _edges_from(weights, labels):
        if v == root or u == v:
            continue
        edges.append((idx[u], idx[v], w, -rank[u], None))
    # Ties between contracted edges go to the earliest one, so fix the order.
    edges.sort(key=lambda e: (-e[3], rank[labels[e[1]]]))
    chosen = _edmonds(list(range(len(labels))), edges, idx[root])
    return {labels[e[1]]: labels[e[0]] for e in chosen}


def _edmonds(nodes, edges, root):
    # Edges are (tail, head, weight, tie, source) where ``source`` is the
    # edge one level up that a contracted edge stands for. Returns edges of
    # this level.
    best = {}
    for e in edges:
        u, v, w, tie, _ = e
        if v == root or u == v:
            continue
        cur = best.get(v)
        if cur is None or (w, tie) > (cur[2], cur[3]):
            best[v] = e
    missing = [v for v in nodes if v != root and v not in best]
    if missing:
        raise Unreachable(f"{len(missing)} node(s) have no usable incoming edge")

    cycle = _find_cycle(nodes, best, root)
    if cycle is None:
        return [best[v] for v in nodes if v != root]

    in_cycle = set(cycle)
    c = max(nodes) + 1
    contracted = []
    for e in edges:
        u, v, w, tie, _ = e
        if u in in_cycle and v in in_cycle:
            continue
        if v in in_cycle:
            contracted.append((u, c, w - best[v][2], tie, e))
        elif u in in_cycle:
            contracted.append((c, v, w, tie, e))
        else:
            contracted.append((u, v, w, tie, e))
    sub_nodes = [x for x in nodes if x not in in_cycle] + [c]
    sub = _edmonds(sub_nodes, contracted, root)

    result = []
    entry_head = None
    for sub_edge in sub:
        e = sub_edge[4]
        if e[1] in in_cycle:
            entry_head = e[1]
        result.append(e)
    for v in cycle:
        if v != entry_head:
            result.append(best[v])
    return result


def _find_cycle(nodes, best, root):
    color = {}
    for start in nodes:
        if start == root or start in color:
            continue
        path = []
        v = start
        while v != root and v not in color:
            color[v] = start
            path.append(v)
            v = best[v][0]
        if v != root and color.get(v) == start:
            return path[path.index(v):]
    return None


def total_weight(parents: dict, weights) -> float:
    if isinstance(weights, dict):
        return sum(weights[(p, c)] for c, p in parents.items())
    return sum(weights[p, c] for c, p in parents.items())
