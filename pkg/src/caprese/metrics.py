"""Structural distances between a true and a reconstructed progression model."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import LabelMismatch
from .genotype import ROOT


def _ordered(forest):
    """Postorder node labels and leftmost-leaf indices of the tree rooted at
    the root, children sorted by label."""
    children = {}
    for v, p in forest.parent.items():
        children.setdefault(p, []).append(v)
    for ch in children.values():
        ch.sort()
    labels, leftmost = [], []

    def walk(v):
        first = None
        for c in children.get(v, ()):
            idx = walk(c)
            if first is None:
                first = idx
        labels.append(v)
        me = len(labels) - 1
        leftmost.append(me if first is None else first)
        return leftmost[me] if first is not None else me

    walk(ROOT)
    return labels, leftmost


def _keyroots(leftmost):
    seen = {}
    for i, l in enumerate(leftmost):
        seen[l] = i  # the highest postorder index with this leftmost leaf
    return sorted(seen.values())


def ted(t1, t2) -> int:
    """Unit-cost Zhang-Shasha edit distance after sorting children by label."""
    a, la = _ordered(t1)
    b, lb = _ordered(t2)
    td = [[0] * len(b) for _ in a]
    for i in _keyroots(la):
        for j in _keyroots(lb):
            _forest_dist(i, j, a, la, b, lb, td)
    return td[len(a) - 1][len(b) - 1]


def _forest_dist(i, j, a, la, b, lb, td):
    li, lj = la[i], lb[j]
    rows, cols = i - li + 2, j - lj + 2
    fd = [[0] * cols for _ in range(rows)]
    for x in range(1, rows):
        fd[x][0] = fd[x - 1][0] + 1
    for y in range(1, cols):
        fd[0][y] = fd[0][y - 1] + 1
    for x in range(1, rows):
        ai = li + x - 1
        for y in range(1, cols):
            bj = lj + y - 1
            if la[ai] == li and lb[bj] == lj:
                fd[x][y] = min(fd[x - 1][y] + 1, fd[x][y - 1] + 1,
                               fd[x - 1][y - 1] + (a[ai] != b[bj]))
                td[ai][bj] = fd[x][y]
            else:
                fd[x][y] = min(fd[x - 1][y] + 1, fd[x][y - 1] + 1,
                               fd[la[ai] - li][lb[bj] - lj] + td[ai][bj])


def hamming(t1, t2) -> int:
    """Number of differing cells between the directed adjacency matrices."""
    return len(t1.edges() ^ t2.edges())


@dataclass(frozen=True)
class EdgeConfusion:
    true_positive: int
    false_positive: int
    false_negative: int


def edge_confusion(truth, rec, include_root: bool = False) -> EdgeConfusion:
    """Directed-edge agreement between a true model and a reconstruction.

    ``truth`` may be a generative model (possibly a DAG) or a forest. Edges
    leaving the root are ignored unless ``include_root``.
    """
    if set(truth.nodes) != set(rec.nodes):
        raise LabelMismatch("truth and reconstruction have different events")
    keep = (lambda e: True) if include_root else (lambda e: e[0] != ROOT)
    t_edges = {e for e in truth.edges() if keep(e)}
    r_edges = {e for e in rec.edges() if keep(e)}
    tp = len(t_edges & r_edges)
    return EdgeConfusion(tp, len(r_edges) - tp, len(t_edges) - tp)
