"""Rooted progression forests and their JSON / Graphviz DOT forms."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

from .errors import ParseError
from .genotype import ROOT


@dataclass(frozen=True, eq=False)
class ProgressionForest:
    """A tree over ``nodes`` plus the synthetic root.

    ``parent`` maps every event to its parent (``ROOT`` for independent
    progressions). ``scores`` optionally annotates the edge into each node.
    Equality compares structure only.
    """

    nodes: tuple
    parent: dict
    scores: dict = field(default_factory=dict)
    warnings: tuple = ()

    def __post_init__(self):
        nodes = tuple(self.nodes)
        parent = dict(self.parent)
        if set(parent) != set(nodes) or len(set(nodes)) != len(nodes):
            raise ValueError("every node needs exactly one parent entry")
        if ROOT in parent:
            raise ValueError("the root has no parent")
        for v, p in parent.items():
            if p != ROOT and p not in parent:
                raise ValueError(f"parent {p!r} of {v!r} is not a node")
        for v in nodes:
            seen = set()
            while v != ROOT:
                if v in seen:
                    raise ValueError("progression forests cannot contain cycles")
                seen.add(v)
                v = parent[v]
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "scores", dict(self.scores))
        object.__setattr__(self, "warnings", tuple(self.warnings))

    def edges(self) -> frozenset:
        return frozenset((p, v) for v, p in self.parent.items())

    def children(self, node) -> list:
        return sorted(v for v, p in self.parent.items() if p == node)

    def roots(self) -> list:
        """Events attached directly to the root (the independent progressions)."""
        return self.children(ROOT)

    def depth(self, node) -> int:
        d = 0
        while node != ROOT:
            node = self.parent[node]
            d += 1
        return d

    def __eq__(self, other):
        if not isinstance(other, ProgressionForest):
            return NotImplemented
        return set(self.nodes) == set(other.nodes) and self.parent == other.parent

    def __hash__(self):
        return hash(self.edges())

    def __repr__(self):
        edges = ", ".join(f"{p}->{v}" for p, v in sorted(self.edges()))
        return f"ProgressionForest({edges})"

    # -- serialization ----------------------------------------------------

    def to_dict(self):
        edges = []
        for v in self.nodes:
            score = self.scores.get(v)
            edges.append({"from": self.parent[v], "to": v, "score": _json_score(score)})
        return {"nodes": [ROOT, *self.nodes], "edges": edges}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d):
        nodes = [x for x in d["nodes"] if x != ROOT]
        parent, scores = {}, {}
        for e in d["edges"]:
            parent[e["to"]] = e["from"]
            if e.get("score") is not None:
                scores[e["to"]] = _parse_score(e["score"])
        return cls(tuple(nodes), parent, scores)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_dot(self) -> str:
        lines = ["digraph progression {", f"  {_q(ROOT)} [shape=diamond];"]
        lines += [f"  {_q(v)};" for v in self.nodes]
        for v in self.nodes:
            line = f"  {_q(self.parent[v])} -> {_q(v)};"
            score = self.scores.get(v)
            if score is not None:
                line += f" // score={_json_score(score)}"
            lines.append(line)
        lines.append("}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dot(cls, text):
        nodes, parent, scores = [], {}, {}
        for raw in text.splitlines():
            m = _DOT_EDGE.match(raw)
            if m:
                u, v = _unq(m.group(1)), _unq(m.group(2))
                parent[v] = u
                if m.group(3) is not None:
                    scores[v] = _parse_score(m.group(3))
                continue
            m = _DOT_NODE.match(raw)
            if m and _unq(m.group(1)) != ROOT:
                nodes.append(_unq(m.group(1)))
        if set(nodes) != set(parent):
            raise ParseError("DOT node list and edge list disagree")
        return cls(tuple(nodes), parent, scores)


_DOT_STR = r'"((?:[^"\\]|\\.)*)"'
_DOT_EDGE = re.compile(rf'^\s*{_DOT_STR}\s*->\s*{_DOT_STR}\s*;\s*(?://\s*score=(\S+))?\s*$')
_DOT_NODE = re.compile(rf'^\s*{_DOT_STR}\s*(?:\[[^\]]*\])?\s*;\s*$')


def _q(label):
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _unq(s):
    return re.sub(r"\\(.)", r"\1", s)


def _json_score(score):
    if score is None:
        return None
    if math.isinf(score):
        return "-inf" if score < 0 else "inf"
    return float(score)


def _parse_score(x):
    # JSON carries +-inf as strings; float() accepts both spellings.
    return float(x)


def star(events) -> ProgressionForest:
    return ProgressionForest(tuple(events), {e: ROOT for e in events})
