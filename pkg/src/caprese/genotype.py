"""Binary genotype matrices: ingestion, validation and column merging."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .errors import DuplicateEvent, ParseError, ShapeError

# Synthetic event present in every sample; it roots every progression forest.
ROOT = "<root>"

_DELIMITERS = {"csv": ",", "tsv": "\t"}


@dataclass(frozen=True, eq=False)
class GenotypeMatrix:
    """An s x n 0/1 matrix whose columns are named events."""

    events: tuple
    data: np.ndarray

    def __post_init__(self):
        events = tuple(self.events)
        raw = np.asarray(self.data)
        if raw.size and not np.isin(raw, (0, 1)).all():
            raise ParseError("entries must be 0 or 1")
        data = np.array(raw, dtype=np.uint8, copy=True)
        if data.ndim != 2:
            raise ShapeError("genotype data must be two-dimensional")
        if data.shape[1] != len(events):
            raise ShapeError(f"{data.shape[1]} columns but {len(events)} event labels")
        if data.shape[0] < 1:
            raise ShapeError("at least one sample is required")
        _check_labels(events)
        data.setflags(write=False)
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "data", data)

    @property
    def s(self):
        return self.data.shape[0]

    @property
    def n(self):
        return self.data.shape[1]

    def column(self, label):
        return self.data[:, self.events.index(label)]

    def take_rows(self, rows):
        return GenotypeMatrix(self.events, self.data[np.asarray(rows)])

    def __eq__(self, other):
        if not isinstance(other, GenotypeMatrix):
            return NotImplemented
        return self.events == other.events and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.events, self.data.tobytes()))

    def __repr__(self):
        return f"GenotypeMatrix(s={self.s}, events={list(self.events)})"


def _check_labels(events):
    seen = set()
    for label in events:
        if not isinstance(label, str) or not label:
            raise ParseError(f"event labels must be non-empty strings, got {label!r}")
        if label == ROOT:
            raise ParseError(f"{ROOT!r} is reserved for the synthetic root")
        if label in seen:
            raise DuplicateEvent(f"duplicate event label {label!r}")
        seen.add(label)


def _sniff_format(text):
    first = text.split("\n", 1)[0]
    return "tsv" if "\t" in first else "csv"


def load_matrix(source: TextIO | str, fmt: str | None = None) -> GenotypeMatrix:
    """Parse a header-plus-rows CSV/TSV stream into a matrix.

    ``source`` is a text stream or the file contents as a string. ``fmt`` is
    ``"csv"`` or ``"tsv"``; when omitted the delimiter is inferred from the
    header line.
    """
    text = source if isinstance(source, str) else source.read()
    if fmt is None:
        fmt = _sniff_format(text)
    if fmt not in _DELIMITERS:
        raise ValueError(f"unknown format {fmt!r}")
    reader = csv.reader(io.StringIO(text.replace("\r\n", "\n")), delimiter=_DELIMITERS[fmt])
    rows = [r for r in reader if r and any(cell.strip() for cell in r)]
    if not rows:
        raise ShapeError("empty input: a header row is required")
    events = tuple(cell.strip() for cell in rows[0])
    _check_labels(events)
    if len(rows) == 1:
        raise ShapeError("no sample rows after the header")
    data = np.zeros((len(rows) - 1, len(events)), dtype=np.uint8)
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != len(events):
            raise ShapeError(f"row {i} has {len(row)} fields, expected {len(events)}")
        for j, cell in enumerate(row, start=1):
            value = cell.strip()
            if value == "1":
                data[i - 1, j - 1] = 1
            elif value != "0":
                raise ParseError(f"non-binary value {value!r}", row=i, col=j)
    return GenotypeMatrix(events, data)


def read_matrix(path, fmt: str | None = None) -> GenotypeMatrix:
    path = str(path)
    if fmt is None and path.endswith((".tsv", ".tab")):
        fmt = "tsv"
    with open(path, encoding="utf-8", newline="") as fh:
        return load_matrix(fh, fmt)


def dump_matrix(m: GenotypeMatrix, fmt: str = "csv") -> str:
    """Serialize with LF line endings and no trailing delimiter."""
    sep = _DELIMITERS[fmt]
    lines = [sep.join(m.events)]
    lines.extend(sep.join("1" if v else "0" for v in row) for row in m.data)
    return "\n".join(lines) + "\n"


def write_matrix(m: GenotypeMatrix, path, fmt: str | None = None):
    path = str(path)
    if fmt is None:
        fmt = "tsv" if path.endswith((".tsv", ".tab")) else "csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dump_matrix(m, fmt))


@dataclass(frozen=True)
class Violation:
    kind: str  # "P=0", "P=1" or "indistinguishable"
    events: tuple

    def __str__(self):
        return f"{self.kind}: {', '.join(self.events)}"


def validate_probabilities(m: GenotypeMatrix) -> list[Violation]:
    """Report constant columns and indistinguishable event pairs.

    A pair is indistinguishable when P(a|b) = P(b|a) = 1, i.e. the two
    columns are identical and not all zero.
    """
    violations = []
    counts = m.data.sum(axis=0)
    for label, c in zip(m.events, counts):
        if c == 0:
            violations.append(Violation("P=0", (label,)))
        elif c == m.s:
            violations.append(Violation("P=1", (label,)))
    for group in _identical_groups(m):
        if counts[group[0]] == 0:
            continue
        for a_pos, a in enumerate(group):
            for b in group[a_pos + 1:]:
                violations.append(Violation("indistinguishable", (m.events[a], m.events[b])))
    return violations


def _identical_groups(m) -> list[list[int]]:
    groups: dict[bytes, list[int]] = {}
    for j in range(m.n):
        groups.setdefault(m.data[:, j].tobytes(), []).append(j)
    return [g for g in groups.values() if len(g) > 1]


def merge_indistinguishable(m: GenotypeMatrix, sep: str = "+"):
    """Collapse identical columns into composite events.

    The composite takes the position of its first member and is labeled by
    joining member labels with ``sep``. Returns the new matrix and a map from
    composite label to the merged original labels.
    """
    groups = _identical_groups(m)
    if not groups:
        return m, {}
    leader = {g[0]: g for g in groups}
    absorbed = {j for g in groups for j in g[1:]}
    events, columns, merge_map = [], [], {}
    for j, label in enumerate(m.events):
        if j in absorbed:
            continue
        if j in leader:
            members = [m.events[k] for k in leader[j]]
            label = sep.join(members)
            merge_map[label] = members
        events.append(label)
        columns.append(j)
    return GenotypeMatrix(tuple(events), m.data[:, columns]), merge_map


def from_rows(events: Iterable[str], rows) -> GenotypeMatrix:
    events = tuple(events)
    return GenotypeMatrix(events, np.asarray(rows, dtype=np.uint8).reshape(-1, len(events)))
