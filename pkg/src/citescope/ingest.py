"""Reading and checking journal-to-journal citation matrices.

Two matrix layouts are accepted:

* ``dense``: first row is an empty cell followed by the cited labels, every
  following row is a citing label followed by one count per cited label.
* ``edges``: header ``citing,cited,count`` and one line per non-empty cell.

Counts are citation events and must be non-negative integers. Labels are
canonicalized by trimming and collapsing internal whitespace; case and
punctuation are significant.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, DuplicateLabelError, LabelNotFoundError, ParseError

EDGE_HEADER = ("citing", "cited", "count")
META_HEADER = ("label", "total_cites", "impact_factor")

_WS = re.compile(r"\s+")
_INT = re.compile(r"[+-]?\d+")


def canonical_label(label: str) -> str:
    return _WS.sub(" ", label.strip())


@dataclass(frozen=True, eq=False)
class CitationMatrix:
    """Citing (rows) by cited (columns) count table with journal labels.

    ``counts[i, j]`` is the number of times ``citing_labels[i]`` cites
    ``cited_labels[j]``. The array is stored read-only.
    """

    citing_labels: tuple[str, ...]
    cited_labels: tuple[str, ...]
    counts: np.ndarray
    _row_index: dict = field(init=False, repr=False)
    _col_index: dict = field(init=False, repr=False)

    def __post_init__(self):
        citing = tuple(canonical_label(s) for s in self.citing_labels)
        cited = tuple(canonical_label(s) for s in self.cited_labels)
        object.__setattr__(self, "citing_labels", citing)
        object.__setattr__(self, "cited_labels", cited)
        object.__setattr__(self, "_row_index", _index(citing, "citing"))
        object.__setattr__(self, "_col_index", _index(cited, "cited"))

        counts = np.asarray(self.counts)
        if counts.size == 0:
            counts = counts.reshape(len(citing), len(cited))
        if counts.shape != (len(citing), len(cited)):
            raise ValueError(
                f"counts shape {counts.shape} does not match "
                f"{len(citing)} citing x {len(cited)} cited labels"
            )
        if counts.dtype.kind == "f":
            if not np.all(np.isfinite(counts)) or np.any(counts != np.round(counts)):
                raise DomainError("citation counts must be integers")
        elif counts.dtype.kind not in "iub":
            raise DomainError(f"unsupported count dtype {counts.dtype}")
        if np.any(counts < 0):
            raise DomainError("citation counts must be non-negative")
        counts = counts.astype(np.int64, copy=True)
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape

    def __eq__(self, other):
        if not isinstance(other, CitationMatrix):
            return NotImplemented
        return (
            self.citing_labels == other.citing_labels
            and self.cited_labels == other.cited_labels
            and np.array_equal(self.counts, other.counts)
        )

    __hash__ = None

    def has_citing(self, label: str) -> bool:
        return canonical_label(label) in self._row_index

    def has_cited(self, label: str) -> bool:
        return canonical_label(label) in self._col_index

    def row_of(self, label: str) -> int:
        try:
            return self._row_index[canonical_label(label)]
        except KeyError:
            raise LabelNotFoundError(label, "citing") from None

    def col_of(self, label: str) -> int:
        try:
            return self._col_index[canonical_label(label)]
        except KeyError:
            raise LabelNotFoundError(label, "cited") from None

    def count(self, citing: str, cited: str) -> int:
        return int(self.counts[self.row_of(citing), self.col_of(cited)])

    def transpose(self) -> "CitationMatrix":
        return CitationMatrix(self.cited_labels, self.citing_labels, self.counts.T)

    def journals(self) -> tuple[str, ...]:
        """All labels, citing axis first, then cited-only labels."""
        seen = dict.fromkeys(self.citing_labels)
        seen.update(dict.fromkeys(self.cited_labels))
        return tuple(seen)

    def restrict(self, labels: Sequence[str]) -> "CitationMatrix":
        """Square sub-matrix over ``labels`` on both axes.

        A label missing from one axis contributes an all-zero row or column.
        """
        labels = tuple(canonical_label(s) for s in labels)
        rows = [self._row_index.get(s) for s in labels]
        cols = [self._col_index.get(s) for s in labels]
        out = np.zeros((len(labels), len(labels)), dtype=np.int64)
        for a, i in enumerate(rows):
            if i is None:
                continue
            for b, j in enumerate(cols):
                if j is not None:
                    out[a, b] = self.counts[i, j]
        return CitationMatrix(labels, labels, out)


def _index(labels: Sequence[str], axis: str) -> dict[str, int]:
    index: dict[str, int] = {}
    for i, label in enumerate(labels):
        if not label:
            raise ParseError(f"empty {axis} label", row=i + 1)
        if label in index:
            raise DuplicateLabelError(label, axis)
        index[label] = i
    return index


def _parse_count(text: str, row: int, column: int) -> int:
    text = text.strip()
    if not text:
        raise ParseError("missing cell", row=row, column=column)
    if _INT.fullmatch(text):
        value = int(text)
        if value < 0:
            raise DomainError(f"negative count {value} at row {row}, column {column}")
        return value
    try:
        float(text)
    except ValueError:
        raise ParseError(f"malformed number {text!r}", row=row, column=column) from None
    raise DomainError(f"non-integer count {text!r} at row {row}, column {column}")


def _read_rows(path: str | Path) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8-sig") as fh:
        return [row for row in csv.reader(fh) if any(cell.strip() for cell in row)]


def sniff_format(path: str | Path) -> str:
    """Return ``"edges"`` when the header is ``citing,cited,count``, else ``"dense"``."""
    with open(path, newline="", encoding="utf-8-sig") as fh:
        header = next(csv.reader(fh), [])
    if tuple(c.strip().lower() for c in header) == EDGE_HEADER:
        return "edges"
    return "dense"


def parse_matrix(path: str | Path, format: str = "auto") -> CitationMatrix:
    """Read a citation matrix from ``path``.

    ``format`` is ``"dense"``, ``"edges"`` or ``"auto"`` (decided by the
    header line). Row and column numbers in errors are 1-based file positions.
    """
    if format == "auto":
        format = sniff_format(path)
    if format in ("dense", "dense-csv"):
        return _parse_dense(_read_rows(path))
    if format in ("edges", "edge-list-csv"):
        return _parse_edges(_read_rows(path))
    raise ValueError(f"unknown matrix format {format!r}")


def _parse_dense(rows: list[list[str]]) -> CitationMatrix:
    if not rows:
        raise ParseError("empty matrix file", row=1)
    header = rows[0]
    cited = [canonical_label(c) for c in header[1:]]
    citing = []
    counts = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) - 1 > len(cited):
            raise ParseError(f"{len(row) - 1} counts but {len(cited)} cited labels", row=r)
        citing.append(canonical_label(row[0]))
        cells = row[1:] + [""] * (len(cited) - (len(row) - 1))
        counts.append([_parse_count(c, r, j) for j, c in enumerate(cells, start=2)])
    return CitationMatrix(tuple(citing), tuple(cited), np.array(counts, dtype=np.int64).reshape(len(citing), len(cited)))


def _parse_edges(rows: list[list[str]]) -> CitationMatrix:
    if not rows or tuple(c.strip().lower() for c in rows[0]) != EDGE_HEADER:
        raise ParseError("edge list must start with header citing,cited,count", row=1)
    citing: dict[str, int] = {}
    cited: dict[str, int] = {}
    cells: dict[tuple[str, str], int] = {}
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", row=r)
        a, b = canonical_label(row[0]), canonical_label(row[1])
        if not a or not b:
            raise ParseError("empty label", row=r)
        if (a, b) in cells:
            raise DuplicateLabelError(f"{a} -> {b}", "edge")
        cells[a, b] = _parse_count(row[2], r, 3)
        citing.setdefault(a, len(citing))
        cited.setdefault(b, len(cited))
    counts = np.zeros((len(citing), len(cited)), dtype=np.int64)
    for (a, b), n in cells.items():
        counts[citing[a], cited[b]] = n
    return CitationMatrix(tuple(citing), tuple(cited), counts)


@dataclass(frozen=True)
class JournalMeta:
    """Pass-through per-journal metadata used in report tables."""

    label: str
    total_cites: int | None = None
    impact_factor: float | None = None


def parse_metadata(path: str | Path) -> list[JournalMeta]:
    rows = _read_rows(path)
    if not rows:
        raise ParseError("empty metadata file", row=1)
    header = [c.strip().lower() for c in rows[0]]
    missing = [h for h in META_HEADER if h not in header]
    if missing:
        raise ParseError(f"metadata header lacks {', '.join(missing)}", row=1)
    pos = {h: header.index(h) for h in META_HEADER}

    out = []
    seen = set()
    for r, row in enumerate(rows[1:], start=2):
        row = row + [""] * (len(header) - len(row))
        label = canonical_label(row[pos["label"]])
        if not label:
            raise ParseError("missing label", row=r, column=pos["label"] + 1)
        if label in seen:
            raise DuplicateLabelError(label, "metadata")
        seen.add(label)
        out.append(
            JournalMeta(
                label,
                _optional(row[pos["total_cites"]], int, r, pos["total_cites"] + 1),
                _optional(row[pos["impact_factor"]], float, r, pos["impact_factor"] + 1),
            )
        )
    return out


def _optional(text: str, kind, row: int, column: int):
    text = text.strip()
    if not text:
        return None
    if kind is int and not _INT.fullmatch(text):
        raise ParseError(f"malformed integer {text!r}", row=row, column=column)
    try:
        value = kind(text)
    except ValueError:
        raise ParseError(f"malformed number {text!r}", row=row, column=column) from None
    if not value >= 0:
        raise DomainError(f"negative or invalid value {text!r} at row {row}, column {column}")
    return value


@dataclass(frozen=True)
class ValidationReport:
    never_cites: tuple[str, ...] = ()
    never_cited: tuple[str, ...] = ()
    citing_only: tuple[str, ...] = ()
    cited_only: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.never_cites or self.never_cited or self.citing_only or self.cited_only)

    def lines(self) -> list[str]:
        out = []
        out += [f"{j}: never cites (all-zero row)" for j in self.never_cites]
        out += [f"{j}: never cited (all-zero column)" for j in self.never_cited]
        out += [f"{j}: citing axis only" for j in self.citing_only]
        out += [f"{j}: cited axis only" for j in self.cited_only]
        return out


def validate_matrix(m: CitationMatrix) -> ValidationReport:
    """Report zero rows, zero columns and labels present on a single axis."""
    rows = m.counts.sum(axis=1)
    cols = m.counts.sum(axis=0)
    cited = set(m.cited_labels)
    citing = set(m.citing_labels)
    return ValidationReport(
        never_cites=tuple(j for j, s in zip(m.citing_labels, rows) if s == 0),
        never_cited=tuple(j for j, s in zip(m.cited_labels, cols) if s == 0),
        citing_only=tuple(j for j in m.citing_labels if j not in cited),
        cited_only=tuple(j for j in m.cited_labels if j not in citing),
    )


def matrix_from_edges(edges: Iterable[tuple[str, str, int]]) -> CitationMatrix:
    """Build a matrix from in-memory ``(citing, cited, count)`` triples."""
    rows = [list(EDGE_HEADER)] + [[a, b, str(n)] for a, b, n in edges]
    return _parse_edges(rows)
