"""Frequency tables, ingestion, and ranked distributions.

A :class:`FrequencyTable` is the raw multiset of type counts, optionally
tagged with a :class:`GroupKey` (region, decade, context...).
:func:`rank` turns it into a :class:`RankedDistribution`, which is what the
fitting and information modules consume.
"""
from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass, field
from types import MappingProxyType
from collections.abc import Sequence
from typing import Iterable, Mapping, TextIO

import numpy as np

from .errors import EmptyInputError, EmptyResultError, ParseError, SchemaError


@dataclass(frozen=True)
class GroupKey:
    pairs: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        pairs = tuple((str(k), v) for k, v in self.pairs)
        names = [k for k, _ in pairs]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate dimension names in group key: {names}")
        object.__setattr__(self, "pairs", pairs)

    def as_dict(self) -> dict:
        return dict(self.pairs)

    def sort_key(self):
        return tuple((k, str(v)) for k, v in self.pairs)

    def __str__(self):
        return ",".join(f"{k}={v}" for k, v in self.pairs)


@dataclass(frozen=True)
class FrequencyTable:
    """Counts per type label. Zero counts are dropped on construction."""

    entries: Mapping[str, int]
    group: GroupKey | None = None

    def __post_init__(self):
        clean = {}
        for label, count in self.entries.items():
            if isinstance(count, (bool, np.bool_)) or int(count) != count:
                raise ValueError(f"count for {label!r} is not an integer: {count!r}")
            count = int(count)
            if count < 0:
                raise ValueError(f"negative count for {label!r}: {count}")
            if count:
                clean[str(label)] = count
        object.__setattr__(self, "entries", MappingProxyType(clean))

    @classmethod
    def _trusted(cls, entries: dict, group: GroupKey | None = None) -> "FrequencyTable":
        """Wrap entries already known to be str -> positive int, skipping validation."""
        table = object.__new__(cls)
        object.__setattr__(table, "entries", MappingProxyType(entries))
        object.__setattr__(table, "group", group)
        return table

    @property
    def total_tokens(self) -> int:
        return sum(self.entries.values())

    @property
    def n_types(self) -> int:
        return len(self.entries)

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        if not isinstance(other, FrequencyTable):
            return NotImplemented
        return dict(self.entries) == dict(other.entries) and self.group == other.group

    __hash__ = None


class RankLabels(Sequence):
    """Lazy labels ``r01, r02, ...`` for distributions that carry no type names."""

    def __init__(self, n: int):
        self.n = int(n)
        self.width = len(str(self.n))

    def __len__(self):
        return self.n

    def __getitem__(self, i):
        if isinstance(i, slice):
            return tuple(self[j] for j in range(*i.indices(self.n)))
        if i < 0:
            i += self.n
        if not 0 <= i < self.n:
            raise IndexError(i)
        return f"r{i + 1:0{self.width}d}"

    def __eq__(self, other):
        if isinstance(other, RankLabels):
            return self.n == other.n
        return tuple(self) == tuple(other)

    __hash__ = None


@dataclass(frozen=True)
class RankedDistribution:
    """Counts in descending order with ranks 1..N.

    ``counts`` is usually integer, but real-valued (expected or exact) series
    are accepted so that analytic series can be fitted directly.
    """

    labels: tuple[str, ...]
    counts: np.ndarray
    probs: np.ndarray = field(init=False)

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 1 or len(counts) == 0:
            raise EmptyInputError("ranked distribution needs at least one count")
        if len(self.labels) != len(counts):
            raise ValueError("labels and counts differ in length")
        if np.any(counts <= 0):
            raise ValueError("counts must be positive")
        if np.any(np.diff(counts) > 0):
            raise ValueError("counts must be non-increasing")
        counts = counts.copy()
        counts.setflags(write=False)
        probs = counts / counts.sum()
        probs.setflags(write=False)
        if not isinstance(self.labels, RankLabels):
            object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "probs", probs)

    @property
    def N(self) -> int:
        return len(self.counts)

    @property
    def total_tokens(self):
        total = self.counts.sum()
        return int(total) if np.issubdtype(self.counts.dtype, np.integer) else float(total)

    @property
    def ranks(self) -> np.ndarray:
        return np.arange(1, self.N + 1)

    @classmethod
    def from_counts(cls, counts: Sequence[float], labels: Sequence[str] | None = None):
        """Build from an arbitrary count series, sorting it descending.

        Without labels the result carries plain rank labels (see RankLabels).
        """
        counts = np.asarray(counts)
        if len(counts) == 0:
            raise EmptyInputError("empty count series")
        if labels is None:
            return cls(RankLabels(len(counts)), counts[np.argsort(-counts, kind="stable")])
        order = np.lexsort((np.array(labels, dtype=str), -counts))
        return cls(tuple(labels[i] for i in order), counts[order])

    def __eq__(self, other):
        if not isinstance(other, RankedDistribution):
            return NotImplemented
        return tuple(self.labels) == tuple(other.labels) and np.array_equal(self.counts, other.counts)

    __hash__ = None


@dataclass(frozen=True)
class Schema:
    type_col: str = "type"
    count_col: str = "count"
    group_cols: tuple[str, ...] = ()

    @classmethod
    def parse(cls, text: str | None) -> "Schema":
        """Parse ``type=COL,count=COL,group=A+B``; any part may be omitted."""
        if not text:
            return cls()
        kw = {}
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise SchemaError(f"bad schema item {part!r}; expected key=value")
            key, value = (s.strip() for s in part.split("=", 1))
            if key == "type":
                kw["type_col"] = value
            elif key == "count":
                kw["count_col"] = value
            elif key in ("group", "groups"):
                kw["group_cols"] = tuple(v for v in value.split("+") if v)
            else:
                raise SchemaError(f"unknown schema key {key!r}")
        return cls(**kw)


def _reader(stream: TextIO):
    text = stream.read()
    if not text.strip():
        raise EmptyInputError("input is empty")
    header = text.splitlines()[0]
    delimiter = "\t" if "\t" in header else ","
    return csv.reader(io.StringIO(text), delimiter=delimiter)


def _index(header: list[str], names: Iterable[str]) -> dict[str, int]:
    header = [h.strip() for h in header]
    missing = [n for n in names if n not in header]
    if missing:
        raise SchemaError(f"missing required column(s): {', '.join(missing)}")
    return {n: header.index(n) for n in names}


def load_counts(stream: TextIO, schema: Schema | None = None) -> list[FrequencyTable]:
    """Read delimited type/count records into one table per group key.

    Tables come back sorted by group key so the result does not depend on
    row order. Duplicate (group, type) rows are summed.
    """
    schema = schema or Schema()
    rows = _reader(stream)
    header = next(rows)
    cols = _index(header, (schema.type_col, schema.count_col, *schema.group_cols))
    width = max(cols.values()) + 1

    counts: dict[tuple, dict[str, int]] = defaultdict(lambda: defaultdict(int))
    bad = []
    n_rows = 0
    for lineno, row in enumerate(rows, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        n_rows += 1
        if len(row) < width:
            bad.append((lineno, "too few columns"))
            continue
        raw = row[cols[schema.count_col]].strip()
        try:
            count = int(raw)
        except ValueError:
            bad.append((lineno, f"non-integer count {raw!r}"))
            continue
        if count < 0:
            bad.append((lineno, f"negative count {count}"))
            continue
        key = tuple((g, row[cols[g]].strip()) for g in schema.group_cols)
        counts[key][row[cols[schema.type_col]].strip()] += count
    if bad:
        detail = "; ".join(f"line {n}: {why}" for n, why in bad)
        raise ParseError(f"malformed rows: {detail}", [n for n, _ in bad])
    if n_rows == 0:
        raise EmptyInputError("input has a header but no records")

    tables = [
        FrequencyTable(dict(entries), GroupKey(key) if schema.group_cols else None)
        for key, entries in counts.items()
    ]
    tables = [t for t in tables if t.n_types]
    tables.sort(key=lambda t: t.group.sort_key() if t.group else ())
    return tables


def count_conditioned_tokens(tokens: Iterable[tuple[str, str]]) -> list[FrequencyTable]:
    """Tabulate (context, type) pairs into one table per context, sorted by context."""
    counts: dict[str, dict[str, int]] = defaultdict(lambda: defaultdict(int))
    for context, label in tokens:
        counts[context][label] += 1
    if not counts:
        raise EmptyInputError("token sequence is empty")
    return [
        FrequencyTable(dict(counts[c]), GroupKey((("context", c),)))
        for c in sorted(counts)
    ]


def load_tokens(stream: TextIO) -> list[FrequencyTable]:
    """Read a two-column ``context``/``type`` token file."""
    rows = _reader(stream)
    cols = _index(next(rows), ("context", "type"))
    width = max(cols.values()) + 1
    pairs = []
    bad = []
    for lineno, row in enumerate(rows, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < width:
            bad.append(lineno)
            continue
        pairs.append((row[cols["context"]].strip(), row[cols["type"]].strip()))
    if bad:
        raise ParseError(f"malformed rows at lines {bad}", bad)
    return count_conditioned_tokens(pairs)


def filter_min_count(table: FrequencyTable, threshold: int) -> FrequencyTable:
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    kept = {k: c for k, c in table.entries.items() if c >= threshold}
    if not kept:
        raise EmptyResultError(f"no types with count >= {threshold}")
    return FrequencyTable(kept, table.group)


def rank(table: FrequencyTable) -> RankedDistribution:
    """Sort by descending count; equal counts are ordered by label (code points)."""
    if not table.entries:
        raise EmptyInputError("cannot rank an empty table")
    labels = np.array(list(table.entries), dtype=str)
    counts = np.fromiter(table.entries.values(), dtype=np.int64, count=len(labels))
    order = np.lexsort((labels, -counts))
    return RankedDistribution(tuple(labels[order].tolist()), counts[order])


def table_from_ranked(dist: RankedDistribution, group: GroupKey | None = None) -> FrequencyTable:
    return FrequencyTable(dict(zip(dist.labels, dist.counts.tolist())), group)


def pool(tables: Iterable[FrequencyTable]) -> FrequencyTable:
    """Sum counts per label across tables (shared labels merge, others union)."""
    entries: dict[str, int] = defaultdict(int)
    seen = False
    for t in tables:
        seen = True
        for label, c in t.entries.items():
            entries[label] += c
    if not seen:
        raise EmptyInputError("nothing to pool")
    return FrequencyTable._trusted(dict(entries))
