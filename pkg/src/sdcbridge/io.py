"""CSV tables and matrices, JSON reports.

One CSV dialect is used throughout: comma separated, ``"`` quoting, UTF-8,
mandatory header. Reals are written with 17 significant digits so doubles
survive a round trip unchanged.
"""

from __future__ import annotations

import csv
import json
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping

import numpy as np

from .domain import (
    Attribute,
    MicrodataTable,
    TransitionMatrix,
    as_domain,
    validate_transition_matrix,
)
from .exceptions import DuplicateHeader, ParseError, SchemaMismatch

CLUSTER_COLUMN = "__cluster"
RECORD_MAP_COLUMN = "__record_map"
RESERVED = (CLUSTER_COLUMN, RECORD_MAP_COLUMN)


def format_real(x: float) -> str:
    return "%.17g" % x


def _read_rows(path) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError("file is empty; a header row is required", line=1)
    return rows


def _parse_float(cell: str, line: int, column: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise ParseError(f"not a number: {cell!r}", line=line, column=column) from None


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _attribute_from_schema(name: str, kind, cells: list[str]) -> Attribute:
    if isinstance(kind, Attribute):
        return Attribute(name, kind.domain, kind.ordered)
    if kind == "numeric":
        return Attribute.numeric(name)
    if kind == "categorical":
        return Attribute.categorical(name, sorted(set(cells)))
    if kind is not None:
        return Attribute.categorical(name, list(kind), ordered=True)
    if cells and all(_is_number(c) for c in cells):
        return Attribute.numeric(name)
    return Attribute.categorical(name, sorted(set(cells)) or ["?"])


def load_table(path, schema: Mapping | None = None) -> MicrodataTable:
    """Read a microdata CSV.

    ``schema`` maps column names to ``"numeric"``, ``"categorical"``, a list
    of labels (ordered categorical, list order is the declared order) or an
    :class:`Attribute`. Unlisted columns are numeric when every cell parses
    as a number and unordered categorical otherwise. A ``__cluster`` column
    becomes the cluster labels and a ``__record_map`` column (0-based indices
    into the anonymized table) the record map.
    """
    schema = dict(schema or {})
    rows = _read_rows(path)
    header = rows[0]
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise DuplicateHeader(f"duplicate header names: {dupes}")
    unknown = set(schema) - set(header)
    if unknown:
        raise SchemaMismatch(f"schema names columns not in the file: {sorted(unknown)}")
    body = rows[1:]
    for k, row in enumerate(body):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", line=k + 2)
    cells = {h: [row[i] for row in body] for i, h in enumerate(header)}

    attrs, columns = [], {}
    for h in header:
        if h in RESERVED:
            continue
        attr = _attribute_from_schema(h, schema.get(h), cells[h])
        if attr.is_categorical:
            for k, c in enumerate(cells[h]):
                if c not in attr.domain:
                    raise ParseError(f"unknown category {c!r}", line=k + 2, column=h)
            columns[h] = cells[h]
        else:
            columns[h] = [_parse_float(c, k + 2, h) for k, c in enumerate(cells[h])]
        attrs.append(attr)

    clusters = cells.get(CLUSTER_COLUMN)
    record_map = None
    if RECORD_MAP_COLUMN in cells:
        record_map = []
        for k, c in enumerate(cells[RECORD_MAP_COLUMN]):
            try:
                record_map.append(int(c))
            except ValueError:
                raise ParseError(f"not an integer: {c!r}", line=k + 2,
                                 column=RECORD_MAP_COLUMN) from None
    return MicrodataTable(tuple(attrs), columns, clusters, record_map)


def table_schema(table: MicrodataTable) -> dict[str, Attribute]:
    """Schema that reloads ``table`` with identical attribute types."""
    return {a.name: a for a in table.attributes}


def save_table(table: MicrodataTable, path) -> None:
    header = list(table.names)
    if table.cluster_labels is not None:
        header.append(CLUSTER_COLUMN)
    if table.record_map is not None:
        header.append(RECORD_MAP_COLUMN)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(table.n):
            row = []
            for a in table.attributes:
                val = table.columns[a.name][i]
                row.append(str(val) if a.is_categorical else format_real(float(val)))
            if table.cluster_labels is not None:
                row.append(table.cluster_labels[i])
            if table.record_map is not None:
                row.append(str(int(table.record_map[i])))
            w.writerow(row)


def load_matrix(path) -> TransitionMatrix:
    """Read a transition matrix CSV.

    The first row holds the reported-value labels (after an ignored corner
    cell), the first column the true-value labels, in the same order.
    """
    rows = _read_rows(path)
    header = rows[0]
    if len(header) < 2:
        raise ParseError("header must hold a corner cell and at least one label", line=1)
    labels = header[1:]
    if len(set(labels)) != len(labels):
        raise DuplicateHeader(f"duplicate column labels: {labels}")
    body = [r for r in rows[1:] if r]
    entries, row_labels = [], []
    for k, row in enumerate(body):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", line=k + 2)
        row_labels.append(row[0])
        entries.append([_parse_float(c, k + 2, labels[i]) for i, c in enumerate(row[1:])])
    if row_labels != labels:
        raise ParseError(f"row labels {row_labels} must match column labels {labels}")
    return validate_transition_matrix(np.array(entries, dtype=float), as_domain(labels))


def save_matrix(P: TransitionMatrix, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([""] + list(P.domain.labels))
        for lab, row in zip(P.domain.labels, P.entries):
            w.writerow([lab] + [format_real(x) for x in row])


# ---------------------------------------------------------------------------
# JSON reports


def jsonable(obj):
    """Recursively convert numpy scalars/arrays and non-finite floats.

    JSON has no infinity, so non-finite reals become the strings ``"inf"``,
    ``"-inf"`` and ``"nan"``.
    """
    if isinstance(obj, Mapping):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, Path):
        return str(obj)
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return obj


def make_report(command: str, version: str, config: Mapping, results, witnesses,
                timestamp: str | None = None) -> dict:
    return {
        "command": command,
        "version": version,
        "config": jsonable(config),
        "results": jsonable(results),
        "witnesses": jsonable(witnesses),
        "timestamp": timestamp or datetime.now(timezone.utc).isoformat(),
    }


def dumps_report(report: Mapping) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(report, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def parse_labels(text: str) -> list[str]:
    return [s.strip() for s in next(csv.reader([text]))]

