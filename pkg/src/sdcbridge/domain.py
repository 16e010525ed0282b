"""Shared domain types: categorical domains, transition matrices,
distributions and microdata tables.

All types are immutable once built. Arrays held by them are flagged
read-only so accidental in-place edits fail loudly.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exceptions import (
    DomainMismatch,
    DuplicateHeader,
    EmptyInput,
    InvalidDistribution,
    LengthMismatch,
    NegativeEntry,
    RowSumViolation,
    SchemaMismatch,
    ShapeMismatch,
    UnknownCategory,
    UnorderedCategorical,
)

#: Row-sum / total-mass tolerance for stochastic objects.
STOCHASTIC_TOL = 1e-9
#: Looser mass tolerance for unprojected estimates.
RAW_ESTIMATE_TOL = 1e-6


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class CategoricalDomain:
    """Ordered set of ``r`` distinct category labels."""

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        if not labels:
            raise EmptyInput("a categorical domain needs at least one label")
        if len(set(labels)) != len(labels):
            dupes = sorted(k for k, c in Counter(labels).items() if c > 1)
            raise DomainMismatch(f"duplicate category labels: {dupes}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    @property
    def r(self) -> int:
        return len(self.labels)

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label):
        return label in self._index

    def index(self, label) -> int:
        try:
            return self._index[label]
        except (KeyError, TypeError):
            raise UnknownCategory(label) from None

    def encode(self, values: Iterable) -> np.ndarray:
        """Map labels to integer codes ``0..r-1``."""
        return np.fromiter((self.index(v) for v in values), dtype=np.intp)

    def decode(self, codes: Iterable[int]) -> list[str]:
        return [self.labels[int(c)] for c in codes]


def as_domain(domain) -> CategoricalDomain:
    if isinstance(domain, CategoricalDomain):
        return domain
    return CategoricalDomain(tuple(domain))


def default_domain(r: int) -> CategoricalDomain:
    return CategoricalDomain(tuple(str(i) for i in range(1, r + 1)))


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic matrix with ``entries[u, v] = Pr(Y = v | X = u)``.

    Construction validates the matrix; use :func:`validate_transition_matrix`
    when starting from raw numbers.
    """

    domain: CategoricalDomain
    entries: np.ndarray

    def __post_init__(self):
        domain = as_domain(self.domain)
        raw = np.asarray(self.entries, dtype=float)
        r = domain.r
        if raw.shape != (r, r):
            raise ShapeMismatch(f"expected a {r}x{r} matrix, got shape {raw.shape}")
        for u, v in zip(*np.nonzero(~(raw >= 0.0))):
            raise NegativeEntry(domain.labels[u], domain.labels[v], raw[u, v])
        for u, v in zip(*np.nonzero(raw > 1.0 + STOCHASTIC_TOL)):
            raise NegativeEntry(domain.labels[u], domain.labels[v], raw[u, v])
        sums = raw.sum(axis=1)
        for u in range(r):
            if abs(sums[u] - 1.0) > STOCHASTIC_TOL:
                raise RowSumViolation(domain.labels[u], float(sums[u]))
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "entries", _frozen(raw))

    @property
    def r(self) -> int:
        return self.domain.r

    def row(self, u) -> np.ndarray:
        return self.entries[self.domain.index(u)]

    def column(self, v) -> np.ndarray:
        return self.entries[:, self.domain.index(v)]

    def __eq__(self, other):
        if not isinstance(other, TransitionMatrix):
            return NotImplemented
        return self.domain == other.domain and np.array_equal(self.entries, other.entries)

    __hash__ = None


def validate_transition_matrix(raw, domain=None) -> TransitionMatrix:
    """Validate ``raw`` as a transition matrix over ``domain``.

    Entries must lie in [0, 1] and every row must sum to one within
    ``STOCHASTIC_TOL``. Nothing is repaired: values are kept bit-for-bit, so
    validating an already valid matrix returns an equal matrix.
    """
    if isinstance(raw, TransitionMatrix):
        domain = raw.domain if domain is None else domain
        raw = raw.entries
    arr = np.asarray(raw, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeMismatch(f"transition matrix must be square, got shape {arr.shape}")
    if domain is None:
        domain = default_domain(arr.shape[0])
    return TransitionMatrix(as_domain(domain), arr)


@dataclass(frozen=True)
class Distribution:
    """Probability vector over a categorical domain."""

    domain: CategoricalDomain
    weights: np.ndarray

    def __post_init__(self):
        domain = as_domain(self.domain)
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (domain.r,):
            raise ShapeMismatch(f"expected {domain.r} weights, got shape {w.shape}")
        if not np.all(w >= 0.0):
            raise InvalidDistribution(f"weights must be nonnegative: {w.tolist()}")
        total = w.sum()
        if abs(total - 1.0) > STOCHASTIC_TOL:
            raise InvalidDistribution(f"weights sum to {total!r}, expected 1")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "weights", _frozen(w))

    @classmethod
    def uniform(cls, domain) -> "Distribution":
        domain = as_domain(domain)
        return cls(domain, np.full(domain.r, 1.0 / domain.r))

    @classmethod
    def point_mass(cls, domain, label) -> "Distribution":
        domain = as_domain(domain)
        w = np.zeros(domain.r)
        w[domain.index(label)] = 1.0
        return cls(domain, w)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, float], domain=None) -> "Distribution":
        if domain is None:
            domain = CategoricalDomain(tuple(mapping))
        domain = as_domain(domain)
        for k in mapping:
            domain.index(k)
        return cls(domain, [float(mapping.get(lab, 0.0)) for lab in domain.labels])

    def __getitem__(self, label) -> float:
        return float(self.weights[self.domain.index(label)])

    def as_dict(self) -> dict[str, float]:
        return {lab: float(w) for lab, w in zip(self.domain.labels, self.weights)}

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return self.domain == other.domain and np.array_equal(self.weights, other.weights)

    __hash__ = None


@dataclass(frozen=True)
class RawEstimate:
    """Unprojected proportion estimate; entries may be negative or exceed 1."""

    domain: CategoricalDomain
    weights: np.ndarray

    def __post_init__(self):
        domain = as_domain(self.domain)
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (domain.r,):
            raise ShapeMismatch(f"expected {domain.r} weights, got shape {w.shape}")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "weights", _frozen(w))

    @property
    def sums_to_one(self) -> bool:
        return bool(abs(self.weights.sum() - 1.0) <= RAW_ESTIMATE_TOL)

    @property
    def is_distribution(self) -> bool:
        return bool(np.all(self.weights >= 0.0)) and abs(self.weights.sum() - 1.0) <= STOCHASTIC_TOL

    def as_dict(self) -> dict[str, float]:
        return {lab: float(w) for lab, w in zip(self.domain.labels, self.weights)}


def empirical_distribution(values: Sequence, domain) -> Distribution:
    """Relative frequency of every category of ``domain`` in ``values``."""
    domain = as_domain(domain)
    values = list(values)
    if not values:
        raise EmptyInput("cannot build an empirical distribution from no values")
    counts = np.bincount(domain.encode(values), minlength=domain.r)
    return Distribution(domain, counts / len(values))


def require_same_domain(*objs) -> CategoricalDomain:
    domains = [o.domain for o in objs]
    first = domains[0]
    for d in domains[1:]:
        if d != first:
            raise DomainMismatch(f"domains differ: {first.labels} vs {d.labels}")
    return first


# ---------------------------------------------------------------------------
# Microdata


@dataclass(frozen=True)
class Attribute:
    """Column descriptor.

    ``domain=None`` means numeric-ordinal. A categorical attribute is usable
    by rank-based operations only when ``ordered`` is true, in which case the
    domain label order is the declared total order.
    """

    name: str
    domain: CategoricalDomain | None = None
    ordered: bool = False

    def __post_init__(self):
        if self.domain is not None:
            object.__setattr__(self, "domain", as_domain(self.domain))
        elif self.ordered:
            object.__setattr__(self, "ordered", False)

    @property
    def is_categorical(self) -> bool:
        return self.domain is not None

    @classmethod
    def numeric(cls, name: str) -> "Attribute":
        return cls(name)

    @classmethod
    def categorical(cls, name: str, labels, ordered: bool = False) -> "Attribute":
        return cls(name, as_domain(labels), ordered)


def _cluster_sort_key(label: str):
    try:
        return (0, float(label), label)
    except ValueError:
        return (1, 0.0, label)


@dataclass(frozen=True)
class MicrodataTable:
    """``n`` records by ``m`` typed attributes.

    ``record_map[i]`` is the index of the anonymized record derived from
    original record ``i`` (0-based). It is only meaningful on an original
    table that is paired with an anonymized one.
    """

    attributes: tuple[Attribute, ...]
    columns: Mapping[str, np.ndarray]
    cluster_labels: tuple[str, ...] | None = None
    record_map: np.ndarray | None = None
    n: int = field(init=False)

    def __post_init__(self):
        attrs = tuple(self.attributes)
        names = [a.name for a in attrs]
        if len(set(names)) != len(names):
            raise DuplicateHeader(f"duplicate attribute names: {names}")
        if set(names) != set(self.columns):
            raise SchemaMismatch(
                f"attributes {sorted(names)} do not match columns {sorted(self.columns)}"
            )
        cols = {}
        lengths = set()
        for a in attrs:
            raw = self.columns[a.name]
            if a.is_categorical:
                vals = np.array([str(v) for v in raw], dtype=object)
                for v in vals:
                    if v not in a.domain:
                        raise UnknownCategory(v)
            else:
                try:
                    vals = np.asarray(raw, dtype=float)
                except (TypeError, ValueError) as exc:
                    raise SchemaMismatch(f"column {a.name!r} is not numeric: {exc}") from None
                if vals.ndim != 1:
                    raise ShapeMismatch(f"column {a.name!r} must be one-dimensional")
            lengths.add(len(vals))
            cols[a.name] = _frozen(vals)
        if len(lengths) > 1:
            raise LengthMismatch(f"columns have different lengths: {sorted(lengths)}")
        n = lengths.pop() if lengths else 0
        if self.cluster_labels is not None:
            labels = tuple(str(c) for c in self.cluster_labels)
            if len(labels) != n:
                raise LengthMismatch(f"{len(labels)} cluster labels for {n} records")
            object.__setattr__(self, "cluster_labels", labels)
        if self.record_map is not None:
            f = np.asarray(self.record_map)
            if f.shape != (n,) or not np.array_equal(np.sort(f), np.arange(n)):
                raise SchemaMismatch("record_map must be a bijection on the record indices")
            object.__setattr__(self, "record_map", _frozen(f.astype(np.intp)))
        object.__setattr__(self, "attributes", attrs)
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "n", n)

    @classmethod
    def from_columns(cls, data: Mapping[str, Sequence], schema=None, *,
                     cluster_labels=None, record_map=None) -> "MicrodataTable":
        """Build a table from a ``{name: values}`` mapping.

        ``schema`` maps column names to ``"numeric"``, an :class:`Attribute`,
        or a list of labels (an ordered categorical). Unlisted columns are
        numeric when every cell is a number, otherwise unordered categorical
        with sorted labels.
        """
        schema = dict(schema or {})
        attrs = []
        for name, values in data.items():
            kind = schema.get(name)
            if isinstance(kind, Attribute):
                attrs.append(Attribute(name, kind.domain, kind.ordered))
            elif kind == "numeric":
                attrs.append(Attribute.numeric(name))
            elif kind is not None and not isinstance(kind, str):
                attrs.append(Attribute.categorical(name, kind, ordered=True))
            elif kind == "categorical" or not _all_numeric(values):
                attrs.append(Attribute.categorical(name, sorted({str(v) for v in values})))
            else:
                attrs.append(Attribute.numeric(name))
        return cls(tuple(attrs), dict(data), cluster_labels, record_map)

    @property
    def m(self) -> int:
        return len(self.attributes)

    @property
    def names(self) -> list[str]:
        return [a.name for a in self.attributes]

    def attribute(self, name: str) -> Attribute:
        for a in self.attributes:
            if a.name == name:
                return a
        raise SchemaMismatch(f"no attribute named {name!r}")

    def column(self, name: str) -> np.ndarray:
        self.attribute(name)
        return self.columns[name]

    def ordinal(self, name: str) -> np.ndarray:
        """Numeric view of a column usable for ranking."""
        a = self.attribute(name)
        if not a.is_categorical:
            return self.columns[name]
        if not a.ordered:
            raise UnorderedCategorical(
                f"categorical attribute {name!r} needs a declared order to be ranked"
            )
        return a.domain.encode(self.columns[name]).astype(float)

    def with_column(self, name: str, values, attribute: Attribute | None = None) -> "MicrodataTable":
        attrs = tuple(
            (attribute if attribute is not None else a) if a.name == name else a
            for a in self.attributes
        )
        self.attribute(name)
        cols = dict(self.columns)
        cols[name] = values
        return MicrodataTable(attrs, cols, self.cluster_labels, self.record_map)

    def with_record_map(self, record_map) -> "MicrodataTable":
        return MicrodataTable(self.attributes, self.columns, self.cluster_labels, record_map)

    def clusters(self) -> dict[str, np.ndarray]:
        """Record indices per cluster, clusters ordered by label."""
        if self.cluster_labels is None:
            return {}
        groups: dict[str, list[int]] = {}
        for i, c in enumerate(self.cluster_labels):
            groups.setdefault(c, []).append(i)
        return {c: np.asarray(groups[c]) for c in sorted(groups, key=_cluster_sort_key)}

    def __eq__(self, other):
        if not isinstance(other, MicrodataTable):
            return NotImplemented
        if self.attributes != other.attributes or self.cluster_labels != other.cluster_labels:
            return False
        if (self.record_map is None) != (other.record_map is None):
            return False
        if self.record_map is not None and not np.array_equal(self.record_map, other.record_map):
            return False
        return all(np.array_equal(self.columns[k], other.columns[k]) for k in self.names)

    __hash__ = None


def _all_numeric(values) -> bool:
    for v in values:
        if isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool):
            continue
        try:
            float(v)
        except (TypeError, ValueError):
            return False
    return True
