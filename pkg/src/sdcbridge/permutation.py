"""Permutation view of anonymization.

Any masking of an attribute is equivalent to a permutation of the original
values followed by rank-preserving residual noise. This module recovers the
permutation (reverse mapping), applies PRAM, verifies (d, v, f)-permuted
privacy and aggregates rank distances with power means.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .closeness import max_ratio_distance
from .domain import (
    Attribute,
    CategoricalDomain,
    Distribution,
    MicrodataTable,
    TransitionMatrix,
    as_domain,
)
from .exceptions import (
    AlphaRangeViolation,
    DomainMismatch,
    EmptyInput,
    LengthMismatch,
    ShapeMismatch,
    UnknownCriterion,
    UnorderedCategorical,
)
from .randomized_response import make_rng, sample_codes

DEFAULT_ALPHA_RISK = -2.0
DEFAULT_ALPHA_LOSS = 2.0

CRITERIA = ("variance", "distinct-count", "t-closeness")


class IdentityPairingWarning(UserWarning):
    """No record map was supplied; records are paired by position."""


def rank(values) -> np.ndarray:
    """Ascending 1-based ranks; ties go to the earlier record first."""
    values = np.asarray(values)
    if values.size == 0:
        raise EmptyInput("cannot rank an empty vector")
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.intp)
    ranks[order] = np.arange(1, values.size + 1)
    return ranks


def _as_ordinal(values, order):
    if order is not None:
        return as_domain(order).encode(values).astype(float)
    arr = np.asarray(values)
    if arr.dtype.kind not in "biuf":
        try:
            arr = arr.astype(float)
        except (TypeError, ValueError):
            raise UnorderedCategorical(
                "non-numeric values need a declared category order to be ranked"
            ) from None
    return arr


def reverse_map_indices(x, y) -> np.ndarray:
    """Indices into ``x`` such that ``x[idx]`` is the reverse-mapped attribute."""
    x, y = np.asarray(x), np.asarray(y)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"attributes differ in length: {x.shape} vs {y.shape}")
    if x.size == 0:
        raise EmptyInput("cannot reverse-map empty attributes")
    x_sorted = np.argsort(x, kind="stable")
    return x_sorted[rank(y) - 1]


def reverse_map(x, y, order: Sequence[str] | None = None) -> np.ndarray:
    """Reverse-mapped version of ``x`` given its anonymized version ``y``.

    Record ``i`` receives the value of ``x`` whose rank equals the rank of
    ``y[i]``, so the output is a permutation of ``x`` ranked like ``y``.
    Categorical inputs need ``order``, the declared total order of labels.
    """
    xo, yo = _as_ordinal(x, order), _as_ordinal(y, order)
    idx = reverse_map_indices(xo, yo)
    return np.asarray(x)[idx] if order is not None else xo[idx]


@dataclass(frozen=True)
class PermutationProfile:
    """Rank distances (indexed by original record) and residual noise
    (indexed by anonymized record) for every attribute."""

    distances: dict[str, np.ndarray]
    residual_noise: dict[str, np.ndarray]
    record_map: np.ndarray
    max_residual: dict[str, float] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "max_residual", {
            k: float(np.abs(r).max()) if r.size else 0.0 for k, r in self.residual_noise.items()
        })

    def to_dict(self) -> dict:
        return {
            "record_map": self.record_map.tolist(),
            "attributes": {
                k: {
                    "distances": self.distances[k].tolist(),
                    "residual_noise": self.residual_noise[k].tolist(),
                    "max_residual": self.max_residual[k],
                }
                for k in self.distances
            },
        }


def _check_pair(X: MicrodataTable, Y: MicrodataTable):
    if X.names != Y.names or X.n != Y.n:
        raise ShapeMismatch(
            f"tables differ in shape: {X.n}x{X.names} vs {Y.n}x{Y.names}"
        )
    if X.n == 0:
        raise EmptyInput("tables have no records")
    for a, b in zip(X.attributes, Y.attributes):
        if a.is_categorical != b.is_categorical:
            raise ShapeMismatch(f"attribute {a.name!r} is numeric in one table only")
        if a.is_categorical and a.ordered and b.ordered and a.domain != b.domain:
            raise DomainMismatch(f"attribute {a.name!r} has different declared orders")


def resolve_record_map(X: MicrodataTable, f=None) -> np.ndarray:
    if f is None:
        f = X.record_map
    if f is None:
        warnings.warn("no record map given; pairing original and anonymized records by position",
                      IdentityPairingWarning, stacklevel=3)
        return np.arange(X.n)
    f = np.asarray(f, dtype=np.intp)
    if f.shape != (X.n,) or not np.array_equal(np.sort(f), np.arange(X.n)):
        raise LengthMismatch("record map must be a bijection on the record indices")
    return f


def _ordinals(X: MicrodataTable, Y: MicrodataTable, name: str):
    a, b = X.attribute(name), Y.attribute(name)
    if a.is_categorical:
        dom = a.domain if a.ordered else b.domain if b.ordered else None
        if dom is None:
            raise UnorderedCategorical(
                f"categorical attribute {name!r} needs a declared order to be ranked"
            )
        return dom.encode(X.column(name)).astype(float), dom.encode(Y.column(name)).astype(float)
    return X.column(name), Y.column(name)


def decompose(X: MicrodataTable, Y: MicrodataTable, record_map=None):
    """Split the anonymization ``X -> Y`` into a permutation and residual noise.

    Returns ``(Z, profile)`` where ``Z`` is the reverse-mapped table (row ``k``
    aligned with anonymized record ``k``) and ``Y = Z + residual`` column-wise.
    Categorical residuals are measured in declared-order codes.
    """
    _check_pair(X, Y)
    f = resolve_record_map(X, record_map)
    cols, dists, resid = {}, {}, {}
    for name in X.names:
        xo, yo = _ordinals(X, Y, name)
        idx = reverse_map_indices(xo, yo)
        cols[name] = X.column(name)[idx]
        resid[name] = yo - xo[idx]
        dists[name] = np.abs(rank(yo)[f] - rank(xo))
    Z = MicrodataTable(X.attributes, cols, Y.cluster_labels)
    return Z, PermutationProfile(dists, resid, f)


def pram_apply(table: MicrodataTable, attr: str, P: TransitionMatrix, seed) -> MicrodataTable:
    """Post-randomize one categorical column through ``P`` (controller side).

    Every cell is replaced by a draw from the row of ``P`` for its value, with
    the same sampling stream as :func:`randomize`.
    """
    a = table.attribute(attr)
    if not a.is_categorical:
        raise DomainMismatch(f"attribute {attr!r} is numeric; PRAM needs a categorical column")
    extra = set(a.domain.labels) - set(P.domain.labels)
    if extra:
        raise DomainMismatch(f"labels {sorted(extra)} of {attr!r} are not in the matrix domain")
    new_attr = a if set(a.domain.labels) == set(P.domain.labels) else Attribute(attr, P.domain, a.ordered)
    codes = P.domain.encode(table.column(attr))
    out = P.domain.decode(sample_codes(codes, P, make_rng(seed)))
    return table.with_column(attr, out, new_attr)


# ---------------------------------------------------------------------------
# (d, v, f)-permuted privacy


def closest_value(sorted_values: np.ndarray, x: float) -> tuple[float, bool]:
    """Value nearest to ``x`` in an ascending array; ties go to the smaller
    value. Also returns whether a tie between two distinct values occurred."""
    pos = int(np.searchsorted(sorted_values, x))
    if pos == 0:
        return float(sorted_values[0]), False
    if pos == sorted_values.size:
        return float(sorted_values[-1]), False
    lo, hi = sorted_values[pos - 1], sorted_values[pos]
    dl, dh = x - lo, hi - x
    if dh < dl:
        return float(hi), False
    return float(lo), bool(dl == dh and lo != hi)


def _parse_criterion(criterion: str, t):
    crit = criterion.strip().lower()
    if crit.startswith("t-closeness"):
        rest = crit[len("t-closeness"):].strip()
        if rest:
            if not (rest.startswith("(") and rest.endswith(")")):
                raise UnknownCriterion(criterion)
            t = float(rest[1:-1])
        if t is None:
            raise UnknownCriterion("the t-closeness criterion needs a t value")
        return "t-closeness", float(t)
    if crit not in CRITERIA:
        raise UnknownCriterion(f"unknown diversity criterion {criterion!r}; expected one of {CRITERIA}")
    return crit, None


def _diversity(window: np.ndarray, crit: str, full: np.ndarray) -> float:
    if crit == "variance":
        return float(np.var(window))
    if crit == "distinct-count":
        return float(np.unique(window).size)
    support, full_codes = np.unique(full, return_inverse=True)
    dom = CategoricalDomain(tuple(str(i) for i in range(support.size)))
    f_all = np.bincount(full_codes, minlength=support.size) / full.size
    f_win = np.bincount(np.searchsorted(support, window), minlength=support.size) / window.size
    return max_ratio_distance(Distribution(dom, f_all), Distribution(dom, f_win))


@dataclass(frozen=True)
class RecordCheck:
    attribute: str
    y: float
    y_star: float
    tie: bool
    distance: int
    diversity: float
    distance_ok: bool
    diversity_ok: bool

    @property
    def ok(self) -> bool:
        return self.distance_ok and self.diversity_ok


@dataclass(frozen=True)
class DvfVerdict:
    criterion: str
    d: tuple[int, ...]
    v: tuple[float, ...]
    t: float | None
    per_record: list[list[RecordCheck]]
    satisfied: bool
    failing_records: list[int]
    achieved_d: dict[str, int]
    achieved_v: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "d": list(self.d),
            "v": list(self.v),
            "t": self.t,
            "satisfied": self.satisfied,
            "failing_records": list(self.failing_records),
            "achieved_d": dict(self.achieved_d),
            "achieved_v": dict(self.achieved_v),
            "per_record": [
                {c.attribute: {
                    "y": c.y, "y_star": c.y_star, "tie": c.tie,
                    "distance": c.distance, "diversity": c.diversity,
                    "distance_ok": c.distance_ok, "diversity_ok": c.diversity_ok,
                } for c in checks}
                for checks in self.per_record
            ],
        }


def check_dvf_privacy(X: MicrodataTable, Y: MicrodataTable, f=None, d=None, v=None,
                      criterion: str = "variance", t: float | None = None) -> DvfVerdict:
    """Verify (d, v, f)-permuted privacy of ``Y`` with respect to every record of ``X``.

    For original record ``x`` and attribute ``j``, ``y*`` is the value of
    ``Y^j`` closest to ``x^j`` (ties to the smaller value). Among the
    anonymized records holding ``y*`` the one nearest in rank to ``f(x)`` is
    used as the anchor. Then

    1. ``|Rank(y^j) - Rank(y*)| >= d[j]``;
    2. the diversity of the values of sorted ``Y^j`` within ``d[j]`` ranks of
       the anchor exceeds ``v[j]``.

    For ``criterion="t-closeness"`` the diversity is the max-ratio distance of
    that window to the whole ``Y^j`` and condition 2 becomes ``distance <= t``
    (``v`` is reported but not used).
    """
    _check_pair(X, Y)
    crit, t = _parse_criterion(criterion, t)
    fmap = resolve_record_map(X, f)
    m = X.m
    d = tuple(int(x) for x in (d if d is not None else [0] * m))
    v = tuple(float(x) for x in (v if v is not None else [-math.inf] * m))
    if len(d) != m or len(v) != m:
        raise LengthMismatch(f"d and v must have one entry per attribute ({m})")
    if any(x < 0 for x in d):
        raise ValueError("permutation distances must be nonnegative")

    n = X.n
    per_record: list[list[RecordCheck]] = [[] for _ in range(n)]
    for j, name in enumerate(X.names):
        xo, yo = _ordinals(X, Y, name)
        ry = rank(yo)
        ys = np.sort(yo, kind="stable")
        for i in range(n):
            k = fmap[i]
            y_star, tie = closest_value(ys, float(xo[i]))
            lo = int(np.searchsorted(ys, y_star, side="left")) + 1
            hi = int(np.searchsorted(ys, y_star, side="right"))
            anchor = min(max(int(ry[k]), lo), hi)
            dist = abs(int(ry[k]) - anchor)
            window = ys[max(1, anchor - d[j]) - 1: min(n, anchor + d[j])]
            div = _diversity(window, crit, ys)
            div_ok = div <= t if crit == "t-closeness" else div > v[j]
            per_record[i].append(RecordCheck(
                name, float(yo[k]), y_star, tie, dist, div, dist >= d[j], bool(div_ok),
            ))
    failing = [i for i, checks in enumerate(per_record) if not all(c.ok for c in checks)]
    return DvfVerdict(
        criterion=crit, d=d, v=v, t=t,
        per_record=per_record,
        satisfied=not failing,
        failing_records=failing,
        achieved_d={name: min(per_record[i][j].distance for i in range(n))
                    for j, name in enumerate(X.names)},
        achieved_v={name: min(per_record[i][j].diversity for i in range(n))
                    for j, name in enumerate(X.names)},
    )


# ---------------------------------------------------------------------------
# Power-mean aggregation


def power_mean(p, alpha: float) -> float:
    """Power mean of nonnegative permutation distances.

    ``alpha = 0`` gives the geometric mean. Any zero distance drives the mean
    to 0 for ``alpha <= 0``, the limit of the formula. The result is clamped to
    ``[min(p), max(p)]``, where it lies mathematically.
    """
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0:
        raise EmptyInput("power mean of an empty vector")
    if not np.all(p >= 0.0) or not np.all(np.isfinite(p)):
        raise ValueError("power mean needs finite nonnegative values")
    lo, hi = float(p.min()), float(p.max())
    if alpha == -math.inf:
        return lo
    if alpha == math.inf:
        return hi
    if lo == 0.0 and alpha <= 0.0:
        return 0.0
    n = p.size
    pos = p[p > 0.0]
    if pos.size == 0:
        return 0.0
    logs = np.log(pos)
    if alpha == 0.0:
        val = math.exp(float(logs.mean()))
    else:
        scaled = alpha * logs
        if np.abs(scaled).max() < 1.0:
            # mean(p^a) = 1 + mean(expm1(a log p)); zeros (a > 0) add -1 each
            s = (np.expm1(scaled).sum() - (n - pos.size)) / n
            val = math.exp(math.log1p(s) / alpha)
        else:
            top = scaled.max()
            lse = top + math.log(np.exp(scaled - top).sum())
            val = math.exp((lse - math.log(n)) / alpha)
    return min(max(val, lo), hi)


@dataclass(frozen=True)
class RiskLoss:
    risk: float
    loss: float
    alpha_risk: float
    alpha_loss: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def risk_and_loss(profile, alpha_risk: float = DEFAULT_ALPHA_RISK,
                  alpha_loss: float = DEFAULT_ALPHA_LOSS) -> dict[str, RiskLoss]:
    """Per-attribute disclosure-risk and information-loss scores.

    The risk score is the power mean at ``alpha_risk < 1``, dominated by the
    smallest distances: the *lower* it is, the higher the disclosure risk.
    The loss score uses ``alpha_loss > 1`` and grows with information loss.
    """
    if not alpha_risk < 1.0:
        raise AlphaRangeViolation(f"alpha_risk must be < 1, got {alpha_risk}")
    if not alpha_loss > 1.0:
        raise AlphaRangeViolation(f"alpha_loss must be > 1, got {alpha_loss}")
    distances: Mapping[str, np.ndarray]
    distances = profile.distances if isinstance(profile, PermutationProfile) else profile
    return {
        name: RiskLoss(power_mean(p, alpha_risk), power_mean(p, alpha_loss),
                       float(alpha_risk), float(alpha_loss))
        for name, p in distances.items()
    }
