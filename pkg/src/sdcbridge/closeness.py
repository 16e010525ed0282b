"""t-closeness under the max-ratio distance, its epsilon-DP reading and the
cluster-as-reported-value deniability view."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import Distribution, MicrodataTable, empirical_distribution, require_same_domain
from .exceptions import EmptyInput, NoClusterLabels, NonCategoricalSensitive, TBelowOne
from .randomized_response import deniability_entropy


def max_ratio_distance(F1: Distribution, F2: Distribution) -> float:
    """Largest per-category ratio between two distributions, either way round.

    A category where both are zero contributes 0; one where exactly one is
    zero contributes infinity.
    """
    require_same_domain(F1, F2)
    worst = 0.0
    for a, b in zip(F1.weights, F2.weights):
        if a == 0.0 and b == 0.0:
            continue
        if a == 0.0 or b == 0.0:
            return math.inf
        worst = max(worst, a / b, b / a)
    return worst


def implied_dp_epsilon(t: float) -> float:
    """epsilon such that exp(epsilon/2)-closeness is t-closeness."""
    if not t >= 1.0:
        raise TBelowOne(f"t must be at least 1, got {t}")
    return 2.0 * math.log(t)


def t_from_epsilon(epsilon: float) -> float:
    return math.exp(epsilon / 2.0)


@dataclass(frozen=True)
class ClusterCloseness:
    cluster: str
    size: int
    distribution: Distribution
    distance: float
    entropy: float
    max_probability: float
    violates: bool

    def to_dict(self) -> dict:
        return {
            "cluster": self.cluster,
            "size": self.size,
            "distribution": self.distribution.as_dict(),
            "distance": self.distance,
            "entropy": self.entropy,
            "max_probability": self.max_probability,
            "violates": self.violates,
        }


@dataclass(frozen=True)
class ClosenessReport:
    sensitive: str
    t: float
    dataset_distribution: Distribution
    per_cluster: list[ClusterCloseness]
    max_distance: float
    implied_epsilon: float | None
    satisfied: bool

    @property
    def violating_clusters(self) -> list[str]:
        return [c.cluster for c in self.per_cluster if c.violates]

    def to_dict(self) -> dict:
        return {
            "sensitive": self.sensitive,
            "t": self.t,
            "threshold_epsilon": implied_dp_epsilon(self.t) if math.isfinite(self.t) else math.inf,
            "dataset_distribution": self.dataset_distribution.as_dict(),
            "max_distance": self.max_distance,
            "implied_epsilon": self.implied_epsilon,
            "satisfied": self.satisfied,
            "per_cluster": [c.to_dict() for c in self.per_cluster],
        }


def _sensitive_groups(table: MicrodataTable, sensitive_attr: str):
    if table.cluster_labels is None:
        raise NoClusterLabels("the table carries no cluster labels")
    attr = table.attribute(sensitive_attr)
    if not attr.is_categorical:
        raise NonCategoricalSensitive(f"sensitive attribute {sensitive_attr!r} is not categorical")
    if table.n == 0:
        raise EmptyInput("the table has no records")
    values = table.column(sensitive_attr)
    overall = empirical_distribution(values, attr.domain)
    groups = {c: empirical_distribution(values[idx], attr.domain)
              for c, idx in table.clusters().items()}
    sizes = {c: len(idx) for c, idx in table.clusters().items()}
    return overall, groups, sizes


def check_t_closeness(table: MicrodataTable, sensitive_attr: str, t: float) -> ClosenessReport:
    """Compare every cluster's sensitive-value distribution with the whole table's.

    A cluster violates t-closeness when its max-ratio distance to the table
    distribution exceeds ``t``. ``implied_epsilon`` is ``2 ln(max_distance)``
    -- the epsilon the data set actually earns -- and is ``None`` when some
    cluster is infinitely far away.
    """
    if not t >= 1.0:
        raise TBelowOne(f"t must be at least 1, got {t}")
    overall, groups, sizes = _sensitive_groups(table, sensitive_attr)
    rows = []
    for c, dist in groups.items():
        d = max_ratio_distance(overall, dist)
        rows.append(ClusterCloseness(
            cluster=c,
            size=sizes[c],
            distribution=dist,
            distance=d,
            entropy=deniability_entropy(dist),
            max_probability=float(dist.weights.max()),
            violates=d > t,
        ))
    worst = max(r.distance for r in rows)
    return ClosenessReport(
        sensitive=sensitive_attr,
        t=float(t),
        dataset_distribution=overall,
        per_cluster=rows,
        max_distance=worst,
        implied_epsilon=implied_dp_epsilon(worst) if math.isfinite(worst) else None,
        satisfied=not any(r.violates for r in rows),
    )


@dataclass(frozen=True)
class ClusterDeniability:
    cluster: str
    entropy: float
    dataset_entropy: float
    entropy_loss: float
    max_probability: float
    most_likely: str
    flagged: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def cluster_deniability(table: MicrodataTable, sensitive_attr: str,
                        max_probability_threshold: float = 0.5) -> list[ClusterDeniability]:
    """Treat each cluster id as a reported value and measure how deniable the
    sensitive value of a member is once the cluster is known.

    Flags clusters where one sensitive value holds more than
    ``max_probability_threshold`` of the mass.
    """
    overall, groups, _ = _sensitive_groups(table, sensitive_attr)
    h_all = deniability_entropy(overall)
    labels = overall.domain.labels
    out = []
    for c, dist in groups.items():
        h = deniability_entropy(dist)
        k = int(np.argmax(dist.weights))
        top = float(dist.weights[k])
        out.append(ClusterDeniability(c, h, h_all, h_all - h, top, labels[k],
                                      top > max_probability_threshold))
    return out
