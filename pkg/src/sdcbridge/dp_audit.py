"""Differential-privacy audit of randomized-response channels.

A channel is epsilon-DP when, in every column, the largest probability is at
most ``exp(epsilon)`` times the smallest. The audit reports the smallest such
epsilon together with the column and row pair that force it, and a
per-report deniability table that makes a given epsilon concrete.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import Distribution, TransitionMatrix, require_same_domain
from .exceptions import NegativeEpsilon
from .randomized_response import deniability_entropy, posterior

#: Column entries closer than this are considered identical.
EQUAL_TOL = 1e-12
#: Slack when comparing a channel's epsilon against a budget.
EPSILON_TOL = 1e-12


@dataclass(frozen=True)
class DpAuditResult:
    min_epsilon: float
    worst_column: str
    worst_pair: tuple[str, str]
    worst_ratio: float
    column_ratios: dict[str, float]
    epsilon: float | None = None
    satisfies: bool | None = None

    def to_dict(self) -> dict:
        out = {
            "min_epsilon": self.min_epsilon,
            "worst_column": self.worst_column,
            "worst_pair": list(self.worst_pair),
            "worst_ratio": self.worst_ratio,
            "column_ratios": dict(self.column_ratios),
        }
        if self.satisfies is not None:
            out["epsilon"] = self.epsilon
            out["satisfies"] = self.satisfies
        return out


def column_ratio(col: np.ndarray) -> float:
    """max/min of a column; all-zero columns count as 1, a zero next to a
    positive entry as infinity."""
    hi, lo = float(col.max()), float(col.min())
    if hi - lo <= EQUAL_TOL:
        return 1.0
    if lo == 0.0:
        return math.inf
    return hi / lo


def min_epsilon_rr(P: TransitionMatrix) -> DpAuditResult:
    """Smallest epsilon for which ``P`` is epsilon-differentially private."""
    labels = P.domain.labels
    ratios = [column_ratio(P.entries[:, v]) for v in range(P.r)]
    # first maximal column wins ties
    worst = int(np.argmax(ratios))
    col = P.entries[:, worst]
    pair = (labels[int(np.argmax(col))], labels[int(np.argmin(col))])
    ratio = ratios[worst]
    eps = math.log(ratio) if ratio > 1.0 else 0.0
    return DpAuditResult(
        min_epsilon=eps,
        worst_column=labels[worst],
        worst_pair=pair,
        worst_ratio=ratio,
        column_ratios=dict(zip(labels, ratios)),
    )


def check_epsilon_rr(P: TransitionMatrix, epsilon: float) -> DpAuditResult:
    if not epsilon >= 0.0:
        raise NegativeEpsilon(f"epsilon must be nonnegative, got {epsilon}")
    res = min_epsilon_rr(P)
    ok = res.min_epsilon <= epsilon + EPSILON_TOL
    return DpAuditResult(
        res.min_epsilon, res.worst_column, res.worst_pair, res.worst_ratio,
        res.column_ratios, float(epsilon), bool(ok),
    )


@dataclass(frozen=True)
class DeniabilityRow:
    value: str
    column_ratio: float
    reachable: bool
    posterior: Distribution | None
    entropy: float | None
    max_posterior: float | None
    most_likely: str | None
    flagged: bool

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "column_ratio": self.column_ratio,
            "reachable": self.reachable,
            "posterior": None if self.posterior is None else self.posterior.as_dict(),
            "entropy": self.entropy,
            "max_posterior": self.max_posterior,
            "most_likely": self.most_likely,
            "flagged": self.flagged,
        }


def deniability_at_epsilon(P: TransitionMatrix, prior: Distribution,
                           max_posterior_threshold: float = 0.5) -> list[DeniabilityRow]:
    """Per-report view of what the channel's epsilon means for deniability.

    For each reported value: its column ratio, the posterior over true values,
    that posterior's entropy and its largest probability. A row is flagged when
    the largest posterior probability exceeds ``max_posterior_threshold``,
    i.e. one true value has become more likely than all others combined by
    default.
    """
    domain = require_same_domain(prior, P)
    rows = []
    for j, v in enumerate(domain.labels):
        ratio = column_ratio(P.entries[:, j])
        if float(P.entries[:, j] @ prior.weights) <= 0.0:
            rows.append(DeniabilityRow(v, ratio, False, None, None, None, None, False))
            continue
        post = posterior(P, prior, v)
        k = int(np.argmax(post.weights))
        top = float(post.weights[k])
        rows.append(DeniabilityRow(
            v, ratio, True, post, deniability_entropy(post), top,
            domain.labels[k], top > max_posterior_threshold,
        ))
    return rows
