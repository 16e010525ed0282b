"""Randomized response channels: design, sampling, proportion recovery and
deniability/secrecy measures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .domain import (
    STOCHASTIC_TOL,
    CategoricalDomain,
    Distribution,
    RawEstimate,
    TransitionMatrix,
    as_domain,
    require_same_domain,
)
from .exceptions import DomainTooSmall, SingularMatrix, UnreachableReportedValue

#: |det P| below this is treated as singular.
SINGULAR_DET_TOL = 1e-12
#: Entropy comparisons (perfect secrecy, misinformative values).
ENTROPY_TOL = 1e-9


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator from a 64-bit integer seed (or pass a Generator through)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def design_uniform_stay(domain, p_stay: float) -> TransitionMatrix:
    """Warner-style channel: keep the true answer with probability ``p_stay``,
    otherwise report one of the other ``r - 1`` categories uniformly."""
    domain = as_domain(domain)
    r = domain.r
    if r < 2:
        raise DomainTooSmall("a randomized-response channel needs at least 2 categories")
    if not 0.0 <= p_stay <= 1.0:
        raise ValueError(f"p_stay must be in [0, 1], got {p_stay}")
    off = (1.0 - p_stay) / (r - 1)
    entries = np.full((r, r), off)
    np.fill_diagonal(entries, p_stay)
    return TransitionMatrix(domain, entries)


def sample_codes(codes: np.ndarray, P: TransitionMatrix, rng: np.random.Generator) -> np.ndarray:
    """Push integer category codes through ``P``.

    One uniform draw per record, consumed in record order, inverted through
    the cumulative row of the record's true category.
    """
    codes = np.asarray(codes, dtype=np.intp)
    if codes.size == 0:
        return codes.copy()
    cdf = np.cumsum(P.entries, axis=1)
    cdf /= cdf[:, -1:]
    draws = rng.random(codes.size)
    out = np.empty_like(codes)
    for u in np.unique(codes):
        mask = codes == u
        out[mask] = np.searchsorted(cdf[u], draws[mask], side="right")
    # guards draws that land on a cdf plateau reaching 1.0 early
    np.minimum(out, P.r - 1, out=out)
    return out


def randomize(values: Sequence, P: TransitionMatrix, seed) -> list[str]:
    """Report every value through the channel ``P``; reproducible per seed."""
    codes = P.domain.encode(values)
    return P.domain.decode(sample_codes(codes, P, make_rng(seed)))


def reported_distribution(prior: Distribution, P: TransitionMatrix) -> Distribution:
    """Distribution of the reported value: ``lambda = P^T pi``."""
    domain = require_same_domain(prior, P)
    lam = P.entries.T @ prior.weights
    return Distribution(domain, lam / lam.sum())


def estimate_true_proportions(lambda_hat: Distribution, P: TransitionMatrix) -> RawEstimate:
    """Unbiased estimate of the true proportions, solving ``P^T pi = lambda_hat``.

    Raises :class:`SingularMatrix` when ``P`` is not invertible, which is the
    case for every channel offering perfect secrecy.
    """
    domain = require_same_domain(lambda_hat, P)
    det = float(np.linalg.det(P.entries))
    if abs(det) < SINGULAR_DET_TOL:
        raise SingularMatrix(det)
    # LAPACK gesv: LU with partial pivoting
    pi_hat = np.linalg.solve(P.entries.T, lambda_hat.weights)
    return RawEstimate(domain, pi_hat)


def project_to_simplex(raw) -> Distribution:
    """Euclidean projection of an estimate onto the probability simplex.

    Valid distributions come back unchanged.
    """
    if isinstance(raw, RawEstimate):
        domain, w = raw.domain, np.asarray(raw.weights, dtype=float)
    else:
        w = np.asarray(raw, dtype=float)
        domain = CategoricalDomain(tuple(str(i) for i in range(1, w.size + 1)))
    if np.all(w >= 0.0) and abs(w.sum() - 1.0) <= STOCHASTIC_TOL:
        return Distribution(domain, w)
    s = np.sort(w)[::-1]
    css = np.cumsum(s) - 1.0
    k = np.arange(1, w.size + 1)
    rho = np.nonzero(s - css / k > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return Distribution(domain, np.maximum(w - theta, 0.0))


def posterior(P: TransitionMatrix, prior: Distribution, v) -> Distribution:
    """``Pr(X = u | Y = v)`` for every true category ``u`` (Bayes)."""
    domain = require_same_domain(prior, P)
    joint = P.column(v) * prior.weights
    total = joint.sum()
    if total <= 0.0:
        raise UnreachableReportedValue(v)
    return Distribution(domain, joint / total)


def shannon_entropy(weights) -> float:
    """Entropy in bits, with ``0 log 0 = 0``."""
    w = np.asarray(weights, dtype=float)
    w = w[w > 0.0]
    return float(-(w * np.log2(w)).sum()) + 0.0


def deniability_entropy(dist) -> float:
    """Deniability of a posterior: its Shannon entropy in bits.

    Ranges from 0 (the true value is certain) to ``log2 r`` (uniform
    posterior, maximal deniability).
    """
    weights = dist.weights if isinstance(dist, Distribution) else dist
    h = shannon_entropy(weights)
    return min(max(h, 0.0), float(np.log2(len(weights))))


@dataclass(frozen=True)
class SecrecyReport:
    prior_entropy: float
    per_value_posteriors: dict[str, Distribution]
    per_value_entropies: dict[str, float]
    conditional_entropy: float
    perfect_secrecy: bool
    misinformative_values: list[str]
    unreachable_values: list[str]
    reported: Distribution

    def to_dict(self) -> dict:
        return {
            "prior_entropy": self.prior_entropy,
            "conditional_entropy": self.conditional_entropy,
            "perfect_secrecy": self.perfect_secrecy,
            "misinformative_values": list(self.misinformative_values),
            "unreachable_values": list(self.unreachable_values),
            "reported_distribution": self.reported.as_dict(),
            "per_value": {
                v: {
                    "posterior": self.per_value_posteriors[v].as_dict(),
                    "entropy": self.per_value_entropies[v],
                }
                for v in self.per_value_posteriors
            },
        }


def secrecy_report(P: TransitionMatrix, prior: Distribution) -> SecrecyReport:
    """Prior entropy, per-report deniability and conditional entropy of ``P``.

    ``H(X|Y)`` can never exceed ``H(X)``, but individual reports may be
    misinformative (``H(X|Y=v) > H(X)``) at the expense of others.
    """
    domain = require_same_domain(prior, P)
    h_prior = shannon_entropy(prior.weights)
    lam = reported_distribution(prior, P)
    posts, ents, unreachable = {}, {}, []
    h_cond = 0.0
    for j, v in enumerate(domain.labels):
        if lam.weights[j] <= 0.0:
            unreachable.append(v)
            continue
        post = posterior(P, prior, v)
        posts[v] = post
        ents[v] = deniability_entropy(post)
        h_cond += lam.weights[j] * ents[v]
    return SecrecyReport(
        prior_entropy=h_prior,
        per_value_posteriors=posts,
        per_value_entropies=ents,
        conditional_entropy=float(h_cond),
        perfect_secrecy=abs(h_cond - h_prior) <= ENTROPY_TOL,
        misinformative_values=[v for v, h in ents.items() if h > h_prior + ENTROPY_TOL],
        unreachable_values=unreachable,
        reported=lam,
    )
