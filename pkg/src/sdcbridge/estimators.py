"""scikit-learn compatible wrappers.

These classes follow the usual estimator conventions (constructor only
stores parameters, learned state ends with ``_``, ``get_params`` /
``set_params`` from :class:`~sklearn.base.BaseEstimator`) so the mechanisms
can sit inside pipelines and be cloned.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_labels, check_ordinal, check_transition_matrix
from .domain import empirical_distribution
from .permutation import (
    DEFAULT_ALPHA_LOSS,
    DEFAULT_ALPHA_RISK,
    power_mean,
    rank,
    reverse_map_indices,
)
from .randomized_response import (
    estimate_true_proportions,
    make_rng,
    project_to_simplex,
    sample_codes,
    secrecy_report,
)


class PRAMTransformer(TransformerMixin, BaseEstimator):
    """Randomize categorical labels through a transition matrix.

    Used respondent-side this is randomized response; applied by the data
    controller to a collected column it is PRAM. Every column of ``X`` must
    take values in ``categories``.

    Parameters
    ----------
    transition_matrix : array-like of shape (r, r) or TransitionMatrix
    categories : sequence of str, optional
        Labels of the rows/columns. Defaults to the matrix's own domain,
        or ``"1".."r"``.
    random_state : int
        Seed. Each call to ``transform`` restarts the stream, so repeated
        calls on the same data give the same output.
    """

    def __init__(self, transition_matrix=None, categories=None, random_state=0):
        self.transition_matrix = transition_matrix
        self.categories = categories
        self.random_state = random_state

    def fit(self, X=None, y=None):
        self.matrix_ = check_transition_matrix(self.transition_matrix, self.categories)
        self.categories_ = list(self.matrix_.domain.labels)
        if X is not None:
            labels = check_labels(X)
            self.n_features_in_ = labels.shape[1]
            for v in labels.ravel():
                self.matrix_.domain.index(v)
        return self

    def transform(self, X):
        check_is_fitted(self, "matrix_")
        labels = check_labels(X)
        dom = self.matrix_.domain
        rng = make_rng(self.random_state)
        out = np.empty(labels.shape, dtype=object)
        for j in range(labels.shape[1]):
            codes = dom.encode(labels[:, j])
            out[:, j] = dom.decode(sample_codes(codes, self.matrix_, rng))
        return out


class ProportionEstimator(BaseEstimator):
    """Recover true category proportions from randomized reports.

    After ``fit`` on the reported labels:

    ``reported_``
        empirical distribution of the reports;
    ``raw_estimate_``
        unbiased (possibly negative) estimate;
    ``proportions_``
        the raw estimate, projected on the simplex when ``project=True``.
    """

    def __init__(self, transition_matrix=None, categories=None, project=False):
        self.transition_matrix = transition_matrix
        self.categories = categories
        self.project = project

    def fit(self, X, y=None):
        self.matrix_ = check_transition_matrix(self.transition_matrix, self.categories)
        labels = check_labels(X)
        if labels.shape[1] != 1:
            raise ValueError("ProportionEstimator expects a single column of reports")
        self.reported_ = empirical_distribution(labels[:, 0], self.matrix_.domain)
        self.raw_estimate_ = estimate_true_proportions(self.reported_, self.matrix_)
        if self.project:
            self.proportions_ = project_to_simplex(self.raw_estimate_).weights.copy()
        else:
            self.proportions_ = self.raw_estimate_.weights.copy()
        self.categories_ = list(self.matrix_.domain.labels)
        return self

    def secrecy(self):
        """Secrecy report of the channel under the projected estimate as prior."""
        check_is_fitted(self, "raw_estimate_")
        return secrecy_report(self.matrix_, project_to_simplex(self.raw_estimate_))


class ReverseMapper(TransformerMixin, BaseEstimator):
    """Reverse-map anonymized columns onto the original values.

    ``fit`` memorizes the original attributes; ``transform(Y)`` returns the
    permuted original values ranked like ``Y``. Columns are numeric or
    ordinal codes.
    """

    def __init__(self, alpha_risk=DEFAULT_ALPHA_RISK, alpha_loss=DEFAULT_ALPHA_LOSS):
        self.alpha_risk = alpha_risk
        self.alpha_loss = alpha_loss

    def fit(self, X, y=None):
        self.X_ = check_ordinal(X)
        self.n_features_in_ = self.X_.shape[1]
        return self

    def _check_Y(self, Y):
        check_is_fitted(self, "X_")
        Y = check_ordinal(Y)
        if Y.shape != self.X_.shape:
            raise ValueError(f"Y has shape {Y.shape}, expected {self.X_.shape}")
        return Y

    def transform(self, Y):
        Y = self._check_Y(Y)
        Z = np.empty_like(self.X_)
        for j in range(Y.shape[1]):
            Z[:, j] = self.X_[reverse_map_indices(self.X_[:, j], Y[:, j]), j]
        return Z

    def residual(self, Y):
        """Rank-preserving noise that turns the permutation back into ``Y``."""
        return self._check_Y(Y) - self.transform(Y)

    def rank_distances(self, Y, record_map=None):
        Y = self._check_Y(Y)
        f = np.arange(Y.shape[0]) if record_map is None else np.asarray(record_map)
        return np.column_stack([
            np.abs(rank(Y[:, j])[f] - rank(self.X_[:, j])) for j in range(Y.shape[1])
        ])

    def risk_loss(self, Y, record_map=None):
        """``(risk, loss)`` power-mean scores per attribute, shape (m, 2)."""
        d = self.rank_distances(Y, record_map)
        return np.array([[power_mean(d[:, j], self.alpha_risk), power_mean(d[:, j], self.alpha_loss)]
                         for j in range(d.shape[1])])

    def score(self, Y, y=None):
        """Mean over attributes of the risk power mean; higher means safer."""
        d = self.rank_distances(Y)
        return float(np.mean([power_mean(d[:, j], self.alpha_risk) for j in range(d.shape[1])]))
