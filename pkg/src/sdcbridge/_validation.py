"""Input validation helpers shared by the estimator classes."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .domain import TransitionMatrix, as_domain, validate_transition_matrix


def check_labels(X) -> np.ndarray:
    """Coerce ``X`` to a 2-D object array of string labels.

    A 1-D input is treated as a single column.
    """
    arr = np.asarray(X, dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    arr = check_array(arr, dtype=None, ensure_2d=True, ensure_all_finite=False,
                      ensure_min_samples=0)
    return np.vectorize(str, otypes=[object])(arr) if arr.size else arr.astype(object)


def check_ordinal(X, *, min_samples: int = 1) -> np.ndarray:
    """Coerce ``X`` to a 2-D float array (1-D input becomes one column)."""
    arr = np.asarray(X)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    return check_array(arr, dtype=np.float64, ensure_min_samples=min_samples)


def check_transition_matrix(matrix, categories=None) -> TransitionMatrix:
    if isinstance(matrix, TransitionMatrix):
        if categories is not None and as_domain(categories) != matrix.domain:
            return validate_transition_matrix(matrix.entries, categories)
        return matrix
    return validate_transition_matrix(matrix, None if categories is None else as_domain(categories))
