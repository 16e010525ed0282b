import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import bayes_posterior
from sdcbridge import (
    Distribution,
    check_epsilon_rr,
    deniability_at_epsilon,
    design_uniform_stay,
    min_epsilon_rr,
    secrecy_report,
    validate_transition_matrix,
)
from sdcbridge.exceptions import NegativeEpsilon

E2_COLUMN = [[0.7389, 0.2611], [0.1, 0.9]]


def test_identity_is_not_private():
    res = min_epsilon_rr(validate_transition_matrix(np.eye(3)))
    assert res.min_epsilon == math.inf
    assert res.worst_column == "1"


def test_warner_ln3():
    res = min_epsilon_rr(design_uniform_stay(["a", "b"], 0.75))
    assert res.min_epsilon == pytest.approx(math.log(3), abs=1e-15)
    assert res.worst_ratio == pytest.approx(3.0)
    # tie between the two columns goes to the lowest index
    assert res.worst_column == "a"
    assert res.worst_pair == ("a", "b")


def test_e_squared_column():
    res = min_epsilon_rr(validate_transition_matrix(E2_COLUMN))
    assert res.min_epsilon >= math.log(7.389) - 1e-12
    assert res.min_epsilon == pytest.approx(2.0, abs=1e-3)
    assert res.worst_column == "1"


def test_constant_columns_zero():
    res = min_epsilon_rr(validate_transition_matrix([[0.2, 0.3, 0.5]] * 3))
    assert res.min_epsilon == 0.0


def test_all_zero_column_counts_as_one():
    P = validate_transition_matrix([[0.5, 0.5, 0.0], [0.4, 0.6, 0.0], [0.5, 0.5, 0.0]])
    res = min_epsilon_rr(P)
    assert res.column_ratios["3"] == 1.0
    assert res.min_epsilon == pytest.approx(math.log(0.5 / 0.4))


def test_check_epsilon():
    P = design_uniform_stay(["a", "b"], 0.75)
    assert check_epsilon_rr(P, 1.2).satisfies is True
    assert check_epsilon_rr(P, 1.0).satisfies is False
    assert check_epsilon_rr(validate_transition_matrix(np.eye(2)), math.inf).satisfies is True
    with pytest.raises(NegativeEpsilon):
        check_epsilon_rr(P, -0.1)


def test_deniability_table_e_squared():
    P = validate_transition_matrix(E2_COLUMN)
    rows = deniability_at_epsilon(P, Distribution.uniform(P.domain))
    top = rows[0]
    assert top.max_posterior == pytest.approx(0.8808, abs=1e-4)
    assert top.flagged
    assert top.most_likely == "1"
    assert top.column_ratio == pytest.approx(7.389)


def test_deniability_table_constant_and_identity():
    prior = Distribution.from_mapping({"a": 0.3, "b": 0.3, "c": 0.4})
    P = validate_transition_matrix([[0.2, 0.5, 0.3]] * 3, prior.domain)
    for row in deniability_at_epsilon(P, prior):
        np.testing.assert_allclose(row.posterior.weights, prior.weights, atol=1e-15)
        assert row.entropy == pytest.approx(secrecy_report(P, prior).prior_entropy)
    ident = validate_transition_matrix(np.eye(3), prior.domain)
    for row in deniability_at_epsilon(ident, prior):
        assert row.entropy == 0.0 and row.max_posterior == 1.0


def random_matrix(rng, r):
    return validate_transition_matrix(rng.dirichlet(np.ones(r), size=r))


@settings(max_examples=100)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_zero_epsilon_implies_perfect_secrecy(r, seed):
    rng = np.random.default_rng(seed)
    P = validate_transition_matrix(np.tile(rng.dirichlet(np.ones(r)), (r, 1)))
    assert min_epsilon_rr(P).min_epsilon == 0
    assert secrecy_report(P, Distribution(P.domain, rng.dirichlet(np.ones(r)))).perfect_secrecy


@settings(max_examples=100)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def test_spreading_a_column_never_decreases_epsilon(r, seed, frac):
    rng = np.random.default_rng(seed)
    P = random_matrix(rng, r)
    v = int(rng.integers(r))
    col = P.entries[:, v]
    lo, hi = int(np.argmin(col)), int(np.argmax(col))
    if lo == hi:
        return
    E = P.entries.copy()
    moved = frac * E[lo, v]
    # keep rows stochastic: the moved mass swaps with another column entry
    other = (v + 1) % r
    take = min(moved, E[hi, other])
    E[lo, v] -= take
    E[lo, other] += take
    E[hi, v] += take
    E[hi, other] -= take
    Q = validate_transition_matrix(E)
    assert min_epsilon_rr(Q).column_ratios[P.domain.labels[v]] >= \
        min_epsilon_rr(P).column_ratios[P.domain.labels[v]] - 1e-12


@settings(max_examples=100)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_checking_at_min_epsilon_satisfies(r, seed):
    P = random_matrix(np.random.default_rng(seed), r)
    assert check_epsilon_rr(P, min_epsilon_rr(P).min_epsilon).satisfies


def test_max_posterior_bound_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(500):
        r = int(rng.integers(2, 5))
        P = random_matrix(rng, r)
        prior = rng.dirichlet(np.ones(r))
        ratio = math.exp(min_epsilon_rr(P).min_epsilon)
        pmax = prior.max()
        bound = ratio * pmax / (ratio * pmax + (1 - pmax))
        for j, row in enumerate(deniability_at_epsilon(P, Distribution(P.domain, prior))):
            expected = max(bayes_posterior(P.entries[:, j].tolist(), prior.tolist()))
            assert row.max_posterior == pytest.approx(expected, abs=1e-12)
            assert row.max_posterior <= bound + 1e-12
