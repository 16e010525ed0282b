import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import entropy_bits, ratio_distance
from sdcbridge import (
    CategoricalDomain,
    Distribution,
    MicrodataTable,
    check_t_closeness,
    cluster_deniability,
    implied_dp_epsilon,
    max_ratio_distance,
)
from sdcbridge.exceptions import DomainMismatch, NoClusterLabels, NonCategoricalSensitive, TBelowOne

FIVE = CategoricalDomain(tuple("abcde"))
SKEWED = [0.5436, 0.1141, 0.1141, 0.1141, 0.1141]


def skewed_cluster_table():
    """Cluster A carries the skewed example distribution; cluster B balances
    the table so every sensitive value has overall frequency 1/5."""
    a = ["a"] * 5436 + [c for c in "bcde" for _ in range(1141)]
    b = ["a"] * 4564 + [c for c in "bcde" for _ in range(8859)]
    return MicrodataTable.from_columns(
        {"diag": a + b}, {"diag": "categorical"},
        cluster_labels=["A"] * len(a) + ["B"] * len(b),
    )


def test_identical_distance_one():
    F = Distribution(FIVE, [0.1, 0.2, 0.3, 0.2, 0.2])
    assert max_ratio_distance(F, F) == 1.0


def test_skewed_distance_near_e():
    d = max_ratio_distance(Distribution.uniform(FIVE), Distribution(FIVE, SKEWED))
    assert d == pytest.approx(ratio_distance([0.2] * 5, SKEWED), abs=1e-15)
    assert d == pytest.approx(math.e, abs=1e-3)


def test_one_sided_zero_is_infinite():
    ab = CategoricalDomain(("x", "y"))
    assert max_ratio_distance(Distribution(ab, [1, 0]), Distribution(ab, [0.5, 0.5])) == math.inf


def test_both_zero_ignored():
    dom = CategoricalDomain(("x", "y", "z"))
    assert max_ratio_distance(Distribution(dom, [0.5, 0.5, 0]), Distribution(dom, [0.25, 0.75, 0])) == 2.0


def test_domain_mismatch():
    with pytest.raises(DomainMismatch):
        max_ratio_distance(Distribution.uniform("ab"), Distribution.uniform("abc"))


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_symmetry_and_lower_bound(r, seed):
    rng = np.random.default_rng(seed)
    w1, w2 = rng.dirichlet(np.ones(r)), rng.dirichlet(np.ones(r))
    w1[rng.random(r) < 0.2] = 0
    if w1.sum() == 0:
        return
    dom = CategoricalDomain(tuple(str(i) for i in range(r)))
    F1, F2 = Distribution(dom, w1 / w1.sum()), Distribution(dom, w2)
    assert max_ratio_distance(F1, F2) == max_ratio_distance(F2, F1)
    assert max_ratio_distance(F1, F2) >= 1.0
    assert max_ratio_distance(F2, F2) == 1.0


def test_implied_epsilon():
    assert implied_dp_epsilon(1.0) == 0.0
    assert implied_dp_epsilon(math.e) == pytest.approx(2.0, abs=1e-12)
    assert implied_dp_epsilon(math.exp(1.5)) == pytest.approx(3.0, abs=1e-12)
    with pytest.raises(TBelowOne):
        implied_dp_epsilon(0.9)


@given(st.floats(0.0, 50.0))
def test_implied_epsilon_inverts_t(eps):
    assert implied_dp_epsilon(math.exp(eps / 2)) == pytest.approx(eps, abs=1e-12)


def test_homogeneous_clusters():
    t = MicrodataTable.from_columns({"s": list("abab" * 3)}, cluster_labels=list("xxxxyyyyzzzz"))
    rep = check_t_closeness(t, "s", 1.0)
    assert rep.satisfied
    assert all(c.distance == 1.0 for c in rep.per_cluster)
    assert rep.implied_epsilon == 0.0


def test_skewed_cluster_thresholds():
    table = skewed_cluster_table()
    ok = check_t_closeness(table, "diag", math.e)
    assert ok.satisfied
    np.testing.assert_allclose(ok.dataset_distribution.weights, [0.2] * 5, atol=1e-15)
    assert ok.max_distance == pytest.approx(2.718, abs=1e-12)
    assert ok.implied_epsilon == pytest.approx(2 * math.log(2.718), abs=1e-12)
    bad = check_t_closeness(table, "diag", 2.5)
    assert not bad.satisfied
    assert bad.violating_clusters == ["A"]


def test_single_value_cluster_infinite():
    t = MicrodataTable.from_columns({"s": list("aaabc")}, cluster_labels=list("xxyyy"))
    rep = check_t_closeness(t, "s", 1e6)
    assert rep.per_cluster[0].distance == math.inf
    assert rep.violating_clusters == ["x"]
    assert rep.implied_epsilon is None


def test_errors():
    t = MicrodataTable.from_columns({"s": list("ab"), "n": [1, 2]})
    with pytest.raises(NoClusterLabels):
        check_t_closeness(t, "s", 2)
    t = MicrodataTable.from_columns({"s": list("ab"), "n": [1, 2]}, cluster_labels=["x", "x"])
    with pytest.raises(NonCategoricalSensitive):
        check_t_closeness(t, "n", 2)
    with pytest.raises(TBelowOne):
        check_t_closeness(t, "s", 0.5)


def test_cluster_deniability_skewed():
    rows = {r.cluster: r for r in cluster_deniability(skewed_cluster_table(), "diag")}
    a = rows["A"]
    assert a.max_probability == pytest.approx(0.5436, abs=1e-12)
    assert a.flagged
    assert a.entropy == pytest.approx(entropy_bits(SKEWED), abs=1e-12)
    assert a.entropy == pytest.approx(1.9073, abs=1e-4)
    assert a.dataset_entropy == pytest.approx(math.log2(5), abs=1e-12)
    assert not rows["B"].flagged


def test_cluster_deniability_degenerate_and_equal():
    t = MicrodataTable.from_columns({"s": list("aaab" + "ab")}, cluster_labels=list("xxxxyy"))
    t2 = MicrodataTable.from_columns({"s": list("abab")}, cluster_labels=list("xxyy"))
    single = MicrodataTable.from_columns({"s": list("aab")}, cluster_labels=list("xxy"))
    rows = {r.cluster: r for r in cluster_deniability(single, "s")}
    assert rows["x"].entropy == 0.0 and rows["x"].max_probability == 1.0
    for r in cluster_deniability(t2, "s"):
        assert r.entropy == pytest.approx(r.dataset_entropy)
    assert len(cluster_deniability(t, "s")) == 2
