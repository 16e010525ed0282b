import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from sdcbridge import PRAMTransformer, ProportionEstimator, ReverseMapper, design_uniform_stay, rank
from sdcbridge.exceptions import SingularMatrix, UnknownCategory

WARNER = [[0.75, 0.25], [0.25, 0.75]]


def test_get_params_and_clone():
    t = PRAMTransformer(WARNER, categories=["yes", "no"], random_state=3)
    assert t.get_params() == {"transition_matrix": WARNER, "categories": ["yes", "no"], "random_state": 3}
    c = clone(t).set_params(random_state=4)
    assert c.random_state == 4 and t.random_state == 3


def test_pram_transformer_round_trip_estimate():
    rng = np.random.default_rng(0)
    truth = rng.choice(["yes", "no"], size=50_000, p=[0.3, 0.7])
    t = PRAMTransformer(WARNER, ["yes", "no"], random_state=11)
    reported = t.fit_transform(truth)
    assert reported.shape == (50_000, 1)
    est = ProportionEstimator(WARNER, ["yes", "no"]).fit(reported)
    np.testing.assert_allclose(est.proportions_, [0.3, 0.7], atol=0.02)
    assert est.raw_estimate_.sums_to_one


def test_transform_is_deterministic_and_checks_labels():
    t = PRAMTransformer(WARNER, ["yes", "no"], random_state=1).fit()
    x = np.array(["yes", "no"] * 100)
    assert np.array_equal(t.transform(x), t.transform(x))
    with pytest.raises(UnknownCategory):
        t.transform(["maybe"])
    with pytest.raises(NotFittedError):
        PRAMTransformer(WARNER).transform(["1"])


def test_accepts_transition_matrix_object():
    P = design_uniform_stay(["a", "b", "c"], 1.0)
    out = PRAMTransformer(P).fit_transform(np.array([["a", "b"], ["c", "a"]]))
    assert out.tolist() == [["a", "b"], ["c", "a"]]


def test_projection_option():
    reports = ["yes"] * 95 + ["no"] * 5
    raw = ProportionEstimator(WARNER, ["yes", "no"]).fit(reports)
    assert raw.proportions_[1] < 0
    proj = ProportionEstimator(WARNER, ["yes", "no"], project=True).fit(reports)
    assert proj.proportions_.tolist() == [1.0, 0.0]
    assert proj.secrecy().prior_entropy == 0.0


def test_singular_channel_cannot_estimate():
    with pytest.raises(SingularMatrix):
        ProportionEstimator([[0.5, 0.5], [0.5, 0.5]]).fit(["1", "2"])


def test_reverse_mapper():
    X = np.array([[10.0, 1.0], [20.0, 2.0], [30.0, 3.0]])
    Y = np.array([[5.0, 100.0], [1.0, 200.0], [2.0, 300.0]])
    rm = ReverseMapper().fit(X)
    Z = rm.transform(Y)
    assert Z.tolist() == [[30.0, 1.0], [10.0, 2.0], [20.0, 3.0]]
    np.testing.assert_array_equal(Z + rm.residual(Y), Y)
    d = rm.rank_distances(Y)
    assert d[:, 0].tolist() == np.abs(rank(Y[:, 0]) - rank(X[:, 0])).tolist()
    assert d[:, 1].tolist() == [0, 0, 0]
    assert rm.score(Y) == pytest.approx((0.75 ** -0.5 + 0.0) / 2)
    assert rm.risk_loss(Y).shape == (2, 2)


def test_reverse_mapper_in_pipeline_shape_check():
    rm = make_pipeline(ReverseMapper()).fit(np.arange(6.0).reshape(3, 2))
    with pytest.raises(ValueError):
        rm.transform(np.arange(4.0).reshape(2, 2))
