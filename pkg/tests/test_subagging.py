import math

import numpy as np
import pytest

from app.core.exceptions import ConfigurationError, RefusedError
from app.models.cv import CvScheme
from app.models.dataset import Dataset
from app.models.ensemble import EnsembleMember, SubaggedEnsemble
from app.models.learner import HypothesisClass, KnnPredictor, StumpPredictor
from app.models.loss import ConvexSurrogate, LossFunction
from app.models.simulation import SyntheticDistribution
from app.services.learners import ErmLearner, KnnLearner
from app.services.simulation import generate
from app.services.subagging import (
    SubaggingService,
    aggregate_predict,
    estimate_all,
    majority_estimate_from_errors,
    mistake_matrix,
    predict_average,
    predict_majority,
    r_hat_cv_in,
    r_hat_cv_maj,
    r_hat_cv_out,
    subag_fit,
    surrogate_risk,
    true_risk,
)

from .conftest import fold_test_sets, leave_out_test_sets

STUMP = ErmLearner(HypothesisClass(kind="stump"))


def _constant_member(value: float, weight: float, mask=(1, 0)) -> EnsembleMember:
    predictor = KnnPredictor(labels=(), k=1, task="regression", train_x=((0.0,),),
                             train_y=(value,))
    return EnsembleMember(mask=mask, weight=weight, predictor=predictor)


def _voter(label: int, weight: float) -> EnsembleMember:
    # Threshold -inf votes the positive label everywhere, +inf the negative one
    threshold = -math.inf if label == 2 else math.inf
    predictor = StumpPredictor(labels=(1, 2), direction=1, threshold=threshold)
    return EnsembleMember(mask=(1, 0), weight=weight, predictor=predictor)


def test_fit_layouts(two_fold_data):
    e = subag_fit(KnnLearner(1), two_fold_data, CvScheme(kind="kfold", n=4, k=2))
    assert e.size == 2
    assert e.weights.tolist() == [0.5, 0.5]

    loo = subag_fit(STUMP, Dataset(x=[0.1, 0.2, 0.3], y=[1, 2, 2]), CvScheme(kind="loo", n=3))
    assert loo.size == 3
    assert loo.weights == pytest.approx([1 / 3] * 3)

    holdout = subag_fit(STUMP, two_fold_data, CvScheme(kind="holdout", n=4, p=0.5))
    assert holdout.size == 1 and holdout.weights.tolist() == [1.0]


def test_members_are_fitted_on_their_subsample(threshold_data):
    e = subag_fit(STUMP, threshold_data, CvScheme(kind="lpo", n=8, v=2))
    for member in e.members:
        assert member.predictor == STUMP.fit(threshold_data.subset(member.mask))


def test_scheme_size_must_match(threshold_data):
    with pytest.raises(ConfigurationError):
        subag_fit(STUMP, threshold_data, CvScheme(kind="kfold", n=4, k=2))


def test_threads_do_not_change_the_ensemble(threshold_data):
    scheme = CvScheme(kind="lpo", n=8, v=3)
    assert subag_fit(STUMP, threshold_data, scheme) == \
        subag_fit(STUMP, threshold_data, scheme, threads=2)


def test_service_matches_the_module_functions(threshold_data):
    scheme = CvScheme(kind="lpo", n=8, v=2)
    service = SubaggingService(threads=2)
    assert service.fit(STUMP, threshold_data, scheme) == subag_fit(STUMP, threshold_data, scheme)
    estimates = service.estimate(STUMP, threshold_data, scheme)
    assert set(estimates) == {"out", "in", "maj"}
    assert estimates["out"] == r_hat_cv_out(STUMP, threshold_data, scheme)
    assert estimates["in"] == r_hat_cv_in(STUMP, threshold_data, scheme)
    assert estimates["maj"] == r_hat_cv_maj(STUMP, threshold_data, scheme)


def test_predict_average_examples():
    constant = SubaggedEnsemble(members=(_constant_member(0.5, 0.5), _constant_member(0.5, 0.5)),
                                task="regression")
    assert predict_average(constant, [0.3]) == 0.5

    even = SubaggedEnsemble(members=(_constant_member(0.0, 0.5), _constant_member(1.0, 0.5)),
                            task="regression")
    assert predict_average(even, [0.3]) == 0.5

    skewed = SubaggedEnsemble(
        members=(_constant_member(0.0, 0.25), _constant_member(1.0, 0.75)), task="regression")
    assert predict_average(skewed, [0.3]) == 0.75
    assert predict_average(skewed, [[0.1], [0.2]]).tolist() == [0.75, 0.75]


def test_predict_average_is_linear():
    base = SubaggedEnsemble(members=(_constant_member(0.2, 0.25), _constant_member(0.6, 0.75)),
                            task="regression")
    scaled = SubaggedEnsemble(members=(_constant_member(0.6, 0.25), _constant_member(1.8, 0.75)),
                              task="regression")
    assert predict_average(scaled, [0.0]) == pytest.approx(3 * predict_average(base, [0.0]))


def test_predict_majority_examples():
    third = 1 / 3
    plurality = SubaggedEnsemble(members=(_voter(1, third), _voter(1, third), _voter(2, third)),
                                 aggregation="majority", labels=(1, 2))
    assert predict_majority(plurality, [0.5]) == 1

    tie = SubaggedEnsemble(members=(_voter(1, 0.5), _voter(2, 0.5)), aggregation="majority",
                           labels=(1, 2))
    assert predict_majority(tie, [0.5]) == 1

    single = SubaggedEnsemble(members=(_voter(2, 1.0),), aggregation="majority", labels=(1, 2))
    assert predict_majority(single, [0.5]) == 2


def test_majority_depends_only_on_label_weights():
    first = SubaggedEnsemble(members=(_voter(2, 0.2), _voter(1, 0.3), _voter(2, 0.5)),
                             aggregation="majority", labels=(1, 2))
    second = SubaggedEnsemble(members=(_voter(1, 0.3), _voter(2, 0.5), _voter(2, 0.2)),
                              aggregation="majority", labels=(1, 2))
    assert predict_majority(first, [0.5]) == predict_majority(second, [0.5]) == 2


def test_aggregation_mismatch():
    averaged = SubaggedEnsemble(members=(_voter(1, 1.0),), labels=(1, 2))
    with pytest.raises(ConfigurationError):
        predict_majority(averaged, [0.5])
    voted = SubaggedEnsemble(members=(_voter(1, 1.0),), aggregation="majority", labels=(1, 2))
    with pytest.raises(ConfigurationError):
        predict_average(voted, [0.5])
    with pytest.raises(ConfigurationError):
        SubaggedEnsemble(members=(_constant_member(0.1, 1.0),), aggregation="majority",
                         task="regression")


def test_aggregate_predict_uses_the_sign_of_the_average():
    e = SubaggedEnsemble(members=(_voter(1, 0.25), _voter(2, 0.75)), labels=(1, 2))
    assert aggregate_predict(e, [[0.1], [0.9]]).tolist() == [2, 2]


def test_out_estimate_two_fold_fixture(two_fold_data, brute_force_out):
    scheme = CvScheme(kind="kfold", n=4, k=2)
    estimate = r_hat_cv_out(KnnLearner(1), two_fold_data, scheme)
    assert estimate.value == 0.5
    assert estimate.exact
    assert estimate.value == brute_force_out(KnnLearner(1), two_fold_data, fold_test_sets(4, 2))


def test_out_estimate_is_zero_when_folds_agree():
    data = Dataset(x=[0.1, 0.9, 0.11, 0.91], y=[1, 2, 1, 2])
    assert r_hat_cv_out(KnnLearner(1), data, CvScheme(kind="kfold", n=4, k=2)).value == 0.0


def test_constant_labels_give_zero_error():
    data = Dataset(x=[0.1, 0.5, 0.9], y=[1, 1, 1], labels=(1, 2))
    assert r_hat_cv_out(STUMP, data, CvScheme(kind="loo", n=3)).value == 0.0


def test_in_estimate_examples(separable_data, threshold_data):
    assert r_hat_cv_in(STUMP, separable_data, CvScheme(kind="loo", n=4)).value == 0.0
    assert r_hat_cv_in(KnnLearner(1), threshold_data, CvScheme(kind="kfold", n=8, k=2)).value \
        == 0.0


@pytest.mark.parametrize("learner", [STUMP, ErmLearner(HypothesisClass(kind="interval")),
                                     KnnLearner(3)])
@pytest.mark.parametrize("n", [6, 8, 10])
@pytest.mark.parametrize("seed", [0, 5, 11])
def test_estimates_match_brute_force(learner, n, seed, brute_force_out):
    data = generate(SyntheticDistribution(kind="threshold-noise", flip=0.2), n, seed=seed)
    cases = [
        (CvScheme(kind="kfold", n=n, k=2), fold_test_sets(n, 2)),
        (CvScheme(kind="loo", n=n), leave_out_test_sets(n, 1)),
        (CvScheme(kind="lpo", n=n, v=2), leave_out_test_sets(n, 2)),
    ]
    for scheme, test_sets in cases:
        estimates = estimate_all(learner, data, scheme, ("out", "in"))
        expected_out = brute_force_out(learner, data, test_sets)
        expected_in = brute_force_out(learner, data, test_sets, side="in")
        assert estimates["out"].value == pytest.approx(expected_out, abs=1e-12)
        assert estimates["in"].value == pytest.approx(expected_in, abs=1e-12)


def test_majority_estimate_examples():
    assert majority_estimate_from_errors([0.1, 0.2, 0.9]) == (pytest.approx(0.15), 2)
    assert majority_estimate_from_errors([0.3] * 4) == (pytest.approx(0.3), 3)
    assert majority_estimate_from_errors([0.7]) == (0.7, 1)


def test_majority_estimate_on_ensemble(threshold_data):
    scheme = CvScheme(kind="lpo", n=8, v=2)
    estimates = estimate_all(STUMP, threshold_data, scheme, ("out", "maj"))
    maj = estimates["maj"]
    assert maj.l == math.comb(8, 2) // 2 + 1
    smallest = sorted(estimates["out"].per_member_errors)[:maj.l]
    assert maj.value == pytest.approx(sum(smallest) / maj.l)
    assert maj.value <= estimates["out"].value + 1e-12


def test_majority_estimate_refuses_sampled_sets(threshold_data):
    sampled = CvScheme(kind="mc", n=8, p=0.25, draws=20)
    with pytest.raises(RefusedError):
        r_hat_cv_maj(STUMP, threshold_data, sampled)
    assert not r_hat_cv_out(STUMP, threshold_data, sampled).exact


def test_surrogate_estimates(threshold_data):
    hinge = ConvexSurrogate(c_kind="hinge", clamp=False)
    estimate = r_hat_cv_out(STUMP, threshold_data, CvScheme(kind="kfold", n=8, k=2), hinge)
    zero_one = r_hat_cv_out(STUMP, threshold_data, CvScheme(kind="kfold", n=8, k=2))
    # +/-1 scores: hinge costs 0 when right and 2 when wrong
    assert estimate.value == pytest.approx(min(1.0, 2 * zero_one.value))


def test_true_risk_extremes():
    ghost = Dataset(x=[0.1, 0.6, 0.9], y=[2, 2, 2], labels=(1, 2))
    right = SubaggedEnsemble(members=(_voter(2, 1.0),), aggregation="majority", labels=(1, 2))
    wrong = SubaggedEnsemble(members=(_voter(1, 1.0),), aggregation="majority", labels=(1, 2))
    assert true_risk(right, ghost).value == 0.0
    assert true_risk(wrong, ghost).value == 1.0
    assert true_risk(wrong, ghost).m == 3


def test_true_risk_converges_to_bayes_risk():
    dist = SyntheticDistribution(kind="threshold-noise", flip=0.2)
    bayes = StumpPredictor(labels=(1, 2), direction=1, threshold=dist.theta)
    e = SubaggedEnsemble(members=(EnsembleMember(mask=(1, 0), weight=1.0, predictor=bayes),),
                         aggregation="majority", labels=(1, 2))
    risk = true_risk(e, generate(dist, 20_000, seed=9))
    assert risk.standard_error <= 1 / (2 * math.sqrt(20_000))
    assert abs(risk.value - 0.2) <= 4 * risk.standard_error


def test_surrogate_risk_convexity(threshold_data):
    e = subag_fit(KnnLearner(3), threshold_data, CvScheme(kind="lpo", n=8, v=2))
    ghost = generate(SyntheticDistribution(kind="threshold-noise"), 2000, seed=1)
    for kind in ("hinge", "exponential", "logit"):
        surrogate = ConvexSurrogate(c_kind=kind, clamp=False)
        aggregate = surrogate_risk(e, ghost, surrogate, level="aggregate")
        member = surrogate_risk(e, ghost, surrogate, level="member")
        assert aggregate <= member + 1e-12


def test_mistake_matrix_shape(threshold_data):
    e = subag_fit(STUMP, threshold_data, CvScheme(kind="kfold", n=8, k=4))
    ghost = generate(SyntheticDistribution(kind="threshold-noise"), 50, seed=2)
    matrix = mistake_matrix(e, ghost)
    assert (matrix.m, matrix.members) == (50, 4)
    expected = np.stack([m.predictor.predict(ghost.x) != ghost.y for m in e.members], axis=1)
    assert np.array_equal(matrix.as_array(), expected.astype(int))


def test_regression_ensemble():
    data = generate(SyntheticDistribution(kind="gaussian-regression", sigma=0.1), 8, seed=4)
    loss = LossFunction(kind="clipped-squared")
    e = subag_fit(KnnLearner(2), data, CvScheme(kind="kfold", n=8, k=2))
    predictions = aggregate_predict(e, data.x)
    assert predictions.shape == (8,)
    assert 0.0 <= true_risk(e, data, loss).value <= 1.0
