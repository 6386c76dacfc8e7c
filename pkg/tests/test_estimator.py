import numpy as np
import pytest
from sklearn.base import clone

from probit_ep import PriorConfig, ProbitEP, SimConfig, simulate


@pytest.fixture
def small_instance():
    data, beta = simulate(SimConfig(n=40, p=6, seed=77), PriorConfig(4.0))
    return data.X, data.y


def test_fit_sets_sklearn_attributes(small_instance):
    X, y = small_instance
    est = ProbitEP(nu2=4.0).fit(X, y)
    assert est.n_features_in_ == 6
    assert est.coef_.shape == (6,)
    assert est.coef_sd_.shape == (6,)
    assert list(est.classes_) == [0, 1]
    assert est.algorithm_used_ == "dense"  # p < n
    assert est.report_.converged


def test_auto_switches_to_lowrank():
    data, _ = simulate(SimConfig(n=10, p=30, seed=5), PriorConfig(1.0))
    est = ProbitEP(nu2=1.0).fit(data.X, data.y)
    assert est.algorithm_used_ == "lowrank"


def test_explicit_algorithm_override(small_instance):
    X, y = small_instance
    dense = ProbitEP(nu2=4.0, algorithm="dense").fit(X, y)
    lowrank = ProbitEP(nu2=4.0, algorithm="lowrank").fit(X, y)
    np.testing.assert_allclose(dense.coef_, lowrank.coef_, atol=1e-8)
    np.testing.assert_allclose(
        dense.predict_proba(X), lowrank.predict_proba(X), atol=1e-8
    )
    with pytest.raises(ValueError):
        ProbitEP(algorithm="exact").fit(X, y)


def test_predict_proba_is_a_distribution(small_instance):
    X, y = small_instance
    proba = ProbitEP(nu2=4.0).fit(X, y).predict_proba(X)
    assert proba.shape == (40, 2)
    assert np.all(proba >= 0.0) and np.all(proba <= 1.0)
    np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-12)


def test_predict_labels_and_score(small_instance):
    X, y = small_instance
    est = ProbitEP(nu2=4.0).fit(X, y)
    labels = est.predict(X)
    assert set(np.unique(labels)) <= {0, 1}
    # EP posterior mean should separate the training data reasonably well
    assert est.score(X, y) > 0.7


def test_predict_validates_width(small_instance):
    X, y = small_instance
    est = ProbitEP(nu2=4.0).fit(X, y)
    with pytest.raises(ValueError):
        est.predict(np.ones((3, 5)))


def test_get_params_round_trip_and_clone(small_instance):
    X, y = small_instance
    est = ProbitEP(nu2=9.0, algorithm="dense", tol=1e-6, max_sweeps=50, damping=0.8)
    params = est.get_params()
    assert params == {
        "nu2": 9.0,
        "algorithm": "dense",
        "tol": 1e-6,
        "max_sweeps": 50,
        "damping": 0.8,
    }
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(nu2=1.0)
    assert est.nu2 == 1.0


def test_posterior_uncertainty_widens_predictions(small_instance):
    # the moderated probit pulls probabilities toward 1/2 relative to a
    # plug-in of the posterior mean
    X, y = small_instance
    est = ProbitEP(nu2=4.0).fit(X, y)
    from scipy.special import ndtr

    plug_in = ndtr(X @ est.coef_)
    moderated = est.predict_proba(X)[:, 1]
    assert np.all(np.abs(moderated - 0.5) <= np.abs(plug_in - 0.5) + 1e-12)
