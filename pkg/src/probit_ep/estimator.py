"""Scikit-learn style estimator wrapping the EP fitting routines.

ProbitEP exposes the usual fit / predict / predict_proba surface so the
approximation can sit in sklearn pipelines and be configured through
get_params / set_params.  The heavy lifting stays in ep_dense and
ep_lowrank; this class only adapts conventions.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtr
from sklearn.base import BaseEstimator, ClassifierMixin

from .ep_dense import EPConfig, ep_dense_fit
from .ep_lowrank import ep_lowrank_fit, select_algorithm
from .model_data import PriorConfig, validate

__all__ = ["ProbitEP"]


class ProbitEP(BaseEstimator, ClassifierMixin):
    """Bayesian probit classifier fitted by expectation propagation.

    Parameters
    ----------
    nu2 : float, prior variance of the isotropic Gaussian prior on the
        coefficients.
    algorithm : 'auto' | 'dense' | 'lowrank'.  'auto' picks 'lowrank'
        when p >= n.  Both give the same posterior; they differ in cost.
    tol, max_sweeps, damping : EP convergence controls, see EPConfig.

    Attributes (set by fit)
    ----------
    coef_ : posterior mean of the coefficients, shape (p,).
    coef_sd_ : posterior marginal standard deviations, shape (p,).
    algorithm_used_ : which variant actually ran.
    report_ : FitReport with sweep counts and skip diagnostics.
    """

    def __init__(
        self,
        nu2: float = 1.0,
        algorithm: str = "auto",
        tol: float = 1e-5,
        max_sweeps: int = 200,
        damping: float = 1.0,
    ):
        self.nu2 = nu2
        self.algorithm = algorithm
        self.tol = tol
        self.max_sweeps = max_sweeps
        self.damping = damping

    def fit(self, X, y) -> "ProbitEP":
        data = validate(np.asarray(X, dtype=float), np.asarray(y))
        prior = PriorConfig(nu2=self.nu2)
        cfg = EPConfig(tol=self.tol, max_sweeps=self.max_sweeps, damping=self.damping)
        algorithm = self.algorithm
        if algorithm == "auto":
            algorithm = select_algorithm(data.n, data.p)
        if algorithm == "dense":
            summary, sites, state, report = ep_dense_fit(data, prior, cfg)
        elif algorithm == "lowrank":
            summary, sites, state, report = ep_lowrank_fit(data, prior, cfg)
        else:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = data.p
        self.coef_ = summary.mean
        self.coef_sd_ = summary.sd
        self.summary_ = summary
        self.sites_ = sites
        self.state_ = state
        self.report_ = report
        self.algorithm_used_ = algorithm
        self._train_X = data.X
        return self

    def _linear_stats(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Predictive mean and variance of x' beta for each row of X."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected 2-d input with {self.n_features_in_} columns, got {X.shape}"
            )
        mu = X @ self.coef_
        if self.algorithm_used_ == "dense":
            var = np.einsum("ij,jk,ik->i", X, self.state_.Qinv, X)
        else:
            # Q^{-1} = nu2 (I - V K X) on the training rows
            t1 = X @ self.state_.V
            t2 = self._train_X @ X.T
            k = self.state_.sites.k
            var = self.nu2 * (
                np.einsum("ij,ij->i", X, X) - np.einsum("in,n,ni->i", t1, k, t2)
            )
        return mu, np.clip(var, 0.0, None)

    def predict_proba(self, X) -> np.ndarray:
        """Posterior predictive P(y | x), averaging over coefficient uncertainty.

        For a Gaussian posterior the probit average has the closed form
        Phi(x' mu / sqrt(1 + x' Cov x)).
        """
        mu, var = self._linear_stats(X)
        p1 = ndtr(mu / np.sqrt(1.0 + var))
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X) -> np.ndarray:
        return self.classes_[(self.predict_proba(X)[:, 1] >= 0.5).astype(int)]
