"""scikit-learn style wrappers around Fréchet-mean estimation and private release."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import manifolds as mf
from ._validation import check_random_state
from .calibration import CalibrationConfig, calibrate
from .gdp import gdp_to_epsdp
from .mechanisms import (
    DatasetSpec,
    frechet_mean,
    frechet_sensitivity,
    gaussian_mechanism,
    laplace_mechanism,
)


def check_manifold_array(manifold, X):
    """Validate a 2-D array of points on ``manifold`` (sklearn ``check_array`` analogue)."""
    if not isinstance(manifold, mf.ManifoldSpec):
        raise TypeError(f"manifold must be a ManifoldSpec, got {type(manifold).__name__}")
    X = np.asarray(X, dtype=float)
    if manifold.kind == "circle" and X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D array of points, got shape {X.shape}")
    if X.shape[0] == 0:
        raise ValueError("found array with 0 samples")
    return mf.check_points(manifold, X)


class FrechetMean(TransformerMixin, BaseEstimator):
    """Fréchet mean of points on a constant-curvature manifold.

    ``transform`` maps points to tangent vectors at the fitted mean (log
    map), so downstream Euclidean estimators can work in that chart.

    Attributes
    ----------
    mean_ : ndarray of shape (ambient_dim,)
    n_iter_ : int
    grad_norm_ : float
    """

    def __init__(self, manifold=None, step=1.0, tol=1e-9, max_iter=1000):
        self.manifold = manifold
        self.step = step
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        X = check_manifold_array(self.manifold, X)
        self.mean_, self.n_iter_, self.grad_norm_ = frechet_mean(
            self.manifold, X, step=self.step, tol=self.tol, max_iter=self.max_iter, return_info=True
        )
        return self

    def transform(self, X):
        check_is_fitted(self, "mean_")
        X = check_manifold_array(self.manifold, X)
        return mf.log_map(self.manifold, self.mean_, X)

    def inverse_transform(self, V):
        check_is_fitted(self, "mean_")
        return mf.exp_map(self.manifold, self.mean_, np.asarray(V, dtype=float))


class PrivateFrechetMean(BaseEstimator):
    """Differentially private Fréchet mean.

    The data must lie in a ball of radius ``radius`` around ``center``
    (defaults to the manifold origin); this fixes the sensitivity of the
    mean. ``mechanism="gaussian"`` adds Riemannian Gaussian noise of rate
    ``sigma`` and calibrates the resulting GDP budget. ``"laplace"`` adds
    Riemannian Laplace noise achieving ``eps``-DP, or, when ``eps`` is None
    and ``mu`` is given, the eps matched to that GDP budget.

    Parameters
    ----------
    manifold : ManifoldSpec
    radius : float
    mechanism : {"gaussian", "laplace"}
    sigma, eps, mu : float, optional
    center : array-like, optional
    calibration : {"auto", "closed-form", "analytic", "mcmc"}
    n, n_eps, m : int
        Monte-Carlo calibration sizes.
    random_state : int or Generator, optional

    Attributes
    ----------
    mean_ : ndarray
        Non-private Fréchet mean.
    private_mean_ : ndarray
    sensitivity_ : float
    noise_param_ : float
        Rate of the noise law (sigma or delta/eps).
    budget_ : PrivacyBudget
    """

    def __init__(self, manifold=None, radius=None, mechanism="gaussian", sigma=None, eps=None, mu=None,
                 center=None, calibration="auto", n=1000, n_eps=1000, m=100, random_state=None):
        self.manifold = manifold
        self.radius = radius
        self.mechanism = mechanism
        self.sigma = sigma
        self.eps = eps
        self.mu = mu
        self.center = center
        self.calibration = calibration
        self.n = n
        self.n_eps = n_eps
        self.m = m
        self.random_state = random_state

    def fit(self, X, y=None):
        M = self.manifold
        X = check_manifold_array(M, X)
        if self.radius is None:
            raise ValueError("radius is required to bound the sensitivity")
        center = M.origin() if self.center is None else self.center
        data = DatasetSpec(M, X, center, self.radius)
        rng = check_random_state(self.random_state)
        self.mean_ = data.frechet_mean()
        self.sensitivity_ = frechet_sensitivity(self.radius, M.curvature, X.shape[0], M.injectivity_radius)
        if self.mechanism == "gaussian":
            if self.sigma is None:
                raise ValueError("sigma is required for the gaussian mechanism")
            cfg = CalibrationConfig(self.sensitivity_, self.sigma, n=self.n, n_eps=self.n_eps, m=self.m)
            budget = calibrate(M, self.sensitivity_, self.sigma, method=self.calibration, cfg=cfg, rng=rng)
            out = gaussian_mechanism(self.mean_, self.sigma, M, rng, budget=budget)
        elif self.mechanism == "laplace":
            eps = self.eps
            if eps is None:
                if self.mu is None:
                    raise ValueError("laplace mechanism needs eps or mu")
                eps = float(gdp_to_epsdp(self.mu))
            out = laplace_mechanism(self.mean_, self.sensitivity_, eps, M, rng)
        else:
            raise ValueError(f"unknown mechanism {self.mechanism!r}")
        self.private_mean_ = out.released
        self.noise_param_ = out.noise_param
        self.budget_ = out.budget
        return self

    def predict(self, X=None):
        """The released private mean (repeated for each row of ``X`` when given)."""
        check_is_fitted(self, "private_mean_")
        if X is None:
            return self.private_mean_
        return np.tile(self.private_mean_, (len(X), 1))
