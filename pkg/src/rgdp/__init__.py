"""Gaussian differential privacy on constant-curvature Riemannian manifolds."""

__version__ = "0.1.0"

from .calibration import (  # noqa: E402
    CalibrationConfig,
    calibrate,
    calibrate_euclidean,
    calibrate_mcmc,
    calibrate_s1,
    h_s1,
    s1_privacy_profile,
)
from .estimators import FrechetMean, PrivateFrechetMean  # noqa: E402
from .gdp import PrivacyBudget, delta_mu, epsdp_to_gdp, gdp_to_epsdp, solve_mu  # noqa: E402
from .manifolds import ManifoldSpec, circle, euclidean, hyperbolic, sphere  # noqa: E402
from .mechanisms import frechet_mean, frechet_sensitivity, gaussian_mechanism, laplace_mechanism  # noqa: E402
from .samplers import ChainConfig, RiemannianGaussian, RiemannianLaplace, mh_sample, s1_exact_sample  # noqa: E402

__all__ = [
    "CalibrationConfig", "ChainConfig", "FrechetMean", "ManifoldSpec", "PrivacyBudget", "PrivateFrechetMean",
    "RiemannianGaussian", "RiemannianLaplace", "calibrate", "calibrate_euclidean", "calibrate_mcmc",
    "calibrate_s1", "circle", "delta_mu", "epsdp_to_gdp", "euclidean", "frechet_mean", "frechet_sensitivity",
    "gaussian_mechanism", "gdp_to_epsdp", "h_s1", "hyperbolic", "laplace_mechanism", "mh_sample",
    "s1_exact_sample", "s1_privacy_profile", "solve_mu", "sphere",
]
