"""Privacy-budget calibration: the mu that a Riemannian Gaussian of rate sigma buys.

Three routes, from most to least specialised:

* Euclidean space: closed form ``mu = delta / sigma``.
* The circle: the privacy profile has a closed form (:func:`h_s1`); mu is
  the largest GDP budget needed over a grid of eps.
* Any constant-curvature space: Monte-Carlo estimation of the privacy
  profile at one pair of footprints at distance ``delta``
  (:func:`calibrate_mcmc`).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import ndtr

from . import manifolds as mf
from ._validation import check_count, check_positive, check_random_state
from .gdp import EpsCurve, PrivacyBudget, Spread, check_monotone, solve_mu
from .manifolds import ManifoldSpec
from .samplers import ChainConfig, RiemannianGaussian, exact_sample, mh_sample

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CalibrationConfig:
    """Inputs of the Monte-Carlo calibration.

    Parameters
    ----------
    delta_sens : float
        Global sensitivity (geodesic distance between neighbouring releases).
    sigma : float
        Rate of the Riemannian Gaussian.
    n : int
        Samples per distribution and replicate.
    n_eps : int
        Size of the eps grid {k, 2k, ..., n_eps k}, k = eps_max / n_eps.
    eps_max : float, optional
        Largest eps examined; :func:`default_eps_max` when omitted.
    m : int
        Number of replicates averaged.
    seed : int, optional
    sampler : {"auto", "exact", "mh"}
        ``auto`` samples exactly on the circle and Euclidean space.
    chain : ChainConfig, optional
        Metropolis-Hastings settings for the ``mh`` sampler.
    """

    delta_sens: float
    sigma: float
    n: int = 1000
    n_eps: int = 1000
    eps_max: Optional[float] = None
    m: int = 100
    seed: Optional[int] = None
    sampler: str = "auto"
    chain: Optional[ChainConfig] = None

    def __post_init__(self):
        check_positive("delta_sens", self.delta_sens)
        check_positive("sigma", self.sigma)
        check_count("n", self.n)
        check_count("n_eps", self.n_eps)
        check_count("m", self.m)
        if self.eps_max is not None:
            check_positive("eps_max", self.eps_max)
        if self.sampler not in ("auto", "exact", "mh"):
            raise ValueError(f"unknown sampler {self.sampler!r}")


def eps_grid(eps_max: float, n_eps: int) -> np.ndarray:
    """The grid {k, 2k, ..., n_eps k} with k = eps_max / n_eps; the last point is eps_max exactly."""
    check_positive("eps_max", eps_max)
    n_eps = check_count("n_eps", n_eps)
    return eps_max * np.arange(1, n_eps + 1) / n_eps


def default_eps_max(M: ManifoldSpec, delta_sens: float, sigma: float) -> float:
    """pi delta / (2 sigma^2) on the circle, max(10, 5/sigma + delta^2/(2 sigma^2)) elsewhere."""
    if M.kind == "circle":
        return np.pi * delta_sens / (2 * sigma ** 2)
    return max(10.0, 5.0 / sigma + delta_sens ** 2 / (2 * sigma ** 2))


def s1_normalizer(sigma: float) -> float:
    """C(sigma) = Phi(pi/sigma) - Phi(-pi/sigma)."""
    return float(ndtr(np.pi / sigma) - ndtr(-np.pi / sigma))


def h_s1(sigma: float, eps, delta_sens: float):
    """Closed-form privacy profile of the circle Gaussian mechanism.

    Valid for sensitivity ``delta_sens`` in (0, pi] and eps in
    [0, pi delta / (2 sigma^2)]; vectorised over ``eps``.
    """
    sigma = check_positive("sigma", sigma)
    D = check_positive("delta_sens", delta_sens)
    if D > np.pi:
        raise ValueError(f"sensitivity on the circle must lie in (0, pi], got {D}")
    eps = np.asarray(eps, dtype=float)
    top = np.pi * D / (2 * sigma ** 2)
    if np.any(eps < 0) or np.any(eps > top * (1 + 1e-12)):
        raise ValueError(f"eps must lie in [0, {top}]")
    C = s1_normalizer(sigma)
    a = sigma * eps / D
    b = D / (2 * sigma)
    c = np.pi / sigma
    near = eps <= D ** 2 / (2 * sigma ** 2)
    e = np.exp(eps)
    first = ndtr(-a + b) - e * ndtr(-a - b)
    second = ndtr(a + b - c) - e * ndtr(a - b + np.where(near, c, -c))
    out = (first - second) / C - e * near
    return out[()] if out.ndim == 0 else out


def _s1_arc_mass(a, b, sigma: float):
    """Mass of the centred circle Gaussian on the arc [a, b], with 0 <= b - a <= 2 pi."""
    C = s1_normalizer(sigma)
    G = lambda x: (ndtr(x / sigma) - ndtr(-np.pi / sigma)) / C
    a = np.asarray(a, dtype=float)
    length = np.asarray(b, dtype=float) - a
    a = mf.wrap_angle(a)
    a = np.where(a == np.pi, -np.pi, a)
    b = a + length
    wraps = b > np.pi
    return np.where(wraps, 1.0 - G(a) + G(np.where(wraps, b - 2 * np.pi, -np.pi)), G(np.minimum(b, np.pi)) - G(a))


def s1_privacy_profile(sigma: float, eps, delta_sens: float):
    """Exact privacy profile P_eta(A) - e^eps P_eta'(A) of the circle Gaussian pair at distance ``delta_sens``.

    With eta = 0 and eta' = delta, the likelihood-ratio set
    A = {y : d(eta', y)^2 - d(eta, y)^2 >= 2 sigma^2 eps} is the arc
    [-pi + delta/2 + sigma^2 eps/(2 pi - delta), delta/2 - sigma^2 eps/delta],
    empty once eps exceeds delta (2 pi - delta) / (2 sigma^2). Unlike
    :func:`h_s1` the lower end accounts for the far side of the circle,
    so this is the quantity the Monte-Carlo route estimates.
    """
    sigma = check_positive("sigma", sigma)
    D = check_positive("delta_sens", delta_sens)
    if D > np.pi:
        raise ValueError(f"sensitivity on the circle must lie in (0, pi], got {D}")
    eps = np.asarray(eps, dtype=float)
    if np.any(eps < 0):
        raise ValueError("eps must be non-negative")
    lo = -np.pi + D / 2 + sigma ** 2 * eps / (2 * np.pi - D)
    hi = D / 2 - sigma ** 2 * eps / D
    nonempty = hi > lo
    hi = np.where(nonempty, hi, lo)
    out = _s1_arc_mass(lo, hi, sigma) - np.exp(eps) * _s1_arc_mass(lo - D, hi - D, sigma)
    out = np.where(nonempty, np.maximum(out, 0.0), 0.0)
    return out[()] if out.ndim == 0 else out


def calibrate_euclidean(delta_sens: float, sigma: float) -> PrivacyBudget:
    return PrivacyBudget(check_positive("delta_sens", delta_sens) / check_positive("sigma", sigma), "closed_form")


def calibrate_s1(delta_sens: float, sigma: float, n_eps: int = 1000) -> PrivacyBudget:
    """Budget on the circle from the closed-form profile over an eps grid."""
    check_positive("delta_sens", delta_sens)
    if delta_sens > np.pi:
        raise ValueError(f"sensitivity on the circle must lie in (0, pi], got {delta_sens}")
    check_monotone()
    eps = eps_grid(np.pi * delta_sens / (2 * sigma ** 2), n_eps)
    level = h_s1(sigma, eps, delta_sens)
    mu_eps = solve_mu(eps, level)
    return PrivacyBudget(float(mu_eps.max()), "analytic_s1", curve=EpsCurve(eps, level, mu_eps))


def _tail_counts(values: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """Row-wise count of ``values >= t`` for every threshold t."""
    ordered = np.sort(values, axis=-1)
    n = ordered.shape[-1]
    return n - np.stack([np.searchsorted(row, thresholds, side="left") for row in ordered])


def profile_levels(d_near: np.ndarray, d_far: np.ndarray, eps: np.ndarray, sigma: float) -> np.ndarray:
    """Per-replicate Monte-Carlo privacy-profile estimates.

    ``d_near`` and ``d_far`` hold d(eta', y)^2 - d(eta, y)^2 for draws around
    eta and eta' respectively, shape ``(m, n)``. Returns ``(m, n_eps)``.
    Ties at the threshold count as inside the set.
    """
    t = 2.0 * sigma ** 2 * eps
    n = d_near.shape[-1]
    inside_near = _tail_counts(d_near, t) / n
    inside_far = _tail_counts(d_far, t) / d_far.shape[-1]
    return inside_near - np.exp(eps) * inside_far


def calibrate_mcmc(M: ManifoldSpec, cfg: CalibrationConfig, rng=None) -> PrivacyBudget:
    """Monte-Carlo budget for the Riemannian Gaussian mechanism on ``M``.

    One footprint pair (eta, eta') at distance ``cfg.delta_sens`` suffices on
    constant-curvature spaces. For each of ``cfg.m`` replicates, ``cfg.n``
    draws around each footprint estimate the privacy profile on the eps
    grid; the profiles are averaged, inverted to mu_eps and maximised.

    The returned budget's ``spread`` summarises the budgets of the
    individual replicates, and its ``curve`` carries the averaged profile
    with its standard error across replicates.
    """
    if not isinstance(M, ManifoldSpec):
        raise TypeError("calibrate_mcmc needs a constant-curvature ManifoldSpec")
    if M.is_compact and cfg.delta_sens >= M.injectivity_radius:
        raise ValueError(f"sensitivity {cfg.delta_sens} must be below the injectivity radius {M.injectivity_radius}")
    rng = check_random_state(cfg.seed if rng is None else rng)
    check_monotone()
    sigma = cfg.sigma
    eps_max = default_eps_max(M, cfg.delta_sens, sigma) if cfg.eps_max is None else cfg.eps_max
    eps = eps_grid(eps_max, cfg.n_eps)

    eta = mf.random_point(M, rng)
    eta_far = mf.random_point_at_distance(M, eta, cfg.delta_sens, rng)
    foot = np.concatenate([np.broadcast_to(eta, (cfg.m, M.ambient_dim)),
                           np.broadcast_to(eta_far, (cfg.m, M.ambient_dim))])
    dist = RiemannianGaussian(M, foot, sigma)
    method = cfg.sampler
    if method == "auto":
        method = "exact" if M.kind in ("circle", "euclidean") else "mh"
    if method == "exact":
        y = exact_sample(dist, cfg.n, rng)
    else:
        res = mh_sample(dist, cfg.n, cfg.chain, rng)
        y = res.samples
        logger.debug("MH acceptance %.3f..%.3f", res.acceptance_rate.min(), res.acceptance_rate.max())

    score = mf.distance(M, y, eta_far) ** 2 - mf.distance(M, y, eta) ** 2
    levels = profile_levels(score[: cfg.m], score[cfg.m:], eps, sigma)

    # A level of exactly 1 (disjoint samples) has no finite mu; cap it just below.
    levels = np.minimum(levels, 1.0 - 1e-12)
    level = levels.mean(axis=0)
    se = levels.std(axis=0, ddof=1) / np.sqrt(cfg.m) if cfg.m > 1 else np.full(eps.shape, np.nan)
    mu_eps = solve_mu(eps, level)
    per_rep = solve_mu(eps[None, :], levels).max(axis=1)
    spread = Spread(float(per_rep.min()), float(per_rep.max()), float(per_rep.mean()))
    return PrivacyBudget(float(mu_eps.max()), "monte_carlo", spread=spread, curve=EpsCurve(eps, level, mu_eps, se))


def calibrate(M: ManifoldSpec, delta_sens: float, sigma: float, method: str = "auto",
              cfg: Optional[CalibrationConfig] = None, rng=None) -> PrivacyBudget:
    """Dispatch to the closed form, the circle analysis or Monte Carlo.

    ``method="auto"`` picks ``closed-form`` on Euclidean space, ``analytic``
    on the circle and ``mcmc`` otherwise.
    """
    if method == "auto":
        method = {"euclidean": "closed-form", "circle": "analytic"}.get(M.kind, "mcmc")
    if method == "closed-form":
        if M.kind != "euclidean":
            raise ValueError("the closed form holds only on Euclidean space")
        return calibrate_euclidean(delta_sens, sigma)
    if method == "analytic":
        if M.kind != "circle":
            raise ValueError("the analytic route is specific to the circle")
        return calibrate_s1(delta_sens, sigma, 1000 if cfg is None else cfg.n_eps)
    if method == "mcmc":
        if cfg is None:
            cfg = CalibrationConfig(delta_sens, sigma)
        return calibrate_mcmc(M, cfg, rng)
    raise ValueError(f"unknown calibration method {method!r}")
