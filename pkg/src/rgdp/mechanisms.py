"""Private release of Fréchet means with Riemannian Gaussian or Laplace noise."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import manifolds as mf
from ._validation import check_count, check_positive, check_random_state
from .calibration import CalibrationConfig, calibrate
from .gdp import PrivacyBudget, epsdp_to_gdp
from .manifolds import ManifoldSpec
from .samplers import ChainConfig, RiemannianGaussian, RiemannianLaplace, sample


class FrechetConvergenceError(ArithmeticError):
    """Gradient descent for the Fréchet mean hit ``max_iter``."""

    def __init__(self, grad_norm: float, n_iter: int):
        super().__init__(f"Fréchet mean did not converge in {n_iter} iterations (gradient norm {grad_norm:.3g})")
        self.grad_norm = grad_norm
        self.n_iter = n_iter


def max_ball_radius(M: ManifoldSpec) -> float:
    """Largest admissible data radius r* under which the Fréchet mean is unique."""
    kappa = M.curvature
    if kappa > 0:
        return min(M.injectivity_radius, math.pi / (2 * math.sqrt(kappa))) / 2
    return M.injectivity_radius / 2


@dataclass(frozen=True)
class DatasetSpec:
    """Points on ``manifold`` lying in the geodesic ball B_radius(center), radius < r*."""

    manifold: ManifoldSpec
    points: np.ndarray
    center: np.ndarray
    radius: float

    def __post_init__(self):
        M = self.manifold
        object.__setattr__(self, "points", np.atleast_2d(mf.check_points(M, self.points)))
        object.__setattr__(self, "center", mf.check_points(M, self.center))
        check_positive("radius", self.radius)
        if self.radius >= max_ball_radius(M):
            raise ValueError(f"radius {self.radius} must be below r* = {max_ball_radius(M)}")
        d = mf.distance(M, self.points, self.center)
        if np.any(d > self.radius + 1e-12):
            raise ValueError(f"a point lies at distance {d.max():.6g} from the center, beyond radius {self.radius}")

    def frechet_mean(self, **kwargs) -> np.ndarray:
        kwargs.setdefault("init", self.center)
        return frechet_mean(self.manifold, self.points, **kwargs)


@dataclass(frozen=True)
class MechanismOutput:
    released: np.ndarray
    mechanism: str
    noise_param: float
    budget: PrivacyBudget

    def __post_init__(self):
        check_positive("noise_param", self.noise_param)


def frechet_mean(M: ManifoldSpec, points, step: float = 1.0, tol: float = 1e-9, max_iter: int = 1000,
                 init=None, return_info: bool = False):
    """Minimiser of the sum of squared geodesic distances to ``points``.

    Riemannian gradient descent x <- exp_x(step * mean_i log_x(x_i)),
    stopped once the mean log-vector is shorter than ``tol``.

    Raises
    ------
    FrechetConvergenceError
        If ``max_iter`` iterations do not reach ``tol``.
    """
    X = np.atleast_2d(mf.check_points(M, points))
    if X.shape[0] == 0:
        raise ValueError("need at least one point")
    check_positive("step", step)
    check_count("max_iter", max_iter)
    if M.kind == "euclidean":
        x = X.mean(axis=0)
        return (x, 0, 0.0) if return_info else x
    x = X[0].copy() if init is None else mf.check_points(M, init).copy()
    for it in range(max_iter + 1):
        g = mf.log_map(M, x, X).mean(axis=0)
        gnorm = float(mf.norm(M, g))
        if gnorm < tol:
            return (x, it, gnorm) if return_info else x
        if it == max_iter:
            break
        x = mf.exp_map(M, x, step * g)
    raise FrechetConvergenceError(gnorm, max_iter)


def frechet_sensitivity(r: float, kappa: float, n: int, injectivity_radius: Optional[float] = None) -> float:
    """Global sensitivity of the Fréchet mean of ``n`` points in a ball of radius ``r``.

    Bound 2r(2 - h)/(n h) with h = 2r sqrt(kappa) cot(2r sqrt(kappa)) for
    kappa > 0 and h = 1 otherwise. ``injectivity_radius`` defaults to
    pi/sqrt(kappa) for kappa > 0 and infinity otherwise.
    """
    check_positive("r", r)
    n = check_count("n", n)
    if injectivity_radius is None:
        injectivity_radius = math.pi / math.sqrt(kappa) if kappa > 0 else math.inf
    if kappa > 0:
        r_star = min(injectivity_radius, math.pi / (2 * math.sqrt(kappa))) / 2
    else:
        r_star = injectivity_radius / 2
    if r >= r_star:
        raise ValueError(f"r = {r} must be below r* = {r_star}")
    if kappa > 0:
        s = 2 * r * math.sqrt(kappa)
        h = s / math.tan(s)
    else:
        h = 1.0
    return 2 * r * (2 - h) / (n * h)


def gaussian_mechanism(xbar, sigma: float, M: ManifoldSpec, rng=None, delta_sens: Optional[float] = None,
                       budget: Optional[PrivacyBudget] = None, calibration: Optional[CalibrationConfig] = None,
                       chain: Optional[ChainConfig] = None) -> MechanismOutput:
    """Release one draw of N_M(xbar, sigma^2).

    The attached budget is ``budget`` when given, else calibrated from
    ``delta_sens`` (closed form, circle analysis or Monte Carlo depending on
    ``M``). ``xbar`` may be a stack of points; one draw is released for each.
    """
    rng = check_random_state(rng)
    sigma = check_positive("sigma", sigma)
    if budget is None:
        if delta_sens is None:
            raise ValueError("pass either budget or delta_sens")
        budget = calibrate(M, delta_sens, sigma, cfg=calibration, rng=rng)
    dist = RiemannianGaussian(M, xbar, sigma)
    released = sample(dist, 1, rng, cfg=chain)[..., 0, :]
    return MechanismOutput(released, "gaussian", sigma, budget)


def laplace_mechanism(xbar, delta_sens: float, eps: float, M: ManifoldSpec, rng=None,
                      chain: Optional[ChainConfig] = None) -> MechanismOutput:
    """Release one draw of the Riemannian Laplace law with footprint ``xbar`` and rate delta/eps.

    The eps-DP guarantee is reported as the GDP budget it implies.
    """
    rng = check_random_state(rng)
    delta_sens = check_positive("delta_sens", delta_sens)
    eps = check_positive("eps", eps)
    b = delta_sens / eps
    dist = RiemannianLaplace(M, xbar, b)
    released = sample(dist, 1, rng, method="mh", cfg=chain)[..., 0, :]
    return MechanismOutput(released, "laplace", b, PrivacyBudget(float(epsdp_to_gdp(eps)), "closed_form"))
