"""Sampling from Riemannian Gaussian and Laplace laws.

The densities are known only up to their normalising constant, so the
generic route is Metropolis-Hastings with an exponential-wrapped isotropic
normal proposal. Exact samplers exist for the circle (a wrapped-back
truncated normal) and for Euclidean space.

On a constant-curvature space the wrapped proposal density from x to y is
a function of d(x, y) alone: the tangent normal density depends on
|log_x y| = d(x, y), the Jacobian of exp_x at log_x y is (sin d / d)^{d-1}
(sphere) or (sinh d / d)^{d-1} (hyperbolic), and the mass lost by refusing
|v| >= inj M is the same at every base point. Hence q(y|x) = q(x|y) and the
Hastings ratio is p(y) / p(x).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import ndtr, ndtri
from scipy.stats import chi2

from . import manifolds as mf
from ._validation import check_count, check_positive, check_random_state
from .manifolds import ManifoldSpec


@dataclass(frozen=True)
class RiemannianGaussian:
    """N_M(footprint, rate^2): density proportional to exp(-d(y, footprint)^2 / (2 rate^2)).

    ``footprint`` may hold a stack of points (shape ``(K, ambient_dim)``);
    sampling then runs ``K`` independent chains.
    """

    manifold: ManifoldSpec
    footprint: np.ndarray
    rate: float

    def __post_init__(self):
        object.__setattr__(self, "footprint", mf.check_points(self.manifold, self.footprint))
        check_positive("rate", self.rate)

    def log_unnormalized_density(self, y):
        d = mf.distance(self.manifold, y, self.footprint)
        return -(d ** 2) / (2.0 * self.rate ** 2)


@dataclass(frozen=True)
class RiemannianLaplace:
    """Riemannian Laplace law: density proportional to exp(-d(y, footprint) / rate)."""

    manifold: ManifoldSpec
    footprint: np.ndarray
    rate: float

    def __post_init__(self):
        object.__setattr__(self, "footprint", mf.check_points(self.manifold, self.footprint))
        check_positive("rate", self.rate)

    def log_unnormalized_density(self, y):
        return -mf.distance(self.manifold, y, self.footprint) / self.rate


Distribution = Union[RiemannianGaussian, RiemannianLaplace]


@dataclass(frozen=True)
class ChainConfig:
    """Metropolis-Hastings settings.

    ``proposal_scale=None`` starts from the target rate. With ``adapt`` the
    scale is tuned during burn-in only, so the retained chain is a
    time-homogeneous MH chain.
    """

    burn_in: int = 1000
    thin: int = 5
    proposal_scale: Optional[float] = None
    adapt: bool = True
    target_acceptance: tuple = (0.2, 0.6)
    max_adjustments: int = 5

    def __post_init__(self):
        check_count("burn_in", self.burn_in, 0)
        check_count("thin", self.thin, 1)
        if self.proposal_scale is not None:
            check_positive("proposal_scale", self.proposal_scale)


@dataclass(frozen=True)
class ChainResult:
    """Retained states, realised post-burn-in acceptance rate and final proposal scale.

    For a single footprint ``samples`` has shape ``(n, ambient_dim)``; for a
    stack of ``K`` footprints, ``(K, n, ambient_dim)`` with per-chain rates.
    """

    samples: np.ndarray
    acceptance_rate: Union[float, np.ndarray]
    proposal_scale: Union[float, np.ndarray]


def log_unnormalized_density(dist: Distribution, y) -> np.ndarray:
    return dist.log_unnormalized_density(mf.check_points(dist.manifold, y))


def proposal_log_density(M: ManifoldSpec, x, y, scale: float) -> np.ndarray:
    """Log density (w.r.t. Riemannian volume) of the wrapped proposal from ``x`` to ``y``.

    Normalised over the proposals that are not refused; written for checking
    the symmetry argument in the module docstring.
    """
    d = mf.distance(M, x, y)
    k = M.dim
    log_tangent = -0.5 * k * np.log(2 * np.pi * scale ** 2) - d ** 2 / (2 * scale ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        if M.kind == "sphere":
            jac = np.where(d > 0, np.sin(d) / d, 1.0)
        elif M.kind == "hyperbolic":
            jac = np.where(d > 0, np.sinh(d) / d, 1.0)
        else:
            jac = np.ones_like(d)
    log_jac = (k - 1) * np.log(jac)
    if M.is_compact:
        kept = chi2.cdf((M.injectivity_radius / scale) ** 2, df=k)
    else:
        kept = 1.0
    return log_tangent - log_jac - np.log(kept)


def mh_sample(dist: Distribution, n: int, cfg: Optional[ChainConfig] = None, rng=None, init=None) -> ChainResult:
    """Metropolis-Hastings draws from ``dist`` with the exponential-wrapped proposal.

    Each step draws v ~ N(0, s^2 I) in the tangent space at the current
    state x. Proposals with |v| >= inj M count as rejections; otherwise
    y = exp_x(v) is accepted with probability min(1, p(y) / p(x)). Chains
    start at the footprint unless ``init`` is given.
    """
    cfg = ChainConfig() if cfg is None else cfg
    rng = check_random_state(rng)
    n = check_count("n", n, 0)
    M = dist.manifold
    eta = dist.footprint
    single = eta.ndim == 1
    eta2 = np.atleast_2d(eta)
    K = eta2.shape[0]
    x = eta2.copy() if init is None else np.array(np.broadcast_to(mf.check_points(M, init), eta2.shape))

    def logp(z):
        d = mf.distance(M, z, eta2)
        if isinstance(dist, RiemannianGaussian):
            return -(d ** 2) / (2.0 * dist.rate ** 2)
        return -d / dist.rate

    scale = np.full(K, cfg.proposal_scale if cfg.proposal_scale is not None else dist.rate, dtype=float)
    inj = M.injectivity_radius
    lx = logp(x)

    def step(x, lx):
        v = mf.random_tangent(M, x, scale, rng)
        ok = mf.norm(M, v) < inj
        y = mf.exp_map(M, x, v)
        ly = logp(y)
        u = rng.uniform(size=K)
        with np.errstate(over="ignore"):
            acc = ok & (np.log(u) < ly - lx)
        x = np.where(acc[:, None], y, x)
        lx = np.where(acc, ly, lx)
        return x, lx, acc

    # Burn-in with windowed scale tuning: double or halve, with the factor
    # square-rooted whenever a chain reverses direction.
    window = max(cfg.burn_in // 10, 1)
    lo_rate, hi_rate = cfg.target_acceptance
    factor = np.full(K, 2.0)
    last_dir = np.zeros(K)
    adjustments = np.zeros(K, dtype=int)
    acc_count = np.zeros(K)
    for t in range(cfg.burn_in):
        x, lx, acc = step(x, lx)
        acc_count += acc
        if cfg.adapt and (t + 1) % window == 0:
            rate = acc_count / window
            direction = np.where(rate < lo_rate, -1.0, np.where(rate > hi_rate, 1.0, 0.0))
            direction[adjustments >= cfg.max_adjustments] = 0.0
            reverse = (direction != 0) & (direction == -last_dir)
            factor = np.where(reverse, np.sqrt(factor), factor)
            scale = scale * factor ** direction
            adjustments += direction != 0
            last_dir = np.where(direction != 0, direction, last_dir)
            acc_count[:] = 0

    out = np.empty((K, n, M.ambient_dim))
    accepted = np.zeros(K)
    for i in range(n):
        for _ in range(cfg.thin):
            x, lx, acc = step(x, lx)
            accepted += acc
        out[:, i] = x
    steps = n * cfg.thin
    rate = accepted / steps if steps else np.full(K, np.nan)
    if single:
        return ChainResult(out[0], float(rate[0]), float(scale[0]))
    return ChainResult(out, rate, scale)


def s1_exact_sample(eta: float, sigma: float, n: int, rng=None) -> np.ndarray:
    """Exact i.i.d. draws of N_{S^1}(eta, sigma^2) as angles in (-pi, pi].

    A normal truncated to (-pi, pi] is drawn by inverse CDF, then rotated by
    ``eta`` and wrapped back.
    """
    rng = check_random_state(rng)
    check_positive("sigma", sigma)
    n = check_count("n", n, 0)
    eta = float(np.asarray(eta, dtype=float).reshape(-1)[0]) if np.ndim(eta) else float(eta)
    lo = ndtr(-np.pi / sigma)
    hi = ndtr(np.pi / sigma)
    u = lo + (hi - lo) * rng.uniform(size=n)
    theta = sigma * ndtri(u)
    return mf.wrap_angle(np.clip(theta, -np.pi, np.pi) + eta)


def exact_sample(dist: Distribution, n: int, rng=None) -> np.ndarray:
    """Exact draws for the Gaussian on the circle or on Euclidean space.

    Supports stacked footprints like :func:`mh_sample`.
    """
    rng = check_random_state(rng)
    M = dist.manifold
    if not isinstance(dist, RiemannianGaussian) or M.kind not in ("circle", "euclidean"):
        raise ValueError("exact sampling is available only for the Gaussian on the circle or Euclidean space")
    n = check_count("n", n, 0)
    eta = dist.footprint
    if M.kind == "euclidean":
        shape = eta.shape[:-1] + (n, M.ambient_dim)
        return eta[..., None, :] + dist.rate * rng.standard_normal(shape)
    lo = ndtr(-np.pi / dist.rate)
    hi = ndtr(np.pi / dist.rate)
    u = lo + (hi - lo) * rng.uniform(size=eta.shape[:-1] + (n, 1))
    theta = np.clip(dist.rate * ndtri(u), -np.pi, np.pi)
    return mf.wrap_angle(theta + eta[..., None, :])


def sample(dist: Distribution, n: int, rng=None, method: str = "auto", cfg: Optional[ChainConfig] = None) -> np.ndarray:
    """Draw ``n`` points; ``method`` is ``"exact"``, ``"mh"`` or ``"auto"`` (exact when available)."""
    if method == "auto":
        exact_ok = isinstance(dist, RiemannianGaussian) and dist.manifold.kind in ("circle", "euclidean")
        method = "exact" if exact_ok else "mh"
    if method == "exact":
        return exact_sample(dist, n, rng)
    if method == "mh":
        return mh_sample(dist, n, cfg, rng).samples
    raise ValueError(f"unknown sampling method {method!r}")
