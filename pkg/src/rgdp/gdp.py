"""Scalar Gaussian-differential-privacy machinery.

A mechanism is mu-GDP when it is (eps, delta_mu(eps))-DP for every eps >= 0,
with

    delta_mu(eps) = Phi(-eps/mu + mu/2) - exp(eps) * Phi(-eps/mu - mu/2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit, log_ndtr, ndtr, ndtri

METHODS = ("closed_form", "analytic_s1", "monte_carlo")


def normal_cdf(x):
    return ndtr(x)


def normal_ppf(p):
    return ndtri(p)


@dataclass(frozen=True)
class Spread:
    min: float
    max: float
    mean: float


@dataclass(frozen=True)
class PrivacyBudget:
    """A GDP budget ``mu`` together with how it was obtained.

    ``spread`` summarises replicate-level budgets for Monte-Carlo estimates;
    ``curve`` optionally holds the (eps, l_eps, mu_eps) grid behind ``mu``.
    """

    mu: float
    method: str
    spread: Optional[Spread] = None
    curve: Optional["EpsCurve"] = None

    def __post_init__(self):
        if not self.mu >= 0:
            raise ValueError(f"mu must be non-negative, got {self.mu}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "monte_carlo":
            s = self.spread
            if s is None or not s.min <= s.mean <= s.max:
                raise ValueError("monte_carlo budgets need a spread with min <= mean <= max")


@dataclass(frozen=True)
class EpsCurve:
    eps: np.ndarray
    level: np.ndarray
    mu: np.ndarray
    se: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.eps.size and np.any(np.diff(self.eps) <= 0):
            raise ValueError("eps grid must be strictly increasing")


@dataclass(frozen=True)
class DpPoint:
    eps: float
    delta: float

    def __post_init__(self):
        if not self.eps >= 0:
            raise ValueError(f"eps must be non-negative, got {self.eps}")
        if not 0 <= self.delta < 1:
            raise ValueError(f"delta must lie in [0, 1), got {self.delta}")


def delta_mu(mu, eps):
    """Privacy profile of mu-GDP evaluated at ``eps`` (broadcasts)."""
    mu = np.asarray(mu, dtype=float)
    eps = np.asarray(eps, dtype=float)
    if np.any(mu <= 0):
        raise ValueError("mu must be positive")
    if np.any(eps < 0):
        raise ValueError("eps must be non-negative")
    first = ndtr(-eps / mu + mu / 2)
    # exp(eps) * Phi(.) evaluated in log space so large eps does not overflow.
    second = np.exp(eps + log_ndtr(-eps / mu - mu / 2))
    # Mathematically >= 0; clip the last-ulp cancellation.
    out = np.maximum(first - second, 0.0)
    return out[()] if out.ndim == 0 else out


def solve_mu(eps, delta_target, tol: float = 1e-9, lower: float = 1e-8, upper: float = 100.0):
    """Smallest mu with ``delta_mu(mu, eps) >= delta_target``, by bisection.

    Vectorised over broadcast ``eps`` / ``delta_target``. Targets <= 0 impose
    no constraint and map to 0.
    """
    eps, target = np.broadcast_arrays(np.asarray(eps, dtype=float), np.asarray(delta_target, dtype=float))
    if np.any(target >= 1):
        raise ValueError("delta_target must be < 1")
    if np.any(eps < 0):
        raise ValueError("eps must be non-negative")
    active = target > 0
    out = np.zeros(eps.shape)
    if not np.any(active):
        return out[()] if out.ndim == 0 else out
    e = eps[active]
    t = target[active]
    lo = np.full(e.shape, lower)
    hi = np.full(e.shape, upper)
    while True:
        short = delta_mu(hi, e) < t
        if not np.any(short):
            break
        lo = np.where(short, hi, lo)
        hi = np.where(short, 2 * hi, hi)
        if np.any(hi > 1e6):
            raise ArithmeticError("could not bracket mu")
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        ok = delta_mu(mid, e) >= t
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    out[active] = hi
    return out[()] if out.ndim == 0 else out


def epsdp_to_gdp(eps):
    """GDP budget implied by pure eps-DP: ``mu = -2 Phi^{-1}(1 / (1 + e^eps))``."""
    eps = np.asarray(eps, dtype=float)
    if np.any(eps < 0):
        raise ValueError("eps must be non-negative")
    out = -2.0 * ndtri(expit(-eps))
    return out[()] if out.ndim == 0 else out


def gdp_to_epsdp(mu):
    """Inverse of :func:`epsdp_to_gdp`: ``eps = log[(1 - Phi(-mu/2)) / Phi(-mu/2)]``."""
    mu = np.asarray(mu, dtype=float)
    if np.any(mu <= 0):
        raise ValueError("mu must be positive")
    out = log_ndtr(mu / 2) - log_ndtr(-mu / 2)
    return out[()] if out.ndim == 0 else out


def check_monotone(mus=None, epss=None) -> None:
    """Verify delta_mu is non-increasing in eps and non-decreasing in mu on a grid.

    Bisection in :func:`solve_mu` relies on the latter; calibration calls this
    once before solving.
    """
    mus = np.linspace(0.1, 10, 100) if mus is None else np.asarray(mus, dtype=float)
    epss = np.linspace(0, 10, 101) if epss is None else np.asarray(epss, dtype=float)
    grid = delta_mu(mus[:, None], epss[None, :])
    if np.any(grid < 0) or np.any(grid >= 1):
        raise ArithmeticError("delta_mu left [0, 1) on the check grid")
    if np.any(np.diff(grid, axis=1) > 1e-15):
        raise ArithmeticError("delta_mu is not non-increasing in eps on the check grid")
    if np.any(np.diff(grid, axis=0) < -1e-15):
        raise ArithmeticError("delta_mu is not non-decreasing in mu on the check grid")
