"""Reproducible experiment drivers behind the command-line interface.

Seeds: every row derives its own stream from ``(seed, tag, row index,
replicate)`` so individual rows can be recomputed in isolation.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from . import manifolds as mf
from ._validation import check_random_state, derive_seed
from .calibration import CalibrationConfig, calibrate_euclidean, calibrate_mcmc, calibrate_s1, default_eps_max
from .gdp import gdp_to_epsdp
from .mechanisms import frechet_mean, frechet_sensitivity
from .samplers import RiemannianGaussian, RiemannianLaplace, mh_sample

TAG_FIG1 = 1
TAG_UTILITY = 2

FIG1_COLUMNS = ("sigma", "mu_exact", "mu_mc_mean", "mu_mc_min", "mu_mc_max")
UTILITY_COLUMNS = ("sigma", "mu", "eps", "dist_gauss_mean", "dist_gauss_se", "dist_laplace_mean", "dist_laplace_se")


def _map(fn, items, threads: Optional[int]):
    items = list(items)
    if threads is not None and threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def fig1_budget(target: str = "circle", seed: int = 0, ks=range(1, 17), delta_sens: float = 1.0,
                replicates: int = 20, n: int = 1000, n_eps: int = 1000, m: int = 100,
                threads: Optional[int] = None) -> list[dict]:
    """Budget vs rate on the circle or the real line, sigma = k/4.

    ``mu_exact`` is the closed form (line) or the circle analysis; the
    ``mu_mc_*`` columns summarise ``replicates`` independent Monte-Carlo
    calibrations.
    """
    if target not in ("circle", "euclidean"):
        raise ValueError(f"target must be 'circle' or 'euclidean', got {target!r}")
    M = mf.circle() if target == "circle" else mf.euclidean(1)
    rows = []
    for k in ks:
        sigma = k / 4
        exact = calibrate_s1(delta_sens, sigma, n_eps) if target == "circle" else calibrate_euclidean(delta_sens, sigma)
        cfg = CalibrationConfig(delta_sens, sigma, n=n, n_eps=n_eps, m=m,
                                eps_max=default_eps_max(M, delta_sens, sigma))

        def one(r, k=k, cfg=cfg):
            return calibrate_mcmc(M, cfg, check_random_state(derive_seed(seed, TAG_FIG1, k, r))).mu

        mus = np.array(_map(one, range(replicates), threads))
        rows.append({"sigma": sigma, "mu_exact": exact.mu, "mu_mc_mean": float(mus.mean()),
                     "mu_mc_min": float(mus.min()), "mu_mc_max": float(mus.max())})
    return rows


def utility_row(sigma: float, seed: int = 0, key: int = 0, repetitions: int = 1000, n_points: int = 10,
                radius: float = math.pi / 8, dim: int = 2, n: int = 1000, n_eps: int = 1000, m: int = 100) -> dict:
    """One sigma of the sphere utility comparison (Gaussian vs Laplace private means).

    The Gaussian budget is calibrated by Monte Carlo on S^dim and converted
    to the matching eps for the Laplace mechanism. Each repetition draws
    ``n_points`` data points from a ``radius``-ball, computes their Fréchet
    mean and releases it once with each mechanism.
    """
    M = mf.sphere(dim)
    root = derive_seed(seed, TAG_UTILITY, key)
    cal_seed, data_seed, gauss_seed, lap_seed = root.spawn(4)
    delta = frechet_sensitivity(radius, M.curvature, n_points, M.injectivity_radius)
    budget = calibrate_mcmc(M, CalibrationConfig(delta, sigma, n=n, n_eps=n_eps, m=m), check_random_state(cal_seed))
    if budget.mu <= 0:
        raise ArithmeticError(f"Monte-Carlo budget at sigma={sigma} is zero; no eps for the Laplace comparison "
                              "(increase n or m)")
    eps = float(gdp_to_epsdp(budget.mu))

    rng = check_random_state(data_seed)
    center = M.origin()
    means = np.empty((repetitions, M.ambient_dim))
    for i in range(repetitions):
        X = mf.sample_ball(M, center, radius, n_points, rng)
        means[i] = frechet_mean(M, X, init=center)

    g = mh_sample(RiemannianGaussian(M, means, sigma), 1, rng=check_random_state(gauss_seed)).samples[:, 0]
    lap = mh_sample(RiemannianLaplace(M, means, delta / eps), 1, rng=check_random_state(lap_seed)).samples[:, 0]
    dg = mf.distance(M, means, g)
    dl = mf.distance(M, means, lap)
    root_n = math.sqrt(repetitions)
    return {"sigma": sigma, "mu": budget.mu, "eps": eps,
            "dist_gauss_mean": float(dg.mean()), "dist_gauss_se": float(dg.std(ddof=1) / root_n),
            "dist_laplace_mean": float(dl.mean()), "dist_laplace_se": float(dl.std(ddof=1) / root_n)}


def sphere_utility(seed: int = 0, ks=range(1, 13), threads: Optional[int] = None, **kwargs) -> list[dict]:
    """Utility comparison over sigma = k/4 (one row per k)."""
    return _map(lambda k: utility_row(k / 4, seed=seed, key=k, **kwargs), ks, threads)
