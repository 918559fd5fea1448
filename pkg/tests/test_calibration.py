import numpy as np
import pytest
from scipy import integrate

from rgdp import manifolds as mf
from rgdp.calibration import (
    CalibrationConfig,
    calibrate,
    calibrate_euclidean,
    calibrate_mcmc,
    calibrate_s1,
    default_eps_max,
    eps_grid,
    h_s1,
    profile_levels,
    s1_normalizer,
    s1_privacy_profile,
)
from rgdp.gdp import solve_mu

CIRCLE = mf.circle()


def _circ(a, b):
    x = np.abs(a - b)
    return np.minimum(x, 2 * np.pi - x)


def closed_form_oracle(sigma, eps, delta):
    """Quadrature of both integrals over the arc [pi + s^2 e / D, 2 pi - s^2 e / D], footprints 2 pi - D/2 and D/2."""
    Z = sigma * np.sqrt(2 * np.pi) * s1_normalizer(sigma)
    e1, e2 = 2 * np.pi - delta / 2, delta / 2
    lo, hi = np.pi + sigma ** 2 * eps / delta, 2 * np.pi - sigma ** 2 * eps / delta
    if hi <= lo:
        return 0.0
    pts = [x for x in (e1, e2 + np.pi) if lo < x < hi] or None
    mass = lambda eta: integrate.quad(lambda t: np.exp(-_circ(t, eta) ** 2 / (2 * sigma ** 2)) / Z, lo, hi,
                                      points=pts, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    return mass(e1) - np.exp(eps) * mass(e2)


def exact_profile_oracle(sigma, eps, delta):
    """Quadrature of (p_eta - e^eps p_eta') over the likelihood-ratio set, found by brute-force breakpoints."""
    Z = integrate.quad(lambda t: np.exp(-t * t / (2 * sigma ** 2)), -np.pi, np.pi)[0]
    f = lambda t, eta: np.exp(-_circ(t, eta) ** 2 / (2 * sigma ** 2)) / Z
    inside = lambda t: _circ(t, delta) ** 2 - _circ(t, 0.0) ** 2 >= 2 * sigma ** 2 * eps
    g = lambda t: (f(t, 0.0) - np.exp(eps) * f(t, delta)) * inside(t)
    # Breakpoints: the set boundaries are roots of piecewise quadratics; locate them on a fine grid.
    grid = np.linspace(-np.pi, np.pi, 200_001)
    flips = grid[1:][np.diff(inside(grid).astype(int)) != 0]
    cuts = np.unique(np.concatenate([[-np.pi, np.pi, 0.0, delta, delta - np.pi], flips]))
    cuts = cuts[(cuts >= -np.pi) & (cuts <= np.pi)]
    return sum(integrate.quad(g, a, b, epsabs=1e-14, limit=200)[0] for a, b in zip(cuts[:-1], cuts[1:]))


class TestClosedFormProfile:
    @pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
    def test_matches_quadrature(self, sigma):
        for eps in np.linspace(0, np.pi / (2 * sigma ** 2), 20):
            assert h_s1(sigma, eps, 1.0) == pytest.approx(closed_form_oracle(sigma, eps, 1.0), abs=1e-6)

    def test_example_point(self):
        assert h_s1(1.0, 0.5, 1.0) == pytest.approx(closed_form_oracle(1.0, 0.5, 1.0), abs=1e-6)

    @pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
    def test_vanishes_at_eps_max(self, sigma):
        assert abs(h_s1(sigma, np.pi / (2 * sigma ** 2), 1.0)) < 1e-12

    def test_normalizer(self):
        assert s1_normalizer(1.0) == pytest.approx(0.9983196836634733, abs=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            h_s1(1.0, 2.0, 1.0)
        with pytest.raises(ValueError):
            h_s1(1.0, -0.1, 1.0)
        with pytest.raises(ValueError):
            h_s1(1.0, 0.1, 4.0)

    def test_vectorised(self):
        eps = np.linspace(0, np.pi / 2, 7)
        np.testing.assert_allclose(h_s1(1.0, eps, 1.0), [h_s1(1.0, e, 1.0) for e in eps])


class TestExactProfile:
    @pytest.mark.parametrize("sigma, delta", [(0.5, 1.0), (1.0, 1.0), (2.0, 0.3), (4.0, 3.0)])
    def test_matches_brute_force(self, sigma, delta):
        top = delta * (2 * np.pi - delta) / (2 * sigma ** 2)
        for eps in np.linspace(0, 1.05 * top, 12):
            assert s1_privacy_profile(sigma, eps, delta) == pytest.approx(
                exact_profile_oracle(sigma, eps, delta), abs=1e-6)

    def test_agrees_with_closed_form_at_small_eps(self):
        eps = np.linspace(0, 0.05, 20)
        np.testing.assert_allclose(s1_privacy_profile(1.0, eps, 1.0), h_s1(1.0, eps, 1.0), atol=1e-4)

    def test_budget_nearly_unchanged(self):
        for sigma in (1.0, 2.0, 4.0):
            eps = eps_grid(np.pi / (2 * sigma ** 2), 1000)
            exact = solve_mu(eps, s1_privacy_profile(sigma, eps, 1.0)).max()
            assert exact == pytest.approx(calibrate_s1(1.0, sigma).mu, abs=1e-6)


class TestEuclidean:
    @pytest.mark.parametrize("delta, sigma, mu", [(1, 4, 0.25), (1, 1, 1.0), (2, 4, 0.5)])
    def test_examples(self, delta, sigma, mu):
        b = calibrate_euclidean(delta, sigma)
        assert b.mu == pytest.approx(mu)
        assert b.method == "closed_form"


class TestCircleAnalytic:
    def test_small_sigma(self):
        assert calibrate_s1(1.0, 0.25, 1000).mu == pytest.approx(4.0, rel=1e-3)

    def test_large_sigma_below_euclidean(self):
        assert calibrate_s1(1.0, 4.0, 1000).mu < 0.25

    def test_monotone_in_sigma(self):
        mus = [calibrate_s1(1.0, k / 4).mu for k in range(1, 17)]
        assert np.all(np.diff(mus) <= 0)

    @pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
    def test_grid_refinement(self, sigma):
        a = calibrate_s1(1.0, sigma, 1000).mu
        b = calibrate_s1(1.0, sigma, 2000).mu
        assert abs(a - b) / a < 0.005

    def test_curve(self):
        b = calibrate_s1(1.0, 1.0, 100)
        assert b.method == "analytic_s1"
        assert b.curve.eps[0] == pytest.approx(np.pi / 200)
        assert b.curve.eps[-1] == pytest.approx(np.pi / 2)
        assert b.mu == pytest.approx(b.curve.mu.max())

    def test_rejects_large_sensitivity(self):
        with pytest.raises(ValueError):
            calibrate_s1(3.5, 1.0)


def test_eps_grid():
    g = eps_grid(2.0, 4)
    np.testing.assert_allclose(g, [0.5, 1.0, 1.5, 2.0])
    assert g[-1] == 2.0


def test_default_eps_max():
    assert default_eps_max(CIRCLE, 1.0, 1.0) == pytest.approx(np.pi / 2)
    assert default_eps_max(mf.euclidean(1), 1.0, 4.0) == 10.0
    assert default_eps_max(mf.euclidean(1), 1.0, 0.25) == pytest.approx(20 + 8)


def test_profile_levels_counts_ties_inside():
    near = np.array([[0.0, 2.0, 4.0, 6.0]])
    far = np.array([[0.0, 0.0, 2.0, 2.0]])
    # threshold 2 sigma^2 eps = 2: three near values and two far values are >= 2
    lv = profile_levels(near, far, np.array([1.0]), 1.0)
    assert lv[0, 0] == pytest.approx(0.75 - np.e * 0.5)


class TestMonteCarlo:
    @pytest.mark.parametrize("sigma", [1.0, 2.0])
    def test_matches_exact_profile(self, sigma):
        b = calibrate_mcmc(CIRCLE, CalibrationConfig(1.0, sigma), np.random.default_rng(0))
        c = b.curve
        exact = s1_privacy_profile(sigma, c.eps, 1.0)
        assert np.all(np.abs(c.level - exact) <= 3 * c.se)

    @pytest.mark.parametrize("sigma", [1.0, 2.0])
    def test_matches_closed_form_profile(self, sigma):
        # Every grid eps, against the closed form h_s1. Fails at large eps, where h_s1
        # understates the profile (see test_matches_exact_profile for the true target).
        b = calibrate_mcmc(CIRCLE, CalibrationConfig(1.0, sigma), np.random.default_rng(0))
        c = b.curve
        assert np.all(np.abs(c.level - h_s1(sigma, c.eps, 1.0)) <= 3 * c.se)

    def test_budget_close_to_analytic(self):
        b = calibrate_mcmc(CIRCLE, CalibrationConfig(1.0, 1.0), np.random.default_rng(1))
        assert abs(b.mu - calibrate_s1(1.0, 1.0).mu) < 0.05
        assert b.method == "monte_carlo"
        assert b.spread.min <= b.spread.mean <= b.spread.max

    def test_large_sigma_below_euclidean(self):
        mus = [calibrate_mcmc(CIRCLE, CalibrationConfig(1.0, 4.0), np.random.default_rng(r)).mu for r in range(5)]
        assert np.mean(mus) < 0.25

    @pytest.mark.parametrize("dim", [1, 2])
    @pytest.mark.parametrize("sigma", [1.0, 2.0, 4.0])
    def test_euclidean_recovery(self, dim, sigma):
        M = mf.euclidean(dim)
        cfg = CalibrationConfig(1.0, sigma, eps_max=default_eps_max(M, 1.0, sigma))
        mus = [calibrate_mcmc(M, cfg, np.random.default_rng(r)).mu for r in range(20)]
        assert np.mean(mus) == pytest.approx(1 / sigma, rel=0.10)

    def test_scale_consistency(self):
        M = mf.euclidean(1)
        base = [calibrate_mcmc(M, CalibrationConfig(1.0, 2.0), np.random.default_rng(r)).mu for r in range(10)]
        scaled = [calibrate_mcmc(M, CalibrationConfig(3.0, 6.0), np.random.default_rng(r)).mu for r in range(10)]
        # eps_max depends on sigma alone, so keep it fixed for a like-for-like comparison.
        scaled_fixed = [calibrate_mcmc(M, CalibrationConfig(3.0, 6.0, eps_max=default_eps_max(M, 1.0, 2.0)),
                                       np.random.default_rng(r)).mu for r in range(10)]
        np.testing.assert_allclose(scaled_fixed, base, rtol=1e-12)
        se = np.std(base, ddof=1) / np.sqrt(10)
        assert abs(np.mean(scaled) - np.mean(base)) < 4 * se + 0.02

    def test_sphere_and_hyperbolic_run(self):
        for M in (mf.sphere(2), mf.hyperbolic(2)):
            cfg = CalibrationConfig(0.5, 1.0, n=200, n_eps=100, m=4)
            b = calibrate_mcmc(M, cfg, np.random.default_rng(0))
            assert 0 < b.mu < 1.0

    def test_deterministic(self):
        cfg = CalibrationConfig(0.5, 1.0, n=100, n_eps=50, m=3)
        a = calibrate_mcmc(mf.sphere(2), cfg, np.random.default_rng(7))
        b = calibrate_mcmc(mf.sphere(2), cfg, np.random.default_rng(7))
        assert a.mu == b.mu

    def test_errors(self):
        with pytest.raises(ValueError):
            calibrate_mcmc(CIRCLE, CalibrationConfig(3.2, 1.0))
        with pytest.raises(TypeError):
            calibrate_mcmc("sphere", CalibrationConfig(1.0, 1.0))
        with pytest.raises(ValueError):
            CalibrationConfig(1.0, 1.0, n=0)
        with pytest.raises(ValueError):
            CalibrationConfig(-1.0, 1.0)


def test_dispatch():
    assert calibrate(mf.euclidean(2), 1.0, 2.0).mu == 0.5
    assert calibrate(CIRCLE, 1.0, 1.0).method == "analytic_s1"
    with pytest.raises(ValueError):
        calibrate(CIRCLE, 1.0, 1.0, method="closed-form")
    with pytest.raises(ValueError):
        calibrate(mf.sphere(2), 1.0, 1.0, method="analytic")
    with pytest.raises(ValueError):
        calibrate(CIRCLE, 1.0, 1.0, method="bogus")
