import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from rgdp import manifolds as mf
from rgdp.estimators import FrechetMean, PrivateFrechetMean, check_manifold_array
from rgdp.mechanisms import frechet_sensitivity

S2 = mf.sphere(2)


@pytest.fixture
def data():
    return mf.sample_ball(S2, S2.origin(), np.pi / 8, 10, np.random.default_rng(0))


def test_get_params_and_clone():
    est = PrivateFrechetMean(S2, radius=0.3, sigma=1.0, random_state=4)
    params = est.get_params()
    assert params["radius"] == 0.3 and params["manifold"] == S2
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(sigma=2.0)
    assert est.sigma == 2.0


def test_frechet_mean_round_trip(data):
    fm = FrechetMean(S2).fit(data)
    assert fm.grad_norm_ < 1e-9
    V = fm.transform(data)
    np.testing.assert_allclose(V.mean(axis=0), 0, atol=1e-9)
    np.testing.assert_allclose(fm.inverse_transform(V), data, atol=1e-9)


def test_not_fitted(data):
    with pytest.raises(NotFittedError):
        FrechetMean(S2).transform(data)
    with pytest.raises(NotFittedError):
        PrivateFrechetMean(S2, radius=0.5, sigma=1.0).predict()


def test_circle_accepts_flat_angles():
    fm = FrechetMean(mf.circle()).fit([0.1, 0.3])
    np.testing.assert_allclose(fm.mean_, [0.2], atol=1e-9)


def test_check_array():
    with pytest.raises(TypeError):
        check_manifold_array("sphere", [[1, 0, 0]])
    with pytest.raises(ValueError):
        check_manifold_array(S2, np.empty((0, 3)))
    with pytest.raises(ValueError):
        check_manifold_array(S2, [1.0, 0.0, 0.0])


def test_private_gaussian(data):
    est = PrivateFrechetMean(S2, radius=np.pi / 8, sigma=0.5, n=200, n_eps=100, m=5, random_state=1).fit(data)
    assert est.sensitivity_ == pytest.approx(frechet_sensitivity(np.pi / 8, 1.0, 10))
    assert est.budget_.method == "monte_carlo"
    assert est.predict().shape == (3,)
    assert est.predict(data).shape == (10, 3)
    again = PrivateFrechetMean(S2, radius=np.pi / 8, sigma=0.5, n=200, n_eps=100, m=5, random_state=1).fit(data)
    assert np.array_equal(est.private_mean_, again.private_mean_)


def test_private_laplace_from_mu(data):
    est = PrivateFrechetMean(S2, radius=np.pi / 8, mechanism="laplace", mu=1.232035385344901, random_state=0)
    est.fit(data)
    assert est.noise_param_ == pytest.approx(est.sensitivity_ / 1.0, rel=1e-9)


def test_private_euclidean():
    X = np.random.default_rng(0).uniform(-0.5, 0.5, size=(20, 2))
    est = PrivateFrechetMean(mf.euclidean(2), radius=1.0, sigma=0.1, random_state=0).fit(X)
    assert est.budget_.mu == pytest.approx(0.1 / 0.1)


@pytest.mark.parametrize("kw", [dict(sigma=None), dict(radius=None), dict(mechanism="median"),
                                dict(mechanism="laplace", eps=None, mu=None)])
def test_invalid(data, kw):
    params = dict(manifold=S2, radius=np.pi / 8, sigma=1.0)
    params.update(kw)
    with pytest.raises(ValueError):
        PrivateFrechetMean(**params).fit(data)
