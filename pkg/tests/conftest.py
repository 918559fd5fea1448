import numpy as np
import pytest

from rgdp import manifolds as mf

KINDS = {
    "euclidean": mf.euclidean(3),
    "circle": mf.circle(),
    "sphere": mf.sphere(2),
    "hyperbolic": mf.hyperbolic(2),
}


def random_points(M, size, rng, spread=2.0):
    """Points spread over M: uniform on compact kinds, within ``spread`` of the origin otherwise."""
    if M.kind == "circle":
        return mf.wrap_angle(rng.uniform(-np.pi, np.pi, size=(size, 1)))
    if M.kind == "sphere":
        x = rng.standard_normal((size, M.ambient_dim))
        return x / np.linalg.norm(x, axis=1, keepdims=True)
    if M.kind == "euclidean":
        return spread * rng.standard_normal((size, M.ambient_dim))
    base = np.broadcast_to(M.origin(), (size, M.ambient_dim))
    u = mf.random_unit_tangent(M, base, rng)
    return mf.exp_map(M, base, spread * rng.uniform(size=(size, 1)) * u)


@pytest.fixture(params=list(KINDS), ids=list(KINDS))
def manifold(request):
    return KINDS[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
