"""Geometry of the constant-curvature model spaces.

Four kinds are supported: Euclidean space R^d, the circle S^1 (points are
angles in (-pi, pi]), the unit sphere S^d embedded in R^{d+1} and hyperbolic
space H^d in hyperboloid coordinates (Minkowski norm -1, first coordinate
>= 1). Curvature is normalised to -1, 0 or +1; other curvatures are a
rescaling of distances by 1/sqrt(|kappa|).

Every function is vectorised over leading axes: a point array has shape
``(..., ambient_dim)`` and a circle point is a length-1 array holding its
angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_random_state

KINDS = ("euclidean", "circle", "sphere", "hyperbolic")
TWO_PI = 2.0 * np.pi


class CutLocusError(ValueError):
    """Raised when the logarithm map is requested at the cut locus."""


@dataclass(frozen=True)
class ManifoldSpec:
    """Descriptor of a constant-curvature space.

    Parameters
    ----------
    kind : {"euclidean", "circle", "sphere", "hyperbolic"}
    dim : int
        Intrinsic dimension.
    """

    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown manifold kind {self.kind!r}; expected one of {KINDS}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        if self.kind == "circle" and self.dim != 1:
            raise ValueError("the circle has dim 1")

    @property
    def curvature(self) -> float:
        return {"euclidean": 0.0, "circle": 1.0, "sphere": 1.0, "hyperbolic": -1.0}[self.kind]

    @property
    def injectivity_radius(self) -> float:
        return math.pi if self.kind in ("circle", "sphere") else math.inf

    @property
    def ambient_dim(self) -> int:
        if self.kind == "circle":
            return 1
        if self.kind == "euclidean":
            return self.dim
        return self.dim + 1

    @property
    def is_compact(self) -> bool:
        return self.kind in ("circle", "sphere")

    def origin(self) -> np.ndarray:
        """Canonical base point (zero, angle 0, north pole e_0, apex)."""
        p = np.zeros(self.ambient_dim)
        if self.kind in ("sphere", "hyperbolic"):
            p[0] = 1.0
        return p


def euclidean(dim: int) -> ManifoldSpec:
    return ManifoldSpec("euclidean", dim)


def circle() -> ManifoldSpec:
    return ManifoldSpec("circle", 1)


def sphere(dim: int) -> ManifoldSpec:
    return ManifoldSpec("sphere", dim)


def hyperbolic(dim: int) -> ManifoldSpec:
    return ManifoldSpec("hyperbolic", dim)


def wrap_angle(theta):
    """Map angles into (-pi, pi]."""
    theta = np.asarray(theta, dtype=float)
    return theta - TWO_PI * np.ceil((theta - np.pi) / TWO_PI)


def minkowski_inner(u, v):
    """Lorentzian inner product -u_0 v_0 + sum_i u_i v_i along the last axis."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return -u[..., 0] * v[..., 0] + np.sum(u[..., 1:] * v[..., 1:], axis=-1)


def as_points(M: ManifoldSpec, x) -> np.ndarray:
    """Coerce ``x`` to a float array whose last axis is the ambient dimension."""
    x = np.asarray(x, dtype=float)
    if M.kind == "circle" and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    if x.ndim == 0 or x.shape[-1] != M.ambient_dim:
        raise ValueError(
            f"point has ambient size {x.shape[-1] if x.ndim else 0}, "
            f"{M.kind} of dim {M.dim} expects {M.ambient_dim}"
        )
    return x


def check_points(M: ManifoldSpec, x, atol: float = 1e-10) -> np.ndarray:
    """Validate that ``x`` lies on ``M`` and return it as an array."""
    x = as_points(M, x)
    if not np.all(np.isfinite(x)):
        raise ValueError("points must be finite")
    if M.kind == "sphere":
        err = np.abs(np.linalg.norm(x, axis=-1) - 1.0)
        if np.any(err > atol):
            raise ValueError(f"sphere points must have unit norm (max error {err.max():.3g})")
    elif M.kind == "hyperbolic":
        err = np.abs(minkowski_inner(x, x) + 1.0)
        if np.any(err > atol * np.maximum(1.0, x[..., 0] ** 2)) or np.any(x[..., 0] < 1.0 - atol):
            raise ValueError("hyperbolic points must satisfy <x,x>_L = -1 with x_0 >= 1")
    elif M.kind == "circle":
        if np.any(x <= -np.pi) or np.any(x > np.pi):
            raise ValueError("circle points must be angles in (-pi, pi]")
    return x


def _tangent_norm(M: ManifoldSpec, v: np.ndarray) -> np.ndarray:
    if M.kind == "hyperbolic":
        return np.sqrt(np.maximum(minkowski_inner(v, v), 0.0))
    return np.linalg.norm(v, axis=-1)


def norm(M: ManifoldSpec, v) -> np.ndarray:
    """Riemannian norm of tangent vectors."""
    return _tangent_norm(M, as_points(M, v))


def distance(M: ManifoldSpec, p, q) -> np.ndarray:
    """Geodesic distance between ``p`` and ``q`` (broadcasting)."""
    p = as_points(M, p)
    q = as_points(M, q)
    if M.kind == "euclidean":
        return np.linalg.norm(p - q, axis=-1)
    if M.kind == "circle":
        x = (p - q)[..., 0]
        return np.abs(x - TWO_PI * np.round(x / TWO_PI))
    if M.kind == "sphere":
        # Same as arccos(<p,q>) clamped to [-1, 1] but accurate near 0 and pi.
        return 2.0 * np.arctan2(np.linalg.norm(p - q, axis=-1), np.linalg.norm(p + q, axis=-1))
    chord2 = np.maximum(minkowski_inner(p - q, p - q), 0.0)
    return 2.0 * np.arcsinh(0.5 * np.sqrt(chord2))


def exp_map(M: ManifoldSpec, p, v) -> np.ndarray:
    """Endpoint of the unit-time geodesic from ``p`` with initial velocity ``v``."""
    p = as_points(M, p)
    v = as_points(M, v)
    if M.kind == "euclidean":
        return p + v
    if M.kind == "circle":
        return wrap_angle(p + v)
    t = _tangent_norm(M, v)[..., None]
    safe = np.where(t > 0, t, 1.0)
    if M.kind == "sphere":
        out = np.cos(t) * p + np.sin(t) * (v / safe)
        out = out / np.linalg.norm(out, axis=-1, keepdims=True)
    else:
        out = np.cosh(t) * p + np.sinh(t) * (v / safe)
        out = project_hyperboloid(out)
    return np.where(t > 0, out, p)


def log_map(M: ManifoldSpec, p, q) -> np.ndarray:
    """Tangent vector at ``p`` pointing to ``q`` with length ``distance(p, q)``.

    Raises
    ------
    CutLocusError
        If ``q`` is (numerically) antipodal to ``p`` on the sphere or circle.
    """
    p = as_points(M, p)
    q = as_points(M, q)
    if M.kind == "euclidean":
        return np.broadcast_to(q - p, np.broadcast_shapes(p.shape, q.shape)).copy()
    d = distance(M, p, q)
    if M.is_compact and np.any(d > np.pi - 1e-12):
        raise CutLocusError("log map undefined: points are antipodal")
    if M.kind == "circle":
        x = (q - p)[..., 0]
        return (x - TWO_PI * np.round(x / TWO_PI))[..., None]
    if M.kind == "sphere":
        u = q - np.sum(p * q, axis=-1, keepdims=True) * p
    else:
        u = q + minkowski_inner(p, q)[..., None] * p
    un = _tangent_norm(M, u)[..., None]
    d = d[..., None]
    return np.where(un > 0, d * u / np.where(un > 0, un, 1.0), 0.0 * u)


def project_hyperboloid(x) -> np.ndarray:
    """Recompute the time coordinate so that <x,x>_L = -1 exactly (up to rounding)."""
    x = np.array(x, dtype=float)
    x[..., 0] = np.sqrt(1.0 + np.sum(x[..., 1:] ** 2, axis=-1))
    return x


def project_tangent(M: ManifoldSpec, p, w) -> np.ndarray:
    """Orthogonal projection of an ambient vector onto the tangent space at ``p``."""
    p = as_points(M, p)
    w = as_points(M, w)
    if M.kind == "sphere":
        return w - np.sum(w * p, axis=-1, keepdims=True) * p
    if M.kind == "hyperbolic":
        return w + minkowski_inner(p, w)[..., None] * p
    return w


def random_tangent(M: ManifoldSpec, p, scale=1.0, rng=None) -> np.ndarray:
    """Isotropic normal tangent vectors N(0, scale^2 I) at each point of ``p``."""
    rng = check_random_state(rng)
    p = as_points(M, p)
    scale = np.asarray(scale, dtype=float)
    if M.kind == "hyperbolic":
        # Draw at the apex, then move it to p with the boost taking the apex to p.
        u = rng.standard_normal(p.shape[:-1] + (M.dim,))
        v0 = np.concatenate([np.zeros(p.shape[:-1] + (1,)), u], axis=-1)
        coef = np.sum(p[..., 1:] * u, axis=-1) / (1.0 + p[..., 0])
        origin = np.zeros_like(p)
        origin[..., 0] = 1.0
        v = v0 + coef[..., None] * (origin + p)
    else:
        v = project_tangent(M, p, rng.standard_normal(p.shape))
    return v * scale[..., None] if scale.ndim else v * scale


def random_unit_tangent(M: ManifoldSpec, p, rng=None) -> np.ndarray:
    rng = check_random_state(rng)
    p = as_points(M, p)
    while True:
        v = random_tangent(M, p, 1.0, rng)
        n = _tangent_norm(M, v)[..., None]
        if np.all(n > 1e-12):
            return v / n


def random_point(M: ManifoldSpec, rng=None) -> np.ndarray:
    """A random point of ``M``.

    Uniform for the circle and sphere. Euclidean and hyperbolic space are
    homogeneous but carry no uniform probability law, so their canonical
    origin is returned instead.
    """
    rng = check_random_state(rng)
    if M.kind == "circle":
        return wrap_angle(rng.uniform(-np.pi, np.pi, size=1))
    if M.kind == "sphere":
        x = rng.standard_normal(M.ambient_dim)
        return x / np.linalg.norm(x)
    return M.origin()


def random_point_at_distance(M: ManifoldSpec, p, delta: float, rng=None, direction=None) -> np.ndarray:
    """A point at geodesic distance ``delta`` from ``p`` in a uniform direction.

    ``direction`` fixes the (tangent) direction instead of drawing it.
    """
    p = check_points(M, p)
    if not delta > 0 or delta > M.injectivity_radius:
        raise ValueError(f"delta must lie in (0, {M.injectivity_radius}], got {delta}")
    if direction is None:
        u = random_unit_tangent(M, p, rng)
    else:
        u = project_tangent(M, p, as_points(M, direction))
        n = _tangent_norm(M, u)[..., None]
        if np.any(n <= 0):
            raise ValueError("direction has no tangent component at p")
        u = u / n
    if M.kind == "circle" and delta == np.pi:
        return wrap_angle(p + np.pi)
    return exp_map(M, p, delta * u)


def _ball_radii(M: ManifoldSpec, r: float, n: int, rng) -> np.ndarray:
    """Radii with density proportional to the volume element on [0, r]."""
    d = M.dim
    if M.kind in ("euclidean", "circle") or d == 1:
        return r * rng.uniform(size=n) ** (1.0 / d)
    out = np.empty(n)
    filled = 0
    while filled < n:
        t = r * rng.uniform(size=2 * (n - filled) + 8) ** (1.0 / d)
        u = rng.uniform(size=t.size)
        with np.errstate(invalid="ignore", divide="ignore"):
            if M.kind == "sphere":
                ratio = np.where(t > 0, np.sin(t) / t, 1.0) ** (d - 1)
            else:
                ratio = (np.where(t > 0, np.sinh(t) / t, 1.0) / (np.sinh(r) / r)) ** (d - 1)
        keep = t[u < ratio][: n - filled]
        out[filled:filled + keep.size] = keep
        filled += keep.size
    return out


def sample_ball(M: ManifoldSpec, center, r: float, n: int, rng=None) -> np.ndarray:
    """Draw ``n`` points uniformly (Riemannian volume) from the geodesic ball B_r(center).

    Returns an array of shape ``(n, ambient_dim)``.
    """
    rng = check_random_state(rng)
    center = check_points(M, center)
    if not r > 0 or r >= M.injectivity_radius / 2:
        raise ValueError(f"radius must lie in (0, {M.injectivity_radius / 2}), got {r}")
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return np.empty((0, M.ambient_dim))
    radii = _ball_radii(M, r, n, rng)
    base = np.broadcast_to(center, (n, M.ambient_dim))
    u = random_unit_tangent(M, base, rng)
    return exp_map(M, base, radii[:, None] * u)
