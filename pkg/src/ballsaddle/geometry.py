"""Finite-dimensional Hilbert space primitives.

Points are 1-D float64 arrays in R^n with the Euclidean inner product.
Closed convex sets come in three flavours: origin-centred balls, boxes, and
user-supplied projection oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CertificationError, DimensionMismatch, InvalidInput

IDEMPOTENCE_TOL = 1e-10


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Validate and return ``x`` as a finite 1-D float64 vector.

    Raises InvalidInput on NaN/inf or wrong shape, DimensionMismatch if
    ``dim`` is given and disagrees.
    """
    p = np.asarray(x, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise InvalidInput(f"point must be a 1-D vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise InvalidInput("point has non-finite coordinates")
    if dim is not None and p.size != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {p.size}")
    return p


def inner(a, b) -> float:
    """Euclidean inner product <a, b>."""
    a = as_point(a)
    b = as_point(b, dim=a.size)
    return float(a @ b)


def norm(x) -> float:
    """Euclidean norm ||x||."""
    return float(np.linalg.norm(as_point(x)))


def project_ball(z, r: float) -> np.ndarray:
    """Nearest point of the ball {||x|| <= r} to ``z``.

    Returns ``z`` unchanged inside the ball, else the radial rescaling
    ``r * z / ||z||``.
    """
    if r <= 0:
        raise InvalidInput("ball radius must be positive")
    z = as_point(z)
    nz = np.linalg.norm(z)
    if nz <= r:
        return z.copy()
    return (r / nz) * z


def dist_ball(p, r: float) -> float:
    """Distance from ``p`` to the ball of radius ``r``: max(0, ||p|| - r)."""
    if r <= 0:
        raise InvalidInput("ball radius must be positive")
    return max(0.0, norm(p) - r)


class ConvexSet:
    """A non-empty closed convex set known through its metric projection."""

    def project(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains(self, z, tol: float = 1e-9) -> bool:
        z = as_point(z)
        return float(np.linalg.norm(self.project(z) - z)) <= tol

    def sup_norm(self) -> float:
        """Upper bound on sup {||y|| : y in the set}."""
        raise NotImplementedError

    def diameter(self) -> float:
        return 2.0 * self.sup_norm()

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """n points of the set, shape (n, dim). Uniform for balls and boxes;
        projections of uniform ball samples for oracle sets."""
        raise NotImplementedError


@dataclass(frozen=True)
class Ball(ConvexSet):
    """Origin-centred closed ball {x : ||x|| <= radius} in R^dim."""

    radius: float
    dim: int

    def __post_init__(self):
        if self.radius <= 0:
            raise InvalidInput("ball radius must be positive")
        if self.dim < 1:
            raise InvalidInput("ball dimension must be >= 1")

    def project(self, z):
        return project_ball(as_point(z, dim=self.dim), self.radius)

    def contains(self, z, tol: float = 1e-9) -> bool:
        return norm(as_point(z, dim=self.dim)) <= self.radius + tol

    def sup_norm(self) -> float:
        return self.radius

    def sample(self, rng, n):
        return sample_ball(rng, n, self.dim, self.radius)


@dataclass(frozen=True)
class Box(ConvexSet):
    """Axis-aligned box {x : lower <= x <= upper} (componentwise)."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = as_point(self.lower)
        hi = as_point(self.upper, dim=lo.size)
        if np.any(lo > hi):
            raise InvalidInput("box lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.size

    def project(self, z):
        z = as_point(z, dim=self.dim)
        return np.clip(z, self.lower, self.upper)

    def contains(self, z, tol: float = 1e-9) -> bool:
        z = as_point(z, dim=self.dim)
        return bool(np.all(z >= self.lower - tol) and np.all(z <= self.upper + tol))

    def sup_norm(self) -> float:
        # sup ||y|| over the box is attained at the componentwise max-|.| corner
        return float(np.linalg.norm(np.maximum(np.abs(self.lower), np.abs(self.upper))))

    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def sample(self, rng, n):
        u = rng.uniform(size=(n, self.dim))
        return self.lower + u * (self.upper - self.lower)


@dataclass
class ProjectionOracle(ConvexSet):
    """Convex set given by a user projection function.

    ``norm_bound`` must be a declared upper bound on sup ||y|| over the set;
    it is required by every consumer that needs the set bounded.  Each call
    re-projects the result and raises CertificationError if the oracle is
    not idempotent within IDEMPOTENCE_TOL.
    """

    projection: "callable"
    norm_bound: float | None = None
    dim: int | None = None

    def project(self, z):
        z = as_point(z, dim=self.dim)
        p = as_point(self.projection(z), dim=z.size)
        p2 = as_point(self.projection(p), dim=z.size)
        if float(np.linalg.norm(p2 - p)) > IDEMPOTENCE_TOL:
            raise CertificationError(
                "projection oracle is not idempotent: ||P(P(z)) - P(z)|| = "
                f"{float(np.linalg.norm(p2 - p)):.3e} > {IDEMPOTENCE_TOL:g}"
            )
        return p

    def sup_norm(self) -> float:
        if self.norm_bound is None:
            raise InvalidInput(
                "projection-oracle set needs a declared norm_bound for this operation"
            )
        return float(self.norm_bound)

    def sample(self, rng, n):
        if self.dim is None:
            raise InvalidInput("projection-oracle set needs dim to be sampled")
        raw = sample_ball(rng, n, self.dim, self.sup_norm())
        return np.stack([self.project(z) for z in raw])


def project_set(z, C: ConvexSet) -> np.ndarray:
    """Nearest point of ``C`` to ``z`` (delegates to the set's projection)."""
    return C.project(z)


def sample_ball(rng: np.random.Generator, n: int, dim: int, radius: float) -> np.ndarray:
    """n points uniform in the ball of the given radius, shape (n, dim)."""
    if radius <= 0:
        raise InvalidInput("ball radius must be positive")
    g = rng.standard_normal(size=(n, dim))
    lengths = np.linalg.norm(g, axis=1, keepdims=True)
    lengths[lengths == 0] = 1.0
    radii = radius * rng.uniform(size=(n, 1)) ** (1.0 / dim)
    return radii * (g / lengths)


def sample_sphere(rng: np.random.Generator, n: int, dim: int, radius: float) -> np.ndarray:
    """n points uniform on the sphere {||x|| = radius}, shape (n, dim)."""
    g = rng.standard_normal(size=(n, dim))
    lengths = np.linalg.norm(g, axis=1, keepdims=True)
    lengths[lengths == 0] = 1.0
    return radius * g / lengths
