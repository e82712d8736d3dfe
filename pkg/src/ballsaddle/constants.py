"""Constants behind the certified statements and the admissible radius.

Every certified run needs a handful of scalar constants of the problem map:

* ``theta`` -- sup of the Jacobian operator norm over the domain ball,
* ``gamma`` -- Lipschitz constant of the Jacobian,
* ``eta``   -- Lipschitz constant of ``x -> x - f(x)`` (approximation runs),
* ``M = 2*(theta + rho*gamma)`` -- Lipschitz constant of the payoff
  x-gradient for variational-inequality payoffs,
* ``L = 2*(eta + theta + gamma*(rho + sup_Y ||y||))`` -- same for
  best-approximation payoffs,
* ``sigma`` -- min over the dual ball/set of ``||b - A^T y||`` built from the
  map value and Jacobian at the origin,
* ``delta`` -- min over the dual set of the payoff x-gradient norm at 0.

Each constant carries a certification flag: exact analytic value, a proved
conservative upper bound, or a sampled lower bound (not certification grade).
The admissible radius caps the ball radius ``r`` at which the sphere-located
solution is guaranteed.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import HypothesisViolation, InvalidInput, NonConvergence
from .geometry import Ball, ConvexSet, as_point

SIGMA_TOL = 1e-10
SIGMA_MAX_ITERS = 10**5
OPNORM_TOL = 1e-10
OPNORM_MAX_ITERS = 10**4


class CertFlag(str, Enum):
    """How a reported constant was obtained."""

    ANALYTIC = "analytic"
    CONSERVATIVE = "conservative-bound"
    SAMPLED = "sampled-lower-bound"


_SEVERITY = {CertFlag.ANALYTIC: 0, CertFlag.CONSERVATIVE: 1, CertFlag.SAMPLED: 2}


def combine_flags(*flags: CertFlag) -> CertFlag:
    """Worst flag wins: analytic < conservative-bound < sampled-lower-bound."""
    return max(flags, key=lambda f: _SEVERITY[f])


@dataclass(frozen=True)
class CertValue:
    """A nonnegative constant together with its certification flag."""

    value: float
    flag: CertFlag

    def __post_init__(self):
        if not np.isfinite(self.value) or self.value < 0:
            raise InvalidInput(f"constant must be finite and >= 0, got {self.value}")

    def to_dict(self):
        return {"value": self.value, "flag": self.flag.value}

    @staticmethod
    def from_dict(d) -> "CertValue":
        return CertValue(float(d["value"]), CertFlag(d["flag"]))


@dataclass(frozen=True)
class ConstantsReport:
    """All constants used by a run, the radius rule, and the admissible radius."""

    rho: float
    theta: CertValue
    gamma: CertValue
    eta: CertValue | None = None
    delta: CertValue | None = None
    M: CertValue | None = None
    L: CertValue | None = None
    sigma: CertValue | None = None
    r_max: float = 0.0
    radius_rule: str = "vi"

    @property
    def certified(self) -> bool:
        """True when no constant is a mere sampled lower bound."""
        vals = [self.theta, self.gamma, self.eta, self.delta, self.M, self.L, self.sigma]
        return all(v.flag is not CertFlag.SAMPLED for v in vals if v is not None)

    def to_dict(self):
        d = {"rho": self.rho, "r_max": self.r_max,
             "radius_rule": self.radius_rule, "certified": self.certified}
        for name in ("theta", "gamma", "eta", "delta", "M", "L", "sigma"):
            v = getattr(self, name)
            d[name] = None if v is None else v.to_dict()
        return d

    @staticmethod
    def from_dict(d) -> "ConstantsReport":
        kw = {"rho": float(d["rho"]), "r_max": float(d["r_max"]),
              "radius_rule": str(d["radius_rule"])}
        for name in ("theta", "gamma", "eta", "delta", "M", "L", "sigma"):
            v = d.get(name)
            kw[name] = None if v is None else CertValue.from_dict(v)
        return ConstantsReport(**kw)


def op_norm(A, tol: float = OPNORM_TOL, max_iters: int = OPNORM_MAX_ITERS) -> float:
    """Spectral norm of a square matrix by power iteration on A^T A.

    Stops when the largest-eigenvalue estimate of A^T A is stationary within
    ``tol`` (relative above 1); raises NonConvergence past ``max_iters``.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInput(f"op_norm needs a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput("matrix has non-finite entries")
    n = A.shape[0]
    B = A.T @ A
    if not B.any():
        return 0.0
    rng = np.random.default_rng(0)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam = float(v @ B @ v)
    for _ in range(max_iters):
        w = B @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            # v landed exactly in the kernel; restart from a fresh direction
            v = rng.standard_normal(n)
            v /= np.linalg.norm(v)
            lam = float(v @ B @ v)
            continue
        v = w / nw
        lam_new = float(v @ B @ v)
        if abs(lam_new - lam) <= tol * max(1.0, abs(lam_new)):
            return float(np.sqrt(max(lam_new, 0.0)))
        lam = lam_new
    raise NonConvergence(f"power iteration did not settle in {max_iters} iterations")


def _ball_point_stream(rng: np.random.Generator, n: int, dim: int, rho: float) -> np.ndarray:
    # One point per (dim normals + 1 uniform) draw so that a longer stream is a
    # prefix-extension of a shorter one with the same seed.
    pts = np.empty((n, dim))
    for i in range(n):
        g = rng.standard_normal(dim)
        ng = np.linalg.norm(g)
        if ng == 0:
            g[0], ng = 1.0, 1.0
        pts[i] = (rho * rng.uniform() ** (1.0 / dim)) * g / ng
    return pts


def quasi_ball_points(dim: int, rho: float, samples: int, seed: int) -> np.ndarray:
    """Deterministic low-discrepancy points of the ball of radius ``rho``,
    prefixed by the structured points {0, +-rho e_i}."""
    import warnings

    from scipy.special import ndtri
    from scipy.stats import qmc

    structured = np.zeros((2 * dim + 1, dim))
    for i in range(dim):
        structured[1 + 2 * i, i] = rho
        structured[2 + 2 * i, i] = -rho
    n_free = max(0, samples - structured.shape[0])
    if n_free == 0:
        return structured[:samples]
    with warnings.catch_warnings():
        # non-power-of-2 draws are fine here, the points only seed a sup
        warnings.simplefilter("ignore", UserWarning)
        sob = qmc.Sobol(d=dim + 1, scramble=True, seed=seed).random(n_free)
    dirs = ndtri(np.clip(sob[:, :dim], 1e-12, 1 - 1e-12))
    lens = np.linalg.norm(dirs, axis=1, keepdims=True)
    lens[lens == 0] = 1.0
    radii = rho * np.clip(sob[:, dim:], 0.0, 1.0) ** (1.0 / dim)
    return np.vstack([structured, radii * dirs / lens])


def estimate_theta(smooth_map, samples: int = 1000, seed: int = 0) -> CertValue:
    """Sup of ||jacobian(x)|| over the domain ball.

    Declared analytic constants pass through with their own flag; otherwise
    the max over quasi-random points (including 0 and the 2n axis boundary
    points) is returned as a sampled lower bound.
    """
    if smooth_map.analytic is not None:
        a = smooth_map.analytic
        return CertValue(a.theta, a.theta_flag)
    if samples < 1:
        raise InvalidInput("samples must be >= 1")
    pts = quasi_ball_points(smooth_map.dimension, smooth_map.domain_radius, samples, seed)
    best = 0.0
    for x in pts:
        best = max(best, op_norm(smooth_map.jac(x)))
    return CertValue(best, CertFlag.SAMPLED)


def estimate_lipschitz(oracle, rho: float, pairs: int = 1000, seed: int = 0,
                       dim: int | None = None,
                       declared: CertValue | None = None) -> CertValue:
    """Best sampled lower bound on the Lipschitz constant of ``oracle`` on the
    ball of radius ``rho``.

    ``oracle`` maps points to vectors or matrices; matrix differences are
    measured in operator norm.  ``declared`` analytic values pass through.
    """
    if declared is not None:
        return declared
    if pairs < 1:
        raise InvalidInput("pairs must be >= 1")
    if dim is None:
        raise InvalidInput("dim is required when no declared constant is given")
    rng = np.random.default_rng(seed)
    pts = _ball_point_stream(rng, 2 * pairs, dim, rho)
    best = 0.0
    for i in range(pairs):
        a, b = pts[2 * i], pts[2 * i + 1]
        gap = float(np.linalg.norm(a - b))
        if gap < 1e-14:
            continue
        ga = np.asarray(oracle(a), dtype=float)
        gb = np.asarray(oracle(b), dtype=float)
        diff = ga - gb
        dn = op_norm(diff) if diff.ndim == 2 else float(np.linalg.norm(diff))
        best = max(best, dn / gap)
    return CertValue(best, CertFlag.SAMPLED)


def _min_residual_over_set(b: np.ndarray, A: np.ndarray, C: ConvexSet,
                           tol: float = SIGMA_TOL,
                           max_iters: int = SIGMA_MAX_ITERS) -> float:
    """min over y in C of ||b - A^T y|| by projected gradient descent.

    The objective is the convex quadratic ||b - A^T y||^2; the fixed step
    1/(2 ||A||^2) guarantees descent and the loop stops once the gradient
    mapping norm falls below ``tol``.
    """
    b = as_point(b)
    A = np.asarray(A, dtype=float)
    if A.shape != (b.size, b.size):
        raise InvalidInput(f"matrix shape {A.shape} does not match dimension {b.size}")
    na = op_norm(A)
    if na <= 1e-9:
        # The y-term is negligible; return the sound lower bound.
        return max(0.0, float(np.linalg.norm(b)) - na * C.sup_norm())
    step = 1.0 / (2.0 * na * na)
    y = C.project(np.zeros_like(b))
    for _ in range(max_iters):
        grad = 2.0 * (A @ (A.T @ y - b))
        y_next = C.project(y - step * grad)
        if float(np.linalg.norm(y - y_next)) / step <= tol:
            return float(np.linalg.norm(b - A.T @ y_next))
        y = y_next
    raise NonConvergence(
        f"projected gradient on the dual set did not reach tolerance in {max_iters} iterations")


def sigma_vi(phi0, jac0, rho: float) -> float:
    """min over ||y|| <= rho of ||phi0 - jac0^T y|| (the VI-mode sigma).

    ``phi0`` and ``jac0`` are the map value and Jacobian at the origin.
    """
    if rho <= 0:
        raise InvalidInput("rho must be positive")
    phi0 = as_point(phi0)
    return _min_residual_over_set(phi0, np.asarray(jac0, dtype=float),
                                  Ball(rho, phi0.size))


def sigma_ba(f0, jac0, Y: ConvexSet) -> float:
    """min over y in Y of ||jac0^T y - f0|| (the approximation-mode sigma)."""
    return _min_residual_over_set(as_point(f0), np.asarray(jac0, dtype=float), Y)


def delta_const(payoff, Y: ConvexSet, n_samples: int = 2000, seed: int = 0) -> CertValue:
    """min over y in Y of ||grad_x(0, y)||.

    Catalog payoffs expose the affine structure of the gradient at the
    origin, so the minimum is solved exactly; black-box payoffs fall back to
    a sampled minimum flagged as not certification grade.
    """
    if payoff.grad0_affine is not None:
        b, A = payoff.grad0_affine
        return CertValue(_min_residual_over_set(b, A, Y), CertFlag.ANALYTIC)
    rng = np.random.default_rng(seed)
    ys = Y.sample(rng, n_samples)
    x0 = np.zeros(payoff.dimension)
    best = min(float(np.linalg.norm(payoff.grad_x(x0, y))) for y in ys)
    return CertValue(best, CertFlag.SAMPLED)


def vi_report(m, samples: int = 1000, seed: int = 0) -> ConstantsReport:
    """Constants report for a variational-inequality run on the map ``m``.

    theta and gamma come from declared analytic constants when present and
    from sampling otherwise (which downgrades the report to heuristic);
    sigma is solved exactly from the map data at the origin.
    """
    theta = estimate_theta(m, samples=samples, seed=seed)
    if m.analytic is not None:
        gamma = CertValue(m.analytic.gamma, m.analytic.gamma_flag)
    else:
        gamma = estimate_lipschitz(m.jac, m.domain_radius, pairs=samples,
                                   seed=seed + 1, dim=m.dimension)
    rho = m.domain_radius
    M = CertValue(2.0 * (theta.value + rho * gamma.value),
                  combine_flags(theta.flag, gamma.flag))
    zero = np.zeros(m.dimension)
    sig = CertValue(sigma_vi(m.val(zero), m.jac(zero), rho), CertFlag.ANALYTIC)
    report = ConstantsReport(rho=rho, theta=theta, gamma=gamma, M=M, sigma=sig,
                             radius_rule="vi")
    r_max = admissible_radius("vi", report, rho) if sig.value > 0 else 0.0
    return ConstantsReport(rho=rho, theta=theta, gamma=gamma, M=M, sigma=sig,
                           r_max=r_max, radius_rule="vi")


def ba_report(m, Y: ConvexSet, samples: int = 1000, seed: int = 0) -> ConstantsReport:
    """Constants report for a best-approximation run of the map ``m`` with
    dual set ``Y`` (which must be bounded).

    L = 2 (eta + theta + gamma (rho + sup_Y ||y||)), delta = 2 sigma, and the
    admissible radius is sigma / L capped at rho.
    """
    theta = estimate_theta(m, samples=samples, seed=seed)
    if m.analytic is not None:
        gamma = CertValue(m.analytic.gamma, m.analytic.gamma_flag)
        if m.analytic.eta is not None:
            eta = CertValue(m.analytic.eta, m.analytic.eta_flag)
        else:
            eta = estimate_lipschitz(lambda x, m=m: x - m.val(x), m.domain_radius,
                                     pairs=samples, seed=seed + 2, dim=m.dimension)
    else:
        gamma = estimate_lipschitz(m.jac, m.domain_radius, pairs=samples,
                                   seed=seed + 1, dim=m.dimension)
        eta = estimate_lipschitz(lambda x, m=m: x - m.val(x), m.domain_radius,
                                 pairs=samples, seed=seed + 2, dim=m.dimension)
    rho = m.domain_radius
    L = CertValue(2.0 * (eta.value + theta.value + gamma.value * (rho + Y.sup_norm())),
                  combine_flags(theta.flag, gamma.flag, eta.flag))
    zero = np.zeros(m.dimension)
    sig = CertValue(sigma_ba(m.val(zero), m.jac(zero), Y), CertFlag.ANALYTIC)
    delta = CertValue(2.0 * sig.value, CertFlag.ANALYTIC)
    report = ConstantsReport(rho=rho, theta=theta, gamma=gamma, eta=eta, delta=delta,
                             L=L, sigma=sig, radius_rule="ba")
    r_max = admissible_radius("ba", report, rho) if sig.value > 0 else 0.0
    return ConstantsReport(rho=rho, theta=theta, gamma=gamma, eta=eta, delta=delta,
                           L=L, sigma=sig, r_max=r_max, radius_rule="ba")


def admissible_radius(mode: str, report: ConstantsReport, rho: float) -> float:
    """Largest certified ball radius for the given rule, capped at ``rho``.

    Rules: ``saddle`` uses delta/(2 L), ``vi`` uses sigma/(2 M), ``ba`` uses
    sigma/L.  A zero denominator with a positive numerator makes the bound
    vacuous (returns ``rho``); a zero numerator is a hypothesis violation.
    """
    if rho <= 0:
        raise InvalidInput("rho must be positive")
    if mode == "saddle":
        num, den, what = report.delta, report.L, "delta"
        scale = 2.0
    elif mode == "vi":
        num, den, what = report.sigma, report.M, "sigma"
        scale = 2.0
    elif mode == "ba":
        num, den, what = report.sigma, report.L, "sigma"
        scale = 1.0
    else:
        raise InvalidInput(f"unknown radius rule {mode!r}")
    if num is None or den is None:
        raise InvalidInput(f"radius rule {mode!r} needs both its constants in the report")
    if num.value <= 0.0:
        raise HypothesisViolation(f"positivity hypothesis violated: {what} = 0")
    if den.value <= 0.0:
        return rho
    return min(rho, num.value / (scale * den.value))
