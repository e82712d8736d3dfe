"""Regularized saddle problems on ball(r) x T and their sampled checks.

The working objective is phi(x, y) = (L/2) ||x||^2 + J(x, y), minimized in x
over the closed ball of radius r and maximized in y over a closed convex
T.  The solver is the extragradient iteration with a fixed step below
1/(2 * smoothness); each iteration takes one probing half-step and one full
step, both through the projections.

``check_saddle`` certifies a candidate pair by sampling: the maximizing
property of y* within tolerance, the strictly-minimizing property of x*
with a margin outside a small exclusion ball, sphere membership of x* when
the radius is admissible, and the minimax gap of phi.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, NonConvergence
from .geometry import Ball, ConvexSet, as_point, norm, project_ball, sample_ball, sample_sphere

EVAL_DOMAIN_TOL = 1e-9
SPHERE_TOL = 1e-6
MAX_STEP_HALVINGS = 60


@dataclass
class SaddleConfig:
    """Problem geometry, regularization weight and solver knobs.

    ``step`` defaults to 1/(2 * smoothness) where ``smoothness`` defaults to
    L + grad_lipschitz + cross_bound of the payoff.  ``r_max`` is the
    admissible radius when known; it gates the sphere-membership check.
    """

    r: float
    T: ConvexSet
    L: float
    step: float | None = None
    smoothness: float | None = None
    tol: float = 1e-8
    max_iters: int = 10**6
    check_tol: float = 1e-8
    strict_margin: float = 1e-9
    exclusion_factor: float = 1e-4
    r_max: float | None = None

    def __post_init__(self):
        if not (np.isfinite(self.r) and self.r > 0):
            raise InvalidInput("r must be positive")
        if not (np.isfinite(self.L) and self.L >= 0):
            raise InvalidInput("L must be finite and >= 0")
        if self.step is not None and self.step <= 0:
            raise InvalidInput("step must be positive")
        if self.tol <= 0 or self.max_iters < 1:
            raise InvalidInput("tol must be positive and max_iters >= 1")


@dataclass(frozen=True)
class SaddlePoint:
    x_star: np.ndarray
    y_star: np.ndarray
    residual: float
    iterations: int
    step: float


@dataclass
class CheckReport:
    """Outcome of one sampled check.

    ``margin`` is the worst observed slack (positive means the property held
    with room); ``witness`` is a violating sample when one exists.
    """

    name: str
    passed: bool
    n_samples: int
    margin: float
    witness: np.ndarray | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {"name": self.name, "passed": bool(self.passed),
                "n_samples": int(self.n_samples), "margin": float(self.margin),
                "witness": None if self.witness is None else [float(v) for v in self.witness],
                "details": {k: (float(v) if isinstance(v, (int, float, np.floating)) else v)
                            for k, v in self.details.items()}}


@dataclass
class SaddleChecks:
    reports: list[CheckReport]
    minimax_gap: float

    @property
    def passed(self) -> bool:
        return all(rep.passed for rep in self.reports)

    def report(self, name: str) -> CheckReport:
        for rep in self.reports:
            if rep.name == name:
                return rep
        raise KeyError(name)

    def to_dict(self):
        return {"passed": self.passed, "minimax_gap": float(self.minimax_gap),
                "reports": [rep.to_dict() for rep in self.reports]}


def _grad_y(payoff, x, y):
    if payoff.grad_y is not None:
        return np.asarray(payoff.grad_y(x, y), dtype=float)
    h = 1e-6 * max(1.0, norm(y))
    g = np.empty_like(y)
    for j in range(y.size):
        e = np.zeros_like(y)
        e[j] = h
        g[j] = (payoff.value(x, y + e) - payoff.value(x, y - e)) / (2.0 * h)
    return g


def phi_value_grad(payoff, L: float, x, y):
    """(phi, grad_x phi, grad_y phi) at (x, y); x must lie in the domain ball."""
    x = as_point(x, dim=payoff.dimension)
    y = as_point(y, dim=payoff.dimension)
    if norm(x) > payoff.x_radius + EVAL_DOMAIN_TOL:
        raise InvalidInput(
            f"x lies outside the domain ball of radius {payoff.x_radius}")
    val = 0.5 * L * float(x @ x) + payoff.value(x, y)
    gx = L * x + np.asarray(payoff.grad_x(x, y), dtype=float)
    gy = _grad_y(payoff, x, y)
    return val, gx, gy


def _default_step(payoff, cfg: SaddleConfig) -> float:
    if cfg.step is not None:
        return cfg.step
    ell = cfg.smoothness
    if ell is None:
        ell = cfg.L
        if payoff.grad_lipschitz is not None:
            ell += payoff.grad_lipschitz
        if payoff.cross_bound is not None:
            ell += payoff.cross_bound
    # a constant payoff gradient has zero smoothness; any fixed step converges
    return 1.0 if ell <= 1e-12 else 1.0 / (2.0 * ell)


def solve_saddle(payoff, cfg: SaddleConfig, x0=None, y0=None) -> SaddlePoint:
    """Extragradient iteration for the regularized saddle problem.

    Starts at (0, P_T(0)) unless overridden.  Stops when the fixed-point
    residual ||(x - P_ball(x - step*gx), y - P_T(y + step*gy))|| falls below
    ``cfg.tol``; raises NonConvergence at the iteration cap.  A sustained
    residual blow-up (10x the best seen) halves the step and restarts from
    the best iterate, which keeps the run deterministic.
    """
    r = cfg.r
    if r > payoff.x_radius + EVAL_DOMAIN_TOL:
        raise InvalidInput(
            f"ball radius {r} exceeds the payoff domain radius {payoff.x_radius}")
    T = cfg.T
    x = project_ball(as_point(x0, dim=payoff.dimension) if x0 is not None
                     else np.zeros(payoff.dimension), r)
    y = T.project(as_point(y0, dim=payoff.dimension) if y0 is not None
                  else np.zeros(payoff.dimension))
    tau = _default_step(payoff, cfg)
    best_res = np.inf
    best_x, best_y = x, y
    halvings = 0
    res = np.inf
    for it in range(1, cfg.max_iters + 1):
        gx = cfg.L * x + np.asarray(payoff.grad_x(x, y), dtype=float)
        gy = _grad_y(payoff, x, y)
        xh = project_ball(x - tau * gx, r)
        yh = T.project(y + tau * gy)
        res = float(np.hypot(norm(x - xh), norm(y - yh)))
        if res <= cfg.tol:
            return SaddlePoint(x, y, res, it, tau)
        if res < best_res:
            best_res, best_x, best_y = res, x, y
        elif res > 10.0 * best_res and it > 20:
            halvings += 1
            if halvings > MAX_STEP_HALVINGS:
                raise NonConvergence("step halving limit reached",
                                     residual=res, iterations=it)
            tau *= 0.5
            x, y = best_x, best_y
            best_res = np.inf
            continue
        gxh = cfg.L * xh + np.asarray(payoff.grad_x(xh, yh), dtype=float)
        gyh = _grad_y(payoff, xh, yh)
        x = project_ball(x - tau * gxh, r)
        y = T.project(y + tau * gyh)
    raise NonConvergence(
        f"extragradient did not reach tolerance {cfg.tol} in {cfg.max_iters} iterations",
        residual=res, iterations=cfg.max_iters)


def payoff_depends_on_y(payoff, x_star, T: ConvexSet, seed: int = 0) -> bool:
    """False when the payoff is y-independent near the solution (then the
    reported y* is just one valid choice among many)."""
    rng = np.random.default_rng(seed)
    probes = list(T.sample(rng, 3)) + [T.project(np.asarray(x_star, dtype=float))]
    return any(norm(_grad_y(payoff, np.asarray(x_star, dtype=float), y)) > 1e-12
               for y in probes)


def ball_check_samples(rng, n: int, dim: int, r: float, x_star: np.ndarray) -> np.ndarray:
    """Ball samples enriched with sphere samples, axis boundary points and
    the antipode of x*."""
    inside = sample_ball(rng, n, dim, r)
    on_sphere = sample_sphere(rng, max(n // 4, 1), dim, r)
    axes = np.zeros((2 * dim, dim))
    for i in range(dim):
        axes[2 * i, i] = r
        axes[2 * i + 1, i] = -r
    extras = [inside, on_sphere, axes]
    nx = norm(x_star)
    if nx > 0:
        extras.append((-r / nx) * x_star[None, :])
    return np.vstack(extras)


def _y_samples(rng, n: int, T: ConvexSet, dim: int) -> np.ndarray:
    pts = [T.sample(rng, n)]
    if isinstance(T, Ball):
        pts.append(sample_sphere(rng, max(n // 4, 1), dim, T.radius))
        axes = np.zeros((2 * dim, dim))
        for i in range(dim):
            axes[2 * i, i] = T.radius
            axes[2 * i + 1, i] = -T.radius
        pts.append(axes)
    return np.vstack(pts)


def check_saddle(payoff, point, cfg: SaddleConfig, n_samples: int = 2000,
                 seed: int = 0) -> SaddleChecks:
    """Sampled certification of a saddle candidate.

    Checks, in order: J(x*, y) <= J(x*, y*) + check_tol over sampled y in T;
    J(x, y*) >= J(x*, y*) + strict_margin over sampled x in ball(r) outside
    the exclusion ball of radius exclusion_factor * r; |...||x*|| - r| below
    1e-6 when L > 0 and r is within the admissible radius.  Also reports the
    sampled minimax gap of phi.
    """
    if isinstance(point, SaddlePoint):
        x_star, y_star = point.x_star, point.y_star
    else:
        x_star, y_star = point
    x_star = as_point(x_star, dim=payoff.dimension)
    y_star = as_point(y_star, dim=payoff.dimension)
    rng = np.random.default_rng(seed)
    dim = payoff.dimension
    r = cfg.r

    ys = _y_samples(rng, n_samples, cfg.T, dim)
    xs = ball_check_samples(rng, n_samples, dim, r, x_star)

    j_star = payoff.value(x_star, y_star)
    j_up = payoff.values_y(x_star, ys)
    up_slack = (j_star + cfg.check_tol) - j_up
    i_bad = int(np.argmin(up_slack))
    upper = CheckReport(
        name="y-maximal", passed=bool(up_slack[i_bad] >= 0.0),
        n_samples=ys.shape[0], margin=float(up_slack[i_bad]),
        witness=None if up_slack[i_bad] >= 0.0 else ys[i_bad],
        details={"tolerance": cfg.check_tol})

    excl = cfg.exclusion_factor * r
    far = np.linalg.norm(xs - x_star, axis=1) > excl
    xs_far = xs[far]
    j_low = payoff.values_x(xs_far, y_star)
    low_slack = j_low - (j_star + cfg.strict_margin)
    if xs_far.shape[0] == 0:
        lower = CheckReport(name="x-strictly-minimal", passed=True, n_samples=0,
                            margin=np.inf, details={"exclusion_radius": excl})
    else:
        i_bad = int(np.argmin(low_slack))
        lower = CheckReport(
            name="x-strictly-minimal", passed=bool(low_slack[i_bad] >= 0.0),
            n_samples=xs_far.shape[0], margin=float(low_slack[i_bad]),
            witness=None if low_slack[i_bad] >= 0.0 else xs_far[i_bad],
            details={"exclusion_radius": excl, "strict_margin": cfg.strict_margin})

    reports = [upper, lower]
    sphere_applicable = cfg.L > 0 and cfg.r_max is not None and r <= cfg.r_max + 1e-12
    if sphere_applicable:
        gap = abs(norm(x_star) - r)
        reports.append(CheckReport(
            name="sphere-membership", passed=bool(gap <= SPHERE_TOL),
            n_samples=1, margin=float(SPHERE_TOL - gap),
            witness=None if gap <= SPHERE_TOL else x_star,
            details={"norm_gap": gap}))

    # minimax gap of the regularized objective over the same samples
    half_l = 0.5 * cfg.L
    phi_up = half_l * float(x_star @ x_star) + max(float(np.max(j_up)), j_star)
    phi_at_xs = half_l * np.einsum("mi,mi->m", xs, xs) + payoff.values_x(xs, y_star)
    phi_low = min(float(np.min(phi_at_xs)), half_l * float(x_star @ x_star) + j_star)
    return SaddleChecks(reports=reports, minimax_gap=float(phi_up - phi_low))
