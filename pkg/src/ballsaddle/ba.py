"""Best-approximation points and prox pairs for maps on small balls.

For a C^1 map f on ball(rho) and bounded closed convex Y, the payoff

    J(x, y) = ||f(x) - x||^2 - ||f(x) - y||^2

has a saddle pair (x*, y*) on sphere(r) x T for every r up to the
admissible radius, with y* = P_T(f(x*)).  When Y = ball(rho) and
T = ball(r) the pair collapses to a single x* that is simultaneously the
unique nearest point of ball(r) to its own image:

    ||f(x*) - x*|| = dist(f(x*), ball(r)),
    ||f(x) - x*||  < ||f(x) - x||   for every other x in ball(r).

``solve_prox_pair`` certifies the general pair; ``solve_best_approx`` adds
the collapse and nearest-point conclusions; ``ba_small_radius`` picks a
radius that makes the hypotheses automatic when f(0) != 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import SmoothMap, ba_payoff
from .constants import ConstantsReport, ba_report, op_norm
from .errors import CertificationError, CheckFailure, HypothesisViolation, InvalidInput
from .geometry import Ball, ConvexSet, dist_ball, norm
from .oracles import uniqueness_probe
from .saddle import (CheckReport, SaddleChecks, SaddleConfig, ball_check_samples,
                     check_saddle, solve_saddle)
from .vi import MAP_ZERO_TOL, UNIQUENESS_TOL, SmallRadiusResult

COLLAPSE_TOL = 1e-6
IDENTITY_TOL = 1e-6
CONTAINMENT_TOL = 1e-9


@dataclass
class BACertificate:
    """Solution, constants and check outcomes of one approximation run."""

    theorem: str
    mode: str
    r: float
    x_star: np.ndarray
    y_star: np.ndarray
    residual: float
    iterations: int
    projection_gap: float
    constants: ConstantsReport
    saddle_checks: SaddleChecks
    uniqueness: dict | None
    passed: bool
    collapse_gap: float | None = None
    distance_gap: float | None = None
    nearest_check: CheckReport | None = None

    def to_dict(self):
        res = {"saddle_residual": float(self.residual),
               "projection_gap": float(self.projection_gap)}
        if self.collapse_gap is not None:
            res["collapse_gap"] = float(self.collapse_gap)
        if self.distance_gap is not None:
            res["distance_gap"] = float(self.distance_gap)
        checks = {"saddle": self.saddle_checks.to_dict(), "uniqueness": self.uniqueness}
        if self.nearest_check is not None:
            checks["nearest-point"] = self.nearest_check.to_dict()
        return {
            "theorem": self.theorem, "mode": self.mode, "r": float(self.r),
            "solution": {"x_star": [float(v) for v in self.x_star],
                         "y_star": [float(v) for v in self.y_star]},
            "residuals": res, "iterations": int(self.iterations),
            "constants": self.constants.to_dict(), "checks": checks,
            "passed": bool(self.passed),
        }


def _containment_check(T: ConvexSet, Y: ConvexSet, seed: int, n: int = 128):
    rng = np.random.default_rng(seed)
    for t in T.sample(rng, n):
        if norm(Y.project(t) - t) > CONTAINMENT_TOL:
            raise HypothesisViolation(
                "T must be contained in Y; a sampled point of T projects "
                f"{norm(Y.project(t) - t):.2e} away")


def _uniqueness(payoff, cfg: SaddleConfig, starts: int, seed: int) -> dict:
    def solve_from(x0):
        return solve_saddle(payoff, cfg, x0=x0, y0=x0).x_star

    spread = uniqueness_probe(solve_from, starts=starts, seed=seed,
                              dim=payoff.dimension, radius=cfg.r)
    return {"starts": starts, "max_pairwise": float(spread),
            "passed": bool(spread <= UNIQUENESS_TOL)}


def solve_prox_pair(m: SmoothMap, Y: ConvexSet, T: ConvexSet,
                    r: float | None = None, report: ConstantsReport | None = None,
                    *, mode: str = "certified", n_samples: int = 2000, seed: int = 0,
                    uniqueness_starts: int = 16, tol: float = 1e-8,
                    max_iters: int = 10**6, check_tol: float = 1e-8,
                    strict_margin: float = 1e-9, exclusion_factor: float = 1e-4,
                    theorem: str = "5",
                    skip_containment: bool = False) -> BACertificate:
    """Solve and certify the saddle pair of the approximation payoff on
    ball(r) x T, with y* the projection of f(x*) onto T.

    ``r`` defaults to the admissible radius sigma / L.  Certified mode
    requires certification-grade constants and r within the admissible
    radius.
    """
    if mode not in ("certified", "heuristic"):
        raise InvalidInput(f"mode must be 'certified' or 'heuristic', got {mode!r}")
    if report is None:
        report = ba_report(m, Y, seed=seed)
    sigma = report.sigma.value if report.sigma is not None else 0.0
    if sigma <= 0.0:
        raise HypothesisViolation(
            "sigma = 0: Y reaches the gradient kernel at the origin")
    if r is None:
        r = report.r_max
    if not (np.isfinite(r) and 0 < r <= m.domain_radius):
        raise InvalidInput(f"r must lie in (0, {m.domain_radius}], got {r}")
    if mode == "certified":
        if not report.certified:
            raise CertificationError(
                "constants are sampled lower bounds, not certification grade; "
                "rerun in heuristic mode or declare analytic constants")
        if r > report.r_max + 1e-12:
            raise HypothesisViolation(
                f"r = {r} exceeds the admissible radius {report.r_max}",
                deficit=r - report.r_max)
    if not skip_containment:
        _containment_check(T, Y, seed + 7)

    payoff = ba_payoff(m, Y)
    L = report.L.value
    cfg = SaddleConfig(
        r=r, T=T, L=L, smoothness=2.0 * L + report.theta.value,
        tol=tol, max_iters=max_iters, check_tol=check_tol,
        strict_margin=strict_margin, exclusion_factor=exclusion_factor,
        r_max=report.r_max)
    sp = solve_saddle(payoff, cfg)

    proj = T.project(m.val(sp.x_star))
    projection_gap = norm(sp.y_star - proj)
    if projection_gap > IDENTITY_TOL:
        raise CheckFailure(
            f"y* is {projection_gap:.2e} from the projection of f(x*) onto T",
            witness=sp.y_star)
    schecks = check_saddle(payoff, sp, cfg, n_samples=n_samples, seed=seed + 1)
    uniq = (_uniqueness(payoff, cfg, uniqueness_starts, seed + 3)
            if uniqueness_starts >= 2 else None)
    passed = schecks.passed and (uniq is None or uniq["passed"])
    return BACertificate(
        theorem=theorem, mode=mode, r=float(r), x_star=sp.x_star, y_star=sp.y_star,
        residual=sp.residual, iterations=sp.iterations,
        projection_gap=float(projection_gap), constants=report,
        saddle_checks=schecks, uniqueness=uniq, passed=passed)


def check_nearest_point(m: SmoothMap, x_star, r: float, n_samples: int = 2000,
                        seed: int = 0, strict_margin: float = 1e-9,
                        exclusion_factor: float = 1e-4) -> CheckReport:
    """Sampled check that x* is strictly closer to every image f(x) than x
    itself is, over ball(r) outside the exclusion ball."""
    x_star = np.asarray(x_star, dtype=float)
    rng = np.random.default_rng(seed)
    xs = ball_check_samples(rng, n_samples, m.dimension, r, x_star)
    far = np.linalg.norm(xs - x_star, axis=1) > exclusion_factor * r
    xs = xs[far]
    if xs.shape[0] == 0:
        return CheckReport(name="nearest-point", passed=True, n_samples=0,
                           margin=np.inf)
    F = m.vals(xs)
    to_star = np.linalg.norm(F - x_star, axis=1)
    to_self = np.linalg.norm(F - xs, axis=1)
    slack = to_self - to_star - strict_margin
    i_bad = int(np.argmin(slack))
    return CheckReport(
        name="nearest-point", passed=bool(slack[i_bad] >= 0.0),
        n_samples=xs.shape[0], margin=float(slack[i_bad]),
        witness=None if slack[i_bad] >= 0.0 else xs[i_bad],
        details={"strict_margin": strict_margin,
                 "exclusion_radius": exclusion_factor * r})


def solve_best_approx(m: SmoothMap, r: float | None = None,
                      report: ConstantsReport | None = None, *,
                      mode: str = "certified", n_samples: int = 2000, seed: int = 0,
                      uniqueness_starts: int = 16, tol: float = 1e-8,
                      max_iters: int = 10**6, check_tol: float = 1e-8,
                      strict_margin: float = 1e-9,
                      exclusion_factor: float = 1e-4) -> BACertificate:
    """Certify the unique best-approximation point: Y = ball(rho) and
    T = ball(r), where the saddle pair collapses onto x* = P_ball(r)(f(x*)).
    """
    Y = Ball(m.domain_radius, m.dimension)
    if report is None:
        report = ba_report(m, Y, seed=seed)
    if report.sigma is None or report.sigma.value <= 0.0:
        raise HypothesisViolation(
            "sigma = 0: Y reaches the gradient kernel at the origin")
    if r is None:
        r = report.r_max
    cert = solve_prox_pair(
        m, Y, Ball(float(r), m.dimension), r, report, mode=mode,
        n_samples=n_samples, seed=seed, uniqueness_starts=uniqueness_starts,
        tol=tol, max_iters=max_iters, check_tol=check_tol,
        strict_margin=strict_margin, exclusion_factor=exclusion_factor,
        theorem="6", skip_containment=True)

    collapse_gap = norm(cert.x_star - cert.y_star)
    if collapse_gap > COLLAPSE_TOL:
        raise CheckFailure(
            f"saddle components did not collapse (gap {collapse_gap:.2e})",
            witness=cert.x_star)
    fx = m.val(cert.x_star)
    distance_gap = abs(norm(fx - cert.x_star) - dist_ball(fx, cert.r))
    near = check_nearest_point(m, cert.x_star, cert.r, n_samples=n_samples,
                               seed=seed + 4, strict_margin=strict_margin,
                               exclusion_factor=exclusion_factor)
    cert.collapse_gap = float(collapse_gap)
    cert.distance_gap = float(distance_gap)
    cert.nearest_check = near
    cert.passed = bool(cert.passed and near.passed and distance_gap <= IDENTITY_TOL)
    return cert


def ba_small_radius(m: SmoothMap, epsilon: float = 0.5) -> SmallRadiusResult:
    """Pick r* = min(rho, (1 - eps) ||f(0)|| / ||jac(0)||) so the restricted
    approximation problem has sigma >= eps * ||f(0)|| > 0.

    Requires f(0) != 0; a fixed point at the origin leaves nothing to
    approximate from the sphere.
    """
    if not (0.0 < epsilon < 1.0):
        raise InvalidInput(f"epsilon must lie in (0, 1), got {epsilon}")
    zero = np.zeros(m.dimension)
    v0 = norm(m.val(zero))
    if v0 <= MAP_ZERO_TOL:
        raise HypothesisViolation(
            "the map vanishes at the origin; no positive radius can be certified")
    j0 = op_norm(m.jac(zero))
    r_star = min(m.domain_radius, (1.0 - epsilon) * v0 / max(j0, 1e-12))
    restricted = m.restrict(r_star)
    report = ba_report(restricted, Ball(r_star, m.dimension))
    return SmallRadiusResult(r_star=float(r_star), epsilon=float(epsilon),
                             sigma_floor=float(epsilon * v0), report=report,
                             map=restricted)
