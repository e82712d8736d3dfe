"""Variational-inequality solutions on small balls, with certificates.

Given a C^1 map F on the ball of radius rho with sigma > 0, every radius r
up to the admissible sigma/(2M) bound carries a unique point x* on the
sphere of radius r satisfying the double strict inequality

    max{ <F(x*), x* - x>, <F(x), x* - x> } < 0   for all x in ball(r), x != x*.

The point is computed as the collapsed saddle point of the payoff
J(x, y) = <F(x), x - y> regularized with weight L = M, and certified by
sampled checks plus structural identities: x* = y*, F(x*) != 0 and x*
antiparallel to F(x*) on the sphere.

``solve_vi_shifted`` handles maps with vanishing Jacobian at the origin
shifted by a far-enough target w, and ``small_radius`` picks a radius that
makes the positivity hypothesis automatic when F(0) != 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .catalog import SmoothMap, shift_map, vi_payoff
from .constants import ConstantsReport, op_norm, vi_report
from .errors import CertificationError, CheckFailure, HypothesisViolation, InvalidInput
from .geometry import Ball, norm
from .oracles import uniqueness_probe
from .saddle import (CheckReport, SaddleChecks, SaddleConfig, ball_check_samples,
                     check_saddle, solve_saddle)

COLLAPSE_TOL = 1e-6
DIRECTION_TOL = 1e-6
UNIQUENESS_TOL = 1e-5
MAP_ZERO_TOL = 1e-9


@dataclass
class VICertificate:
    """Solution, constants and check outcomes of one run.

    ``theorem`` is the wire label of the certified statement template (see
    the certificate format notes in the README).  ``mode`` is "certified"
    only when every constant used is certification grade and r respects the
    admissible radius.
    """

    theorem: str
    mode: str
    r: float
    x_star: np.ndarray
    y_star: np.ndarray
    residual: float
    iterations: int
    collapse_gap: float
    map_norm: float
    direction_gap: float
    constants: ConstantsReport
    saddle_checks: SaddleChecks
    vi_check: CheckReport
    uniqueness: dict | None
    passed: bool
    gate: dict = field(default_factory=dict)

    def to_dict(self):
        sol = {"x_star": [float(v) for v in self.x_star],
               "y_star": [float(v) for v in self.y_star]}
        return {
            "theorem": self.theorem, "mode": self.mode, "r": float(self.r),
            "solution": sol,
            "residuals": {"saddle_residual": float(self.residual),
                          "collapse_gap": float(self.collapse_gap),
                          "direction_gap": float(self.direction_gap),
                          "map_norm": float(self.map_norm)},
            "iterations": int(self.iterations),
            "constants": self.constants.to_dict(),
            "checks": {"saddle": self.saddle_checks.to_dict(),
                       "vi": self.vi_check.to_dict(),
                       "uniqueness": self.uniqueness},
            "gate": self.gate,
            "passed": bool(self.passed),
        }


def check_vi(m: SmoothMap, x_star, r: float, n_samples: int = 2000, seed: int = 0,
             strict_margin: float = 1e-9, exclusion_factor: float = 1e-4) -> CheckReport:
    """Sampled check of the double strict inequality at x*.

    Samples ball(r) (enriched with sphere points, axis points and the
    antipode of x*), excludes a ball of radius exclusion_factor * r around
    x*, and requires both inner products below -strict_margin everywhere.
    """
    x_star = np.asarray(x_star, dtype=float)
    rng = np.random.default_rng(seed)
    xs = ball_check_samples(rng, n_samples, m.dimension, r, x_star)
    far = np.linalg.norm(xs - x_star, axis=1) > exclusion_factor * r
    xs = xs[far]
    if xs.shape[0] == 0:
        return CheckReport(name="vi-double-inequality", passed=True, n_samples=0,
                           margin=np.inf)
    d = x_star - xs
    first = d @ m.val(x_star)
    second = np.einsum("mi,mi->m", m.vals(xs), d)
    worst = np.maximum(first, second)
    i_bad = int(np.argmax(worst))
    slack = -float(worst[i_bad]) - strict_margin
    return CheckReport(
        name="vi-double-inequality", passed=bool(slack >= 0.0),
        n_samples=xs.shape[0], margin=slack,
        witness=None if slack >= 0.0 else xs[i_bad],
        details={"strict_margin": strict_margin,
                 "exclusion_radius": exclusion_factor * r,
                 "worst_first_form": float(np.max(first)),
                 "worst_second_form": float(np.max(second))})


def _uniqueness(payoff, cfg: SaddleConfig, starts: int, seed: int) -> dict:
    def solve_from(x0):
        return solve_saddle(payoff, cfg, x0=x0, y0=x0).x_star

    spread = uniqueness_probe(solve_from, starts=starts, seed=seed,
                              dim=payoff.dimension, radius=cfg.r)
    return {"starts": starts, "max_pairwise": float(spread),
            "passed": bool(spread <= UNIQUENESS_TOL)}


def solve_vi(m: SmoothMap, r: float | None = None,
             report: ConstantsReport | None = None, *, mode: str = "certified",
             n_samples: int = 2000, seed: int = 0, uniqueness_starts: int = 16,
             tol: float = 1e-8, max_iters: int = 10**6, check_tol: float = 1e-8,
             strict_margin: float = 1e-9, exclusion_factor: float = 1e-4,
             theorem: str = "2") -> VICertificate:
    """Solve and certify the variational inequality on ball(r).

    ``r`` defaults to the admissible radius.  In certified mode the
    constants must be certification grade and r must respect the admissible
    radius; heuristic mode skips both gates and watermarks the certificate.
    """
    if mode not in ("certified", "heuristic"):
        raise InvalidInput(f"mode must be 'certified' or 'heuristic', got {mode!r}")
    if report is None:
        report = vi_report(m, seed=seed)
    sigma = report.sigma.value if report.sigma is not None else 0.0
    if sigma <= 0.0:
        raise HypothesisViolation(
            "sigma = 0: the dual ball reaches the gradient kernel at the origin")
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

    payoff = vi_payoff(m)
    L = report.M.value
    cfg = SaddleConfig(
        r=r, T=Ball(r, m.dimension), L=L,
        smoothness=2.0 * report.M.value + report.theta.value,
        tol=tol, max_iters=max_iters, check_tol=check_tol,
        strict_margin=strict_margin, exclusion_factor=exclusion_factor,
        r_max=report.r_max)
    sp = solve_saddle(payoff, cfg)

    collapse_gap = norm(sp.x_star - sp.y_star)
    if collapse_gap > COLLAPSE_TOL:
        raise CheckFailure(
            f"saddle components did not collapse (gap {collapse_gap:.2e}); "
            "the solver failed or the constants are invalid",
            witness=sp.x_star)
    map_norm = norm(m.val(sp.x_star))
    if map_norm <= MAP_ZERO_TOL:
        raise CheckFailure("the map vanishes at the solution", witness=sp.x_star)
    direction_gap = norm(sp.x_star + (r / map_norm) * m.val(sp.x_star))

    schecks = check_saddle(payoff, sp, cfg, n_samples=n_samples, seed=seed + 1)
    vcheck = check_vi(m, sp.x_star, r, n_samples=n_samples, seed=seed + 2,
                      strict_margin=strict_margin, exclusion_factor=exclusion_factor)
    uniq = (_uniqueness(payoff, cfg, uniqueness_starts, seed + 3)
            if uniqueness_starts >= 2 else None)
    passed = (schecks.passed and vcheck.passed and direction_gap <= DIRECTION_TOL
              and (uniq is None or uniq["passed"]))
    return VICertificate(
        theorem=theorem, mode=mode, r=float(r), x_star=sp.x_star, y_star=sp.y_star,
        residual=sp.residual, iterations=sp.iterations,
        collapse_gap=float(collapse_gap), map_norm=float(map_norm),
        direction_gap=float(direction_gap), constants=report,
        saddle_checks=schecks, vi_check=vcheck, uniqueness=uniq, passed=passed)


def solve_vi_shifted(m: SmoothMap, w, r: float | None = None, *,
                     mode: str = "certified", n_samples: int = 2000, seed: int = 0,
                     uniqueness_starts: int = 16, tol: float = 1e-8,
                     max_iters: int = 10**6, check_tol: float = 1e-8,
                     strict_margin: float = 1e-9,
                     exclusion_factor: float = 1e-4) -> VICertificate:
    """Variational inequality for x -> m(x) - w when the Jacobian of ``m``
    vanishes at the origin.

    Requires ||w - m(0)|| >= 2 M1 rho with M1 = 2 (theta1 + rho gamma1); a
    shortfall raises HypothesisViolation with the deficit.  Every radius up
    to rho is then admissible for the shifted map.
    """
    w = np.asarray(w, dtype=float)
    zero = np.zeros(m.dimension)
    jac0_norm = op_norm(m.jac(zero))
    if jac0_norm > 1e-10:
        raise HypothesisViolation(
            f"the Jacobian at the origin must vanish (norm {jac0_norm:.2e})",
            deficit=jac0_norm)
    base = vi_report(m, seed=seed)
    if mode == "certified" and not base.certified:
        raise CertificationError(
            "constants of the unshifted map are not certification grade")
    m1 = base.M.value
    rho = m.domain_radius
    gap = norm(w - m.val(zero))
    deficit = 2.0 * m1 * rho - gap
    if deficit > 0.0:
        raise HypothesisViolation(
            f"||w - value(0)|| = {gap} is below the threshold {2.0 * m1 * rho}",
            deficit=deficit)
    shifted = shift_map(m, w)
    rep = vi_report(shifted, seed=seed)
    cert = solve_vi(shifted, r, rep, mode=mode, n_samples=n_samples, seed=seed,
                    uniqueness_starts=uniqueness_starts, tol=tol,
                    max_iters=max_iters, check_tol=check_tol,
                    strict_margin=strict_margin, exclusion_factor=exclusion_factor,
                    theorem="4")
    cert.gate = {"M1": float(m1), "threshold": float(2.0 * m1 * rho),
                 "shift_gap": float(gap), "deficit": float(max(deficit, 0.0)),
                 "jacobian_origin_norm": float(jac0_norm)}
    return cert


@dataclass(frozen=True)
class SmallRadiusResult:
    """A radius certified from the origin data alone, plus the constants of
    the map restricted to that ball."""

    r_star: float
    epsilon: float
    sigma_floor: float
    report: ConstantsReport
    map: SmoothMap

    def to_dict(self):
        return {"r_star": float(self.r_star), "epsilon": float(self.epsilon),
                "sigma_floor": float(self.sigma_floor),
                "constants": self.report.to_dict()}


def small_radius(m: SmoothMap, epsilon: float = 0.5) -> SmallRadiusResult:
    """Pick r* = min(rho, (1 - eps) ||m(0)|| / ||jac(0)||) so that the
    restricted map has sigma >= eps * ||m(0)|| > 0.

    Requires m(0) != 0; this turns nonvanishing at the origin into a
    certified variational inequality on the sphere of any r <= r*.
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
    report = vi_report(restricted)
    return SmallRadiusResult(r_star=float(r_star), epsilon=float(epsilon),
                             sigma_floor=float(epsilon * v0), report=report,
                             map=restricted)
