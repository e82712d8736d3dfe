"""Extragradient solver and sampled saddle certification."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ballsaddle import (Ball, Box, InvalidInput, NonConvergence, Payoff,
                        SaddleConfig, SaddlePoint, check_saddle, make_constant,
                        phi_value_grad, solve_saddle, vi_payoff)


def linear_payoff(c, rho, y_set):
    """J(x, y) = <c, x>, independent of y."""
    c = np.asarray(c, dtype=float)
    return Payoff(
        dimension=c.size, x_radius=rho, y_set=y_set,
        value=lambda x, y: float(c @ x),
        grad_x=lambda x, y: c.copy(),
        grad_y=lambda x, y: np.zeros_like(c),
        grad_lipschitz=0.0, cross_bound=0.0)


def bilinear_1d():
    """J(x, y) = x y on [-0.3, 0.3] x [1, 2]."""
    return Payoff(
        dimension=1, x_radius=0.3, y_set=Box([1.0], [2.0]),
        value=lambda x, y: float(x[0] * y[0]),
        grad_x=lambda x, y: np.array([y[0]]),
        grad_y=lambda x, y: np.array([x[0]]),
        grad_lipschitz=0.0, cross_bound=1.0)


class TestSolve:
    def test_constant_map_payoff(self):
        # J(x, y) = <c, x - y> with c = (3, 4): min over ball(0.5) sits at
        # -0.5 c / |c|
        p = vi_payoff(make_constant([3.0, 4.0], 1.0))
        cfg = SaddleConfig(r=0.5, T=Ball(1.0, 2), L=0.0, tol=1e-10)
        pt = solve_saddle(p, cfg)
        assert_allclose(pt.x_star, [-0.3, -0.4], atol=1e-8)
        assert pt.residual <= 1e-10

    def test_bilinear_corner(self):
        p = bilinear_1d()
        cfg = SaddleConfig(r=0.3, T=p.y_set, L=0.0, tol=1e-10)
        pt = solve_saddle(p, cfg)
        assert_allclose(pt.x_star, [-0.3], atol=1e-8)
        assert_allclose(pt.y_star, [1.0], atol=1e-8)

    def test_regularized_interior_minimum(self):
        # phi = 0.5 |x|^2 + <b, x>: unconstrained minimum -b, interior here
        b = np.array([0.4, -0.2])
        p = linear_payoff(b, 1.0, Ball(1.0, 2))
        cfg = SaddleConfig(r=1.0, T=Ball(1.0, 2), L=1.0, tol=1e-10)
        pt = solve_saddle(p, cfg)
        assert_allclose(pt.x_star, -b, atol=1e-8)

    def test_constant_gradient_unit_step(self):
        # zero smoothness: the default step is the unit fallback
        p = linear_payoff([1.0, 0.0], 1.0, Ball(1.0, 2))
        cfg = SaddleConfig(r=0.5, T=Ball(1.0, 2), L=0.0)
        pt = solve_saddle(p, cfg)
        assert pt.step == 1.0
        assert_allclose(pt.x_star, [-0.5, 0.0], atol=1e-7)

    def test_custom_start_same_answer(self):
        p = vi_payoff(make_constant([3.0, 4.0], 1.0))
        cfg = SaddleConfig(r=0.5, T=Ball(1.0, 2), L=0.0, tol=1e-10)
        a = solve_saddle(p, cfg)
        b = solve_saddle(p, cfg, x0=[0.2, -0.1], y0=[0.5, 0.5])
        assert_allclose(a.x_star, b.x_star, atol=1e-8)

    def test_determinism(self):
        p = bilinear_1d()
        cfg = SaddleConfig(r=0.3, T=p.y_set, L=0.0, tol=1e-10)
        a = solve_saddle(p, cfg)
        b = solve_saddle(p, cfg)
        assert a.x_star.tobytes() == b.x_star.tobytes()
        assert a.iterations == b.iterations and a.residual == b.residual

    def test_nonconvergence_carries_residual(self):
        # geometric convergence cannot reach 1e-14 in three iterations
        p = linear_payoff([0.4, -0.2], 1.0, Ball(1.0, 2))
        cfg = SaddleConfig(r=1.0, T=Ball(1.0, 2), L=1.0, tol=1e-14, max_iters=3)
        with pytest.raises(NonConvergence) as exc:
            solve_saddle(p, cfg)
        assert exc.value.iterations == 3
        assert exc.value.residual > 0

    def test_radius_exceeding_domain_rejected(self):
        p = vi_payoff(make_constant([1.0, 0.0], 1.0))
        cfg = SaddleConfig(r=2.0, T=Ball(1.0, 2), L=0.0)
        with pytest.raises(InvalidInput):
            solve_saddle(p, cfg)


class TestPhi:
    def test_value_and_gradients(self):
        p = vi_payoff(make_constant([3.0, 4.0], 1.0))
        x, y = np.array([0.1, 0.2]), np.array([0.3, -0.3])
        val, gx, gy = phi_value_grad(p, 2.0, x, y)
        c = np.array([3.0, 4.0])
        assert_allclose(val, 0.5 * 2.0 * float(x @ x) + float(c @ (x - y)))
        assert_allclose(gx, 2.0 * x + c)
        assert_allclose(gy, -c)

    def test_domain_violation(self):
        p = vi_payoff(make_constant([3.0, 4.0], 1.0))
        with pytest.raises(InvalidInput):
            phi_value_grad(p, 1.0, np.array([2.0, 0.0]), np.zeros(2))


class TestChecks:
    def make_solved(self):
        p = vi_payoff(make_constant([3.0, 4.0], 1.0))
        cfg = SaddleConfig(r=0.5, T=Ball(1.0, 2), L=0.0, tol=1e-10, r_max=1.0)
        return p, cfg, solve_saddle(p, cfg)

    def test_pass_on_solution(self):
        p, cfg, pt = self.make_solved()
        checks = check_saddle(p, pt, cfg, n_samples=1500, seed=0)
        assert checks.passed
        assert checks.report("y-maximal").passed
        assert checks.report("x-strictly-minimal").margin > 0
        assert checks.minimax_gap < 10.0  # finite and sane

    def test_sphere_check_applies_only_with_regularizer(self):
        p, cfg, pt = self.make_solved()
        names = [rep.name for rep in check_saddle(p, pt, cfg, n_samples=200).reports]
        assert "sphere-membership" not in names  # L = 0 here
        cfg2 = SaddleConfig(r=0.5, T=Ball(1.0, 2), L=1.0, r_max=1.0)
        pt2 = solve_saddle(vi_payoff(make_constant([3.0, 4.0], 1.0)), cfg2)
        names2 = [rep.name
                  for rep in check_saddle(p, pt2, cfg2, n_samples=200).reports]
        assert "sphere-membership" in names2

    def test_tampered_point_fails_with_witness(self):
        p, cfg, pt = self.make_solved()
        bad = SaddlePoint(np.array([0.3, 0.4]), pt.y_star, pt.residual,
                          pt.iterations, pt.step)
        checks = check_saddle(p, bad, cfg, n_samples=1500, seed=0)
        rep = checks.report("x-strictly-minimal")
        assert not rep.passed
        assert rep.witness is not None
        assert not checks.passed

    def test_reports_serialize(self):
        p, cfg, pt = self.make_solved()
        d = check_saddle(p, pt, cfg, n_samples=300).to_dict()
        assert d["passed"] is True
        assert {rep["name"] for rep in d["reports"]} >= {"y-maximal",
                                                         "x-strictly-minimal"}
