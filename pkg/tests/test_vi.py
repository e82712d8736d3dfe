"""Variational inequality certificates: solve, gates, shifted form, small radius."""

import dataclasses

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ballsaddle import (CertificationError, CheckFailure, HypothesisViolation,
                        InvalidInput, check_vi, make_affine, make_constant,
                        make_quadratic, small_radius, solve_vi, solve_vi_shifted,
                        vi_report)


def affine_instance():
    # F(x) = x + (2, 0) on the unit ball: theta = 1, M = 2, sigma = 1,
    # admissible radius 1/4, solution (-1/4, 0)
    return make_affine(np.eye(2), [2.0, 0.0], 1.0)


def quartic_gate_map(scale=1.0):
    # F(x) = (x^T x) e_1 pattern via Q1 = I: theta1 = 2, gamma1 = 2, M1 = 8
    Q = np.zeros((2, 2, 2))
    Q[0] = np.eye(2) * scale
    return make_quadratic(np.zeros((2, 2)), np.zeros(2), Q, 1.0)


class TestSolveVI:
    def test_affine_certificate(self):
        cert = solve_vi(affine_instance(), tol=1e-10)
        assert cert.passed and cert.mode == "certified"
        assert abs(cert.r - 0.25) <= 1e-9
        assert_allclose(cert.x_star, [-0.25, 0.0], atol=1e-7)
        assert cert.collapse_gap <= 1e-6
        assert cert.direction_gap <= 1e-6
        assert cert.vi_check.passed
        assert cert.uniqueness["passed"]

    def test_constant_map_closed_form(self):
        # F = (3, 4): the solution is the antipodal sphere point -r F / |F|
        cert = solve_vi(make_constant([3.0, 4.0], 1.0), r=0.5, tol=1e-10)
        assert_allclose(cert.x_star, [-0.3, -0.4], atol=1e-7)
        assert cert.passed

    def test_solution_direction_identity(self):
        # x* = -r F(x*) / ||F(x*)|| is reported as the direction gap
        cert = solve_vi(affine_instance(), tol=1e-10)
        F = cert.x_star + np.array([2.0, 0.0])
        assert_allclose(cert.x_star, -0.25 * F / np.linalg.norm(F), atol=1e-6)

    def test_radius_above_admissible_rejected(self):
        with pytest.raises(HypothesisViolation) as exc:
            solve_vi(affine_instance(), r=0.3)
        assert exc.value.deficit == pytest.approx(0.05, abs=1e-9)

    def test_zero_sigma_rejected(self):
        m = make_affine(np.eye(2), [0.0, 0.0], 1.0)
        with pytest.raises(HypothesisViolation):
            solve_vi(m)

    def test_sampled_constants_need_heuristic_mode(self):
        m = dataclasses.replace(affine_instance(), analytic=None, restricted=None)
        with pytest.raises(CertificationError):
            solve_vi(m, r=0.2)
        cert = solve_vi(m, r=0.2, mode="heuristic", tol=1e-10)
        assert cert.mode == "heuristic"
        assert not cert.constants.certified
        assert cert.passed  # checks still run and still pass

    def test_bad_mode_rejected(self):
        with pytest.raises(InvalidInput):
            solve_vi(affine_instance(), mode="party")

    def test_certificate_dict_shape(self):
        d = solve_vi(affine_instance(), tol=1e-10).to_dict()
        assert d["theorem"] == "2"
        assert set(d) >= {"mode", "r", "solution", "residuals", "constants",
                          "checks", "passed"}
        assert d["checks"]["vi"]["name"] == "vi-double-inequality"


class TestCheckVI:
    def test_margin_positive_at_solution(self):
        m = affine_instance()
        cert = solve_vi(m, tol=1e-10)
        rep = check_vi(m, cert.x_star, cert.r, n_samples=3000, seed=5)
        assert rep.passed and rep.margin > 0

    def test_wrong_point_yields_witness(self):
        m = affine_instance()
        rep = check_vi(m, np.array([0.25, 0.0]), 0.25, n_samples=2000, seed=0)
        assert not rep.passed
        assert rep.witness is not None
        # the true solution itself beats the impostor
        assert rep.details["worst_first_form"] > 0

    def test_interior_point_fails(self):
        m = affine_instance()
        rep = check_vi(m, np.array([-0.1, 0.0]), 0.25, n_samples=2000, seed=0)
        assert not rep.passed


class TestShifted:
    def test_accepts_above_threshold(self):
        # M1 = 8, threshold 16; w = (16, 0) meets it exactly
        cert = solve_vi_shifted(quartic_gate_map(), [16.0, 0.0], r=1.0, tol=1e-10)
        assert cert.theorem == "4"
        assert cert.passed
        assert_allclose(cert.x_star, [1.0, 0.0], atol=1e-6)
        assert cert.gate["threshold"] == pytest.approx(16.0)
        assert cert.gate["deficit"] == 0.0

    def test_rejects_below_threshold_with_deficit(self):
        with pytest.raises(HypothesisViolation) as exc:
            solve_vi_shifted(quartic_gate_map(), [15.9, 0.0], r=1.0)
        assert exc.value.deficit == pytest.approx(0.1, abs=1e-9)

    def test_rejects_nonvanishing_jacobian(self):
        with pytest.raises(HypothesisViolation):
            solve_vi_shifted(affine_instance(), [100.0, 0.0])


class TestSmallRadius:
    def test_affine_values(self):
        # |F(0)| = 2, |jac(0)| = 1: r* = (1 - eps) * 2 at eps = 0.5 -> 1.0,
        # capped at rho = 1
        res = small_radius(affine_instance(), epsilon=0.5)
        assert res.r_star == pytest.approx(1.0)
        assert res.sigma_floor == pytest.approx(1.0)
        assert res.report.sigma.value >= res.sigma_floor - 1e-9

    def test_shrinks_with_epsilon(self):
        m = make_affine(4.0 * np.eye(2), [2.0, 0.0], 1.0)
        tight = small_radius(m, epsilon=0.9)
        loose = small_radius(m, epsilon=0.1)
        assert tight.r_star < loose.r_star
        # r* = (1 - eps) |F(0)| / |jac(0)| = (1 - eps) / 2 here
        assert tight.r_star == pytest.approx(0.05)
        assert loose.r_star == pytest.approx(0.45)

    def test_restricted_map_certifies(self):
        res = small_radius(make_affine(4.0 * np.eye(2), [2.0, 0.0], 1.0),
                           epsilon=0.5)
        cert = solve_vi(res.map, report=res.report, tol=1e-10)
        assert cert.passed

    def test_vanishing_origin_rejected(self):
        with pytest.raises(HypothesisViolation):
            small_radius(make_affine(np.eye(2), [0.0, 0.0], 1.0))

    def test_epsilon_domain(self):
        for eps in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(InvalidInput):
                small_radius(affine_instance(), epsilon=eps)

    def test_sigma_floor_honest(self):
        # the actual sigma of the restricted map never undercuts the floor
        rng = np.random.default_rng(3)
        for _ in range(5):
            A = rng.normal(size=(2, 2))
            b = rng.normal(size=2)
            if np.linalg.norm(b) < 0.3:
                continue
            res = small_radius(make_affine(A, b, 1.0), epsilon=0.3)
            assert res.report.sigma.value >= res.sigma_floor - 1e-8
