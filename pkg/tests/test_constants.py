"""Certified constants: operator norms, Lipschitz estimates, sigma, reports."""

import dataclasses

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ballsaddle import (Ball, Box, CertFlag, CertValue, ConstantsReport,
                        HypothesisViolation, admissible_radius, ba_report,
                        combine_flags, delta_const, estimate_lipschitz,
                        estimate_theta, make_affine, make_constant,
                        make_quadratic, op_norm, sigma_ba, sigma_vi, vi_payoff,
                        vi_report)
from ballsaddle.oracles import grid_sigma_oracle


def bare(m):
    """The same map with its declared constants dropped."""
    return dataclasses.replace(m, analytic=None, restricted=None)


class TestOpNorm:
    def test_identity_is_exactly_one(self):
        assert op_norm(np.eye(4)) == 1.0

    def test_matches_svd_oracle(self):
        # oracle: numpy SVD largest singular value
        rng = np.random.default_rng(0)
        for _ in range(40):
            n = int(rng.integers(1, 6))
            A = rng.normal(size=(n, n))
            assert abs(op_norm(A) - np.linalg.norm(A, 2)) <= 1e-8 * max(
                1.0, np.linalg.norm(A, 2))

    def test_zero_matrix(self):
        assert op_norm(np.zeros((3, 3))) == 0.0

    def test_rank_one(self):
        u = np.array([3.0, 4.0, 0.0])
        v = np.array([1.0, 2.0, 2.0])
        # |u| |v| = 5 * 3
        assert abs(op_norm(np.outer(u, v)) - 15.0) <= 1e-8

    def test_rejects_non_square(self):
        from ballsaddle import InvalidInput
        with pytest.raises(InvalidInput):
            op_norm(np.zeros((3, 2)))


class TestFlags:
    def test_ordering(self):
        assert combine_flags(CertFlag.ANALYTIC, CertFlag.ANALYTIC) is CertFlag.ANALYTIC
        assert combine_flags(CertFlag.ANALYTIC,
                             CertFlag.CONSERVATIVE) is CertFlag.CONSERVATIVE
        assert combine_flags(CertFlag.CONSERVATIVE,
                             CertFlag.SAMPLED) is CertFlag.SAMPLED

    def test_cert_value_round_trip(self):
        v = CertValue(2.5, CertFlag.SAMPLED)
        assert CertValue.from_dict(v.to_dict()) == v

    def test_cert_value_rejects_nan(self):
        with pytest.raises(Exception):
            CertValue(float("nan"), CertFlag.ANALYTIC)


class TestEstimates:
    def test_theta_passthrough_analytic(self):
        m = make_affine(np.diag([3.0, 1.0]), np.zeros(2), 1.0)
        v = estimate_theta(m, samples=10, seed=0)
        assert v.flag is CertFlag.ANALYTIC and abs(v.value - 3.0) <= 1e-9

    def test_theta_sampled_is_lower_bound(self):
        m = bare(make_affine(np.diag([3.0, 1.0]), np.zeros(2), 1.0))
        v = estimate_theta(m, samples=200, seed=0)
        assert v.flag is CertFlag.SAMPLED
        assert v.value <= 3.0 + 1e-12
        assert v.value >= 2.9  # the sup is attained everywhere for affine maps

    def test_theta_sampled_monotone_in_samples(self):
        rng = np.random.default_rng(4)
        Q = rng.normal(size=(2, 2, 2))
        Q = 0.5 * (Q + np.transpose(Q, (0, 2, 1)))
        m = bare(make_quadratic(np.eye(2), np.zeros(2), Q, 1.0))
        small = estimate_theta(m, samples=50, seed=7).value
        big = estimate_theta(m, samples=400, seed=7).value
        # same seed: the first 50 draws are a prefix of the 400
        assert big >= small - 1e-12

    def test_lipschitz_passthrough_and_sampled(self):
        A = np.array([[1.0, 2.0], [0.0, 1.0]])
        m = make_affine(A, np.zeros(2), 1.0)
        v = estimate_lipschitz(m.val, 1.0, pairs=50, seed=0, dim=2,
                               declared=CertValue(m.analytic.theta,
                                                  m.analytic.theta_flag))
        assert v.flag is CertFlag.ANALYTIC
        sampled = estimate_lipschitz(m.val, 1.0, pairs=300, seed=0, dim=2)
        assert sampled.flag is CertFlag.SAMPLED
        assert sampled.value <= np.linalg.norm(A, 2) + 1e-9
        assert sampled.value >= 0.5 * np.linalg.norm(A, 2)


class TestSigma:
    def test_affine_instance_exact(self):
        # F(x) = x + (2, 0): min over |y| <= 1 of |F(0) - y| = |(2,0)| - 1
        s = sigma_vi(np.array([2.0, 0.0]), np.eye(2), 1.0)
        assert abs(s - 1.0) <= 1e-8

    def test_interior_zero(self):
        # the target is reachable inside the ball, so the min residual is 0
        s = sigma_vi(np.array([0.3, 0.0]), np.eye(2), 1.0)
        assert s <= 1e-6

    def test_tiny_jacobian_guard(self):
        s = sigma_vi(np.array([2.0, 0.0]), np.zeros((2, 2)), 1.0)
        assert abs(s - 2.0) <= 1e-12

    def test_matches_grid_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(8):
            b = rng.normal(size=2) * 2.0
            A = rng.normal(size=(2, 2))
            mine = sigma_vi(b, A, 1.0)
            grid = grid_sigma_oracle(b, A, Ball(1.0, 2))
            if mine > 1e-3:
                assert abs(mine - grid) <= 1e-4
            else:
                # an interior zero: the grid can only localize it to a cell
                assert grid <= 1e-3

    def test_ba_sigma_over_box(self):
        # constant f: the residual |f'(0)^T y - f(0)| reduces to |f(0)|
        Y = Box([0.0, 0.0], [1.0, 1.0])
        s = sigma_ba(np.array([3.0, 0.0]), np.zeros((2, 2)), Y)
        assert abs(s - 3.0) <= 1e-8


class TestDelta:
    def test_affine_payoff_analytic(self):
        m = make_affine(np.eye(2), [2.0, 0.0], 1.0)
        p = vi_payoff(m)
        v = delta_const(p, Ball(1.0, 2))
        assert v.flag is CertFlag.ANALYTIC
        assert abs(v.value - 1.0) <= 1e-8

    def test_sampled_fallback(self):
        m = make_affine(np.eye(2), [2.0, 0.0], 1.0)
        p = vi_payoff(m)
        p.grad0_affine = None
        v = delta_const(p, Ball(1.0, 2), n_samples=4000, seed=0)
        assert v.flag is CertFlag.SAMPLED
        # a sampled inf can only overestimate the true value 1
        assert 1.0 - 1e-9 <= v.value <= 1.05


class TestReports:
    def test_vi_affine_numbers(self):
        m = make_affine(np.eye(2), [2.0, 0.0], 1.0)
        rep = vi_report(m)
        assert abs(rep.theta.value - 1.0) <= 1e-9
        assert rep.gamma.value == 0.0
        assert abs(rep.M.value - 2.0) <= 1e-9
        assert abs(rep.sigma.value - 1.0) <= 1e-8
        assert abs(rep.r_max - 0.25) <= 1e-8
        assert rep.certified

    def test_vi_sampled_not_certified(self):
        m = bare(make_affine(np.eye(2), [2.0, 0.0], 1.0))
        rep = vi_report(m, samples=100, seed=0)
        assert not rep.certified
        assert rep.theta.flag is CertFlag.SAMPLED

    def test_ba_constant_numbers(self):
        m = make_constant([2.0, 0.0], 1.0)
        rep = ba_report(m, Ball(1.0, 2))
        assert abs(rep.eta.value - 1.0) <= 1e-9
        assert abs(rep.L.value - 2.0) <= 1e-9
        assert abs(rep.sigma.value - 2.0) <= 1e-8
        assert abs(rep.delta.value - 4.0) <= 1e-8
        assert abs(rep.r_max - 1.0) <= 1e-8

    def test_report_round_trip(self):
        m = make_affine(np.eye(2), [2.0, 0.0], 1.0)
        rep = vi_report(m)
        back = ConstantsReport.from_dict(rep.to_dict())
        assert back.to_dict() == rep.to_dict()

    def test_zero_sigma(self):
        # F(0) = 0 kills the positivity hypothesis: report degrades, the
        # radius rule itself refuses
        m = make_affine(np.eye(2), [0.0, 0.0], 1.0)
        rep = vi_report(m)
        assert rep.r_max == 0.0
        with pytest.raises(HypothesisViolation):
            admissible_radius("vi", rep, 1.0)

    def test_vacuous_denominator(self):
        # M = 0 (constant map): the radius bound degenerates to rho itself
        m = make_constant([3.0, 4.0], 1.0)
        rep = vi_report(m)
        assert rep.r_max == 1.0
