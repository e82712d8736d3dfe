#!/usr/bin/env python3
"""Constants reports and admissible radii for the three catalog map kinds.

Every certified run starts here: theta, gamma, eta bound the map, sigma is
solved from the origin data, and the admissible radius caps how large a
ball still guarantees the sphere-localized unique solution.
"""

import sys

import numpy as np

from ballsaddle import (Ball, ba_report, make_affine, make_constant,
                        make_quadratic, vi_report)

failures = []


def check(label, ok):
    status = "PASS" if ok else "FAIL"
    print(f"  [{status}] {label}")
    if not ok:
        failures.append(label)


def show(title, rep):
    print(f"\n== {title} ==")
    for name in ("theta", "gamma", "eta", "M", "L", "sigma", "delta"):
        v = getattr(rep, name)
        if v is not None:
            print(f"  {name:6s} = {v.value:<12.6g} ({v.flag.value})")
    print(f"  r_max  = {rep.r_max:.6g}   rule = {rep.radius_rule}"
          f"   certified = {rep.certified}")
    return rep


rep = show("constant map F = (3, 4), rho = 1",
           vi_report(make_constant([3.0, 4.0], 1.0)))
check("constant map has M = 0 and a vacuous radius bound",
      rep.M.value == 0.0 and rep.r_max == 1.0)

rep = show("affine map F(x) = x + (2, 0), rho = 1",
           vi_report(make_affine(np.eye(2), [2.0, 0.0], 1.0)))
check("affine constants are exact: M = 2, sigma = 1, r_max = 1/4",
      abs(rep.M.value - 2.0) <= 1e-12 and abs(rep.sigma.value - 1.0) <= 1e-9
      and abs(rep.r_max - 0.25) <= 1e-9)

rng = np.random.default_rng(0)
Q = rng.normal(size=(2, 2, 2)) * 0.1
Q = 0.5 * (Q + np.transpose(Q, (0, 2, 1)))
quad = make_quadratic(np.eye(2), [2.0, 0.0], Q, 1.0)
rep = show("quadratic perturbation of the affine map", vi_report(quad))
check("quadratic theta and gamma are conservative, not sampled",
      rep.theta.flag.value == "conservative-bound" and rep.certified)

small = vi_report(quad.restrict(0.25))
print(f"\n  restricted to rho = 0.25: theta {rep.theta.value:.4f} ->"
      f" {small.theta.value:.4f}, M {rep.M.value:.4f} -> {small.M.value:.4f}")
check("restriction tightens the conservative constants",
      small.theta.value < rep.theta.value and small.M.value < rep.M.value)

rep = show("approximation constants of f = (2, 0) with Y = ball(1)",
           ba_report(make_constant([2.0, 0.0], 1.0), Ball(1.0, 2)))
check("constant approximation: eta = 1, L = 2, sigma = 2, r_max = 1",
      abs(rep.eta.value - 1.0) <= 1e-12 and abs(rep.L.value - 2.0) <= 1e-12
      and abs(rep.sigma.value - 2.0) <= 1e-9 and abs(rep.r_max - 1.0) <= 1e-9)

print(f"\n{'OK: all constants behaved' if not failures else 'FAILED: ' + ', '.join(failures)}")
sys.exit(1 if failures else 0)
