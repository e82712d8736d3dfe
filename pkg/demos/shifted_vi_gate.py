#!/usr/bin/env python3
"""Shifted problems: solve <w - Psi(x*), x - x*> <= 0 behind a hypothesis gate.

When Psi has a vanishing jacobian at the origin, shifting by a target w that
is far enough away (|w - Psi(0)| >= 2 M1 rho, with M1 built from the
jacobian bounds) guarantees the same sphere-localized unique solution.
The gate is sharp: the script shows one accepted target and one rejected
target 0.1 inside the threshold, and reads the deficit off the exception.
"""

import sys

import numpy as np

from ballsaddle import HypothesisViolation, make_quadratic, solve_vi_shifted

failures = []


def check(label, ok):
    status = "PASS" if ok else "FAIL"
    print(f"  [{status}] {label}")
    if not ok:
        failures.append(label)


# Psi(x) = (|x|^2, 0): value and jacobian vanish at the origin.
Q = np.zeros((2, 2, 2))
Q[0] = np.eye(2)
psi = make_quadratic(np.zeros((2, 2)), np.zeros(2), Q, 1.0)

print("== gate arithmetic ==")
print("  Psi(x) = (x1^2 + x2^2, 0) on the unit ball")
print("  theta1 = 2, gamma1 = 2, M1 = 2(theta1 + rho gamma1) = 8")
print("  threshold: |w - Psi(0)| >= 2 M1 rho = 16")

# ======================================================================
# Target beyond the threshold: accepted
# ======================================================================
print("\n== w = (16, 0): accepted ==")
cert = solve_vi_shifted(psi, w=[16.0, 0.0], r=1.0, seed=0)
x = cert.x_star
print(f"  x* = {np.array2string(x, precision=8)}   |x*| = {np.linalg.norm(x):.10f}")
print(f"  gate = {cert.gate}")
check("solution sits on the unit sphere", abs(np.linalg.norm(x) - 1.0) <= 1e-8)
check("solution points at the target: x* = (1, 0)",
      np.linalg.norm(x - np.array([1.0, 0.0])) <= 1e-7)
check("gate records threshold 16 and a zero deficit",
      cert.gate["threshold"] == 16.0 and cert.gate["deficit"] == 0.0)

# ======================================================================
# Target 0.1 short: rejected with a quantified deficit
# ======================================================================
print("\n== w = (15.9, 0): rejected ==")
try:
    solve_vi_shifted(psi, w=[15.9, 0.0], r=1.0, seed=0)
    check("gate rejects a target below the threshold", False)
except HypothesisViolation as exc:
    print(f"  HypothesisViolation: {exc}")
    print(f"  deficit = {exc.deficit}")
    check("gate rejects a target below the threshold", True)
    check("exception quantifies the shortfall: deficit = 0.1",
          abs(exc.deficit - 0.1) <= 1e-9)

# ======================================================================
# Maps whose jacobian survives at the origin never reach the gate
# ======================================================================
print("\n== nonvanishing jacobian: wrong problem class ==")
bad = make_quadratic(np.eye(2), np.zeros(2), Q, 1.0)
try:
    solve_vi_shifted(bad, w=[16.0, 0.0], r=1.0, seed=0)
    check("jacobian-at-origin precondition is enforced", False)
except HypothesisViolation as exc:
    print(f"  HypothesisViolation: {exc}")
    check("jacobian-at-origin precondition is enforced", True)

print(f"\n{'OK: gate behaves' if not failures else 'FAILED: ' + ', '.join(failures)}")
sys.exit(1 if failures else 0)
