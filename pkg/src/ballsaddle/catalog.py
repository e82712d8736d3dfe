"""Problem catalog: smooth maps on a ball and the payoffs built from them.

A ``SmoothMap`` bundles value and Jacobian oracles on the ball of radius
``rho`` with (optional) analytic constants.  The catalog constructors cover
constant, affine and quadratic maps and compute their constants with honest
flags: exact where the formula is exact, conservative where only an upper
bound is proved.

Payoffs are scalar functions J(x, y) with an x-gradient oracle.  Two
families matter here:

* ``vi_payoff``:   J(x, y) = <F(x), x - y>,
* ``ba_payoff``:   J(x, y) = ||f(x) - x||^2 - ||f(x) - y||^2,

both concave (indeed affine or quadratic-concave) in y, with analytic
y-gradients and with the affine structure of grad_x(0, .) exposed so the
delta constant can be solved exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .constants import CertFlag, combine_flags, op_norm
from .errors import DimensionMismatch, InvalidInput
from .geometry import Ball, ConvexSet, as_point, sample_ball


@dataclass(frozen=True)
class AnalyticConstants:
    """Declared constants of a map, each with its certification flag."""

    theta: float
    gamma: float
    eta: float | None = None
    theta_flag: CertFlag = CertFlag.ANALYTIC
    gamma_flag: CertFlag = CertFlag.ANALYTIC
    eta_flag: CertFlag = CertFlag.ANALYTIC

    def __post_init__(self):
        for name in ("theta", "gamma", "eta"):
            v = getattr(self, name)
            if v is not None and (not np.isfinite(v) or v < 0):
                raise InvalidInput(f"{name} must be finite and >= 0, got {v}")


@dataclass
class SmoothMap:
    """A C^1 map R^n -> R^n queried on the ball of radius ``rho``.

    ``value`` and ``jacobian`` are single-point oracles; ``value_batch``
    (rows-in, rows-out) is optional and only used to speed up sampled checks.
    ``restricted`` rebuilds the map on a smaller ball so conservative
    constants tighten with the radius.
    """

    dimension: int
    domain_radius: float
    value: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    analytic: AnalyticConstants | None = None
    value_batch: Callable[[np.ndarray], np.ndarray] | None = None
    restricted: Callable[[float], "SmoothMap"] | None = None
    kind: str = "oracle"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dimension < 1:
            raise InvalidInput("dimension must be >= 1")
        if not (np.isfinite(self.domain_radius) and self.domain_radius > 0):
            raise InvalidInput("domain radius must be positive")

    def val(self, x) -> np.ndarray:
        out = np.asarray(self.value(np.asarray(x, dtype=float)), dtype=float)
        if out.shape != (self.dimension,):
            raise DimensionMismatch(
                f"map value has shape {out.shape}, expected ({self.dimension},)")
        return out

    def jac(self, x) -> np.ndarray:
        out = np.asarray(self.jacobian(np.asarray(x, dtype=float)), dtype=float)
        if out.shape != (self.dimension, self.dimension):
            raise DimensionMismatch(
                f"jacobian has shape {out.shape}, expected square of size {self.dimension}")
        return out

    def vals(self, X: np.ndarray) -> np.ndarray:
        """Value at each row of X, vectorized when the map supports it."""
        X = np.asarray(X, dtype=float)
        if self.value_batch is not None:
            return np.asarray(self.value_batch(X), dtype=float)
        return np.stack([self.val(x) for x in X])

    def restrict(self, new_rho: float) -> "SmoothMap":
        """The same map viewed on a smaller ball, constants recomputed."""
        if not (0 < new_rho <= self.domain_radius):
            raise InvalidInput(
                f"restriction radius must lie in (0, {self.domain_radius}], got {new_rho}")
        if self.restricted is not None:
            return self.restricted(new_rho)
        return SmoothMap(self.dimension, new_rho, self.value, self.jacobian,
                         analytic=self.analytic, value_batch=self.value_batch,
                         kind=self.kind, params=dict(self.params))


def make_constant(c, rho: float) -> SmoothMap:
    """The map x -> c.  theta = gamma = 0 and eta = 1, all exact."""
    c = as_point(c)
    n = c.size
    zero_jac = np.zeros((n, n))
    m = SmoothMap(
        n, float(rho),
        value=lambda x, c=c: c.copy(),
        jacobian=lambda x, zj=zero_jac: zj.copy(),
        analytic=AnalyticConstants(theta=0.0, gamma=0.0, eta=1.0),
        value_batch=lambda X, c=c: np.broadcast_to(c, (np.asarray(X).shape[0], c.size)).copy(),
        kind="constant", params={"c": c.tolist()},
    )
    m.restricted = lambda r, c=c: make_constant(c, r)
    return m


def make_affine(A, b, rho: float) -> SmoothMap:
    """The map x -> A x + b.

    theta = ||A||, gamma = 0, eta = ||I - A||, all exact (spectral norms).
    """
    b = as_point(b)
    A = np.asarray(A, dtype=float)
    n = b.size
    if A.shape != (n, n):
        raise DimensionMismatch(f"A has shape {A.shape}, b has size {n}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput("A has non-finite entries")
    theta = op_norm(A)
    eta = op_norm(np.eye(n) - A)
    m = SmoothMap(
        n, float(rho),
        value=lambda x, A=A, b=b: A @ x + b,
        jacobian=lambda x, A=A: A.copy(),
        analytic=AnalyticConstants(theta=theta, gamma=0.0, eta=eta),
        value_batch=lambda X, A=A, b=b: np.asarray(X) @ A.T + b,
        kind="affine", params={"A": A.tolist(), "b": b.tolist()},
    )
    m.restricted = lambda r, A=A, b=b: make_affine(A, b, r)
    return m


def make_quadratic(A, b, Q, rho: float) -> SmoothMap:
    """Component i of the map is (A x + b)_i + x^T Q_i x with symmetric Q_i.

    Row i of the Jacobian is A_i + 2 (Q_i x)^T.  With
    s = sqrt(sum_i ||Q_i||^2) the constants used are the proved bounds
    gamma = 2 s, theta = ||A|| + 2 rho s and eta = ||I - A|| + 2 rho s;
    gamma is tight, theta and eta are conservative.  All-zero Q collapses to
    the affine constructor.
    """
    b = as_point(b)
    A = np.asarray(A, dtype=float)
    n = b.size
    if A.shape != (n, n):
        raise DimensionMismatch(f"A has shape {A.shape}, b has size {n}")
    Q = np.asarray(Q, dtype=float)
    if Q.shape != (n, n, n):
        raise DimensionMismatch(
            f"Q must stack {n} square matrices of size {n}, got shape {Q.shape}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(Q))):
        raise InvalidInput("coefficients have non-finite entries")
    asym = max(float(np.max(np.abs(Qi - Qi.T))) for Qi in Q)
    if asym > 1e-12:
        raise InvalidInput(f"each Q_i must be symmetric (max asymmetry {asym:.2e})")
    if not Q.any():
        return make_affine(A, b, rho)
    s = float(np.sqrt(sum(op_norm(Qi) ** 2 for Qi in Q)))
    theta = op_norm(A) + 2.0 * float(rho) * s
    eta = op_norm(np.eye(n) - A) + 2.0 * float(rho) * s
    m = SmoothMap(
        n, float(rho),
        value=lambda x, A=A, b=b, Q=Q: A @ x + b + np.einsum("i,kij,j->k", x, Q, x),
        jacobian=lambda x, A=A, Q=Q: A + 2.0 * np.einsum("kij,j->ki", Q, x),
        analytic=AnalyticConstants(
            theta=theta, gamma=2.0 * s, eta=eta,
            theta_flag=CertFlag.CONSERVATIVE,
            gamma_flag=CertFlag.CONSERVATIVE,
            eta_flag=CertFlag.CONSERVATIVE),
        value_batch=lambda X, A=A, b=b, Q=Q: (
            np.asarray(X) @ A.T + b + np.einsum("mi,kij,mj->mk", np.asarray(X), Q, np.asarray(X))),
        kind="quadratic", params={"A": A.tolist(), "b": b.tolist(), "Q": Q.tolist()},
    )
    m.restricted = lambda r, A=A, b=b, Q=Q: make_quadratic(A, b, Q, r)
    return m


def shift_map(m: SmoothMap, w) -> SmoothMap:
    """The map x -> m(x) - w.  Jacobian and all Lipschitz data unchanged."""
    w = as_point(w, dim=m.dimension)
    out = SmoothMap(
        m.dimension, m.domain_radius,
        value=lambda x, m=m, w=w: m.val(x) - w,
        jacobian=m.jacobian,
        analytic=m.analytic,
        value_batch=(None if m.value_batch is None
                     else (lambda X, m=m, w=w: m.vals(X) - w)),
        kind="shifted-" + m.kind, params=dict(m.params, shift=w.tolist()),
    )
    out.restricted = lambda r, m=m, w=w: shift_map(m.restrict(r), w)
    return out


@dataclass
class Payoff:
    """Scalar payoff J(x, y) on ball(rho) x Y with gradient oracles.

    ``grad_y`` is analytic for catalog payoffs.  ``grad_lipschitz`` bounds
    the Lipschitz constant of grad_x(., y) uniformly over Y, ``cross_bound``
    bounds the mixed sensitivity of grad_x in y; both feed the saddle solver
    step size.  ``grad0_affine = (b, A)`` encodes
    ||grad_x(0, y)|| = ||b - A^T y|| for the exact delta computation.
    """

    dimension: int
    x_radius: float
    y_set: ConvexSet
    value: Callable[[np.ndarray, np.ndarray], float]
    grad_x: Callable[[np.ndarray, np.ndarray], np.ndarray]
    grad_y: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    grad_lipschitz: float | None = None
    grad_lipschitz_flag: CertFlag = CertFlag.ANALYTIC
    cross_bound: float | None = None
    grad0_affine: tuple[np.ndarray, np.ndarray] | None = None
    value_xbatch: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    value_ybatch: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    kind: str = "oracle"

    def values_x(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        """J(x, y) for each row x of X."""
        if self.value_xbatch is not None:
            return np.asarray(self.value_xbatch(X, y), dtype=float)
        return np.array([self.value(x, y) for x in X], dtype=float)

    def values_y(self, x: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """J(x, y) for each row y of Y."""
        if self.value_ybatch is not None:
            return np.asarray(self.value_ybatch(x, Y), dtype=float)
        return np.array([self.value(x, y) for y in Y], dtype=float)


def vi_payoff(m: SmoothMap, y_set: ConvexSet | None = None) -> Payoff:
    """J(x, y) = <m(x), x - y> on ball(rho) x Y (Y defaults to ball(rho)).

    grad_x = jac(x)^T (x - y) + m(x), grad_y = -m(x).  With analytic map
    constants, grad_lipschitz = M = 2 (theta + rho gamma) holds uniformly
    over ||y|| <= rho.
    """
    if y_set is None:
        y_set = Ball(m.domain_radius, m.dimension)

    def value(x, y, m=m):
        return float(np.dot(m.val(x), x - y))

    def grad_x(x, y, m=m):
        return m.jac(x).T @ (x - y) + m.val(x)

    def grad_y(x, y, m=m):
        return -m.val(x)

    def value_xbatch(X, y, m=m):
        V = m.vals(X)
        return np.einsum("mi,mi->m", V, np.asarray(X) - y)

    def value_ybatch(x, Y, m=m):
        v = m.val(x)
        return (x - np.asarray(Y)) @ v

    lip = None
    lip_flag = CertFlag.ANALYTIC
    cross = None
    if m.analytic is not None:
        a = m.analytic
        lip = 2.0 * (a.theta + m.domain_radius * a.gamma)
        lip_flag = combine_flags(a.theta_flag, a.gamma_flag)
        cross = a.theta
    return Payoff(
        m.dimension, m.domain_radius, y_set, value, grad_x, grad_y,
        grad_lipschitz=lip, grad_lipschitz_flag=lip_flag, cross_bound=cross,
        grad0_affine=(m.val(np.zeros(m.dimension)), m.jac(np.zeros(m.dimension))),
        value_xbatch=value_xbatch, value_ybatch=value_ybatch, kind="vi",
    )


def ba_payoff(m: SmoothMap, y_set: ConvexSet) -> Payoff:
    """J(x, y) = ||m(x) - x||^2 - ||m(x) - y||^2 on ball(rho) x Y.

    grad_x = 2 (x - m(x)) - 2 jac(x)^T (x - y), grad_y = 2 (m(x) - y).
    With analytic constants (eta required) and bounded Y,
    grad_lipschitz = L = 2 (eta + theta + gamma (rho + sup_Y ||y||)).
    """

    def value(x, y, m=m):
        fx = m.val(x)
        return float(np.dot(fx - x, fx - x) - np.dot(fx - y, fx - y))

    def grad_x(x, y, m=m):
        fx = m.val(x)
        return 2.0 * (x - fx) - 2.0 * (m.jac(x).T @ (x - y))

    def grad_y(x, y, m=m):
        return 2.0 * (m.val(x) - y)

    def value_xbatch(X, y, m=m):
        X = np.asarray(X)
        F = m.vals(X)
        return (np.einsum("mi,mi->m", F - X, F - X)
                - np.einsum("mi,mi->m", F - y, F - y))

    def value_ybatch(x, Y, m=m):
        fx = m.val(x)
        d = fx - np.asarray(Y)
        return float(np.dot(fx - x, fx - x)) - np.einsum("mi,mi->m", d, d)

    lip = None
    lip_flag = CertFlag.ANALYTIC
    cross = None
    if m.analytic is not None and m.analytic.eta is not None:
        a = m.analytic
        lip = 2.0 * (a.eta + a.theta + a.gamma * (m.domain_radius + y_set.sup_norm()))
        lip_flag = combine_flags(a.theta_flag, a.gamma_flag, a.eta_flag)
        cross = a.theta
    zero = np.zeros(m.dimension)
    return Payoff(
        m.dimension, m.domain_radius, y_set, value, grad_x, grad_y,
        grad_lipschitz=lip, grad_lipschitz_flag=lip_flag, cross_bound=cross,
        grad0_affine=(2.0 * m.val(zero), 2.0 * m.jac(zero)),
        value_xbatch=value_xbatch, value_ybatch=value_ybatch, kind="ba",
    )


def validate_map(m: SmoothMap, n_points: int = 100, seed: int = 0,
                 rel_tol: float = 1e-5) -> float:
    """Check the Jacobian against central finite differences of the value.

    Returns the worst relative error over random interior points; raises
    InvalidInput when it exceeds ``rel_tol`` or an oracle output is not
    finite.
    """
    rng = np.random.default_rng(seed)
    h = 1e-5 * m.domain_radius
    pts = sample_ball(rng, n_points, m.dimension, max(m.domain_radius - 2 * h, 1e-12))
    worst = 0.0
    for x in pts:
        J = m.jac(x)
        v = m.val(x)
        if not (np.all(np.isfinite(J)) and np.all(np.isfinite(v))):
            raise InvalidInput("map oracle returned non-finite values")
        fd = np.empty_like(J)
        for j in range(m.dimension):
            e = np.zeros(m.dimension)
            e[j] = h
            fd[:, j] = (m.val(x + e) - m.val(x - e)) / (2.0 * h)
        err = float(np.linalg.norm(fd - J) / max(1.0, float(np.linalg.norm(J))))
        worst = max(worst, err)
    if worst > rel_tol:
        raise InvalidInput(
            f"jacobian disagrees with finite differences (relative error {worst:.2e})")
    return worst


def validate_payoff(p: Payoff, n_points: int = 100, seed: int = 0,
                    rel_tol: float = 1e-5) -> float:
    """Check grad_x (and grad_y when present) against central differences,
    and concavity of J(x, .) at sampled midpoints.  Returns the worst
    relative gradient error."""
    rng = np.random.default_rng(seed)
    h = 1e-6 * max(p.x_radius, 1.0)
    xs = sample_ball(rng, n_points, p.dimension, p.x_radius * 0.98)
    ys = p.y_set.sample(rng, n_points)
    worst = 0.0
    for x, y in zip(xs, ys):
        gx = np.asarray(p.grad_x(x, y), dtype=float)
        fd = np.empty(p.dimension)
        for j in range(p.dimension):
            e = np.zeros(p.dimension)
            e[j] = h
            fd[j] = (p.value(x + e, y) - p.value(x - e, y)) / (2.0 * h)
        err = float(np.linalg.norm(fd - gx) / max(1.0, float(np.linalg.norm(gx))))
        worst = max(worst, err)
        if p.grad_y is not None:
            gy = np.asarray(p.grad_y(x, y), dtype=float)
            fdy = np.empty(p.dimension)
            for j in range(p.dimension):
                e = np.zeros(p.dimension)
                e[j] = h
                fdy[j] = (p.value(x, y + e) - p.value(x, y - e)) / (2.0 * h)
            erry = float(np.linalg.norm(fdy - gy) / max(1.0, float(np.linalg.norm(gy))))
            worst = max(worst, erry)
    # midpoint concavity in y on fresh triples
    for _ in range(n_points):
        x = sample_ball(rng, 1, p.dimension, p.x_radius)[0]
        ya, yb = p.y_set.sample(rng, 2)
        mid = p.value(x, 0.5 * (ya + yb))
        if mid < 0.5 * (p.value(x, ya) + p.value(x, yb)) - 1e-9:
            raise InvalidInput("payoff is not concave in y at a sampled midpoint")
    if worst > rel_tol:
        raise InvalidInput(
            f"payoff gradients disagree with finite differences (relative error {worst:.2e})")
    return worst


def _require_fields(doc: dict, path: str, required: tuple, optional: tuple = ()):
    from .errors import ConfigError

    for key in doc:
        if key not in required and key not in optional:
            raise ConfigError(f"unknown field {key!r}", path=path)
    for key in required:
        if key not in doc:
            raise ConfigError(f"missing required field {key!r}", path=path)


def map_from_dict(doc: dict, path: str = "problem") -> SmoothMap:
    """Build a catalog map from its JSON document.

    Two equivalent layouts are accepted: nested
    ``{"dimension": n, "rho": r, "map": {"kind": ..., ...},
    "analytic_constants": {...}?}`` and flat
    ``{"kind": ..., "rho": r, ...coefficients...}``.  Unknown fields are
    rejected with the offending path.
    """
    from .errors import ConfigError

    if not isinstance(doc, dict):
        raise ConfigError("problem must be an object", path=path)
    declared = None
    if "map" in doc:
        _require_fields(doc, path, required=("map", "rho"),
                        optional=("dimension", "analytic_constants"))
        inner = doc["map"]
        inner_path = path + ".map"
        rho = doc["rho"]
        declared = doc.get("analytic_constants")
        want_dim = doc.get("dimension")
    else:
        _require_fields(doc, path, required=("kind", "rho"),
                        optional=("c", "A", "b", "Q", "shift", "analytic_constants",
                                  "dimension"))
        inner = {k: v for k, v in doc.items()
                 if k in ("kind", "c", "A", "b", "Q", "shift")}
        inner_path = path
        rho = doc["rho"]
        declared = doc.get("analytic_constants")
        want_dim = doc.get("dimension")
    if not isinstance(inner, dict) or "kind" not in inner:
        raise ConfigError("map needs a 'kind'", path=inner_path)
    try:
        rho = float(rho)
    except (TypeError, ValueError):
        raise ConfigError("rho must be a number", path=path + ".rho")
    if not (np.isfinite(rho) and rho > 0):
        raise ConfigError("rho must be positive", path=path + ".rho")
    kind = inner["kind"]
    try:
        if kind == "constant":
            _require_fields(inner, inner_path, required=("kind", "c"),
                            optional=("shift",))
            m = make_constant(np.asarray(inner["c"], dtype=float), rho)
        elif kind == "affine":
            _require_fields(inner, inner_path, required=("kind", "A", "b"),
                            optional=("shift",))
            m = make_affine(np.asarray(inner["A"], dtype=float),
                            np.asarray(inner["b"], dtype=float), rho)
        elif kind == "quadratic":
            _require_fields(inner, inner_path, required=("kind", "A", "b", "Q"),
                            optional=("shift",))
            m = make_quadratic(np.asarray(inner["A"], dtype=float),
                               np.asarray(inner["b"], dtype=float),
                               np.asarray(inner["Q"], dtype=float), rho)
        else:
            raise ConfigError(f"unknown map kind {kind!r}", path=inner_path + ".kind")
    except (InvalidInput, DimensionMismatch) as exc:
        raise ConfigError(str(exc), path=inner_path)
    if "shift" in inner:
        try:
            m = shift_map(m, np.asarray(inner["shift"], dtype=float))
        except (InvalidInput, DimensionMismatch) as exc:
            raise ConfigError(str(exc), path=inner_path + ".shift")
    if want_dim is not None and int(want_dim) != m.dimension:
        raise ConfigError(
            f"declared dimension {want_dim} does not match coefficients ({m.dimension})",
            path=path + ".dimension")
    if declared is not None:
        _require_fields(declared, path + ".analytic_constants",
                        required=(), optional=("theta", "gamma", "eta"))
        base = m.analytic
        m.analytic = AnalyticConstants(
            theta=float(declared.get("theta", base.theta if base else 0.0)),
            gamma=float(declared.get("gamma", base.gamma if base else 0.0)),
            eta=(float(declared["eta"]) if "eta" in declared
                 else (base.eta if base else None)),
        )
    return m
