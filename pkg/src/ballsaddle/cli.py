"""Command-line front end: JSON config in, JSON certificate out.

Commands::

    ballsaddle constants    --config problem.json
    ballsaddle saddle       --config problem.json
    ballsaddle vi           --config problem.json
    ballsaddle vi-shifted   --config problem.json
    ballsaddle prox-pair    --config problem.json
    ballsaddle best-approx  --config problem.json
    ballsaddle small-radius --config problem.json
    ballsaddle verify       --config certificate.json

plus ``--r``, ``--seed``, ``--out`` and ``--heuristic`` overrides.  Exit
codes: 0 all checks pass, 1 bad config or I/O, 2 hypothesis or
certification violation (stderr carries the deficit), 3 a check failed,
4 the solver did not converge.

Certificates embed the fully-resolved config, so ``verify`` can rebuild
the problem and re-run every check against the stored solution without
re-solving.  Output is deterministic for a fixed config and seed except
for the ``wall_time`` field.

The ``BALLSADDLE_THREADS`` environment variable caps the worker count; the
numerics are vectorized single-process, so any valid cap >= 1 runs the
same sequential code.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .ba import ba_small_radius, check_nearest_point, solve_best_approx, solve_prox_pair
from .catalog import SmoothMap, ba_payoff, map_from_dict, shift_map, vi_payoff
from .constants import (CertFlag, ConstantsReport, admissible_radius, ba_report,
                        delta_const, op_norm, vi_report)
from .errors import (BallSaddleError, CertificationError, CheckFailure, ConfigError,
                     HypothesisViolation, InvalidInput, NonConvergence)
from .geometry import Ball, Box, ConvexSet, dist_ball, norm
from .saddle import SaddleConfig, check_saddle, payoff_depends_on_y, solve_saddle
from .vi import check_vi, small_radius, solve_vi, solve_vi_shifted

CERT_FORMAT = "ballsaddle-certificate/1"
VERIFY_FORMAT = "ballsaddle-verification/1"
COMMANDS = ("constants", "saddle", "vi", "vi-shifted", "prox-pair",
            "best-approx", "small-radius", "verify")
DEFAULT_TOLERANCES = {"solve": 1e-8, "check": 1e-8,
                      "strict_margin": 1e-9, "exclusion_factor": 1e-4}

_COMMON = ("seed", "n_samples", "tolerances", "heuristic")
_FIELDS = {
    "constants": {"required": ("problem",),
                  "optional": ("application", "y_set") + _COMMON},
    "saddle": {"required": ("problem",),
               "optional": ("payoff", "r", "t_set", "y_set") + _COMMON},
    "vi": {"required": ("problem",),
           "optional": ("r", "uniqueness_starts") + _COMMON},
    "vi-shifted": {"required": ("problem", "w"),
                   "optional": ("r", "uniqueness_starts") + _COMMON},
    "prox-pair": {"required": ("problem",),
                  "optional": ("r", "y_set", "t_set", "uniqueness_starts") + _COMMON},
    "best-approx": {"required": ("problem",),
                    "optional": ("r", "uniqueness_starts") + _COMMON},
    "small-radius": {"required": ("problem",),
                     "optional": ("application", "epsilon") + _COMMON},
}


@dataclass
class RunConfig:
    """A fully-resolved run request; ``to_dict`` is the echo embedded in
    certificates."""

    command: str
    problem: dict
    r: float | None = None
    seed: int = 0
    n_samples: int = 2000
    heuristic: bool = False
    uniqueness_starts: int = 16
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    application: str = "vi"
    payoff: str = "vi"
    epsilon: float = 0.5
    w: list | None = None
    y_set: dict | None = None
    t_set: dict | None = None

    @property
    def mode(self) -> str:
        return "heuristic" if self.heuristic else "certified"

    def to_dict(self):
        d = {"command": self.command, "problem": self.problem, "seed": self.seed,
             "n_samples": self.n_samples, "heuristic": self.heuristic,
             "tolerances": dict(self.tolerances)}
        if self.r is not None:
            d["r"] = self.r
        if self.command in ("vi", "vi-shifted", "prox-pair", "best-approx"):
            d["uniqueness_starts"] = self.uniqueness_starts
        if self.command in ("constants", "small-radius"):
            d["application"] = self.application
        if self.command == "small-radius":
            d["epsilon"] = self.epsilon
        if self.command == "saddle":
            d["payoff"] = self.payoff
        if self.w is not None:
            d["w"] = list(self.w)
        if self.y_set is not None:
            d["y_set"] = self.y_set
        if self.t_set is not None:
            d["t_set"] = self.t_set
        return d


def _as_number(doc, key, path, kind=float, positive=False):
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key} must be a number", path=f"{path}.{key}")
    v = kind(v)
    if positive and v <= 0:
        raise ConfigError(f"{key} must be positive", path=f"{path}.{key}")
    return v


def parse_config(doc: dict, command: str) -> RunConfig:
    """Validate a config document against the schema of ``command``.

    Unknown fields anywhere are rejected with their dotted path.
    """
    if command not in _FIELDS:
        raise ConfigError(f"unknown command {command!r}")
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    spec = _FIELDS[command]
    allowed = set(spec["required"]) | set(spec["optional"])
    for key in doc:
        if key not in allowed:
            raise ConfigError(f"unknown field {key!r} for command {command!r}", path=key)
    for key in spec["required"]:
        if key not in doc:
            raise ConfigError(f"missing required field {key!r}", path=key)

    cfg = RunConfig(command=command, problem=doc["problem"])
    map_from_dict(cfg.problem)  # validate early so errors carry config paths
    if "r" in doc:
        cfg.r = _as_number(doc, "r", "", positive=True)
    if "seed" in doc:
        cfg.seed = _as_number(doc, "seed", "", kind=int)
    if "n_samples" in doc:
        cfg.n_samples = _as_number(doc, "n_samples", "", kind=int, positive=True)
    if "heuristic" in doc:
        if not isinstance(doc["heuristic"], bool):
            raise ConfigError("heuristic must be a boolean", path="heuristic")
        cfg.heuristic = doc["heuristic"]
    if "uniqueness_starts" in doc:
        cfg.uniqueness_starts = _as_number(doc, "uniqueness_starts", "", kind=int)
    if "epsilon" in doc:
        cfg.epsilon = _as_number(doc, "epsilon", "", positive=True)
    if "application" in doc:
        if doc["application"] not in ("vi", "ba"):
            raise ConfigError("application must be 'vi' or 'ba'", path="application")
        cfg.application = doc["application"]
    if "payoff" in doc:
        if doc["payoff"] not in ("vi", "ba"):
            raise ConfigError("payoff must be 'vi' or 'ba'", path="payoff")
        cfg.payoff = doc["payoff"]
    if "w" in doc:
        if not isinstance(doc["w"], list) or not doc["w"]:
            raise ConfigError("w must be a non-empty array", path="w")
        cfg.w = [float(v) for v in doc["w"]]
    if "tolerances" in doc:
        tols = doc["tolerances"]
        if not isinstance(tols, dict):
            raise ConfigError("tolerances must be an object", path="tolerances")
        for key in tols:
            if key not in DEFAULT_TOLERANCES:
                raise ConfigError(f"unknown tolerance {key!r}", path=f"tolerances.{key}")
            cfg.tolerances[key] = _as_number(tols, key, "tolerances", positive=True)
    for name in ("y_set", "t_set"):
        if name in doc:
            setattr(cfg, name, doc[name])
    return cfg


def set_from_dict(doc: dict, dim: int, path: str) -> ConvexSet:
    """{"kind": "ball", "radius": R} or {"kind": "box", "lower": [...],
    "upper": [...]} with dimension checks."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ConfigError("set needs a 'kind'", path=path)
    kind = doc["kind"]
    if kind == "ball":
        for key in doc:
            if key not in ("kind", "radius"):
                raise ConfigError(f"unknown field {key!r}", path=f"{path}.{key}")
        if "radius" not in doc:
            raise ConfigError("ball set needs a radius", path=path)
        radius = _as_number(doc, "radius", path, positive=True)
        return Ball(radius, dim)
    if kind == "box":
        for key in doc:
            if key not in ("kind", "lower", "upper"):
                raise ConfigError(f"unknown field {key!r}", path=f"{path}.{key}")
        try:
            box = Box(np.asarray(doc["lower"], dtype=float),
                      np.asarray(doc["upper"], dtype=float))
        except (KeyError, TypeError, ValueError, InvalidInput) as exc:
            raise ConfigError(f"bad box bounds: {exc}", path=path)
        if box.dim != dim:
            raise ConfigError(
                f"box dimension {box.dim} does not match problem dimension {dim}",
                path=path)
        return box
    raise ConfigError(f"unknown set kind {kind!r}", path=f"{path}.kind")


def _tol_kwargs(cfg: RunConfig) -> dict:
    t = cfg.tolerances
    return {"tol": t["solve"], "check_tol": t["check"],
            "strict_margin": t["strict_margin"],
            "exclusion_factor": t["exclusion_factor"]}


def _saddle_cfg(cfg: RunConfig, r: float, T: ConvexSet, L: float,
                smoothness: float, r_max: float | None) -> SaddleConfig:
    t = cfg.tolerances
    return SaddleConfig(r=r, T=T, L=L, smoothness=smoothness, tol=t["solve"],
                        check_tol=t["check"], strict_margin=t["strict_margin"],
                        exclusion_factor=t["exclusion_factor"], r_max=r_max)


def _run_saddle(cfg: RunConfig, m: SmoothMap):
    """The generic saddle command: solve and check on ball(r) x T."""
    rho = m.domain_radius
    if cfg.payoff == "vi":
        rep = vi_report(m, seed=cfg.seed)
        base_L = rep.M.value
    else:
        y_doc = cfg.y_set or {"kind": "ball", "radius": rho}
        Y = set_from_dict(y_doc, m.dimension, "y_set")
        rep = ba_report(m, Y, seed=cfg.seed)
        base_L = rep.L.value
    r = cfg.r if cfg.r is not None else rep.r_max
    if not (0 < r <= rho):
        raise HypothesisViolation(f"r = {r} is outside (0, {rho}]")
    T = (set_from_dict(cfg.t_set, m.dimension, "t_set") if cfg.t_set is not None
         else Ball(r, m.dimension))
    payoff = (vi_payoff(m) if cfg.payoff == "vi"
              else ba_payoff(m, Y))
    delta = delta_const(payoff, T)
    saddle_rep = ConstantsReport(
        rho=rho, theta=rep.theta, gamma=rep.gamma, eta=rep.eta, delta=delta,
        M=rep.M, L=rep.M if cfg.payoff == "vi" else rep.L, sigma=rep.sigma,
        radius_rule="saddle")
    r_max = admissible_radius("saddle", saddle_rep, rho)
    saddle_rep = ConstantsReport(
        rho=rho, theta=rep.theta, gamma=rep.gamma, eta=rep.eta, delta=delta,
        M=rep.M, L=saddle_rep.L, sigma=rep.sigma, r_max=r_max,
        radius_rule="saddle")
    if cfg.mode == "certified":
        if not saddle_rep.certified:
            raise CertificationError("constants are not certification grade")
        if r > r_max + 1e-12:
            raise HypothesisViolation(
                f"r = {r} exceeds the admissible radius {r_max}", deficit=r - r_max)
    scfg = _saddle_cfg(cfg, r, T, base_L, 2.0 * base_L + rep.theta.value, r_max)
    sp = solve_saddle(payoff, scfg)
    checks = check_saddle(payoff, sp, scfg, n_samples=cfg.n_samples, seed=cfg.seed + 1)
    doc = {
        "theorem": "1", "mode": cfg.mode, "r": float(r),
        "solution": {"x_star": [float(v) for v in sp.x_star],
                     "y_star": [float(v) for v in sp.y_star],
                     "y_star_unique": payoff_depends_on_y(payoff, sp.x_star, T,
                                                          seed=cfg.seed)},
        "residuals": {"saddle_residual": float(sp.residual)},
        "iterations": int(sp.iterations), "step": float(sp.step),
        "constants": saddle_rep.to_dict(),
        "checks": {"saddle": checks.to_dict()},
        "passed": bool(checks.passed),
    }
    return doc


def run(cfg: RunConfig) -> dict:
    """Execute a parsed config and return the certificate document
    (without envelope fields)."""
    m = map_from_dict(cfg.problem)
    rho = m.domain_radius
    if cfg.command == "constants":
        if cfg.application == "vi":
            rep = vi_report(m, seed=cfg.seed, samples=cfg.n_samples)
            theorem = "2"
        else:
            y_doc = cfg.y_set or {"kind": "ball", "radius": rho}
            Y = set_from_dict(y_doc, m.dimension, "y_set")
            rep = ba_report(m, Y, seed=cfg.seed, samples=cfg.n_samples)
            theorem = "5"
        return {"theorem": theorem,
                "mode": "certified" if rep.certified else "heuristic",
                "constants": rep.to_dict(), "passed": True}
    if cfg.command == "saddle":
        return _run_saddle(cfg, m)
    if cfg.command == "vi":
        cert = solve_vi(m, cfg.r, mode=cfg.mode, n_samples=cfg.n_samples,
                        seed=cfg.seed, uniqueness_starts=cfg.uniqueness_starts,
                        **_tol_kwargs(cfg))
        return cert.to_dict()
    if cfg.command == "vi-shifted":
        cert = solve_vi_shifted(m, np.asarray(cfg.w, dtype=float), cfg.r,
                                mode=cfg.mode, n_samples=cfg.n_samples,
                                seed=cfg.seed,
                                uniqueness_starts=cfg.uniqueness_starts,
                                **_tol_kwargs(cfg))
        return cert.to_dict()
    if cfg.command == "prox-pair":
        y_doc = cfg.y_set or {"kind": "ball", "radius": rho}
        Y = set_from_dict(y_doc, m.dimension, "y_set")
        rep = ba_report(m, Y, seed=cfg.seed)
        r = cfg.r if cfg.r is not None else rep.r_max
        T = (set_from_dict(cfg.t_set, m.dimension, "t_set")
             if cfg.t_set is not None else Ball(float(r), m.dimension))
        cert = solve_prox_pair(m, Y, T, r, rep, mode=cfg.mode,
                               n_samples=cfg.n_samples, seed=cfg.seed,
                               uniqueness_starts=cfg.uniqueness_starts,
                               **_tol_kwargs(cfg))
        return cert.to_dict()
    if cfg.command == "best-approx":
        cert = solve_best_approx(m, cfg.r, mode=cfg.mode, n_samples=cfg.n_samples,
                                 seed=cfg.seed,
                                 uniqueness_starts=cfg.uniqueness_starts,
                                 **_tol_kwargs(cfg))
        return cert.to_dict()
    if cfg.command == "small-radius":
        res = (small_radius(m, cfg.epsilon) if cfg.application == "vi"
               else ba_small_radius(m, cfg.epsilon))
        ok = res.report.sigma.value >= res.sigma_floor - 1e-8
        return {"theorem": "3" if cfg.application == "vi" else "7",
                "mode": "certified" if res.report.certified else "heuristic",
                "small_radius": res.to_dict(),
                "checks": {"sigma-floor": {"passed": bool(ok),
                                           "floor": float(res.sigma_floor),
                                           "sigma": float(res.report.sigma.value)}},
                "passed": bool(ok)}
    raise ConfigError(f"unknown command {cfg.command!r}")


def _compare_constants(stored: dict, fresh: ConstantsReport, tol: float = 1e-9):
    """Names of constants whose recomputation disagrees with the stored
    certificate."""
    bad = []
    fresh_d = fresh.to_dict()
    for name in ("rho", "r_max"):
        if abs(float(stored[name]) - float(fresh_d[name])) > tol:
            bad.append(name)
    for name in ("theta", "gamma", "eta", "delta", "M", "L", "sigma"):
        s, f = stored.get(name), fresh_d.get(name)
        if (s is None) != (f is None):
            bad.append(name)
        elif s is not None:
            if abs(float(s["value"]) - float(f["value"])) > tol or s["flag"] != f["flag"]:
                bad.append(name)
    return bad


def verify(cert: dict) -> dict:
    """Re-run every check of a certificate against its stored solution.

    The problem and all tolerances are rebuilt from the embedded config;
    the solver is not re-run.  Returns a verification document; the
    ``verified`` field is the overall verdict.
    """
    if not isinstance(cert, dict) or cert.get("format") != CERT_FORMAT:
        raise ConfigError(f"not a {CERT_FORMAT} document")
    for key in ("command", "config", "certificate"):
        if key not in cert:
            raise ConfigError(f"certificate is missing {key!r}")
    command = cert["command"]
    body = cert["certificate"]
    conf = dict(cert["config"])
    if conf.pop("command", command) != command:
        raise ConfigError("config command does not match the certificate command")
    cfg = parse_config(conf, command)
    m = map_from_dict(cfg.problem)
    failures = []
    recomputed = {}

    def check(name, ok):
        if not ok:
            failures.append(name)

    if command in ("constants", "small-radius"):
        fresh = run(cfg)
        if command == "constants":
            bad = _compare_dicts(body["constants"], fresh["constants"])
        else:
            bad = _compare_dicts(body["small_radius"], fresh["small_radius"])
        for name in bad:
            check(f"recompute:{name}", False)
        recomputed["passed"] = fresh["passed"]
        check("passed", fresh["passed"] == body["passed"])
        return _verdict(failures, recomputed, body)

    x_star = np.asarray(body["solution"]["x_star"], dtype=float)
    y_star = np.asarray(body["solution"]["y_star"], dtype=float)
    r = float(body["r"])
    t = cfg.tolerances

    if command in ("vi", "vi-shifted"):
        target = m if command == "vi" else shift_map(m, np.asarray(cfg.w, dtype=float))
        rep = vi_report(target, seed=cfg.seed)
        for name in _compare_constants(body["constants"], rep):
            check(f"constants:{name}", False)
        payoff = vi_payoff(target)
        scfg = _saddle_cfg(cfg, r, Ball(r, m.dimension), rep.M.value,
                           2.0 * rep.M.value + rep.theta.value, rep.r_max)
        collapse = norm(x_star - y_star)
        recomputed["collapse_gap"] = collapse
        check("collapse", collapse <= 1e-6)
        mn = norm(target.val(x_star))
        check("map-nonzero", mn > 1e-9)
        if mn > 0:
            direction = norm(x_star + (r / mn) * target.val(x_star))
            recomputed["direction_gap"] = direction
            check("direction", direction <= 1e-6)
        checks = check_saddle(payoff, (x_star, y_star), scfg,
                              n_samples=cfg.n_samples, seed=cfg.seed + 1)
        recomputed["saddle"] = checks.to_dict()
        check("saddle-checks", checks.passed)
        vc = check_vi(target, x_star, r, n_samples=cfg.n_samples, seed=cfg.seed + 2,
                      strict_margin=t["strict_margin"],
                      exclusion_factor=t["exclusion_factor"])
        recomputed["vi"] = vc.to_dict()
        check("vi-inequality", vc.passed)
        if cfg.mode == "certified":
            check("radius-admissible", r <= rep.r_max + 1e-12)
        return _verdict(failures, recomputed, body)

    if command in ("prox-pair", "best-approx"):
        Y = (set_from_dict(cfg.y_set, m.dimension, "y_set") if cfg.y_set is not None
             else Ball(m.domain_radius, m.dimension))
        rep = ba_report(m, Y, seed=cfg.seed)
        for name in _compare_constants(body["constants"], rep):
            check(f"constants:{name}", False)
        T = (set_from_dict(cfg.t_set, m.dimension, "t_set") if cfg.t_set is not None
             else Ball(r, m.dimension))
        payoff = ba_payoff(m, Y)
        scfg = _saddle_cfg(cfg, r, T, rep.L.value,
                           2.0 * rep.L.value + rep.theta.value, rep.r_max)
        proj_gap = norm(y_star - T.project(m.val(x_star)))
        recomputed["projection_gap"] = proj_gap
        check("projection", proj_gap <= 1e-6)
        checks = check_saddle(payoff, (x_star, y_star), scfg,
                              n_samples=cfg.n_samples, seed=cfg.seed + 1)
        recomputed["saddle"] = checks.to_dict()
        check("saddle-checks", checks.passed)
        if command == "best-approx":
            collapse = norm(x_star - y_star)
            recomputed["collapse_gap"] = collapse
            check("collapse", collapse <= 1e-6)
            fx = m.val(x_star)
            dgap = abs(norm(fx - x_star) - dist_ball(fx, r))
            recomputed["distance_gap"] = dgap
            check("distance-identity", dgap <= 1e-6)
            nc = check_nearest_point(m, x_star, r, n_samples=cfg.n_samples,
                                     seed=cfg.seed + 4,
                                     strict_margin=t["strict_margin"],
                                     exclusion_factor=t["exclusion_factor"])
            recomputed["nearest"] = nc.to_dict()
            check("nearest-point", nc.passed)
        if cfg.mode == "certified":
            check("radius-admissible", r <= rep.r_max + 1e-12)
        return _verdict(failures, recomputed, body)

    if command == "saddle":
        fresh = _run_saddle(cfg, m)
        for name in _compare_dicts(body["constants"], fresh["constants"]):
            check(f"constants:{name}", False)
        if cfg.payoff == "vi":
            payoff = vi_payoff(m)
            rep = vi_report(m, seed=cfg.seed)
            base_L = rep.M.value
        else:
            y_doc = cfg.y_set or {"kind": "ball", "radius": m.domain_radius}
            Y = set_from_dict(y_doc, m.dimension, "y_set")
            payoff = ba_payoff(m, Y)
            rep = ba_report(m, Y, seed=cfg.seed)
            base_L = rep.L.value
        T = (set_from_dict(cfg.t_set, m.dimension, "t_set")
             if cfg.t_set is not None else Ball(r, m.dimension))
        r_max = float(body["constants"]["r_max"])
        scfg = _saddle_cfg(cfg, r, T, base_L, 2.0 * base_L + rep.theta.value, r_max)
        checks = check_saddle(payoff, (x_star, y_star), scfg,
                              n_samples=cfg.n_samples, seed=cfg.seed + 1)
        recomputed["saddle"] = checks.to_dict()
        check("saddle-checks", checks.passed)
        return _verdict(failures, recomputed, body)

    raise ConfigError(f"cannot verify command {command!r}")


def _compare_dicts(stored, fresh, tol: float = 1e-9, prefix: str = "") -> list[str]:
    bad = []
    if isinstance(stored, dict) and isinstance(fresh, dict):
        for key in sorted(set(stored) | set(fresh)):
            if key not in stored or key not in fresh:
                bad.append(prefix + key)
                continue
            bad.extend(_compare_dicts(stored[key], fresh[key], tol,
                                      prefix + key + "."))
        return bad
    if isinstance(stored, (int, float)) and isinstance(fresh, (int, float)) \
            and not isinstance(stored, bool) and not isinstance(fresh, bool):
        if abs(float(stored) - float(fresh)) > tol:
            bad.append(prefix.rstrip("."))
        return bad
    if stored != fresh:
        bad.append(prefix.rstrip("."))
    return bad


def _verdict(failures: list, recomputed: dict, body: dict) -> dict:
    return {"format": VERIFY_FORMAT, "verified": not failures,
            "failures": failures, "recomputed": recomputed,
            "certificate_passed": bool(body.get("passed", False))}


def _to_jsonable(obj):
    if isinstance(obj, dict):
        return {k: _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, CertFlag):
        return obj.value
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    return obj


def _write_atomic(path: str, text: str):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _read_threads_env():
    raw = os.environ.get("BALLSADDLE_THREADS")
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"BALLSADDLE_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise ConfigError(f"BALLSADDLE_THREADS must be >= 1, got {n}")
    return n


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; that code means hypothesis violation
    # here, so bad usage is remapped to the config-error exit 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ballsaddle",
                     description="Certified saddle points, variational "
                                 "inequalities and best-approximation points "
                                 "on small balls.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--r", type=float, default=None, help="ball radius override")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.add_argument("--out", default=None, help="write the certificate here")
        p.add_argument("--heuristic", action="store_true",
                       help="skip certification gates and watermark the output")
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        _read_threads_env()
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}")

        t0 = time.perf_counter()
        if args.command == "verify":
            out_doc = verify(doc)
            passed = out_doc["verified"]
        else:
            cfg = parse_config(doc, args.command)
            if args.r is not None:
                cfg.r = args.r
            if args.seed is not None:
                cfg.seed = args.seed
            if args.heuristic:
                cfg.heuristic = True
            body = run(cfg)
            passed = bool(body.get("passed", False))
            out_doc = {"format": CERT_FORMAT, "command": cfg.command,
                       "seed": cfg.seed, "config": cfg.to_dict(),
                       "certificate": body, "passed": passed}
        out_doc["wall_time"] = time.perf_counter() - t0
        text = json.dumps(_to_jsonable(out_doc), sort_keys=True, indent=2) + "\n"
        if args.out:
            _write_atomic(args.out, text)
            status = "PASS" if passed else "FAIL"
            print(f"{status} {args.command}: certificate written to {args.out}")
        else:
            sys.stdout.write(text)
        return 0 if passed else 3
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (HypothesisViolation, CertificationError) as exc:
        msg = f"hypothesis violation: {exc}"
        if isinstance(exc, HypothesisViolation) and exc.deficit is not None:
            msg += f" (deficit {exc.deficit:.6g})"
        print(msg, file=sys.stderr)
        return 2
    except CheckFailure as exc:
        print(f"check failure: {exc}", file=sys.stderr)
        return 3
    except NonConvergence as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return 4
    except (InvalidInput, BallSaddleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
