"""Residuals and numeric audits of the P-AGD convergence argument.

Every ``check_*`` function returns an :class:`AuditReport` instead of
raising, so a CLI or test can decide what a failure means. Inequalities are
tested as ``lhs <= rhs * (1 + rel) + atol``; ``max_violation`` is the largest
``lhs - rhs`` seen (negative when everything holds with room to spare).
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .algorithms import StepSchedule
from .operators import ContractViolation, as_point
from .resolvents import Ball, Box, L1Scale, Product, ZeroPart

SQRT12_PLUS_1 = np.sqrt(12.0) + 1.0

REL_SLACK = 1e-9
SCALAR_SLACK = 1e-12
# absolute floor so that exact-zero bounds (z_0 = z*) survive rounding noise
ABS_FLOOR = 1e-12


@dataclass
class AuditReport:
    check: str
    passed: Optional[bool]
    max_violation: float = float("nan")
    argmax_t: Optional[int] = None
    details: dict = dc_field(default_factory=dict)

    @property
    def applicable(self):
        return self.passed is not None

    def to_json(self):
        mv = self.max_violation
        return {"check": self.check, "pass": self.passed,
                "max_violation": None if not np.isfinite(mv) else float(mv),
                "argmax_t": self.argmax_t, "details": self.details}

    def __str__(self):
        status = {True: "PASS", False: "FAIL", None: "N/A "}[self.passed]
        return f"[{status}] {self.check}: max_violation={self.max_violation:.3e} at t={self.argmax_t}"


def not_applicable(check, reason):
    return AuditReport(check, None, details={"reason": reason})


def _inequality(check, lhs, rhs, t, rel=REL_SLACK, atol=ABS_FLOOR, details=None):
    lhs, rhs, t = np.asarray(lhs, float), np.asarray(rhs, float), np.asarray(t)
    keep = ~np.isnan(lhs)
    lhs, rhs, t = lhs[keep], rhs[keep], t[keep]
    if lhs.size == 0:
        return not_applicable(check, "no recorded values")
    ok = lhs <= rhs * (1.0 + rel) + atol
    gap = lhs - rhs
    i = int(np.argmax(gap))
    return AuditReport(check, bool(np.all(ok)), float(gap[i]), int(t[i]),
                       dict(details or {}, checked=int(lhs.size),
                            failures=int(np.count_nonzero(~ok))))


# ---------------------------------------------------------------- residuals

def tangent_residual(problem, z):
    """min over c in A(z) of ||F(z) + c||."""
    z = as_point(z, problem.dim)
    return problem.part.cone_distance(z, problem.field(z))


def natural_residual(problem, z):
    """||z - J_A(z - F(z))|| with the unit-step resolvent."""
    z = as_point(z, problem.dim)
    return float(np.linalg.norm(z - problem.part.resolvent(1.0, z - problem.field(z))))


def check_residual_order(problem, points):
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    nat = np.array([natural_residual(problem, z) for z in pts])
    tan = np.array([tangent_residual(problem, z) for z in pts])
    return _inequality("residual_order", nat, tan, np.arange(len(pts)), rel=0.0, atol=1e-9)


# ---------------------------------------------------------------- constants

@dataclass(frozen=True)
class TheoremConstants:
    H0: float
    D: float
    E: float
    gamma: float
    L: float

    @classmethod
    def build(cls, H0, gamma, L, first_step=None):
        """E = max(gamma ||z_1 - z_0||, 12 gamma D), or 12 gamma D without a first step."""
        D = SQRT12_PLUS_1 * H0
        E = 12.0 * gamma * D
        if first_step is not None and np.isfinite(first_step):
            E = max(gamma * first_step, E)
        return cls(float(H0), float(D), float(E), float(gamma), float(L))

    @classmethod
    def from_trace(cls, trace, z_star):
        H0 = float(np.linalg.norm(trace.z[0] - z_star))
        # from the iterates, not the d_norm column the audits inspect
        first = float(np.linalg.norm(trace.z[1] - trace.z[0])) if len(trace.z) > 1 else None
        return cls.build(H0, trace.gamma, trace.lipschitz_L, first)


def theorem_bound(k, T):
    """L (2E + gamma D) / sqrt(T - 1 + gamma)."""
    return k.L * (2.0 * k.E + k.gamma * k.D) / np.sqrt(np.asarray(T, float) - 1.0 + k.gamma)


def explicit_bound(k, T):
    """25 gamma L D / sqrt(T - 1 + gamma)."""
    return 25.0 * k.gamma * k.L * k.D / np.sqrt(np.asarray(T, float) - 1.0 + k.gamma)


def d_decay_bound(k, t):
    return k.E / (np.asarray(t, float) + k.gamma)


@dataclass(frozen=True)
class ScalarBoundSample:
    t: int
    gamma: float
    lambda_t: float
    epsilon_t: float
    q_t: float


def scalar_sequences(gamma, t):
    """lambda_t, epsilon_t, q_t for an array of t, built from the schedule itself.

    L cancels in every ratio, so a unit-L schedule is used.
    """
    sched = StepSchedule(gamma, 1.0)
    t = np.asarray(t, dtype=np.float64)
    a0, a1 = sched.alpha(t), sched.alpha(t + 1)
    b0, b1 = sched.beta(t), sched.beta(t + 1)
    ratio = a1 / a0
    lam = ratio - b1
    eps = b1 - ratio * b0
    q = np.sqrt(lam ** 2 + a1 ** 2)
    return lam, eps, q


def scalar_sample(gamma, t):
    lam, eps, q = scalar_sequences(gamma, np.array([t]))
    return ScalarBoundSample(int(t), float(gamma), float(lam[0]), float(eps[0]), float(q[0]))


# ---------------------------------------------------------------- audits

def _constants_for(trace, z_star, constants):
    if constants is not None:
        return constants
    if z_star is None:
        return None
    return TheoremConstants.from_trace(trace, z_star)


def check_bounded_iterates(trace, z_star=None, constants=None):
    """||z_t - z*||^2 <= 12 H0^2 and ||z_t - z_0|| <= D for every t."""
    if z_star is None:
        return not_applicable("bounded_iterates", "no known solution")
    k = _constants_for(trace, z_star, constants)
    dist2 = np.sum((trace.z - z_star) ** 2, axis=1)
    anchor = np.linalg.norm(trace.z - trace.z[0], axis=1)
    rep = _inequality("bounded_iterates", dist2, np.full_like(dist2, 12.0 * k.H0 ** 2), trace.t)
    rep_d = _inequality("anchor_distance", anchor, np.full_like(anchor, k.D), trace.t)
    ratio = float(np.max(dist2) / k.H0 ** 2) if k.H0 > 0 else 0.0
    rep.passed = rep.passed and rep_d.passed
    rep.details.update(max_ratio=ratio, anchor_max_violation=rep_d.max_violation,
                       max_anchor_over_D=float(np.max(anchor) / k.D) if k.D > 0 else 0.0)
    return rep


def check_d_decay(trace, constants):
    """||d_t|| (t + gamma) <= E."""
    t = trace.t
    lhs = trace.d_norm * (t + constants.gamma)
    rep = _inequality("d_decay", lhs, np.full(len(t), constants.E), t)
    if constants.E > 0:
        rep.details["max_ratio"] = float(np.nanmax(lhs) / constants.E)
    return rep


def check_d_recurrence(trace, constants):
    """||d_{t+1}|| <= q_t ||d_t|| + |eps_t| D."""
    d = trace.d_norm
    if np.count_nonzero(~np.isnan(d)) < 2:
        return not_applicable("d_recurrence", "fewer than two recorded steps")
    t = np.arange(len(d) - 1)
    _, eps, q = scalar_sequences(constants.gamma, t)
    return _inequality("d_recurrence", d[1:], q * d[:-1] + np.abs(eps) * constants.D, t)


def check_main_bound(trace, constants):
    """Certificate and tangent residual against both forms of the final bound."""
    t = trace.t[1:]
    cert = trace.cert_residual[1:]
    tan = trace.tan_residual[1:]
    main = _inequality("main_bound", cert, theorem_bound(constants, t), t)
    k12 = TheoremConstants(constants.H0, constants.D, 12.0 * constants.gamma * constants.D,
                           constants.gamma, constants.L)
    expl = _inequality("explicit_bound", np.fmax(cert, tan), explicit_bound(k12, t), t)
    order = _inequality("tangent_le_certificate", tan, cert, t, rel=0.0, atol=1e-9)
    subs = [main, expl, order]
    passed = all(r.passed is not False for r in subs) and main.passed is not None
    main.passed = passed
    main.details.update({r.check: r.to_json() for r in subs[1:]})
    return main


def check_scalar_bounds(gamma, t_max):
    """q_t <= 1 - 9/(8(t+1+gamma)), |eps_t| <= gamma/(t+gamma)^2 and lambda_t >= 0."""
    if not gamma >= 2:
        raise ContractViolation(f"gamma must be >= 2, got {gamma}")
    t = np.arange(int(t_max) + 1, dtype=np.float64)
    lam, eps, q = scalar_sequences(gamma, t)
    q_bound = 1.0 - 9.0 / (8.0 * (t + 1.0 + gamma))
    e_bound = gamma / (t + gamma) ** 2
    ok_q = q <= q_bound * (1.0 + SCALAR_SLACK)
    ok_e = np.abs(eps) <= e_bound * (1.0 + SCALAR_SLACK)
    ok_l = lam >= 0.0
    gap = np.maximum.reduce([q - q_bound, np.abs(eps) - e_bound, -lam])
    i = int(np.argmax(gap))
    return AuditReport(
        "scalar_bounds", bool(ok_q.all() and ok_e.all() and ok_l.all()), float(gap[i]), i,
        {"gamma": float(gamma), "t_max": int(t_max),
         "max_q_minus_bound": float(np.max(q - q_bound)),
         "max_eps_over_bound": float(np.max(np.abs(eps) / e_bound)),
         "min_lambda": float(lam.min()),
         "failures": int(np.count_nonzero(~(ok_q & ok_e & ok_l)))})


def audit_trace(trace, problem, residual_points=None):
    """Run every applicable check on a P-AGD trace; returns a list of reports."""
    z_star = problem.known_solution
    reports = []
    if z_star is None:
        for name in ("bounded_iterates", "d_decay", "d_recurrence", "main_bound"):
            reports.append(not_applicable(name, "no known solution"))
    else:
        k = TheoremConstants.from_trace(trace, z_star)
        reports += [check_bounded_iterates(trace, z_star, k), check_d_decay(trace, k),
                    check_d_recurrence(trace, k), check_main_bound(trace, k)]
    if problem.part.supports_cone_distance:
        pts = trace.z[1:] if residual_points is None else residual_points
        reports.append(check_residual_order(problem, pts))
    else:
        reports.append(not_applicable("residual_order", "part has no closed-form cone"))
    reports.append(check_scalar_bounds(trace.gamma, max(trace.last, 1)))
    return reports


# ---------------------------------------------------------------- rate fit

@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    points: int


def fit_rate(trace, window=0.5, column="cert_residual"):
    """Least-squares slope of log(residual) vs log(t + gamma) over the tail.

    Returns None (with nothing fitted) when the window holds a nonpositive
    residual. Non-anchored traces have no certificate column; pass
    ``column="tan_residual"`` for those.
    """
    values = np.asarray(getattr(trace, column), dtype=np.float64)
    gamma = trace.gamma if trace.gamma is not None else 0.0
    if len(values) < 100:
        raise ContractViolation("fit_rate needs at least 100 records")
    start = int(np.floor(len(values) * (1.0 - window)))
    r = values[start:]
    t = np.arange(start, len(values), dtype=np.float64)
    keep = ~np.isnan(r)
    r, t = r[keep], t[keep]
    if r.size < 2 or np.any(r <= 0):
        return None
    slope, intercept = np.polyfit(np.log(t + gamma), np.log(r), 1)
    return RateFit(float(slope), float(intercept), int(r.size))


# ---------------------------------------------------------------- oracle

def _grid_min_1d(f, lo, hi, step):
    """Minimize a scalar function on [lo, hi] by grid plus one refinement pass."""
    if hi <= lo:
        return f(np.array([lo]))[0]
    grid = np.linspace(lo, hi, int(np.ceil((hi - lo) / step)) + 1)
    vals = f(grid)
    i = int(np.argmin(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    fine = np.linspace(a, b, 201)
    return min(vals[i], float(np.min(f(fine))))


def _brute_sq(part, z, g, step):
    """Squared distance, minimized by searching a parameterization of A(z)."""
    span = 10.0 * float(np.linalg.norm(g)) + step
    if isinstance(part, ZeroPart):
        return float(g @ g)
    if isinstance(part, Product):
        return sum(_brute_sq(p, z[s], g[s], step) for p, s in part.blocks())
    if isinstance(part, Box):
        total = 0.0
        for i in range(part.dim):
            lo_act = np.isfinite(part.lower[i]) and abs(z[i] - part.lower[i]) <= 1e-12 * (1 + abs(part.lower[i]))
            up_act = np.isfinite(part.upper[i]) and abs(z[i] - part.upper[i]) <= 1e-12 * (1 + abs(part.upper[i]))
            f = lambda c, gi=g[i]: (gi + c) ** 2
            if lo_act and up_act:
                total += _grid_min_1d(f, -span, span, step)
            elif lo_act:
                total += _grid_min_1d(f, -span, 0.0, step)
            elif up_act:
                total += _grid_min_1d(f, 0.0, span, step)
            else:
                total += g[i] ** 2
        return total
    if isinstance(part, Ball):
        u = z - part.center
        n = np.linalg.norm(u)
        if n < part.radius - 1e-12 * (1 + part.radius):
            return float(g @ g)
        u = u / n
        return _grid_min_1d(lambda mu: np.sum((g[None, :] + mu[:, None] * u[None, :]) ** 2, axis=1),
                            0.0, span, step)
    if isinstance(part, L1Scale):
        total = 0.0
        for i in range(part.dim):
            if abs(z[i]) <= 1e-12:
                total += _grid_min_1d(lambda c, gi=g[i]: (gi + c) ** 2, -part.lam, part.lam, step)
            else:
                total += (g[i] + part.lam * np.sign(z[i])) ** 2
        return total
    raise ContractViolation(f"no brute-force parameterization for {type(part).__name__}")


def brute_force_tangent(part, z, g, grid_step=1e-4):
    """Independent dense-search estimate of min over c in A(z) of ||g + c||.

    Meant for tests on small dimensions (d <= 4).
    """
    z = as_point(z, part.dim)
    g = as_point(g, part.dim, "g")
    if part.dim > 4:
        raise ContractViolation("brute force oracle is limited to d <= 4")
    return float(np.sqrt(max(_brute_sq(part, z, g, grid_step), 0.0)))
