"""Anchored and baseline iterations for 0 in F(z) + A(z).

Methods:

* ``p-agd``  z_{t+1} = J_{a_t A}((1 - b_t) z_t + b_t z_0 - a_t F(z_t))
* ``agd``    same with A = 0
* ``gd``     forward-backward, z_{t+1} = J_{a A}(z_t - a F(z_t))
* ``eg``     extragradient with a look-ahead resolvent step

with a_t = 1 / (L sqrt(t + gamma)), b_t = gamma / (t + gamma) for the
anchored methods and a constant step (default 1 / (2L)) for the baselines.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .operators import ContractViolation, as_point
from .resolvents import ZeroPart

METHODS = ("p-agd", "agd", "gd", "eg")
ANCHORED = ("p-agd", "agd")


class NumericalFailure(ArithmeticError):
    def __init__(self, t, message="non-finite iterate"):
        super().__init__(f"{message} at t={t}")
        self.t = t


@dataclass(frozen=True)
class StepSchedule:
    gamma: float
    lipschitz_L: float

    def __post_init__(self):
        if not self.gamma >= 2:
            raise ContractViolation(f"schedule needs gamma >= 2, got {self.gamma}")
        if not (np.isfinite(self.lipschitz_L) and self.lipschitz_L > 0):
            raise ContractViolation(f"L must be positive, got {self.lipschitz_L}")

    def alpha(self, t):
        return 1.0 / (self.lipschitz_L * np.sqrt(t + self.gamma))

    def beta(self, t):
        return self.gamma / (t + self.gamma)


def step_schedule(sched, t):
    """Return (alpha_t, beta_t)."""
    if t < 0:
        raise ContractViolation(f"t must be nonnegative, got {t}")
    return float(sched.alpha(t)), float(sched.beta(t))


def _anchored_arg(z_t, z_0, Fz, alpha, beta):
    # shared by agd and p-agd so that the A = 0 case is bitwise identical
    return (1.0 - beta) * z_t + beta * z_0 - alpha * Fz


def _p_agd(part, Fz, alpha, beta, z_t, z_0):
    w = _anchored_arg(z_t, z_0, Fz, alpha, beta)
    z_next = part.resolvent(alpha, w)
    return z_next, (w - z_next) / alpha


def p_agd_step(problem, sched, t, z_t, z_0):
    """One proximal anchored step; returns (z_{t+1}, c_{t+1}) with c_{t+1} in A(z_{t+1})."""
    d = problem.dim
    z_t, z_0 = as_point(z_t, d, "z_t"), as_point(z_0, d, "z_0")
    alpha, beta = step_schedule(sched, t)
    return _p_agd(problem.part, problem.field(z_t), alpha, beta, z_t, z_0)


def agd_step(field, sched, t, z_t, z_0):
    d = field.dim
    z_t, z_0 = as_point(z_t, d, "z_t"), as_point(z_0, d, "z_0")
    alpha, beta = step_schedule(sched, t)
    return _anchored_arg(z_t, z_0, field(z_t), alpha, beta)


def _check_step(alpha):
    if not (np.isfinite(alpha) and alpha > 0):
        raise ContractViolation(f"step must be positive, got {alpha}")


def gd_step(problem, alpha, z_t):
    _check_step(alpha)
    z_t = as_point(z_t, problem.dim, "z_t")
    return problem.part.resolvent(alpha, z_t - alpha * problem.field(z_t))


def eg_step(problem, alpha, z_t):
    _check_step(alpha)
    z_t = as_point(z_t, problem.dim, "z_t")
    J, F = problem.part.resolvent, problem.field
    z_half = J(alpha, z_t - alpha * F(z_t))
    return J(alpha, z_t - alpha * F(z_half))


@dataclass
class RunOptions:
    divergence_threshold: float = 1e12
    # stop once ||F(z_t) + c_t|| <= tol (anchored methods only); None disables
    tol: Optional[float] = None
    compute_tangent: bool = True


@dataclass(eq=False)
class RunTrace:
    """Column-oriented record of one run, rows t = 0..T.

    Undefined entries are NaN: ``d_norm`` at the last row, ``c`` and
    ``cert_residual`` at t = 0 (and for non-anchored methods), ``tan_residual``
    off the domain of A, bound columns when no solution is known.
    """

    method: str
    label: str
    z: np.ndarray
    d_norm: np.ndarray
    c: np.ndarray
    cert_residual: np.ndarray
    nat_residual: np.ndarray
    tan_residual: np.ndarray
    anchor_dist: np.ndarray
    bound_thm: np.ndarray
    bound_d_decay: np.ndarray
    gamma: Optional[float] = None
    lipschitz_L: Optional[float] = None
    step: Optional[float] = None
    T: int = 0
    diverged: bool = False
    stopped_early: bool = False
    meta: dict = dc_field(default_factory=dict)

    @property
    def t(self):
        return np.arange(len(self.z))

    @property
    def last(self):
        return len(self.z) - 1

    def metadata(self):
        out = {"method": self.method, "label": self.label, "T": self.T,
               "rows": len(self.z), "dim": int(self.z.shape[1]),
               "diverged": self.diverged, "stopped_early": self.stopped_early}
        if self.method in ANCHORED:
            out["schedule"] = {"gamma": self.gamma, "L": self.lipschitz_L}
        else:
            out["step"] = self.step
        out.update(self.meta)
        return out


def _tangent(part, z, Fz):
    if not part.supports_cone_distance or not part.in_domain(z):
        return np.nan
    return part.cone_distance(z, Fz)


def run(problem, method="p-agd", T=1000, gamma=2.0, step=None, options=None):
    """Iterate `method` T times from problem.start and record diagnostics.

    `gamma` configures the anchored schedule, `step` the constant step of
    gd/eg (default 1/(2L)). Raises NumericalFailure on a non-finite iterate;
    crossing options.divergence_threshold instead ends the run with
    ``trace.diverged`` set.
    """
    if method not in METHODS:
        raise ContractViolation(f"unknown method {method!r}; expected one of {METHODS}")
    if T < 1:
        raise ContractViolation("T must be >= 1")
    options = options or RunOptions()
    field, part = problem.field, problem.part
    L = field.lipschitz_L
    anchored = method in ANCHORED
    sched = None
    if anchored:
        sched = StepSchedule(gamma, L)
        if method == "agd" and not isinstance(part, ZeroPart):
            raise ContractViolation("agd is the unconstrained method; use p-agd with a nonzero part")
    else:
        step = 1.0 / (2.0 * L) if step is None else float(step)
        _check_step(step)

    d = problem.dim
    n = T + 1
    z = np.full((n, d), np.nan)
    c = np.full((n, d), np.nan)
    cols = {k: np.full(n, np.nan) for k in
            ("d_norm", "cert", "nat", "tan", "anchor")}
    z0 = problem.start
    z[0] = z0
    zt = z0
    Fz = field(zt)
    unit = lambda v: part.resolvent(1.0, v)
    tan_ok = options.compute_tangent and part.supports_cone_distance
    last = T
    diverged = stopped = False

    for t in range(n):
        cols["nat"][t] = np.linalg.norm(zt - unit(zt - Fz))
        if tan_ok:
            cols["tan"][t] = _tangent(part, zt, Fz)
        cols["anchor"][t] = np.linalg.norm(zt - z0)
        if t >= 1 and anchored:
            cols["cert"][t] = np.linalg.norm(Fz + c[t])
        if t == T:
            break
        if not np.isfinite(cols["nat"][t]):
            raise NumericalFailure(t)
        if cols["anchor"][t] > options.divergence_threshold:
            diverged, last = True, t
            break
        if options.tol is not None and anchored and cols["cert"][t] <= options.tol:
            stopped, last = True, t
            break

        if anchored:
            alpha, beta = step_schedule(sched, t)
            z_next, c_next = _p_agd(part, Fz, alpha, beta, zt, z0)
            c[t + 1] = c_next
        elif method == "gd":
            z_next = part.resolvent(step, zt - step * Fz)
        else:
            z_half = part.resolvent(step, zt - step * Fz)
            z_next = part.resolvent(step, zt - step * field(z_half))
        if not np.all(np.isfinite(z_next)):
            raise NumericalFailure(t + 1)
        z[t + 1] = z_next
        cols["d_norm"][t] = np.linalg.norm(z_next - zt)
        zt = z_next
        Fz = field(zt)

    rows = slice(0, last + 1)
    trace = RunTrace(
        method=method, label=problem.label, z=z[rows], d_norm=cols["d_norm"][rows],
        c=c[rows], cert_residual=cols["cert"][rows], nat_residual=cols["nat"][rows],
        tan_residual=cols["tan"][rows], anchor_dist=cols["anchor"][rows],
        bound_thm=np.full(last + 1, np.nan), bound_d_decay=np.full(last + 1, np.nan),
        gamma=float(gamma) if anchored else None, lipschitz_L=L,
        step=None if anchored else step, T=T, diverged=diverged, stopped_early=stopped,
    )
    if anchored and problem.known_solution is not None:
        from .analysis import TheoremConstants, theorem_bound, d_decay_bound

        k = TheoremConstants.from_trace(trace, problem.known_solution)
        trace.bound_thm[1:] = theorem_bound(k, trace.t[1:])
        trace.bound_d_decay[:] = d_decay_bound(k, trace.t)
    return trace
