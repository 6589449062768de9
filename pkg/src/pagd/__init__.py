"""Proximal anchored gradient descent for monotone inclusions 0 in F(z) + A(z)."""
from .algorithms import (RunOptions, RunTrace, StepSchedule, agd_step, eg_step, gd_step,
                         p_agd_step, run, step_schedule)
from .analysis import (AuditReport, TheoremConstants, brute_force_tangent, fit_rate,
                       natural_residual, tangent_residual)
from .operators import (ContractViolation, DomainError, MonotoneField, ProblemInstance,
                        evaluate_field, probe_lipschitz, probe_monotonicity)
from .problems import builtin
from .resolvents import (Ball, Box, L1Scale, NonnegOrthant, Product, ZeroPart, cone_distance,
                         membership_slack, resolvent)

__version__ = "0.1.0"
