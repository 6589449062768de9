"""Exit criteria, one test each; a PASS/FAIL line per criterion is printed
in the pytest terminal summary."""
import time

import numpy as np
import pytest

from conftest import all_parts
from pagd.algorithms import run
from pagd.analysis import (TheoremConstants, brute_force_tangent, check_bounded_iterates,
                           check_d_decay, check_d_recurrence, check_main_bound,
                           check_residual_order, check_scalar_bounds, explicit_bound,
                           fit_rate, theorem_bound)
from pagd.operators import MonotoneField, ProblemInstance
from pagd.problems import BUILTINS, builtin
from pagd.resolvents import sample_domain

T_LONG = 100_000
RESULTS = {}


def record(key, ok, msg):
    RESULTS[key] = (bool(ok), msg)
    print(f"{'PASS' if ok else 'FAIL'}  {key}: {msg}")
    assert ok, msg


@pytest.fixture(scope="module")
def long_runs():
    out = {}
    for name in sorted(BUILTINS):
        p = builtin(name)
        t0 = time.perf_counter()
        tr = run(p, "p-agd", T=T_LONG, gamma=2.0)
        out[name] = (p, tr, TheoremConstants.from_trace(tr, p.known_solution),
                     time.perf_counter() - t0)
    return out


def monotone_problem(part, seed):
    rng = np.random.default_rng(seed)
    d = part.dim
    G = rng.standard_normal((d, d))
    B = rng.standard_normal((d, d))
    field = MonotoneField.custom_matrix(G - G.T + 0.1 * B @ B.T, rng.standard_normal(d))
    return ProblemInstance(field, part, np.zeros(d), label=f"{part.kind}-probe")


def test_01_theorem_bound(long_runs):
    p, tr, k, secs = long_runs["box-linear-50"]
    t = tr.t[1:]
    bound = theorem_bound(k, t)
    ok = np.all(tr.cert_residual[1:] <= bound * (1 + 1e-9))
    worst = np.max(tr.cert_residual[1:] / bound)
    record("1 theorem bound", ok and secs < 30,
           f"box-linear-50 T={T_LONG}: max cert/bound = {worst:.4f}, run {secs:.1f}s (<30s)")


def test_02_explicit_constant_bound(long_runs):
    p, tr, k, _ = long_runs["box-linear-50"]
    t = tr.t[1:]
    bound = explicit_bound(k, t)
    tan = tr.tan_residual[1:]
    ok = np.all(np.isfinite(tan)) and np.all(tan <= bound * (1 + 1e-9))
    assert check_main_bound(tr, k).passed
    record("2 explicit-constant bound", ok, f"max tan/(25 gamma L D/sqrt(T-1+gamma)) = {np.max(tan / bound):.4f}")


def test_03_bounded_iterates(long_runs):
    ratios = {}
    for name, (p, tr, k, _) in long_runs.items():
        rep = check_bounded_iterates(tr, p.known_solution, k)
        ratio = np.max(np.sum((tr.z - p.known_solution) ** 2, axis=1)) / k.H0 ** 2
        ratios[name] = ratio
        assert rep.passed, rep
    ok = all(r <= 12 + 1e-9 for r in ratios.values())
    record("3 bounded iterates", ok,
           "max ||z_t - z*||^2 / H0^2: " + ", ".join(f"{n}={r:.3f}" for n, r in ratios.items()))


def test_04_d_decay(long_runs):
    ratios = {}
    for name, (p, tr, k, _) in long_runs.items():
        ratios[name] = np.nanmax(tr.d_norm * (tr.t + k.gamma)) / k.E
        assert check_d_decay(tr, k).passed
    ok = all(r <= 1 + 1e-9 for r in ratios.values())
    record("4 d-decay", ok, "max ||d_t||(t+gamma)/E: " + ", ".join(f"{n}={r:.4f}" for n, r in ratios.items()))


def test_05_d_recurrence(long_runs):
    reps = {name: check_d_recurrence(tr, k) for name, (p, tr, k, _) in long_runs.items()}
    ok = all(r.passed for r in reps.values())
    record("5 d-recurrence", ok,
           f"{sum(r.details['checked'] for r in reps.values())} steps checked, "
           f"max lhs-rhs = {max(r.max_violation for r in reps.values()):.3e}")


def test_06_scalar_bounds():
    t0 = time.perf_counter()
    reps = [check_scalar_bounds(g, 10 ** 6) for g in (2.0, 2.5, 3.0, 5.0, 10.0)]
    secs = time.perf_counter() - t0
    ok = all(r.passed for r in reps) and secs < 5
    record("6 scalar bounds", ok,
           f"gamma in {{2,2.5,3,5,10}}, t <= 1e6: all hold, min lambda = "
           f"{min(r.details['min_lambda'] for r in reps):.4f}, {secs:.2f}s (<5s)")


def test_07_residual_order():
    worst = -np.inf
    ok = True
    for i, (kind, part) in enumerate(sorted(all_parts(3).items())):
        p = monotone_problem(part, i)
        pts = sample_domain(part, np.random.default_rng(700 + i), 1000)
        rep = check_residual_order(p, pts)
        ok &= bool(rep.passed) and rep.details["checked"] == 1000
        worst = max(worst, rep.max_violation)
    for name in sorted(BUILTINS):
        p = builtin(name)
        rep = check_residual_order(p, sample_domain(p.part, np.random.default_rng(7), 1000))
        ok &= bool(rep.passed)
        worst = max(worst, rep.max_violation)
    record("7 natural <= tangent", ok, f"1000 points per part kind and builtin, max nat-tan = {worst:.2e}")


def test_08_resolvent_properties():
    ok = True
    worst_ratio, worst_slack = 0.0, 0.0
    for i, (kind, part) in enumerate(sorted(all_parts(3).items())):
        rng = np.random.default_rng(800 + i)
        n = 10_000
        W1 = 5.0 * rng.standard_normal((n, part.dim))
        W2 = 5.0 * rng.standard_normal((n, part.dim))
        alphas = 10.0 * (1.0 - rng.random(n))
        for w1, w2, a in zip(W1, W2, alphas):
            z1, z2 = part.resolvent(a, w1), part.resolvent(a, w2)
            ratio = np.linalg.norm(z1 - z2) / np.linalg.norm(w1 - w2)
            slack = part.membership_slack(z1, (w1 - z1) / a)
            worst_ratio, worst_slack = max(worst_ratio, ratio), max(worst_slack, slack)
            ok &= ratio <= 1 + 1e-12 and slack <= 1e-9
    record("8 resolvent facts", ok,
           f"6 kinds x 10000: max ||Jw1-Jw2||/||w1-w2|| = {worst_ratio:.15f}, max slack = {worst_slack:.1e}")


def test_09_oracle_equivalence():
    worst = 0.0
    for kind in sorted(all_parts()):
        rng = np.random.default_rng(900 + len(kind))
        for j in range(100):
            d = 3 if kind == "product" else 1 + j % 4
            part = all_parts(d)[kind]
            z = sample_domain(part, rng, 1)[0]
            g = 2.0 * rng.standard_normal(part.dim)
            worst = max(worst, abs(part.cone_distance(z, g) - brute_force_tangent(part, z, g, 1e-4)))
    record("9 oracle equivalence", worst <= 2e-4, f"max |closed form - grid search| = {worst:.2e} (tol 2e-4)")


def test_10_reduction():
    p = builtin("rotation-unconstrained")
    a, b = run(p, "agd", T=10_000), run(p, "p-agd", T=10_000)
    same = a.z.tobytes() == b.z.tobytes()
    record("10 reduction", same, "P-AGD with A=0 vs AGD, 1e4 iterations: bitwise identical" if same
           else "iterates differ")


def test_11_divergence_contrast(long_runs):
    p = builtin("rotation-unconstrained")
    gd = run(p, "gd", T=T_LONG, step=1.0 / (2.0 * p.field.lipschitz_L))
    eg = run(p, "eg", T=T_LONG)
    pagd_tan = long_runs["rotation-unconstrained"][1].tan_residual[-1]
    ok = gd.diverged and not eg.diverged and eg.tan_residual[-1] < 1e-2 and pagd_tan < 1e-2
    record("11 divergence contrast", ok,
           f"GD diverged at t={gd.last}; EG tan={eg.tan_residual[-1]:.2e}; P-AGD tan={pagd_tan:.2e}")


def test_12_empirical_rate(long_runs):
    fit = fit_rate(long_runs["rotation-unconstrained"][1], window=0.5)
    record("12 empirical rate", fit is not None and fit.slope <= -0.4,
           f"slope over last half of T=1e5 rotation run = {fit.slope:.4f} (<= -0.4)")
