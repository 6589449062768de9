import numpy as np
import pytest
from hypothesis import settings

from pagd.problems import BUILTINS, builtin
from pagd.resolvents import Ball, Box, L1Scale, NonnegOrthant, Product, ZeroPart

settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile("ci")


def all_parts(d=3):
    """One instance of every builtin part kind at dimension d."""
    return {
        "zero": ZeroPart(d),
        "box": Box(np.r_[-1.0, -np.inf, 0.0][:d] if d <= 3 else -np.ones(d),
                   np.r_[1.0, 2.0, np.inf][:d] if d <= 3 else np.ones(d)),
        "nonneg-orthant": NonnegOrthant(d),
        "ball": Ball(np.linspace(-0.5, 0.5, d), 1.5),
        "l1-scale": L1Scale(d, 0.7),
        "product": Product([Box([-1.0], [1.0]), L1Scale(1, 0.3), Ball(np.zeros(max(d - 2, 1)), 1.0)]),
    }


@pytest.fixture(params=sorted(all_parts()))
def part(request):
    return all_parts()[request.param]


@pytest.fixture(params=sorted(BUILTINS))
def instance(request):
    return builtin(request.param)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS, key=lambda k: int(k.split()[0])):
        ok, msg = RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {msg}")
