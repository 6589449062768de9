import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from conftest import all_parts
from pagd.analysis import brute_force_tangent
from pagd.operators import ContractViolation, DomainError
from pagd.resolvents import (Ball, Box, ConeCertificate, L1Scale, NonnegOrthant, Product,
                             ZeroPart, cone_distance, membership_slack, part_from_dict,
                             resolvent, sample_domain)

finite = st.floats(-1e3, 1e3, allow_nan=False)


# -- resolvent examples

def test_box_clamp():
    box = Box([-1, -1], [1, 1])
    for alpha in (1e-3, 1.0, 50.0):
        assert np.array_equal(resolvent(box, alpha, [2.0, 0.5]), [1.0, 0.5])


def test_zero_identity():
    assert np.array_equal(resolvent(ZeroPart(2), 0.3, [4.0, -7.0]), [4.0, -7.0])


def test_l1_soft_threshold():
    out = resolvent(L1Scale(3, 1.0), 0.5, [2.0, -0.2, 0.0])
    assert np.array_equal(out, [1.5, 0.0, 0.0])


def test_ball_radial_projection():
    np.testing.assert_allclose(resolvent(Ball([0, 0], 1.0), 2.0, [3.0, 4.0]), [0.6, 0.8], rtol=1e-15)


def test_orthant_is_max_with_zero():
    assert np.array_equal(resolvent(NonnegOrthant(3), 1.0, [-1.0, 0.0, 2.0]), [0.0, 0.0, 2.0])


def test_product_blockwise():
    prod = Product([Box([0.0], [1.0]), L1Scale(2, 1.0)])
    assert np.array_equal(resolvent(prod, 1.0, [3.0, 2.0, -0.5]), [1.0, 1.0, 0.0])
    assert prod.dims == [1, 2]


def test_bad_alpha():
    with pytest.raises(ContractViolation):
        resolvent(ZeroPart(1), 0.0, [1.0])
    with pytest.raises(ContractViolation):
        resolvent(Box([0], [1]), -1.0, [1.0])


def test_part_invariants():
    with pytest.raises(ContractViolation):
        Box([1.0], [0.0])
    with pytest.raises(ContractViolation):
        Ball([0.0], 0.0)
    with pytest.raises(ContractViolation):
        L1Scale(2, -1.0)
    with pytest.raises(ContractViolation):
        part_from_dict({"kind": "product", "dims": [2, 2],
                        "parts": [{"kind": "zero", "dim": 1}, {"kind": "zero", "dim": 2}]})


# -- membership examples

def test_membership_active_lower():
    assert membership_slack(NonnegOrthant(2), [0.0, 1.0], [-5.0, 0.0]) == 0.0


def test_membership_interior_nonzero():
    assert membership_slack(NonnegOrthant(2), [0.0, 1.0], [0.0, 3.0]) == 3.0


def test_membership_l1():
    # d(2|.|) at 1.5 is {2}, at 0 is [-2, 2]
    assert membership_slack(L1Scale(2, 2.0), [1.5, 0.0], [2.0, -1.0]) == 0.0
    assert membership_slack(L1Scale(2, 2.0), [1.5, 0.0], [1.0, -3.0]) == 1.0


def test_membership_outside_domain_is_inf():
    assert membership_slack(Box([0], [1]), [2.0], [0.0]) == np.inf
    assert membership_slack(Ball([0, 0], 1.0), [2.0, 0.0], [1.0, 0.0]) == np.inf


def test_membership_ball_boundary():
    ball = Ball([0, 0], 1.0)
    assert membership_slack(ball, [1.0, 0.0], [3.0, 0.0]) == 0.0
    assert membership_slack(ball, [1.0, 0.0], [-3.0, 0.0]) == 3.0
    assert membership_slack(ball, [1.0, 0.0], [0.0, 2.0]) == 2.0


def test_cone_certificate():
    cert = ConeCertificate.build(NonnegOrthant(2), [0.0, 1.0], [-1.0, 0.0])
    assert cert.valid
    assert not ConeCertificate.build(NonnegOrthant(2), [0.0, 1.0], [1.0, 0.0]).valid


# -- cone distance examples

def test_cone_distance_zero():
    assert cone_distance(ZeroPart(2), [9.0, 9.0], [3.0, 4.0]) == 5.0


def test_cone_distance_box_examples():
    orthant = Box([0, 0], [np.inf, np.inf])
    assert cone_distance(orthant, [0.0, 1.0], [3.0, 2.0]) == 2.0
    assert abs(cone_distance(orthant, [0.0, 1.0], [-3.0, 2.0]) - np.sqrt(13.0)) <= 1e-15


def test_cone_distance_outside_domain():
    with pytest.raises(DomainError):
        cone_distance(Box([0], [1]), [1.5], [1.0])
    with pytest.raises(DomainError):
        cone_distance(Ball([0.0], 1.0), [2.0], [1.0])


def test_cone_distance_ball_boundary():
    ball = Ball([0, 0], 1.0)
    # g = (-3, 4) at z = (1, 0): cone ray (mu, 0) cancels the first coordinate
    assert cone_distance(ball, [1.0, 0.0], [-3.0, 4.0]) == 4.0
    assert cone_distance(ball, [1.0, 0.0], [3.0, 4.0]) == 5.0


# -- properties

def _random_pairs(part, rng, n):
    W1 = 5.0 * rng.standard_normal((n, part.dim))
    W2 = 5.0 * rng.standard_normal((n, part.dim))
    alphas = 10.0 * (1.0 - rng.random(n))  # (0, 10]
    return W1, W2, alphas


def test_nonexpansive_seeded(part):
    rng = np.random.default_rng(11)
    W1, W2, alphas = _random_pairs(part, rng, 10_000)
    for w1, w2, a in zip(W1, W2, alphas):
        lhs = np.linalg.norm(part.resolvent(a, w1) - part.resolvent(a, w2))
        assert lhs <= np.linalg.norm(w1 - w2) * (1 + 1e-12)


def test_nonexpansive_close_pairs(part):
    # near-coincident inputs: allow a few ulps of the input magnitude
    rng = np.random.default_rng(13)
    W1 = 5.0 * rng.standard_normal((2000, part.dim))
    W2 = W1 + 1e-3 * rng.standard_normal((2000, part.dim))
    for w1, w2, a in zip(W1, W2, 10.0 * (1.0 - rng.random(2000))):
        lhs = np.linalg.norm(part.resolvent(a, w1) - part.resolvent(a, w2))
        ulps = 8 * np.finfo(float).eps * max(np.abs(w1).max(), 1.0)
        assert lhs <= np.linalg.norm(w1 - w2) * (1 + 1e-12) + ulps


def test_characterization_seeded(part):
    rng = np.random.default_rng(12)
    W, _, alphas = _random_pairs(part, rng, 10_000)
    for w, a in zip(W, alphas):
        z = part.resolvent(a, w)
        assert part.membership_slack(z, (w - z) / a) <= 1e-9


@given(st.sampled_from(sorted(all_parts())), arrays(np.float64, 3, elements=finite),
       arrays(np.float64, 3, elements=finite), st.floats(1e-3, 10.0))
def test_nonexpansive_property(kind, w1, w2, alpha):
    part = all_parts()[kind]
    lhs = np.linalg.norm(part.resolvent(alpha, w1) - part.resolvent(alpha, w2))
    assert lhs <= np.linalg.norm(w1 - w2) * (1 + 1e-12) + 1e-12


@given(st.sampled_from(sorted(all_parts())), arrays(np.float64, 3, elements=finite),
       st.floats(1e-2, 10.0))
def test_resolvent_lands_in_domain(kind, w, alpha):
    part = all_parts()[kind]
    assert part.in_domain(part.resolvent(alpha, w))


def test_zero_cone_distance_when_minus_g_in_cone(part):
    rng = np.random.default_rng(5)
    for w, a in zip(5 * rng.standard_normal((500, part.dim)), rng.random(500) + 0.1):
        z = part.resolvent(a, w)
        c = (w - z) / a
        assert part.cone_distance(z, -c) <= 1e-9


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_cone_distance_matches_brute_force(part, d):
    if part.kind == "product" and d < 3:
        pytest.skip("product fixture needs d >= 3")
    part = all_parts(d)[part.kind] if part.kind != "product" else part
    rng = np.random.default_rng(100 + d)
    Z = sample_domain(part, rng, 25)
    G = 2.0 * rng.standard_normal((25, part.dim))
    for z, g in zip(Z, G):
        closed = part.cone_distance(z, g)
        assert abs(closed - brute_force_tangent(part, z, g, 1e-4)) <= 2e-4
