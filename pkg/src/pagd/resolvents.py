"""Maximal monotone parts A, accessed through resolvents and normal cones.

Each part implements three closed-form queries:

* ``resolvent(alpha, w)``: J_{alpha A}(w) = (Id + alpha A)^{-1}(w)
* ``membership_slack(z, c)``: 0 iff c in A(z), else the size of the violation
* ``cone_distance(z, g)``: min over c in A(z) of ||g + c||

Normal-cone parts (box, orthant, ball) have projections as resolvents, the
l1 part is the subdifferential of lam * ||.||_1 with soft thresholding as its
resolvent.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import ContractViolation, DomainError, as_point

PART_KINDS = ("zero", "box", "ball", "nonneg-orthant", "l1-scale", "product")

MEMBERSHIP_TOL = 1e-9


def _active_tol(bound):
    return 1e-12 * (1.0 + np.abs(bound))


def _check_alpha(alpha):
    if not alpha > 0 or not np.isfinite(alpha):
        raise ContractViolation(f"resolvent step must be positive, got {alpha}")


class MonotonePart:
    kind = None
    supports_cone_distance = True

    def __init__(self, dim):
        if int(dim) < 1:
            raise ContractViolation(f"dim must be >= 1, got {dim}")
        self.dim = int(dim)

    def resolvent(self, alpha, w):
        raise NotImplementedError

    def membership_slack(self, z, c):
        raise NotImplementedError

    def cone_distance(self, z, g):
        raise NotImplementedError

    def in_domain(self, z):
        return True

    def to_dict(self):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.to_dict()})"


class ZeroPart(MonotonePart):
    """A = 0, the unconstrained case."""

    kind = "zero"

    def resolvent(self, alpha, w):
        _check_alpha(alpha)
        return np.array(w, dtype=np.float64)

    def membership_slack(self, z, c):
        return float(np.max(np.abs(c)))

    def cone_distance(self, z, g):
        return float(np.linalg.norm(g))

    def to_dict(self):
        return {"kind": "zero", "dim": self.dim}


class Box(MonotonePart):
    """Normal cone of {lower <= z <= upper}; infinite sides allowed."""

    kind = "box"

    def __init__(self, lower, upper):
        lower = np.asarray(lower, dtype=np.float64).ravel()
        upper = np.asarray(upper, dtype=np.float64).ravel()
        if lower.shape != upper.shape:
            raise ContractViolation("box bounds have different lengths")
        super().__init__(lower.size)
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)) or np.any(lower > upper):
            raise ContractViolation("box needs lower <= upper in every coordinate")
        self.lower = lower
        self.upper = upper
        self._lo_finite = np.isfinite(lower)
        self._up_finite = np.isfinite(upper)

    def resolvent(self, alpha, w):
        _check_alpha(alpha)
        return np.minimum(np.maximum(w, self.lower), self.upper)

    def _active(self, z):
        at_lo = self._lo_finite & (np.abs(z - self.lower) <= _active_tol(self.lower))
        at_up = self._up_finite & (np.abs(z - self.upper) <= _active_tol(self.upper))
        return at_lo, at_up

    def in_domain(self, z):
        lo_ok = z >= self.lower - np.where(self._lo_finite, _active_tol(self.lower), 0.0)
        up_ok = z <= self.upper + np.where(self._up_finite, _active_tol(self.upper), 0.0)
        return bool(np.all(lo_ok & up_ok))

    def membership_slack(self, z, c):
        if not self.in_domain(z):
            return float("inf")
        at_lo, at_up = self._active(z)
        viol = np.abs(c)
        viol = np.where(at_lo, np.maximum(c, 0.0), viol)
        viol = np.where(at_up, np.maximum(-c, 0.0), viol)
        viol = np.where(at_lo & at_up, 0.0, viol)
        return float(np.max(viol))

    def cone_distance(self, z, g):
        if not self.in_domain(z):
            raise DomainError("point outside the box")
        at_lo, at_up = self._active(z)
        # at a lower bound c_i <= 0 can cancel any g_i >= 0; symmetric at upper
        r = np.where(at_lo, np.minimum(g, 0.0), g)
        r = np.where(at_up, np.maximum(r, 0.0), r)
        r = np.where(at_lo & at_up, 0.0, r)
        return float(np.linalg.norm(r))

    def to_dict(self):
        enc = lambda v: [x if np.isfinite(x) else ("inf" if x > 0 else "-inf") for x in v.tolist()]
        return {"kind": "box", "lower": enc(self.lower), "upper": enc(self.upper)}


class NonnegOrthant(Box):
    kind = "nonneg-orthant"

    def __init__(self, dim):
        super().__init__(np.zeros(int(dim)), np.full(int(dim), np.inf))

    def to_dict(self):
        return {"kind": "nonneg-orthant", "dim": self.dim}


class Ball(MonotonePart):
    """Normal cone of the Euclidean ball ||z - center|| <= radius."""

    kind = "ball"

    def __init__(self, center, radius):
        center = as_point(center, name="center")
        super().__init__(center.size)
        if not (np.isfinite(radius) and radius > 0):
            raise ContractViolation(f"ball radius must be positive, got {radius}")
        self.center = center
        self.radius = float(radius)
        self._tol = 1e-12 * (1.0 + self.radius)

    def resolvent(self, alpha, w):
        _check_alpha(alpha)
        u = w - self.center
        n = np.linalg.norm(u)
        if n <= self.radius:
            return np.array(w, dtype=np.float64)
        return self.center + (self.radius / n) * u

    def _where(self, z):
        """Return (state, unit outward normal) with state in {'in', 'bd', 'out'}."""
        u = z - self.center
        n = np.linalg.norm(u)
        if n > self.radius + self._tol:
            return "out", None
        if n >= self.radius - self._tol:
            return "bd", u / n
        return "in", None

    def in_domain(self, z):
        return self._where(z)[0] != "out"

    def membership_slack(self, z, c):
        state, normal = self._where(z)
        if state == "out":
            return float("inf")
        if state == "in":
            return float(np.linalg.norm(c))
        along = float(c @ normal)
        across = float(np.linalg.norm(c - along * normal))
        return max(across, -along, 0.0)

    def cone_distance(self, z, g):
        state, normal = self._where(z)
        if state == "out":
            raise DomainError("point outside the ball")
        if state == "in":
            return float(np.linalg.norm(g))
        mu = max(-float(g @ normal), 0.0)
        return float(np.linalg.norm(g + mu * normal))

    def to_dict(self):
        return {"kind": "ball", "center": self.center.tolist(), "radius": self.radius}


class L1Scale(MonotonePart):
    """Subdifferential of lam * ||z||_1."""

    kind = "l1-scale"

    def __init__(self, dim, lam):
        super().__init__(dim)
        if not (np.isfinite(lam) and lam > 0):
            raise ContractViolation(f"l1 weight must be positive, got {lam}")
        self.lam = float(lam)

    def resolvent(self, alpha, w):
        _check_alpha(alpha)
        return np.sign(w) * np.maximum(np.abs(w) - alpha * self.lam, 0.0)

    def _zero(self, z):
        return np.abs(z) <= _active_tol(0.0)

    def membership_slack(self, z, c):
        zero = self._zero(z)
        viol = np.where(zero, np.maximum(np.abs(c) - self.lam, 0.0),
                        np.abs(c - self.lam * np.sign(z)))
        return float(np.max(viol))

    def cone_distance(self, z, g):
        zero = self._zero(z)
        r = np.where(zero, np.maximum(np.abs(g) - self.lam, 0.0), g + self.lam * np.sign(z))
        return float(np.linalg.norm(r))

    def to_dict(self):
        return {"kind": "l1-scale", "dim": self.dim, "lambda": self.lam}


class Product(MonotonePart):
    """A(x, y, ...) = A_1(x) x A_2(y) x ..., acting blockwise."""

    kind = "product"

    def __init__(self, parts):
        parts = list(parts)
        if not parts:
            raise ContractViolation("product needs at least one block")
        super().__init__(sum(p.dim for p in parts))
        self.parts = parts
        edges = np.cumsum([0] + [p.dim for p in parts])
        self._slices = [slice(a, b) for a, b in zip(edges[:-1], edges[1:])]
        self.supports_cone_distance = all(p.supports_cone_distance for p in parts)

    @property
    def dims(self):
        return [p.dim for p in self.parts]

    def blocks(self):
        return zip(self.parts, self._slices)

    def resolvent(self, alpha, w):
        _check_alpha(alpha)
        return np.concatenate([p.resolvent(alpha, w[s]) for p, s in self.blocks()])

    def in_domain(self, z):
        return all(p.in_domain(z[s]) for p, s in self.blocks())

    def membership_slack(self, z, c):
        return max(p.membership_slack(z[s], c[s]) for p, s in self.blocks())

    def cone_distance(self, z, g):
        return float(np.sqrt(sum(p.cone_distance(z[s], g[s]) ** 2 for p, s in self.blocks())))

    def to_dict(self):
        return {"kind": "product", "dims": self.dims, "parts": [p.to_dict() for p in self.parts]}


class ResolventOnlyPart(MonotonePart):
    """A user-supplied maximal monotone operator known only through its resolvent.

    The tangent residual has no closed form here; runs fall back to the
    certificate value ||F(z_t) + c_t||, which upper bounds it.
    """

    kind = "resolvent-only"
    supports_cone_distance = False

    def __init__(self, dim, resolvent_fn):
        super().__init__(dim)
        self._fn = resolvent_fn

    def resolvent(self, alpha, w):
        _check_alpha(alpha)
        return np.asarray(self._fn(alpha, w), dtype=np.float64)

    def membership_slack(self, z, c):
        # c in A(z) iff z = J_A(z + c)
        return float(np.max(np.abs(self.resolvent(1.0, z + c) - z)))

    def cone_distance(self, z, g):
        raise NotImplementedError("no closed-form normal cone for a resolvent-only part")

    def to_dict(self):
        raise NotImplementedError("resolvent-only parts cannot be serialized")


def resolvent(part, alpha, w):
    """J_{alpha A}(w): the unique z with (w - z) / alpha in A(z)."""
    _check_alpha(alpha)
    return part.resolvent(alpha, as_point(w, part.dim, "w"))


def membership_slack(part, z, c):
    return part.membership_slack(as_point(z, part.dim), as_point(c, part.dim, "c"))


def cone_distance(part, z, g):
    """min over c in A(z) of ||g + c||, i.e. dist(-g, A(z))."""
    return part.cone_distance(as_point(z, part.dim), as_point(g, part.dim, "g"))


@dataclass(frozen=True, eq=False)
class ConeCertificate:
    point: np.ndarray
    element: np.ndarray
    slack: float

    @property
    def valid(self):
        return self.slack <= MEMBERSHIP_TOL

    @classmethod
    def build(cls, part, z, c):
        return cls(np.asarray(z), np.asarray(c), membership_slack(part, z, c))


def _decode_bounds(values):
    out = []
    for v in values:
        if isinstance(v, str):
            if v not in ("inf", "-inf", "+inf"):
                raise ContractViolation(f"bad bound {v!r}; use 'inf' or '-inf'")
            v = float(v)
        out.append(float(v))
    return np.array(out)


def part_from_dict(desc):
    """Build a part from its JSON descriptor."""
    try:
        kind = desc["kind"]
        if kind == "zero":
            return ZeroPart(desc["dim"])
        if kind == "box":
            return Box(_decode_bounds(desc["lower"]), _decode_bounds(desc["upper"]))
        if kind == "nonneg-orthant":
            return NonnegOrthant(desc["dim"])
        if kind == "ball":
            return Ball(desc["center"], desc["radius"])
        if kind == "l1-scale":
            return L1Scale(desc["dim"], desc["lambda"])
        if kind == "product":
            parts = [part_from_dict(p) for p in desc["parts"]]
            if "dims" in desc and list(desc["dims"]) != [p.dim for p in parts]:
                raise ContractViolation("product 'dims' disagree with its sub-parts")
            return Product(parts)
    except (KeyError, TypeError) as exc:
        raise ContractViolation(f"malformed part descriptor: {exc!r}") from exc
    raise ContractViolation(f"unknown part kind {desc.get('kind')!r}")


def sample_domain(part, rng, n):
    """Draw n points of dom A, a fraction of them on the active set.

    Uniform interior draws almost never touch a bound, so about a third of
    the coordinates (or points, for the ball) are snapped onto the boundary.
    """
    d = part.dim
    if isinstance(part, Product):
        return np.hstack([sample_domain(p, rng, n) for p in part.parts])
    if isinstance(part, Box):
        lo = np.where(np.isfinite(part.lower), part.lower, np.minimum(part.upper, 0.0) - 5.0)
        up = np.where(np.isfinite(part.upper), part.upper, np.maximum(part.lower, 0.0) + 5.0)
        Z = lo + (up - lo) * rng.random((n, d))
        snap = rng.random((n, d)) < 0.35
        pick_lo = rng.random((n, d)) < 0.5
        target = np.where(pick_lo, part.lower, part.upper)
        target = np.where(np.isfinite(target), target, np.where(pick_lo, part.upper, part.lower))
        return np.where(snap & np.isfinite(target), target, Z)
    if isinstance(part, Ball):
        U = rng.standard_normal((n, d))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        rad = part.radius * rng.random((n, 1)) ** (1.0 / d)
        rad = np.where(rng.random((n, 1)) < 0.35, part.radius, rad)
        return part.center + rad * U
    if isinstance(part, L1Scale):
        Z = 3.0 * rng.standard_normal((n, d))
        return np.where(rng.random((n, d)) < 0.35, 0.0, Z)
    return 3.0 * rng.standard_normal((n, d))
