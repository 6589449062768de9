"""Points, the single-valued monotone field F, and problem instances.

Every field shipped here is affine, F(z) = M z + b, so it is stored as a
matrix/offset pair regardless of how it was specified (rotation, saddle
gradient of a quadratic-bilinear Phi, plain matrix).
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np


FIELD_KINDS = ("linear", "saddle-bilinear", "rotation", "custom-matrix")

# reject custom-matrix fields whose symmetric part dips below this
MONOTONE_EIG_TOL = 1e-10


class ContractViolation(ValueError):
    """Raised when an operation is called outside its precondition."""


class DomainError(ValueError):
    """Raised when a point lies outside the domain of the set-valued part."""


def as_point(z, dim=None, name="z"):
    """Validate and return `z` as a 1-d float64 array.

    This is the only representation of a point used in the package.
    """
    arr = np.asarray(z, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size == 0:
        raise ContractViolation(f"{name} must be a non-empty vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{name} has non-finite entries")
    if dim is not None and arr.size != dim:
        raise ContractViolation(f"{name} has dim {arr.size}, expected {dim}")
    return arr


@dataclass(frozen=True, eq=False)
class MonotoneField:
    """Affine field F(z) = matrix @ z + offset with declared Lipschitz constant.

    Use the constructors `linear`, `custom_matrix`, `rotation` and
    `saddle_bilinear` rather than building this directly.
    """

    kind: str
    matrix: np.ndarray
    offset: np.ndarray
    lipschitz_L: float
    params: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise ContractViolation(f"unknown field kind {self.kind!r}")
        M = np.array(self.matrix, dtype=np.float64)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
            raise ContractViolation(f"field matrix must be square, got {M.shape}")
        if not np.all(np.isfinite(M)):
            raise ContractViolation("field matrix has non-finite entries")
        b = as_point(self.offset, M.shape[0], "offset")
        if not (np.isfinite(self.lipschitz_L) and self.lipschitz_L > 0):
            raise ContractViolation(f"lipschitz_L must be positive, got {self.lipschitz_L}")
        M.setflags(write=False)
        b = b.copy()
        b.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "offset", b)
        object.__setattr__(self, "lipschitz_L", float(self.lipschitz_L))

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __call__(self, z):
        return self.matrix @ z + self.offset

    def evaluate_many(self, Z):
        """Evaluate F row-wise on an (n, dim) array."""
        return Z @ self.matrix.T + self.offset

    @classmethod
    def linear(cls, M, b=None, L=None):
        """F(z) = M z + b. No monotonicity check; see `custom_matrix`."""
        M = np.asarray(M, dtype=np.float64)
        if b is None:
            b = np.zeros(M.shape[0])
        if L is None:
            L = spectral_norm(M)
        return cls("linear", M, b, L)

    @classmethod
    def custom_matrix(cls, M, b=None, L=None):
        """Like `linear`, but rejects M whose symmetric part is indefinite."""
        M = np.asarray(M, dtype=np.float64)
        if M.ndim == 2 and M.shape[0] == M.shape[1] and M.size:
            lam_min = np.linalg.eigvalsh(M + M.T).min()
            if lam_min < -MONOTONE_EIG_TOL:
                raise ContractViolation(
                    f"custom-matrix field is not monotone: lambda_min(M+M^T) = {lam_min:.3e}")
        if b is None:
            b = np.zeros(M.shape[0])
        if L is None:
            L = spectral_norm(M)
        return cls("custom-matrix", M, b, L)

    @classmethod
    def rotation(cls, L=1.0):
        """The planar field F(x, y) = (y, -x)."""
        if L < 1.0:
            raise ContractViolation(f"rotation field needs L >= 1, got {L}")
        return cls("rotation", [[0.0, 1.0], [-1.0, 0.0]], [0.0, 0.0], L)

    @classmethod
    def saddle_bilinear(cls, P, Q, R, a=None, c=None, L=None):
        """Saddle field of Phi(x, y) = x'Px/2 + x'Qy - y'Ry/2 + a'x - c'y.

        Returns F(x, y) = (grad_x Phi, -grad_y Phi) = (Px + Qy + a, Ry - Q'x + c).
        P and R must be symmetric positive semidefinite.
        """
        Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
        n, m = Q.shape
        P = np.asarray(P, dtype=np.float64).reshape(n, n)
        R = np.asarray(R, dtype=np.float64).reshape(m, m)
        for name, S in (("P", P), ("R", R)):
            if not np.allclose(S, S.T, atol=1e-12):
                raise ContractViolation(f"{name} must be symmetric")
            if np.linalg.eigvalsh(S).min() < -MONOTONE_EIG_TOL:
                raise ContractViolation(f"{name} must be positive semidefinite")
        M = np.block([[P, Q], [-Q.T, R]])
        a = np.zeros(n) if a is None else as_point(a, n, "a")
        c = np.zeros(m) if c is None else as_point(c, m, "c")
        if L is None:
            L = spectral_norm(M)
        return cls("saddle-bilinear", M, np.concatenate([a, c]), L,
                   params={"P": P, "Q": Q, "R": R, "n": n, "m": m})


def evaluate_field(field, z):
    """Return F(z); raises ContractViolation on a dimension mismatch."""
    return field(as_point(z, field.dim))


def spectral_norm(M):
    return float(np.linalg.norm(np.asarray(M, dtype=np.float64), 2))


def power_iteration_norm(M, tol=1e-10, max_iter=10_000, seed=0):
    """Largest singular value of M via power iteration on M^T M.

    Stops once the eigen-residual ||M^T M v - mu v|| drops below tol * mu.
    """
    M = np.asarray(M, dtype=np.float64)
    G = M.T @ M
    v = np.random.default_rng(seed).standard_normal(G.shape[0])
    v /= np.linalg.norm(v)
    mu = 0.0
    for _ in range(max_iter):
        Gv = G @ v
        mu = float(v @ Gv)
        if mu <= 0.0:
            return 0.0
        if np.linalg.norm(Gv - mu * v) <= tol * mu:
            break
        v = Gv / np.linalg.norm(Gv)
    return float(np.sqrt(mu))


def _ball_pairs(dim, samples, rng, radius):
    def draw(n):
        X = rng.standard_normal((n, dim))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        return X * (radius * rng.random((n, 1)) ** (1.0 / dim))

    Z, W = draw(samples), draw(samples)
    # exactly coincident pairs are re-drawn
    same = np.all(Z == W, axis=1)
    while same.any():
        W[same] = draw(int(same.sum()))
        same = np.all(Z == W, axis=1)
    return Z, W


@dataclass(frozen=True)
class MonotonicityProbe:
    min_inner_product: float
    passed: bool


@dataclass(frozen=True)
class LipschitzProbe:
    max_ratio: float
    passed: bool
    operator_norm: Optional[float] = None


def probe_monotonicity(field, samples=10_000, seed=0, radius=100.0):
    """Sample pairs in a ball and look for <F(z)-F(w), z-w> < 0.

    A pass is evidence, not proof.
    """
    if samples < 1:
        raise ContractViolation("samples must be >= 1")
    rng = np.random.default_rng(seed)
    Z, W = _ball_pairs(field.dim, samples, rng, radius)
    diff = Z - W
    inner = np.einsum("ij,ij->i", field.evaluate_many(Z) - field.evaluate_many(W), diff)
    tol = 1e-9 * (1.0 + np.einsum("ij,ij->i", diff, diff))
    return MonotonicityProbe(float(inner.min()), bool(np.all(inner >= -tol)))


def probe_lipschitz(field, samples=10_000, seed=0, radius=100.0):
    """Sampled max of ||F(z)-F(w)|| / ||z-w||, checked against the declared L.

    Linear kinds also get the operator norm from power iteration, and the
    probe fails if that exceeds L.
    """
    if samples < 1:
        raise ContractViolation("samples must be >= 1")
    rng = np.random.default_rng(seed)
    Z, W = _ball_pairs(field.dim, samples, rng, radius)
    num = np.linalg.norm(field.evaluate_many(Z) - field.evaluate_many(W), axis=1)
    ratio = float(np.max(num / np.linalg.norm(Z - W, axis=1)))
    limit = field.lipschitz_L * (1.0 + 1e-9)
    op_norm = power_iteration_norm(field.matrix)
    passed = ratio <= limit and op_norm <= limit
    return LipschitzProbe(ratio, bool(passed), op_norm)


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """One monotone inclusion 0 in F(z) + A(z) together with its anchor z_0."""

    field: MonotoneField
    part: "MonotonePart"  # from pagd.resolvents
    start: np.ndarray
    known_solution: Optional[np.ndarray] = None
    label: str = "problem"

    def __post_init__(self):
        d = self.field.dim
        if self.part.dim != d:
            raise ContractViolation(f"part dim {self.part.dim} != field dim {d}")
        start = as_point(self.start, d, "start").copy()
        start.setflags(write=False)
        object.__setattr__(self, "start", start)
        if self.known_solution is not None:
            zs = as_point(self.known_solution, d, "known_solution").copy()
            zs.setflags(write=False)
            object.__setattr__(self, "known_solution", zs)
            res = self.part.cone_distance(zs, self.field(zs))
            if not res <= 1e-9:
                raise ContractViolation(
                    f"known_solution is not a solution: tangent residual {res:.3e}")

    @property
    def dim(self):
        return self.field.dim
