"""Builtin benchmark instances and the problem JSON format.

Problem JSON::

    {"label": "my-vi", "dim": 3,
     "field": {"kind": "custom-matrix", "matrix": [[...], ...], "offset": [...], "L": 2.0},
     "part": {"kind": "box", "lower": [0, "-inf", 0], "upper": ["inf", 1, 1]},
     "start": [...], "known_solution": [...] | null}

Field kinds: ``linear`` / ``custom-matrix`` (matrix row-major, offset),
``rotation`` (only L), ``saddle-bilinear`` (P, Q, R and optional ``a``/``c``
linear terms). ``L`` may be omitted for matrix kinds, in which case the
spectral norm is used. Part descriptors are documented in
:func:`pagd.resolvents.part_from_dict`.

Instances whose solution must be known are built around a chosen z*: the
field is F(z) = M (z - z*) + F(z*) with F(z*) picked so that -F(z*) lies in
A(z*).
"""
from __future__ import annotations

import numpy as np

from .operators import ContractViolation, MonotoneField, ProblemInstance, spectral_norm
from .resolvents import Ball, Box, L1Scale, Product, ZeroPart, part_from_dict


def rotation_unconstrained(seed=0):
    return ProblemInstance(MonotoneField.rotation(1.0), ZeroPart(2), [1.0, 0.0],
                           known_solution=[0.0, 0.0], label="rotation-unconstrained")


def _monotone_matrix(rng, d, psd_scale=0.1):
    """Skew-dominated monotone matrix: random skew part plus a small PSD part."""
    G = rng.standard_normal((d, d)) / np.sqrt(d)
    B = rng.standard_normal((d, d)) / np.sqrt(d)
    return (G - G.T) / 2.0 + psd_scale * (B.T @ B) / 2.0


def box_linear(d=50, seed=0, shift=0.1):
    rng = np.random.default_rng(seed)
    M = _monotone_matrix(rng, d) + shift * np.eye(d)
    z_star = rng.uniform(-0.5, 0.5, d)
    field = MonotoneField.custom_matrix(M, -M @ z_star, L=spectral_norm(M))
    start = rng.choice([-1.0, 1.0], d)
    return ProblemInstance(field, Box(-np.ones(d), np.ones(d)), start,
                           known_solution=z_star, label=f"box-linear-{d}")


def l1_saddle(n=10, m=10, seed=0, lam=0.5):
    """min_x max_y Phi(x, y) + lam ||x||_1 - lam ||y||_1 with a sparse solution."""
    rng = np.random.default_rng(seed)
    Q = rng.standard_normal((n, m)) / np.sqrt(max(n, m))
    Bp = rng.standard_normal((n, n)) / np.sqrt(n)
    Br = rng.standard_normal((m, m)) / np.sqrt(m)
    P, R = 0.05 * Bp.T @ Bp, 0.05 * Br.T @ Br
    d = n + m
    z_star = rng.standard_normal(d)
    z_star[rng.random(d) < 0.5] = 0.0
    # F(z*) = -c* with c* in lam * d||z*||_1
    c_star = np.where(z_star != 0, lam * np.sign(z_star), rng.uniform(-0.9 * lam, 0.9 * lam, d))
    M = np.block([[P, Q], [-Q.T, R]])
    offset = -c_star - M @ z_star
    field = MonotoneField.saddle_bilinear(P, Q, R, a=offset[:n], c=offset[n:])
    part = Product([L1Scale(n, lam), L1Scale(m, lam)])
    start = rng.standard_normal(d)
    return ProblemInstance(field, part, start, known_solution=z_star,
                           label=f"l1-saddle-{d}")


def ball_vi(d=10, seed=0, pull=0.5):
    """Variational inequality over the unit ball with a boundary solution."""
    rng = np.random.default_rng(seed)
    M = _monotone_matrix(rng, d)
    u = rng.standard_normal(d)
    z_star = u / np.linalg.norm(u)
    # F(z*) = -pull * z*, and pull * z* spans the normal cone at z*
    field = MonotoneField.custom_matrix(M, -M @ z_star - pull * z_star)
    v = rng.standard_normal(d)
    start = 0.9 * v / np.linalg.norm(v)
    return ProblemInstance(field, Ball(np.zeros(d), 1.0), start, known_solution=z_star,
                           label=f"ball-vi-{d}")


BUILTINS = {
    "rotation-unconstrained": rotation_unconstrained,
    "box-linear-50": lambda seed=0: box_linear(50, seed),
    "l1-saddle-20": lambda seed=0: l1_saddle(10, 10, seed),
    "ball-vi-10": lambda seed=0: ball_vi(10, seed),
}


def builtin(name, seed=0):
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise ContractViolation(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}") from None
    return factory(seed=seed)


def field_from_dict(desc, dim=None):
    kind = desc.get("kind")
    L = desc.get("L")
    if kind == "rotation":
        return MonotoneField.rotation(1.0 if L is None else float(L))
    if kind in ("linear", "custom-matrix"):
        M = np.asarray(desc["matrix"], dtype=np.float64)
        if dim is not None and M.shape != (dim, dim):
            raise ContractViolation(f"matrix shape {M.shape} does not match dim {dim}")
        ctor = MonotoneField.linear if kind == "linear" else MonotoneField.custom_matrix
        return ctor(M, desc.get("offset"), L)
    if kind == "saddle-bilinear":
        return MonotoneField.saddle_bilinear(desc["P"], desc["Q"], desc["R"],
                                             desc.get("a"), desc.get("c"), L)
    raise ContractViolation(f"unknown field kind {kind!r}")


def problem_from_dict(doc):
    """Build a ProblemInstance from the JSON document described in the module docstring."""
    try:
        dim = doc.get("dim")
        field = field_from_dict(doc["field"], dim)
        part = part_from_dict(doc["part"])
        problem = ProblemInstance(field, part, doc["start"], doc.get("known_solution"),
                                  doc.get("label", "problem"))
    except (KeyError, TypeError) as exc:
        raise ContractViolation(f"malformed problem document: {exc!r}") from exc
    if dim is not None and problem.dim != dim:
        raise ContractViolation(f"declared dim {dim} but field has dim {problem.dim}")
    return problem


def problem_to_dict(problem):
    f = problem.field
    if f.kind == "rotation":
        fdesc = {"kind": "rotation", "L": f.lipschitz_L}
    else:
        # saddle fields round-trip as their assembled matrix
        fdesc = {"kind": "linear" if f.kind == "linear" else "custom-matrix",
                 "matrix": f.matrix.tolist(), "offset": f.offset.tolist(), "L": f.lipschitz_L}
    zs = problem.known_solution
    return {"label": problem.label, "dim": problem.dim, "field": fdesc,
            "part": problem.part.to_dict(), "start": problem.start.tolist(),
            "known_solution": None if zs is None else zs.tolist()}
