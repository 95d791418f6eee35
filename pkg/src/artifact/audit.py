"""Finite-difference audit of the closed-form Jacobian tables.

Every table row is paired with the function it differentiates and the
perturbation it is defined with (local plus/minus for ``-right`` rows, global
for ``-left`` rows).  Central differences of that definition are the oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .manifold import GROUPS, Group

FD_STEP = 1e-6


def act(X, v):
    """Group action on a point (rotation for SO(3), rigid motion for SE(3))."""
    X = np.asarray(X)
    if X.shape == (3, 3):
        return X @ v
    return X[:3, :3] @ v + X[:3, 3]


def central_difference(f, x0, step=FD_STEP):
    """Jacobian of a Euclidean map by central differences."""
    x0 = np.asarray(x0, dtype=float)
    cols = []
    for i in range(x0.size):
        e = np.zeros_like(x0)
        e[i] = step
        cols.append((np.asarray(f(x0 + e)) - np.asarray(f(x0 - e))) / (2 * step))
    return np.column_stack(cols)


def _perturb(G: Group, X, side):
    if side == "right":
        return lambda d: G.compose(X, G.exp(d))
    return lambda d: G.compose(G.exp(d), X)


def _diff(G: Group, side):
    if side == "right":
        return lambda A, B: G.log(G.compose(G.inverse(B), A))
    return lambda A, B: G.log(G.compose(A, G.inverse(B)))


def manifold_fd(G: Group, f, X, in_side, out_side=None, step=FD_STEP):
    """Jacobian of ``f`` at ``X``.

    ``in_side`` is ``right``/``left`` for a group-valued input and ``None``
    for a Euclidean input; ``out_side`` likewise for the output.
    """
    if in_side is None:
        dim = np.size(X)
        arg = lambda d: np.asarray(X, dtype=float) + d  # noqa: E731
    else:
        dim = G.dim
        arg = _perturb(G, X, in_side)
    diff = (lambda A, B: np.asarray(A) - np.asarray(B)) if out_side is None else _diff(G, out_side)
    cols = []
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = step
        cols.append(diff(f(arg(e)), f(arg(-e))) / (2 * step))
    return np.column_stack(cols)


def _numeric(G: Group, kind, X, Y, tau, v):
    """Finite-difference value of the named table row."""
    side = "left" if kind.endswith("-left") else "right"
    plus_r = lambda A, t: G.compose(A, G.exp(t))  # noqa: E731
    plus_l = lambda A, t: G.compose(G.exp(t), A)  # noqa: E731
    minus_r = lambda A, B: G.log(G.compose(G.inverse(B), A))  # noqa: E731
    minus_l = lambda A, B: G.log(G.compose(A, G.inverse(B)))  # noqa: E731
    if kind == "exp-action":
        return manifold_fd(G, lambda t: act(G.exp(t), v), tau, None, None)
    if kind == "exp-inverse-action":
        return manifold_fd(G, lambda t: act(G.inverse(G.exp(t)), v), tau, None, None)
    base = kind.rsplit("-", 1)[0]
    if base == "inverse":
        return manifold_fd(G, G.inverse, X, side, side)
    if base == "compose-first":
        return manifold_fd(G, lambda A: G.compose(A, Y), X, side, side)
    if base == "compose-second":
        return manifold_fd(G, lambda B: G.compose(X, B), Y, side, side)
    if base == "exp":
        return manifold_fd(G, G.exp, tau, None, side)
    if base == "log":
        return manifold_fd(G, G.log, X, side, None)
    if base == "plus-element":
        op = plus_r if side == "right" else plus_l
        return manifold_fd(G, lambda A: op(A, tau), X, side, side)
    if base == "plus-tangent":
        op = plus_r if side == "right" else plus_l
        return manifold_fd(G, lambda t: op(X, t), tau, None, side)
    if base == "minus-base":
        op = minus_r if side == "right" else minus_l
        return manifold_fd(G, lambda B: op(Y, B), X, side, None)
    if base == "minus-end":
        op = minus_r if side == "right" else minus_l
        return manifold_fd(G, lambda A: op(A, X), Y, side, None)
    fmap = {
        "action": lambda A, w: act(A, w),
        "inverse-action": lambda A, w: act(G.inverse(A), w),
        "adjoint-action": lambda A, w: G.adjoint(A) @ w,
        "inverse-adjoint-action": lambda A, w: G.adjoint_inv(A) @ w,
    }[base]
    if kind.endswith("-vector"):
        return manifold_fd(G, lambda w: fmap(X, w), v, None, None)
    return manifold_fd(G, lambda A: fmap(X if A is None else A, v), X, side, None)


def random_tangent(G: Group, rng, max_angle=np.pi - 0.1, scale=1.0):
    """Tangent with rotation angle uniform in ``[0, max_angle)`` and Gaussian linear part."""
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    r = axis * rng.uniform(0.0, max_angle)
    if G.dim == 3:
        return r
    return np.concatenate([scale * rng.normal(size=3), r])


def sample_arguments(G: Group, kind, rng):
    X = G.exp(random_tangent(G, rng))
    Y = G.compose(X, G.exp(random_tangent(G, rng)))
    tau = random_tangent(G, rng)
    vdim = G.dim if "adjoint-action" in kind else 3
    v = rng.normal(size=vdim)
    return X, Y, tau, v


@dataclass(frozen=True)
class AuditRow:
    kind: str
    max_abs_error: float
    samples: int


def audit_table(group="so3", samples=1000, seed=42, kinds=None):
    """Largest |closed form - finite difference| per table row."""
    G = GROUPS[group]
    from .so3 import TABLE_KINDS

    rng = np.random.default_rng(seed)
    rows = []
    for kind in kinds or TABLE_KINDS:
        worst = 0.0
        for _ in range(samples):
            X, Y, tau, v = sample_arguments(G, kind, rng)
            closed = G.table_jacobian(kind, X=X, Y=Y, tau=tau, v=v)
            numeric = _numeric(G, kind, X, Y, tau, v)
            worst = max(worst, float(np.abs(closed - numeric).max()))
        rows.append(AuditRow(kind, worst, samples))
    return rows
