"""Generic Lie-group contract shared by SO(3) and SE(3).

Group elements are plain arrays: 3x3 rotation matrices or 4x4 homogeneous
matrices.  :func:`group_of` picks the group from the element shape so the
integrators, optimizers and filters are written once.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import se3, so3
from .errors import DimensionError, FrameMismatchError


class Frame(enum.Enum):
    LOCAL = "local"
    GLOBAL = "global"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class Tangent:
    """Tangent vector tagged with the frame it lives in."""

    value: np.ndarray
    frame: Frame = Frame.LOCAL

    def __post_init__(self):
        object.__setattr__(self, "value", np.asarray(self.value, dtype=float).reshape(-1))
        object.__setattr__(self, "frame", Frame.parse(self.frame))


@dataclass(frozen=True)
class TangentCovariance:
    matrix: np.ndarray
    frame: Frame = Frame.LOCAL

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=float))
        object.__setattr__(self, "frame", Frame.parse(self.frame))


@dataclass(frozen=True)
class Group:
    """Namespace of the primitive operations of one matrix Lie group."""

    name: str
    dim: int
    identity: Callable
    exp: Callable
    log: Callable
    compose: Callable
    inverse: Callable
    adjoint: Callable
    adjoint_inv: Callable
    jr: Callable
    jl: Callable
    table_jacobian: Callable


SO3 = Group(
    "so3", 3, so3.so3_identity, so3.so3_exp, so3.so3_log, so3.so3_compose,
    so3.so3_inverse, so3.so3_adjoint, lambda R: np.asarray(R, dtype=float).T,
    so3.so3_jr, so3.so3_jl, so3.so3_table_jacobian,
)  # fmt: skip
SE3 = Group(
    "se3", 6, se3.se3_identity, se3.se3_exp, se3.se3_log, se3.se3_compose,
    se3.se3_inverse, se3.se3_adjoint, se3.se3_adjoint_inv,
    se3.se3_jr, se3.se3_jl, se3.se3_table_jacobian,
)  # fmt: skip

GROUPS = {"so3": SO3, "se3": SE3}


def group_of(X) -> Group:
    shape = np.shape(X)
    if shape == (3, 3):
        return SO3
    if shape == (4, 4):
        return SE3
    raise DimensionError(f"no group with elements of shape {shape}")


def _tangent(dtau, frame, G):
    if isinstance(dtau, Tangent):
        if frame is not None and Frame.parse(frame) is not dtau.frame:
            raise FrameMismatchError(
                f"tangent tagged {dtau.frame.value} used with {Frame.parse(frame).value} operator"
            )
        value, frame = dtau.value, dtau.frame
    else:
        if frame is None:
            raise FrameMismatchError("untagged tangent needs an explicit frame")
        value, frame = np.asarray(dtau, dtype=float).reshape(-1), Frame.parse(frame)
    if value.shape != (G.dim,):
        raise DimensionError(f"{G.name} tangent must have {G.dim} entries, got {value.shape}")
    return value, frame


def plus(X, dtau, frame=None):
    """``X (+) tau = X Exp(tau)`` for local tangents, ``Exp(tau) X`` for global ones."""
    G = group_of(X)
    value, frame = _tangent(dtau, frame, G)
    E = G.exp(value)
    return G.compose(X, E) if frame is Frame.LOCAL else G.compose(E, X)


def minus(Y, X, frame=Frame.LOCAL, strict=True):
    """``Log(X^-1 Y)`` (local) or ``Log(Y X^-1)`` (global), tagged with the frame.

    Raises :class:`LogBranchError` when the relative rotation angle is pi,
    unless ``strict`` is False.
    """
    G = group_of(X)
    if group_of(Y) is not G:
        raise DimensionError("minus needs two elements of the same group")
    frame = Frame.parse(frame)
    Xi = G.inverse(X)
    rel = G.compose(Xi, Y) if frame is Frame.LOCAL else G.compose(Y, Xi)
    return Tangent(G.log(rel, strict=strict), frame)


def adjoint_matrix(X):
    return group_of(X).adjoint(X)


def transport_covariance(C: TangentCovariance, X) -> TangentCovariance:
    """Move a covariance to the opposite frame by adjoint congruence."""
    G = group_of(X)
    if C.frame is Frame.LOCAL:
        Ad, frame = G.adjoint(X), Frame.GLOBAL
    else:
        Ad, frame = G.adjoint_inv(X), Frame.LOCAL
    M = Ad @ C.matrix @ Ad.T
    return TangentCovariance(0.5 * (M + M.T), frame)


def propagate_covariance(J, C):
    """First-order propagation ``J C J^T``, symmetrized (no eigenvalue clipping)."""
    J = np.atleast_2d(np.asarray(J, dtype=float))
    C = np.asarray(C.matrix if isinstance(C, TangentCovariance) else C, dtype=float)
    if J.shape[1] != C.shape[0] or C.shape[0] != C.shape[1]:
        raise DimensionError(f"cannot propagate {C.shape} covariance through {J.shape}")
    out = J @ C @ J.T
    return 0.5 * (out + out.T)


def is_psd(C, rtol=1e-12):
    """Symmetric within ``rtol`` and eigenvalues above ``-1e-10 trace``."""
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        return False
    scale = max(np.abs(C).max(), 1e-300)
    if np.abs(C - C.T).max() > rtol * scale:
        return False
    return np.linalg.eigvalsh(0.5 * (C + C.T)).min() >= -1e-10 * max(np.trace(C), 0.0)
