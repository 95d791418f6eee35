"""Rigid motions: SE(3) matrices, affine poses, dual quaternions and screws.

Tangent vectors are ordered linear part first, ``tau = [s; r]`` and
``xi = [nu; omega]``.  Dual quaternions are 8-vectors ``[q_r, q_d]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import AntipodalError, DimensionError, UndefinedScrewError
from .so3 import (
    SMALL_ANGLE,
    hat,
    quat_conj,
    quat_left_matrix,
    quat_mul,
    quat_normalize,
    quat_product,
    quat_rotate,
    quat_to_rotmat,
    rotmat_to_quat,
    so3_exp,
    so3_jl,
    so3_log,
    TABLE_KINDS,
)

Q_SERIES_ANGLE = 0.1

_I3 = np.eye(3)


def _vec(v, n, name):
    v = np.asarray(v, dtype=float)
    if v.shape != (n,):
        raise DimensionError(f"{name} must have shape ({n},), got {v.shape}")
    return v


def _mat4(M):
    M = np.asarray(M, dtype=float)
    if M.shape != (4, 4):
        raise DimensionError(f"homogeneous matrix must be 4x4, got {M.shape}")
    return M


# ---------------------------------------------------------------------------
# homogeneous matrices


def se3_from_rt(R, T):
    M = np.eye(4)
    M[:3, :3] = R
    M[:3, 3] = T
    return M


def se3_rt(M):
    M = _mat4(M)
    return M[:3, :3], M[:3, 3]


def se3_identity():
    return np.eye(4)


def se3_exp(tau):
    """Homogeneous matrix of the transform vector ``tau = [s; r]``."""
    tau = _vec(tau, 6, "transform vector")
    s, r = tau[:3], tau[3:]
    return se3_from_rt(so3_exp(r), so3_jl(r) @ s)


def se3_log(M, strict=False):
    """Principal transform vector of ``M`` (rotation angle in ``[0, pi]``)."""
    R, T = se3_rt(M)
    r = so3_log(R, strict=strict)
    return np.concatenate([so3_jl(r, inverse=True) @ T, r])


def se3_inverse(M):
    R, T = se3_rt(M)
    return se3_from_rt(R.T, -R.T @ T)


def se3_compose(A, B):
    return _mat4(A) @ _mat4(B)


def se3_act(M, x, kind="point"):
    """Transform a point (rotation and translation) or a free vector (rotation only)."""
    R, T = se3_rt(M)
    x = _vec(x, 3, "x")
    if kind == "point":
        return R @ x + T
    if kind == "vector":
        return R @ x
    raise ValueError(f"kind must be 'point' or 'vector', got {kind!r}")


def se3_adjoint(M):
    """6x6 adjoint ``[[R, T^ R], [0, R]]``."""
    R, T = se3_rt(M)
    Ad = np.zeros((6, 6))
    Ad[:3, :3] = R
    Ad[:3, 3:] = hat(T) @ R
    Ad[3:, 3:] = R
    return Ad


def se3_adjoint_inv(M):
    """Closed-form inverse ``[[R^T, -R^T T^], [0, R^T]]``."""
    R, T = se3_rt(M)
    Ad = np.zeros((6, 6))
    Ad[:3, :3] = R.T
    Ad[:3, 3:] = -R.T @ hat(T)
    Ad[3:, 3:] = R.T
    return Ad


# ---------------------------------------------------------------------------
# affine pose (canonical quaternion + translation)


@dataclass(frozen=True)
class Pose:
    """Rigid pose as a unit quaternion and the body origin seen in the global frame."""

    q: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", quat_normalize(self.q))
        object.__setattr__(self, "T", _vec(self.T, 3, "translation"))

    @classmethod
    def from_matrix(cls, M):
        R, T = se3_rt(M)
        return cls(rotmat_to_quat(R), T.copy())

    def matrix(self):
        return se3_from_rt(quat_to_rotmat(self.q), self.T)


def pose_compose(A, B):
    """Composition ``A o B``; returns the type of ``A`` (Pose or 4x4 matrix)."""
    if isinstance(A, Pose):
        B = B if isinstance(B, Pose) else Pose.from_matrix(B)
        return Pose(quat_mul(A.q, B.q), A.T + quat_rotate(A.q, B.T))
    B = B.matrix() if isinstance(B, Pose) else B
    return se3_compose(A, B)


def pose_inverse(A):
    if isinstance(A, Pose):
        qc = quat_conj(A.q)
        return Pose(qc, -quat_rotate(qc, A.T))
    return se3_inverse(A)


# ---------------------------------------------------------------------------
# dual quaternions


def _dq(z):
    return _vec(z, 8, "dual quaternion")


def dq_identity():
    return np.array([1.0, 0, 0, 0, 0, 0, 0, 0])


def dq_from_pose(q, T):
    """``zeta = q + (eps/2) T (x) q``."""
    q = quat_normalize(q)
    T = _vec(T, 3, "translation")
    d = 0.5 * quat_product(np.concatenate([[0.0], T]), q)
    return np.concatenate([q, d])


def dq_to_pose(z):
    """Recover ``(q, T)`` with ``T = 2 zeta_d (x) zeta_r*``."""
    z = dq_normalize(z)
    q, d = z[:4], z[4:]
    T = 2.0 * quat_product(d, quat_conj(q))[1:]
    return q, T


def dq_to_matrix(z):
    q, T = dq_to_pose(z)
    return se3_from_rt(quat_to_rotmat(q), T)


def dq_from_matrix(M):
    R, T = se3_rt(M)
    return dq_from_pose(rotmat_to_quat(R), T)


def dq_product(a, b):
    """Raw dual quaternion product ``(ra rb) + (ra db + da rb) eps``."""
    a, b = _dq(a), _dq(b)
    ra, da, rb, db = a[:4], a[4:], b[:4], b[4:]
    return np.concatenate(
        [quat_product(ra, rb), quat_product(ra, db) + quat_product(da, rb)]
    )


def dq_left_matrix(z):
    """Bilinear form ``[[ [r]_L, 0 ], [ [d]_L, [r]_L ]]`` so ``a (x) b = [a]_L b``."""
    z = _dq(z)
    L = np.zeros((8, 8))
    Lr = quat_left_matrix(z[:4])
    L[:4, :4] = Lr
    L[4:, 4:] = Lr
    L[4:, :4] = quat_left_matrix(z[4:])
    return L


def dq_normalize(z):
    """Unit real part, dual part orthogonal to it, canonical ``q_r0 >= 0``."""
    z = _dq(z)
    r, d = z[:4], z[4:]
    nr = np.linalg.norm(r)
    r, d = r / nr, d / nr
    d = d - (r @ d) * r
    if r[0] < 0:
        r, d = -r, -d
    return np.concatenate([r, d])


def dq_mul(a, b):
    """Unit dual quaternion product (renormalized)."""
    return dq_normalize(dq_product(a, b))


def dq_conjugate(z, kind="quat"):
    """Conjugates of a dual quaternion.

    ``dual``: ``r - d eps``; ``quat``: ``r* + d* eps``;
    ``combined``: ``r* - d* eps``.  ``quat`` is the inverse of a unit one.
    """
    z = _dq(z)
    r, d = z[:4], z[4:]
    if kind == "dual":
        return np.concatenate([r, -d])
    if kind == "quat":
        return np.concatenate([quat_conj(r), quat_conj(d)])
    if kind == "combined":
        return np.concatenate([quat_conj(r), -quat_conj(d)])
    raise ValueError(f"unknown conjugate kind {kind!r}")


def dq_inverse(z):
    return dq_conjugate(z, "quat")


def dq_act(z, x, kind="point"):
    """Transform via ``zeta (x) zeta_x (x) zeta^combined``.

    Points are embedded as ``1 + eps p`` and vectors as ``eps v``.
    """
    x = _vec(x, 3, "x")
    if kind == "point":
        zx = np.concatenate([[1.0, 0, 0, 0, 0.0], x])
    elif kind == "vector":
        zx = np.concatenate([np.zeros(5), x])
    else:
        raise ValueError(f"kind must be 'point' or 'vector', got {kind!r}")
    out = dq_product(dq_product(z, zx), dq_conjugate(z, "combined"))
    return out[5:]


def _sinc_and_slope(theta):
    """sin(t)/t and (t cos t - sin t)/t^3 (the latter is d(sinc)/dt divided by t)."""
    if theta < SMALL_ANGLE:
        t2 = theta * theta
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0, -1.0 / 3.0 + t2 / 30.0 - t2 * t2 / 840.0
    s, c = np.sin(theta), np.cos(theta)
    return s / theta, (theta * c - s) / theta**3


def dq_exp(tau):
    """Unit dual quaternion of ``Exp(tau)``.

    Evaluates the dual quaternion exponential of the pure dual quaternion
    ``[0, r/2] + eps [0, s/2]`` through its first-order (dual number) expansion.
    """
    tau = _vec(tau, 6, "transform vector")
    w, u = 0.5 * tau[:3], 0.5 * tau[3:]
    theta = np.linalg.norm(u)
    sc, slope = _sinc_and_slope(theta)
    uw = u @ w
    real = np.concatenate([[np.cos(theta)], sc * u])
    dual = np.concatenate([[-sc * uw], sc * w + slope * uw * u])
    return np.concatenate([real, dual])


def dq_log(z):
    """Transform vector of a unit dual quaternion (inverse of :func:`dq_exp`)."""
    z = dq_normalize(z)
    r, d = z[:4], z[4:]
    vn = np.linalg.norm(r[1:])
    theta = np.arctan2(vn, r[0])
    u = r[1:] * (theta / vn) if vn > 1e-300 else r[1:].copy()
    sc, slope = _sinc_and_slope(theta)
    uw = -d[0] / sc
    w = (d[1:] - slope * uw * u) / sc
    return np.concatenate([2.0 * w, 2.0 * u])


def dq_plus(z, tau):
    """Local plus ``zeta (x) Exp(tau)``."""
    return dq_mul(z, dq_exp(tau))


def dq_minus(z1, z0):
    """Local minus ``Log(zeta0* (x) zeta1)``."""
    return dq_log(dq_mul(dq_inverse(z0), z1))


# ---------------------------------------------------------------------------
# screws


class Pitch(enum.Enum):
    """Tag for the infinite pitch of a pure translation."""

    INFINITE = "infinite"


INFINITE_PITCH = Pitch.INFINITE


@dataclass(frozen=True)
class Screw:
    """Screw with unit axis ``n``, moment ``m``, pitch ``h`` and magnitude ``phi``.

    For finite pitch ``phi`` is the rotation angle and the translation along
    the axis is ``d = h phi``.  For ``INFINITE_PITCH`` the motion is a pure
    translation of length ``phi`` along ``n`` and ``m`` is zero.
    """

    n: np.ndarray
    m: np.ndarray
    pitch: float | Pitch
    magnitude: float

    @property
    def is_translation(self):
        return self.pitch is INFINITE_PITCH

    @property
    def d(self):
        if self.is_translation:
            return self.magnitude
        return self.pitch * self.magnitude

    def scaled(self, t):
        """Screw power ``t * S``: same axis and pitch, magnitude times ``t``."""
        return Screw(self.n, self.m, self.pitch, t * self.magnitude)


_TRANSLATION_TOL = 1e-12


def screw_from_pose(r, T):
    """Screw parameters of the motion with rotation vector ``r`` and translation ``T``."""
    r = _vec(r, 3, "rotation vector")
    T = _vec(T, 3, "translation")
    phi = np.linalg.norm(r)
    if phi < _TRANSLATION_TOL:
        length = np.linalg.norm(T)
        if length == 0.0:
            raise UndefinedScrewError("zero motion has no screw axis")
        return Screw(T / length, np.zeros(3), INFINITE_PITCH, length)
    n = r / phi
    m = 0.5 * (np.cross(T, n) + np.cross(np.cross(n, T), n) / np.tan(0.5 * phi))
    d = T @ n
    return Screw(n, m, d / phi, phi)


def screw_to_pose(S):
    """Rotation vector and translation of a screw motion."""
    if S.is_translation:
        return np.zeros(3), S.magnitude * S.n
    phi = S.magnitude
    p = np.cross(S.n, S.m)
    T = p - np.sin(phi) * np.cross(S.n, p) - np.cos(phi) * p + S.d * S.n
    return phi * S.n, T


def screw_exp(S):
    """Unit dual quaternion of a screw motion."""
    half = 0.5 * S.magnitude
    if S.is_translation:
        return np.concatenate([[1.0, 0, 0, 0, 0.0], half * S.n])
    sh, ch = np.sin(half), np.cos(half)
    d = S.d
    real = np.concatenate([[ch], sh * S.n])
    dual = np.concatenate([[-0.5 * d * sh], sh * S.m + 0.5 * d * ch * S.n])
    return np.concatenate([real, dual])


def screw_log(z):
    """Screw parameters of a unit dual quaternion (rotation angle in ``[0, pi]``)."""
    z = dq_normalize(z)
    r, d = z[:4], z[4:]
    vn = np.linalg.norm(r[1:])
    if vn < 1e-12:
        T = 2.0 * quat_product(d, quat_conj(r))[1:]
        length = np.linalg.norm(T)
        if length < 1e-300:
            raise UndefinedScrewError("identity motion has no screw axis")
        return Screw(T / length, np.zeros(3), INFINITE_PITCH, length)
    phi = 2.0 * np.arctan2(vn, r[0])
    n = r[1:] / vn
    dist = -2.0 * d[0] / vn
    m = (d[1:] - 0.5 * dist * r[0] * n) / vn
    return Screw(n, m, dist / phi, phi)


def sclerp(z0, z1, t):
    """Screw interpolation ``zeta0 (x) (zeta0* (x) zeta1)^t`` along the shortest path."""
    z0 = dq_normalize(z0)
    z1 = dq_normalize(z1)
    if z0[:4] @ z1[:4] < 0:
        z1 = -z1
    rel = dq_product(dq_inverse(z0), z1)
    if abs(rel[0]) < 1e-12:
        raise AntipodalError("relative rotation is pi; the screw path is not unique")
    try:
        S = screw_log(rel)
    except UndefinedScrewError:
        return z0
    return dq_mul(z0, screw_exp(S.scaled(t)))


# ---------------------------------------------------------------------------
# Jacobians


def _q_coefficients(phi):
    """(phi - sin)/phi^3, (1 - phi^2/2 - cos)/phi^4, (phi - sin - phi^3/6)/phi^5."""
    if phi < Q_SERIES_ANGLE:
        p2 = phi * phi
        p4, p6, p8 = p2 * p2, p2 * p2 * p2, p2 * p2 * p2 * p2
        c1 = 1 / 6 - p2 / 120 + p4 / 5040 - p6 / 362880 + p8 / 39916800
        c2 = -1 / 24 + p2 / 720 - p4 / 40320 + p6 / 3628800 - p8 / 479001600
        c3 = -1 / 120 + p2 / 5040 - p4 / 362880 + p6 / 39916800 - p8 / 6227020800
        return c1, c2, c3
    s, c = np.sin(phi), np.cos(phi)
    c1 = (phi - s) / phi**3
    c2 = (1.0 - 0.5 * phi * phi - c) / phi**4
    c3 = (phi - s - phi**3 / 6.0) / phi**5
    return c1, c2, c3


def se3_Q(tau):
    """Off-diagonal block ``Q(tau)`` of the SE(3) left Jacobian."""
    tau = _vec(tau, 6, "transform vector")
    S, W = hat(tau[:3]), hat(tau[3:])
    phi = np.linalg.norm(tau[3:])
    c1, c2, c3 = _q_coefficients(phi)
    WS, SW, WSW = W @ S, S @ W, W @ S @ W
    W2 = W @ W
    return (
        0.5 * S
        + c1 * (WS + SW + WSW)
        - c2 * (W2 @ S + S @ W2 - 3.0 * WSW)
        - 0.5 * (c2 - 3.0 * c3) * (WSW @ W + W @ WSW)
    )


def se3_jl(tau, inverse=False):
    tau = _vec(tau, 6, "transform vector")
    r = tau[3:]
    Q = se3_Q(tau)
    J = np.zeros((6, 6))
    if inverse:
        Ji = so3_jl(r, inverse=True)
        J[:3, :3] = Ji
        J[3:, 3:] = Ji
        J[:3, 3:] = -Ji @ Q @ Ji
    else:
        Jl = so3_jl(r)
        J[:3, :3] = Jl
        J[3:, 3:] = Jl
        J[:3, 3:] = Q
    return J


def se3_jr(tau, inverse=False):
    """Right Jacobian, ``J_R(tau) = J_L(-tau)``."""
    return se3_jl(-np.asarray(tau, dtype=float), inverse=inverse)


def se3_jr_jl(tau, side="right", inverse=False):
    if side == "right":
        return se3_jr(tau, inverse)
    if side == "left":
        return se3_jl(tau, inverse)
    raise ValueError(f"side must be 'right' or 'left', got {side!r}")


def se3_minus(Y, X, frame="local", strict=True):
    rel = se3_inverse(X) @ Y if frame == "local" else Y @ se3_inverse(X)
    return se3_log(rel, strict=strict)


def _blocks(A, B, C, D):
    return np.block([[A, B], [C, D]])


def se3_table_jacobian(kind, X=None, Y=None, tau=None, v=None):
    """Closed-form Jacobian of the named SE(3) operation.

    Same kinds and argument roles as the rotation table; ``v`` is a point for
    the action rows and a twist ``[nu; omega]`` for the adjoint-action rows.
    """
    X = None if X is None else _mat4(X)
    Y = None if Y is None else _mat4(Y)
    tau = None if tau is None else _vec(tau, 6, "tau")
    Z3 = np.zeros((3, 3))
    if kind == "inverse-right":
        return -se3_adjoint(X)
    if kind == "inverse-left":
        return -se3_adjoint_inv(X)
    if kind == "compose-first-right":
        return se3_adjoint_inv(Y)
    if kind in ("compose-first-left", "compose-second-right"):
        return np.eye(6)
    if kind == "compose-second-left":
        return se3_adjoint(X)
    if kind in ("exp-right", "plus-tangent-right"):
        return se3_jr(tau)
    if kind in ("exp-left", "plus-tangent-left"):
        return se3_jl(tau)
    if kind == "log-right":
        return se3_jr(se3_log(X), inverse=True)
    if kind == "log-left":
        return se3_jl(se3_log(X), inverse=True)
    if kind == "plus-element-right":
        return se3_adjoint_inv(se3_exp(tau))
    if kind == "plus-element-left":
        return se3_adjoint(se3_exp(tau))
    if kind == "minus-base-right":
        return -se3_jl(se3_minus(Y, X, "local"), inverse=True)
    if kind == "minus-base-left":
        return -se3_jr(se3_minus(Y, X, "global"), inverse=True)
    if kind == "minus-end-right":
        return se3_jr(se3_minus(Y, X, "local"), inverse=True)
    if kind == "minus-end-left":
        return se3_jl(se3_minus(Y, X, "global"), inverse=True)

    if kind.startswith("action") or kind.startswith("inverse-action"):
        R, T = se3_rt(X)
        p = _vec(v, 3, "point")
        if kind == "action-right":
            return np.hstack([R, -R @ hat(p)])
        if kind == "action-left":
            return np.hstack([_I3, -hat(R @ p) - hat(T)])
        if kind == "action-vector":
            return R.copy()
        if kind == "inverse-action-right":
            return np.hstack([-_I3, hat(R.T @ (p - T))])
        if kind == "inverse-action-left":
            return np.hstack([-R.T, R.T @ hat(p)])
        if kind == "inverse-action-vector":
            return R.T.copy()

    if "adjoint-action" in kind:
        R, T = se3_rt(X)
        xi = _vec(v, 6, "twist")
        nu, om = xi[:3], xi[3:]
        Th = hat(T)
        if kind == "adjoint-action-right":
            return _blocks(-hat(R @ om) @ R, -R @ hat(nu) - Th @ R @ hat(om), Z3, -R @ hat(om))
        if kind == "adjoint-action-left":
            Rw = hat(R @ om)
            return _blocks(-Rw, -hat(R @ nu) - Th @ Rw + Rw @ Th, Z3, -Rw)
        if kind == "adjoint-action-vector":
            return se3_adjoint(X)
        if kind == "inverse-adjoint-action-right":
            return _blocks(
                R.T @ hat(om) @ R, hat(R.T @ nu) - hat(R.T @ Th @ om), Z3, hat(R.T @ om)
            )
        if kind == "inverse-adjoint-action-left":
            return _blocks(R.T @ hat(om), R.T @ hat(nu) - R.T @ Th @ hat(om), Z3, R.T @ hat(om))
        if kind == "inverse-adjoint-action-vector":
            return se3_adjoint_inv(X)

    if kind == "exp-action":
        p = _vec(v, 3, "point")
        M = se3_exp(tau)
        R, T = se3_rt(M)
        Jl = so3_jl(tau[3:])
        return np.hstack([Jl, se3_Q(tau) - hat(R @ p) @ Jl - hat(T) @ Jl])
    if kind == "exp-inverse-action":
        p = _vec(v, 3, "point")
        R, T = se3_rt(se3_exp(tau))
        Jm = so3_jl(-tau[3:])
        return np.hstack([-Jm, -se3_Q(-tau) - hat(R.T @ (T - p)) @ Jm])
    raise ValueError(f"unknown Jacobian kind {kind!r}")


def se3_covariance_local_global(C, M, to="global"):
    """Re-express a pose covariance: ``C_global = Ad C_local Ad^T``."""
    Ad = se3_adjoint(M) if to == "global" else se3_adjoint_inv(M)
    out = Ad @ np.asarray(C, dtype=float) @ Ad.T
    return 0.5 * (out + out.T)

