"""Rotations: SO(3) matrices, unit quaternions, rotation vectors and Euler angles.

Conventions
-----------
* Quaternions are Hamilton, scalar first, ``q = (q0, q1, q2, q3)``, kept
  canonical with ``q0 >= 0`` after every product.
* Euler angles are the 3-2-1 (yaw, pitch, roll) sequence,
  ``R = R3(yaw) @ R2(pitch) @ R1(roll)``, stored as ``(yaw, pitch, roll)``.
* Right Jacobians measure increments in the local (body) tangent space,
  left Jacobians in the global (space) tangent space.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .errors import (
    AntipodalError,
    DimensionError,
    GimbalLockWarning,
    LogBranchError,
    SingularJacobianError,
)

SMALL_ANGLE = 1e-4
GIMBAL_TOL = 1e-7
PI_TOL = 1e-9

_I3 = np.eye(3)


def _vec3(v, name="vector"):
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise DimensionError(f"{name} must have shape (3,), got {v.shape}")
    return v


def hat(v):
    """Skew-symmetric matrix such that ``hat(a) @ b == cross(a, b)``."""
    x, y, z = _vec3(v)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(W):
    """Inverse of :func:`hat` (uses the antisymmetric part)."""
    W = np.asarray(W, dtype=float)
    return 0.5 * np.array([W[2, 1] - W[1, 2], W[0, 2] - W[2, 0], W[1, 0] - W[0, 1]])


# ---------------------------------------------------------------------------
# scalar coefficients with small-angle series


def _sinc(phi):
    """sin(phi)/phi."""
    if phi < SMALL_ANGLE:
        p2 = phi * phi
        return 1.0 - p2 / 6.0 + p2 * p2 / 120.0
    return math.sin(phi) / phi


def _coef_a(phi):
    """(1 - cos phi) / phi^2."""
    if phi < SMALL_ANGLE:
        p2 = phi * phi
        return 0.5 - p2 / 24.0 + p2 * p2 / 720.0
    return (1.0 - math.cos(phi)) / (phi * phi)


def _coef_b(phi):
    """(phi - sin phi) / phi^3."""
    if phi < SMALL_ANGLE:
        p2 = phi * phi
        return 1.0 / 6.0 - p2 / 120.0 + p2 * p2 / 5040.0
    return (phi - np.sin(phi)) / phi**3


def _coef_inv(phi):
    """1/phi^2 - (1 + cos phi) / (2 phi sin phi), the inverse-Jacobian coefficient."""
    if phi < SMALL_ANGLE:
        p2 = phi * phi
        return 1.0 / 12.0 + p2 / 720.0 + p2 * p2 / 30240.0
    k = np.round(phi / (2.0 * np.pi))
    if k >= 1 and abs(phi - 2.0 * np.pi * k) < PI_TOL:
        raise SingularJacobianError(f"inverse Jacobian is singular at angle {phi!r}")
    return 1.0 / (phi * phi) - (1.0 + np.cos(phi)) / (2.0 * phi * np.sin(phi))


# ---------------------------------------------------------------------------
# exponential and logarithm


def so3_exp(r):
    """Rotation matrix of a rotation vector (Rodrigues formula)."""
    x, y, z = _vec3(r, "rotation vector")
    phi = math.sqrt(x * x + y * y + z * z)
    a, b = _sinc(phi), _coef_a(phi)
    xx, yy, zz, xy, xz, yz = x * x, y * y, z * z, x * y, x * z, y * z
    return np.array(
        [
            [1.0 - b * (yy + zz), b * xy - a * z, b * xz + a * y],
            [b * xy + a * z, 1.0 - b * (xx + zz), b * yz - a * x],
            [b * xz - a * y, b * yz + a * x, 1.0 - b * (xx + yy)],
        ]
    )


def _canonical_axis(n):
    """Sign choice for an axis at angle pi: first nonzero component positive."""
    for c in n:
        if abs(c) > 1e-12:
            return n if c > 0 else -n
    return n


def so3_log(R, strict=False):
    """Principal rotation vector of ``R`` with norm in ``[0, pi]``.

    At an angle of exactly pi the axis sign is ambiguous. The default picks the
    axis whose first nonzero component is positive; ``strict=True`` raises
    :class:`LogBranchError` instead.
    """
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise DimensionError(f"rotation matrix must be 3x3, got {R.shape}")
    a = vee(R)  # sin(phi) * n
    c = np.clip(0.5 * (np.trace(R) - 1.0), -1.0, 1.0)
    s = np.linalg.norm(a)
    phi = np.arctan2(s, c)
    if strict and np.pi - phi < PI_TOL:
        raise LogBranchError("rotation angle is pi; principal log is not unique")
    if phi < SMALL_ANGLE:
        p2 = phi * phi
        return a * (1.0 + p2 / 6.0 + 7.0 * p2 * p2 / 360.0)
    if c > -0.9:
        return a * (phi / s)
    # near pi: recover the axis from the symmetric part, n n^T = (B - c I)/(1 - c)
    B = 0.5 * (R + R.T)
    nn = (B - c * _I3) / (1.0 - c)
    i = int(np.argmax(np.diag(nn)))
    n = nn[:, i] / np.sqrt(nn[i, i])
    if s > 1e-12:
        if n @ a < 0:
            n = -n
    else:
        n = _canonical_axis(n)
    return phi * n / np.linalg.norm(n)


def so3_inverse(R):
    return np.asarray(R, dtype=float).T


def so3_compose(R, S):
    return np.asarray(R, dtype=float) @ np.asarray(S, dtype=float)


def so3_adjoint(R):
    """The adjoint of a rotation is the rotation matrix itself."""
    return np.array(R, dtype=float)


def so3_identity():
    return np.eye(3)


# ---------------------------------------------------------------------------
# quaternions


def quat_product(q, p):
    """Raw Hamilton product of two (not necessarily unit) quaternions."""
    q0, q1, q2, q3 = q
    p0, p1, p2, p3 = p
    return np.array(
        [
            q0 * p0 - q1 * p1 - q2 * p2 - q3 * p3,
            q0 * p1 + q1 * p0 + q2 * p3 - q3 * p2,
            q0 * p2 - q1 * p3 + q2 * p0 + q3 * p1,
            q0 * p3 + q1 * p2 - q2 * p1 + q3 * p0,
        ]
    )


def quat_left_matrix(q):
    """Matrix ``[q]_L`` with ``q (x) p = [q]_L p``."""
    q0, q1, q2, q3 = q
    return np.array(
        [[q0, -q1, -q2, -q3], [q1, q0, -q3, q2], [q2, q3, q0, -q1], [q3, -q2, q1, q0]]
    )


def quat_right_matrix(p):
    """Matrix ``[p]_R`` with ``q (x) p = [p]_R q``."""
    p0, p1, p2, p3 = p
    return np.array(
        [[p0, -p1, -p2, -p3], [p1, p0, p3, -p2], [p2, -p3, p0, p1], [p3, p2, -p1, p0]]
    )


def quat_conj(q):
    q = np.asarray(q, dtype=float)
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_normalize(q):
    """Unit norm and canonical sign ``q0 >= 0``."""
    q = np.asarray(q, dtype=float)
    if q.shape != (4,):
        raise DimensionError(f"quaternion must have shape (4,), got {q.shape}")
    q = q / np.linalg.norm(q)
    return -q if q[0] < 0 else q


def quat_mul(q, p):
    """Unit quaternion product, renormalized and made canonical."""
    return quat_normalize(quat_product(q, p))


def quat_identity():
    return np.array([1.0, 0.0, 0.0, 0.0])


def quat_exp(r):
    """Unit quaternion ``(cos(phi/2), n sin(phi/2))`` of rotation vector ``r``."""
    r = _vec3(r, "rotation vector")
    phi = np.linalg.norm(r)
    if phi < SMALL_ANGLE:
        p2 = phi * phi
        half_sinc = 0.5 - p2 / 48.0 + p2 * p2 / 3840.0  # sin(phi/2)/phi
    else:
        half_sinc = np.sin(0.5 * phi) / phi
    return quat_normalize(np.concatenate([[np.cos(0.5 * phi)], half_sinc * r]))


def quat_log(q):
    """Rotation vector ``2 atan2(|qv|, q0) n`` of a unit quaternion."""
    q = quat_normalize(q)
    qv = q[1:]
    s = np.linalg.norm(qv)
    phi = 2.0 * np.arctan2(s, q[0])
    if s < 1e-12:
        # phi ~ 2 s / q0 with q0 ~ 1
        return 2.0 * qv / q[0]
    n = qv / s
    if np.pi - phi < PI_TOL:
        n = _canonical_axis(n)
    return phi * n


def quat_rotate(q, v):
    """Rotate ``v`` by ``q`` (equivalent to ``q (x) [0, v] (x) q*``)."""
    q = np.asarray(q, dtype=float)
    v = _vec3(v)
    t = 2.0 * np.cross(q[1:], v)
    return v + q[0] * t + np.cross(q[1:], t)


def quat_to_rotmat(q):
    q = quat_normalize(q)
    q0, qv = q[0], q[1:]
    return (q0 * q0 - qv @ qv) * _I3 + 2.0 * np.outer(qv, qv) + 2.0 * q0 * hat(qv)


def rotmat_to_quat(R):
    return quat_exp(so3_log(R))


# ---------------------------------------------------------------------------
# Euler angles (yaw, pitch, roll), 3-2-1 sequence


def euler_to_rotmat(e):
    yaw, pitch, roll = _vec3(e, "euler angles")
    cy, sy = np.cos(yaw), np.sin(yaw)
    cp, sp = np.cos(pitch), np.sin(pitch)
    cr, sr = np.cos(roll), np.sin(roll)
    R3 = np.array([[cy, -sy, 0.0], [sy, cy, 0.0], [0.0, 0.0, 1.0]])
    R2 = np.array([[cp, 0.0, sp], [0.0, 1.0, 0.0], [-sp, 0.0, cp]])
    R1 = np.array([[1.0, 0.0, 0.0], [0.0, cr, -sr], [0.0, sr, cr]])
    return R3 @ R2 @ R1


def rotmat_to_euler(R):
    """Yaw, pitch, roll of ``R``.

    When the pitch is within ``GIMBAL_TOL`` of +-pi/2 only yaw -+ roll is
    observable; roll is set to zero, the combination is folded into yaw and a
    :class:`GimbalLockWarning` is issued.
    """
    R = np.asarray(R, dtype=float)
    pitch = np.arctan2(-R[2, 0], np.hypot(R[0, 0], R[1, 0]))
    if abs(abs(pitch) - 0.5 * np.pi) < GIMBAL_TOL:
        warnings.warn("gimbal lock: roll set to zero", GimbalLockWarning, stacklevel=2)
        yaw = np.arctan2(-R[0, 1], R[1, 1])
        return np.array([yaw, pitch, 0.0])
    yaw = np.arctan2(R[1, 0], R[0, 0])
    roll = np.arctan2(R[2, 1], R[2, 2])
    return np.array([yaw, pitch, roll])


_TO_MATRIX = {
    "matrix": lambda x: np.array(x, dtype=float),
    "quat": quat_to_rotmat,
    "rotvec": so3_exp,
    "euler": euler_to_rotmat,
}
_FROM_MATRIX = {
    "matrix": lambda R: R,
    "quat": rotmat_to_quat,
    "rotvec": so3_log,
    "euler": rotmat_to_euler,
}


def so3_convert(value, from_rep, to_rep):
    """Convert between ``matrix``, ``quat``, ``rotvec`` and ``euler``."""
    for rep in (from_rep, to_rep):
        if rep not in _TO_MATRIX:
            raise ValueError(f"unknown rotation representation {rep!r}")
    if from_rep == to_rep:
        return np.array(value, dtype=float)
    if (from_rep, to_rep) == ("rotvec", "quat"):
        return quat_exp(value)
    if (from_rep, to_rep) == ("quat", "rotvec"):
        return quat_log(value)
    return _FROM_MATRIX[to_rep](_TO_MATRIX[from_rep](value))


def so3_pow_slerp(q0, q1, t):
    """Spherical interpolation ``q0 (x) (q0* (x) q1)^t`` along the shortest arc."""
    q0 = quat_normalize(q0)
    q1 = quat_normalize(q1)
    d = q0 @ q1
    if abs(d) < 1e-12:
        raise AntipodalError("relative rotation is pi; the shortest arc is not unique")
    if d < 0:
        q1 = -q1
    rel = quat_product(quat_conj(q0), q1)
    return quat_mul(q0, quat_exp(t * quat_log(rel)))


# ---------------------------------------------------------------------------
# Jacobians


def so3_jr(r, inverse=False):
    """Right Jacobian of Exp (or its inverse)."""
    r = _vec3(r, "rotation vector")
    phi = np.linalg.norm(r)
    W = hat(r)
    if inverse:
        return _I3 + 0.5 * W + _coef_inv(phi) * (W @ W)
    return _I3 - _coef_a(phi) * W + _coef_b(phi) * (W @ W)


def so3_jl(r, inverse=False):
    """Left Jacobian of Exp (or its inverse); ``jl(r) == jr(-r) == jr(r).T``."""
    return so3_jr(-np.asarray(r, dtype=float), inverse=inverse)


def so3_minus(Y, X, frame="local", strict=True):
    """``Y - X`` in the local (``Log(X^T Y)``) or global (``Log(Y X^T)``) tangent."""
    Y = np.asarray(Y, dtype=float)
    X = np.asarray(X, dtype=float)
    rel = X.T @ Y if frame == "local" else Y @ X.T
    return so3_log(rel, strict=strict)


def _table(kind, X, Y, tau, v):
    if kind == "inverse-right":
        return -X
    if kind == "inverse-left":
        return -X.T
    if kind == "compose-first-right":
        return Y.T
    if kind in ("compose-first-left", "compose-second-right"):
        return np.eye(3)
    if kind == "compose-second-left":
        return X.copy()
    if kind in ("exp-right", "plus-tangent-right"):
        return so3_jr(tau)
    if kind in ("exp-left", "plus-tangent-left"):
        return so3_jl(tau)
    if kind == "log-right":
        return so3_jr(so3_log(X), inverse=True)
    if kind == "log-left":
        return so3_jl(so3_log(X), inverse=True)
    if kind == "plus-element-right":
        return so3_exp(tau).T
    if kind == "plus-element-left":
        return so3_exp(tau)
    if kind == "minus-base-right":
        return -so3_jl(so3_minus(Y, X, "local"), inverse=True)
    if kind == "minus-base-left":
        return -so3_jr(so3_minus(Y, X, "global"), inverse=True)
    if kind == "minus-end-right":
        return so3_jr(so3_minus(Y, X, "local"), inverse=True)
    if kind == "minus-end-left":
        return so3_jl(so3_minus(Y, X, "global"), inverse=True)
    if kind in ("action-right", "adjoint-action-right"):
        return -X @ hat(v)
    if kind in ("action-left", "adjoint-action-left"):
        return -hat(X @ v)
    if kind in ("action-vector", "adjoint-action-vector"):
        return X.copy()
    if kind in ("inverse-action-right", "inverse-adjoint-action-right"):
        return hat(X.T @ v)
    if kind in ("inverse-action-left", "inverse-adjoint-action-left"):
        return X.T @ hat(v)
    if kind in ("inverse-action-vector", "inverse-adjoint-action-vector"):
        return X.T.copy()
    if kind == "exp-action":
        return -so3_exp(tau) @ hat(v) @ so3_jr(tau)
    if kind == "exp-inverse-action":
        return hat(so3_exp(tau).T @ v) @ so3_jr(tau)
    raise ValueError(f"unknown Jacobian kind {kind!r}")


TABLE_KINDS = (
    "inverse-right", "inverse-left",
    "compose-first-right", "compose-first-left",
    "compose-second-right", "compose-second-left",
    "exp-right", "exp-left", "log-right", "log-left",
    "plus-element-right", "plus-element-left",
    "plus-tangent-right", "plus-tangent-left",
    "minus-base-right", "minus-base-left", "minus-end-right", "minus-end-left",
    "action-right", "action-left", "action-vector",
    "inverse-action-right", "inverse-action-left", "inverse-action-vector",
    "adjoint-action-right", "adjoint-action-left", "adjoint-action-vector",
    "inverse-adjoint-action-right", "inverse-adjoint-action-left",
    "inverse-adjoint-action-vector",
    "exp-action", "exp-inverse-action",
)  # fmt: skip


def so3_table_jacobian(kind, X=None, Y=None, tau=None, v=None):
    """Closed-form Jacobian of the named SO(3) operation.

    ``X`` and ``Y`` are rotation matrices (first and second operand, or base and
    end point for the minus rows), ``tau`` a rotation vector and ``v`` a
    3-vector acted upon.  Rows ending in ``-right`` use local perturbations
    (plus/minus), rows ending in ``-left`` use global ones.
    """
    X = None if X is None else np.asarray(X, dtype=float)
    Y = None if Y is None else np.asarray(Y, dtype=float)
    tau = None if tau is None else _vec3(tau, "tau")
    v = None if v is None else _vec3(v)
    return _table(kind, X, Y, tau, v)


def so3_covariance_local_global(C, R, to="global"):
    """Re-express a rotation covariance: ``C_global = R C_local R^T``."""
    C = np.asarray(C, dtype=float)
    R = np.asarray(R, dtype=float)
    out = R @ C @ R.T if to == "global" else R.T @ C @ R
    return 0.5 * (out + out.T)
