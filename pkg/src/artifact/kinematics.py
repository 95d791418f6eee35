"""Relative motion of three frames and rigid-body point velocities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FrameMismatchError
from .manifold import Frame, Tangent
from .se3 import se3_adjoint_inv
from .so3 import hat


@dataclass(frozen=True)
class FrameMotion:
    """Position, velocity, acceleration, angular velocity and angular acceleration of
    frame j relative to frame i, all expressed in the frame named by ``expressed_in``."""

    T: np.ndarray
    v: np.ndarray
    a: np.ndarray
    w: np.ndarray
    alpha: np.ndarray
    expressed_in: str = "0"

    def __post_init__(self):
        for name in ("T", "v", "a", "w", "alpha"):
            val = np.asarray(getattr(self, name), dtype=float)
            if val.shape != (3,) or not np.all(np.isfinite(val)):
                raise ValueError(f"{name} must be a finite 3-vector")
            object.__setattr__(self, name, val)

    @classmethod
    def zero(cls, expressed_in="0"):
        z = np.zeros(3)
        return cls(z, z, z, z, z, expressed_in)


def rotate_motion(R, m: FrameMotion, expressed_in) -> FrameMotion:
    """Apply ``R`` to all five vectors (re-express the motion in another frame)."""
    R = np.asarray(R, dtype=float)
    return FrameMotion(R @ m.T, R @ m.v, R @ m.a, R @ m.w, R @ m.alpha, expressed_in)


def compose_motion(m01: FrameMotion, m12: FrameMotion) -> FrameMotion:
    """Motion of frame 2 relative to frame 0 from the 0-1 and 1-2 motions.

    ``m12`` holds the rates of frame 2 as seen from frame 1, re-expressed in
    the common frame.  Its velocity, acceleration and angular acceleration
    are derivatives taken in frame 1.
    """
    if m01.expressed_in != m12.expressed_in:
        raise FrameMismatchError(
            f"motions expressed in {m01.expressed_in!r} and {m12.expressed_in!r}"
        )
    W = hat(m01.w)
    T = m12.T + m01.T
    v = m12.v + m01.v + W @ m12.T
    a = m12.a + (m01.a + hat(m01.alpha) @ m12.T + W @ W @ m12.T) + 2.0 * W @ m12.v
    w = m12.w + m01.w
    alpha = m12.alpha + m01.alpha + W @ m12.w
    return FrameMotion(T, v, a, w, alpha, m01.expressed_in)


def point_velocity(X, velocity, p_body, out_frame=Frame.LOCAL, velocity_frame=Frame.LOCAL):
    """Velocity of the body point ``p_body``.

    ``X`` is a rotation matrix with an angular velocity, or a 4x4 pose with a
    twist ``[nu; omega]``.  ``velocity_frame`` says whether the velocity is a
    body (local) or space (global) quantity; a :class:`Tangent` carries its
    own tag.  The result is ``w^B p^B (+ nu^B)`` in the body frame, rotated
    into the space frame when ``out_frame`` is global (which equals
    ``w^E p^E (+ nu^E)`` with ``p^E`` the point in space coordinates).
    """
    if isinstance(velocity, Tangent):
        velocity, velocity_frame = velocity.value, velocity.frame
    velocity_frame, out_frame = Frame.parse(velocity_frame), Frame.parse(out_frame)
    velocity = np.asarray(velocity, dtype=float)
    p = np.asarray(p_body, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.shape == (3, 3):
        if velocity.shape != (3,):
            raise FrameMismatchError("a rotation takes a 3-vector angular velocity")
        R = X
        w = velocity if velocity_frame is Frame.LOCAL else R.T @ velocity
        vb = np.cross(w, p)
    elif X.shape == (4, 4):
        if velocity.shape != (6,):
            raise FrameMismatchError("a pose takes a 6-vector twist [nu; omega]")
        R = X[:3, :3]
        xi = velocity if velocity_frame is Frame.LOCAL else se3_adjoint_inv(X) @ velocity
        vb = np.cross(xi[3:], p) + xi[:3]
    else:
        raise ValueError(f"X must be 3x3 or 4x4, got {X.shape}")
    return vb if out_frame is Frame.LOCAL else R @ vb
