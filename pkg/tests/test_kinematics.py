import numpy as np
import pytest

from artifact.errors import FrameMismatchError
from artifact.kinematics import FrameMotion, compose_motion, point_velocity, rotate_motion
from artifact.manifold import Frame, Tangent
from artifact.se3 import se3_adjoint, se3_from_rt
from artifact.so3 import hat, so3_exp

Z = np.zeros(3)


def spinning(w):
    return FrameMotion(Z, Z, Z, np.array([0.0, 0.0, w]), Z)


def test_coriolis_case():
    # a point sliding outward at speed u along the x axis of a frame spinning at w about z
    w, u = 1.7, 0.4
    m = compose_motion(spinning(w), FrameMotion(Z, [u, 0.0, 0.0], Z, Z, Z))
    np.testing.assert_array_equal(m.a, [0.0, 2.0 * w * u, 0.0])
    np.testing.assert_array_equal(m.v, [u, 0.0, 0.0])


def test_centripetal_case():
    w, rho = 1.5, 2.0
    m = compose_motion(spinning(w), FrameMotion([rho, 0.0, 0.0], Z, Z, Z, Z))
    np.testing.assert_array_equal(m.a, [-w * w * rho, 0.0, 0.0])
    np.testing.assert_array_equal(m.v, [0.0, w * rho, 0.0])


def test_euler_acceleration_and_angular_terms():
    m01 = FrameMotion(Z, Z, Z, [0.0, 0.0, 2.0], [0.0, 0.0, 3.0])
    m12 = FrameMotion([1.0, 0.0, 0.0], Z, Z, [1.0, 0.0, 0.0], Z)
    m = compose_motion(m01, m12)
    np.testing.assert_array_equal(m.a, [-4.0, 3.0, 0.0])
    np.testing.assert_array_equal(m.w, [1.0, 0.0, 2.0])
    np.testing.assert_array_equal(m.alpha, [0.0, 2.0, 3.0])


def random_motion(rng, frame="0"):
    return FrameMotion(*rng.normal(size=(5, 3)), expressed_in=frame)


def test_composition_is_associative(rng):
    a, b, c = random_motion(rng), random_motion(rng), random_motion(rng)
    left = compose_motion(compose_motion(a, b), c)
    right = compose_motion(a, compose_motion(b, c))
    for name in ("T", "v", "a", "w", "alpha"):
        np.testing.assert_allclose(getattr(left, name), getattr(right, name), atol=1e-12)


def test_identity_motion():
    m = random_motion(np.random.default_rng(1))
    out = compose_motion(FrameMotion.zero(), m)
    for name in ("T", "v", "a", "w", "alpha"):
        np.testing.assert_array_equal(getattr(out, name), getattr(m, name))


def test_frame_mismatch_and_validation(rng):
    with pytest.raises(FrameMismatchError):
        compose_motion(random_motion(rng, "0"), random_motion(rng, "1"))
    with pytest.raises(ValueError):
        FrameMotion([0.0, np.nan, 0.0], Z, Z, Z, Z)
    R = so3_exp(rng.normal(size=3))
    m = rotate_motion(R, random_motion(rng), "1")
    assert m.expressed_in == "1"


# trajectories: frame 1 in frame 0 and frame 2 in frame 1 ------------------------


def p01(t):
    return np.array([np.sin(t), 0.5 * t * t, np.cos(2 * t)])


def r01(t):
    return np.array([0.3 * t, -0.2 * t * t, 0.5 * np.sin(t)])


def p12(t):
    return np.array([1.0 + 0.4 * t, np.sin(3 * t), 0.2 * t**3])


def r12(t):
    return np.array([0.1 * np.cos(t), 0.7 * t, -0.3 * t * t])


def d(f, t, h, order=1):
    if order == 1:
        return (f(t + h) - f(t - h)) / (2 * h)
    return (f(t + h) - 2 * f(t) + f(t - h)) / (h * h)


def body_rate(rot, t, h):
    """Angular velocity seen in the rotating frame, from R^T dR/dt."""
    R = so3_exp(rot(t))
    W = R.T @ d(lambda s: so3_exp(rot(s)), t, h)
    return np.array([W[2, 1], W[0, 2], W[1, 0]])


def composed_error(t, h):
    ref = 1e-4  # fine step for the input rates so the outer step dominates
    R01 = lambda s: so3_exp(r01(s))  # noqa: E731
    R = R01(t)
    w01 = R @ body_rate(r01, t, ref)
    m01 = FrameMotion(p01(t), d(p01, t, ref), d(p01, t, ref, 2), w01,
                      d(lambda s: R01(s) @ body_rate(r01, s, ref), t, ref))  # fmt: skip
    w12_1 = so3_exp(r12(t)) @ body_rate(r12, t, ref)
    alpha12_1 = d(lambda s: so3_exp(r12(s)) @ body_rate(r12, s, ref), t, ref)
    m12 = FrameMotion(R @ p12(t), R @ d(p12, t, ref), R @ d(p12, t, ref, 2), R @ w12_1, R @ alpha12_1)
    m02 = compose_motion(m01, m12)
    p02 = lambda s: p01(s) + R01(s) @ p12(s)  # noqa: E731
    R02 = lambda s: R01(s) @ so3_exp(r12(s))  # noqa: E731
    W = d(R02, t, h) @ R02(t).T
    w02 = np.array([W[2, 1], W[0, 2], W[1, 0]])
    return max(
        np.abs(m02.v - d(p02, t, h)).max(),
        np.abs(m02.a - d(p02, t, h, 2)).max(),
        np.abs(m02.w - w02).max(),
    )


def test_velocity_composition_matches_numerical_derivative():
    hs = [0.02, 0.01, 0.005]
    errs = [composed_error(0.7, h) for h in hs]
    assert errs[-1] < 1e-3
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.3)


# point velocity --------------------------------------------------------------------


def test_point_velocity_rotation():
    R = so3_exp([0.0, 0.0, np.pi / 2])
    w = np.array([0.0, 0.0, 2.0])
    np.testing.assert_allclose(point_velocity(R, w, [1.0, 0.0, 0.0]), [0.0, 2.0, 0.0])
    np.testing.assert_allclose(point_velocity(R, w, [1.0, 0.0, 0.0], "global"), [-2.0, 0.0, 0.0], atol=1e-15)


def test_point_velocity_pose_frames_agree(rng):
    M = se3_from_rt(so3_exp(rng.normal(size=3)), rng.normal(size=3))
    xi = rng.normal(size=6)
    p = rng.normal(size=3)
    body = point_velocity(M, Tangent(xi, "local"), p, Frame.GLOBAL)
    space = point_velocity(M, Tangent(se3_adjoint(M) @ xi, "global"), p, Frame.GLOBAL)
    np.testing.assert_allclose(body, space, atol=1e-12)
    # space form: omega x p_E + nu_E with p_E the point in space coordinates
    xs = se3_adjoint(M) @ xi
    pE = M[:3, :3] @ p + M[:3, 3]
    np.testing.assert_allclose(body, hat(xs[3:]) @ pE + xs[:3], atol=1e-12)


def test_point_velocity_matches_finite_difference(rng):
    M = se3_from_rt(so3_exp(rng.normal(size=3)), rng.normal(size=3))
    xi = rng.normal(size=6)
    p = rng.normal(size=3)
    from artifact.se3 import se3_exp

    h = 1e-6
    pos = lambda s: (M @ se3_exp(s * xi))[:3] @ np.append(p, 1.0)  # noqa: E731
    np.testing.assert_allclose(point_velocity(M, xi, p, "global"), (pos(h) - pos(-h)) / (2 * h), atol=1e-8)


def test_point_velocity_shape_checks():
    with pytest.raises(FrameMismatchError):
        point_velocity(np.eye(3), np.zeros(6), Z)
    with pytest.raises(FrameMismatchError):
        point_velocity(np.eye(4), np.zeros(3), Z)
