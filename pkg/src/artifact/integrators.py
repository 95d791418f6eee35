"""Explicit Euler, Heun and RK4 integration in Euclidean space and on Lie groups."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import NonFiniteError
from .manifold import Frame, Tangent, group_of


class Method(enum.Enum):
    EULER = "euler"
    HEUN = "heun"
    RK4 = "rk4"


def _check(value, step, what):
    value = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(value)):
        raise NonFiniteError(f"non-finite {what} at step {step}", step=step)
    return value


# ---------------------------------------------------------------------------
# Euclidean


@dataclass(frozen=True)
class EuclideanIVP:
    f: Callable  # f(x, t) -> dx/dt
    x0: np.ndarray
    dt: float
    steps: int
    t0: float = 0.0

    def __post_init__(self):
        if not self.dt > 0 or self.steps < 1:
            raise ValueError("need dt > 0 and steps >= 1")


@dataclass(frozen=True)
class EuclideanTrajectory:
    t: np.ndarray
    x: np.ndarray


def euclidean_step(method, f, x, t, dt, step=0):
    method = Method(method)
    k1 = _check(f(x, t), step, "derivative")
    if method is Method.EULER:
        return x + dt * k1
    if method is Method.HEUN:
        k2 = _check(f(x + dt * k1, t + dt), step, "derivative")
        return x + 0.5 * dt * (k1 + k2)
    k2 = _check(f(x + 0.5 * dt * k1, t + 0.5 * dt), step, "derivative")
    k3 = _check(f(x + 0.5 * dt * k2, t + 0.5 * dt), step, "derivative")
    k4 = _check(f(x + dt * k3, t + dt), step, "derivative")
    return x + dt * (k1 / 6.0 + k2 / 3.0 + k3 / 3.0 + k4 / 6.0)


def integrate_euclidean(method, ivp: EuclideanIVP) -> EuclideanTrajectory:
    x = np.atleast_1d(np.asarray(ivp.x0, dtype=float))
    xs = np.empty((ivp.steps + 1, x.size))
    xs[0] = x
    for k in range(ivp.steps):
        t = ivp.t0 + k * ivp.dt
        x = euclidean_step(method, ivp.f, x, t, ivp.dt, step=k)
        xs[k + 1] = x
    return EuclideanTrajectory(ivp.t0 + ivp.dt * np.arange(ivp.steps + 1), xs)


# ---------------------------------------------------------------------------
# Lie group


def _no_y(y, v, X, t):
    return np.zeros_like(y)


@dataclass(frozen=True)
class ManifoldIVP:
    """State ``(y, v, X)``: Euclidean ``y``, tangent velocity ``v`` of ``X``, group element ``X``.

    ``f_y(y, v, X, t)`` and ``f_v(y, v, X, t)`` give the time derivatives.  A
    local velocity advances ``X`` by right plus, a global one by left plus.
    """

    X0: np.ndarray
    v0: np.ndarray | Tangent
    f_v: Callable
    dt: float
    steps: int
    y0: np.ndarray = field(default_factory=lambda: np.zeros(0))
    f_y: Callable = _no_y
    t0: float = 0.0
    frame: Optional[Frame] = None

    def __post_init__(self):
        if not self.dt > 0 or self.steps < 1:
            raise ValueError("need dt > 0 and steps >= 1")


@dataclass
class ManifoldTrajectory:
    t: np.ndarray
    y: np.ndarray
    v: np.ndarray
    X: np.ndarray
    frame: Frame


def _advance(G, X, tau, frame):
    E = G.exp(tau)
    return G.compose(X, E) if frame is Frame.LOCAL else G.compose(E, X)


def manifold_step(method, G, f_y, f_v, y, v, X, t, dt, frame, step=0):
    """One step of the chosen scheme; returns ``(y, v, X)`` at ``t + dt``."""
    method = Method(method)

    def deriv(yy, vv, XX, tt):
        return (
            _check(f_y(yy, vv, XX, tt), step, "y derivative"),
            _check(f_v(yy, vv, XX, tt), step, "v derivative"),
        )

    dy1, dv1 = deriv(y, v, X, t)
    if method is Method.EULER:
        return y + dt * dy1, v + dt * dv1, _advance(G, X, dt * v, frame)
    if method is Method.HEUN:
        dy2, dv2 = deriv(y + dt * dy1, v + dt * dv1, _advance(G, X, dt * v, frame), t + dt)
        return (
            y + 0.5 * dt * (dy1 + dy2),
            v + 0.5 * dt * (dv1 + dv2),
            _advance(G, X, dt * v + 0.5 * dt * dt * dv1, frame),
        )
    h = 0.5 * dt
    dy2, dv2 = deriv(y + h * dy1, v + h * dv1, _advance(G, X, h * v, frame), t + h)
    dy3, dv3 = deriv(y + h * dy2, v + h * dv2, _advance(G, X, h * (v + h * dv1), frame), t + h)
    dy4, dv4 = deriv(y + dt * dy3, v + dt * dv3, _advance(G, X, dt * (v + h * dv2), frame), t + dt)
    return (
        y + dt * (dy1 / 6.0 + dy2 / 3.0 + dy3 / 3.0 + dy4 / 6.0),
        v + dt * (dv1 / 6.0 + dv2 / 3.0 + dv3 / 3.0 + dv4 / 6.0),
        _advance(G, X, dt * v + dt * dt / 6.0 * (dv1 + dv2 + dv3), frame),
    )


def integrate_manifold(method, ivp: ManifoldIVP, store=True, callback=None):
    """Integrate ``ivp``; with ``store=False`` only the final state is kept.

    ``callback(k, t, y, v, X)`` is called after every step, which allows
    streaming long runs without keeping the history.
    """
    G = group_of(ivp.X0)
    if isinstance(ivp.v0, Tangent):
        v, frame = ivp.v0.value, ivp.v0.frame
        if ivp.frame is not None and Frame.parse(ivp.frame) is not frame:
            raise ValueError("ivp.frame disagrees with the velocity tag")
    else:
        v = np.asarray(ivp.v0, dtype=float)
        frame = Frame.parse(ivp.frame or Frame.LOCAL)
    y = np.atleast_1d(np.asarray(ivp.y0, dtype=float))
    X = np.asarray(ivp.X0, dtype=float)
    n = ivp.steps + 1 if store else 1
    ys, vs, Xs = np.empty((n, y.size)), np.empty((n, v.size)), np.empty((n,) + X.shape)
    ys[0], vs[0], Xs[0] = y, v, X
    for k in range(ivp.steps):
        t = ivp.t0 + k * ivp.dt
        y, v, X = manifold_step(method, G, ivp.f_y, ivp.f_v, y, v, X, t, ivp.dt, frame, step=k)
        if store:
            ys[k + 1], vs[k + 1], Xs[k + 1] = y, v, X
        if callback is not None:
            callback(k + 1, t + ivp.dt, y, v, X)
    if not store:
        ys[0], vs[0], Xs[0] = y, v, X
        ts = np.array([ivp.t0 + ivp.steps * ivp.dt])
    else:
        ts = ivp.t0 + ivp.dt * np.arange(ivp.steps + 1)
    return ManifoldTrajectory(ts, ys, vs, Xs, frame)
