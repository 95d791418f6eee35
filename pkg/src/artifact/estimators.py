"""Extended Kalman filters: Euclidean, and error-state on a Lie group with reset.

Predict uses a zeroth-order forward step for the mean, ``F = expm(A dt)`` for
the transition (``I + A dt`` when ``first_order`` is set) and
``Q_d = L Q_c L^T dt``.  Updates use the Joseph form.  Every covariance is
symmetrized after each operation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import expm

from .errors import NonFiniteError, NotPSDError
from .manifold import Frame, group_of, is_psd


def _sym(P):
    return 0.5 * (P + P.T)


def _finite(x, what):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise NonFiniteError(f"non-finite {what}")
    return x


def _check_psd(P):
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if not is_psd(P, rtol=1e-9):
        raise NotPSDError("initial covariance is not symmetric positive semidefinite")
    return _sym(P)


def transition(A, dt, first_order=False):
    A = np.asarray(A, dtype=float)
    if first_order:
        return np.eye(A.shape[0]) + A * dt
    return expm(A * dt)


class _TransitionCache:
    """Reuses ``expm(A dt)`` while the system matrix does not change."""

    def __init__(self):
        self.key = None
        self.F = None

    def __call__(self, A, dt, first_order):
        key = (A.tobytes(), dt, first_order)
        if key != self.key:
            self.key, self.F = key, transition(A, dt, first_order)
        return self.F


def joseph_update(P, H, R, innovation):
    """Gain, state correction and Joseph-form covariance for one measurement."""
    S = H @ P @ H.T + R
    try:
        K = np.linalg.solve(S.T, (P @ H.T).T).T
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError("singular innovation covariance") from exc
    IKH = np.eye(P.shape[0]) - K @ H
    return K, K @ innovation, _sym(IKH @ P @ IKH.T + K @ R @ K.T)


# ---------------------------------------------------------------------------
# Euclidean filter


@dataclass
class EuclideanModel:
    """Continuous dynamics ``x' = f(x, u, t) + L w`` and measurement ``y = h(x, t) + M v``."""

    f: Callable
    A: Callable
    h: Callable
    H: Callable
    Qc: np.ndarray
    R: np.ndarray
    dt: float
    L: Optional[Callable] = None
    M: Optional[Callable] = None
    first_order: bool = False


@dataclass
class EuclideanEkf:
    model: EuclideanModel
    x: np.ndarray
    P: np.ndarray

    def predict(self, u=None, t=0.0):
        m = self.model
        x, P = self.x, self.P
        xdot = _finite(m.f(x, u, t), "dynamics")
        A = np.atleast_2d(m.A(x, u, t))
        L = np.eye(x.size) if m.L is None else np.atleast_2d(m.L(x, u, t))
        F = transition(A, m.dt, m.first_order)
        self.x = x + m.dt * xdot
        self.P = _sym(F @ P @ F.T + L @ np.atleast_2d(m.Qc) @ L.T * m.dt)
        return self

    def update(self, y, t=0.0):
        m = self.model
        H = np.atleast_2d(m.H(self.x, t))
        R = np.atleast_2d(m.R)
        if m.M is not None:
            Mm = np.atleast_2d(m.M(self.x, t))
            R = Mm @ R @ Mm.T
        innov = np.atleast_1d(y) - np.atleast_1d(m.h(self.x, t))
        _, dx, self.P = joseph_update(self.P, H, R, innov)
        self.x = self.x + dx
        return self


def ekf_init(model, x0, P0):
    """Filter with ``x = E[x0]`` and covariance ``P0`` (rejects non-PSD ``P0``)."""
    if isinstance(model, ManifoldModel):
        return ManifoldEkf.init(model, *x0, P0=P0)
    return EuclideanEkf(model, np.atleast_1d(np.asarray(x0, dtype=float)).copy(), _check_psd(P0))


def ekf_predict(filt, u=None, t=0.0):
    return filt.predict(u, t)


def ekf_update(filt, y, t=0.0):
    return filt.update(y, t)


def ekf_reset(filt):
    return filt.reset()


# ---------------------------------------------------------------------------
# error-state filter on a Lie group


@dataclass
class ManifoldModel:
    """Error-state model for ``x = [dtau, v, z]`` around the group element ``X``.

    ``dtau' = v`` is built in.  The caller gives the derivatives of the
    remaining states ``p = [v, z]`` as ``f_p(Xe, v, z, u, t)`` with
    ``Xe = X (+) dtau`` and their rows ``A_p(Xe, v, z, u, t)`` of the system
    matrix (shape ``(m + n, 2m + n)``), the noise input ``L`` (full state rows),
    the measurement ``h(Xe, v, z, t)`` and its Jacobian ``H`` wrt the full
    error state.
    """

    f_p: Callable
    A_p: Callable
    h: Callable
    H: Callable
    L: np.ndarray
    Qc: np.ndarray
    R: np.ndarray
    dt: float
    frame: Frame = Frame.LOCAL
    first_order: bool = False
    reset_every_update: bool = True


@dataclass
class ManifoldEkf:
    model: ManifoldModel
    X: np.ndarray
    dtau: np.ndarray
    v: np.ndarray
    z: np.ndarray
    P: np.ndarray
    frame: Frame = field(init=False)

    def __post_init__(self):
        self.frame = Frame.parse(self.model.frame)
        self._transition = _TransitionCache()

    @classmethod
    def init(cls, model, X0, v0, z0=None, P0=None):
        """``X = E[X0]`` with zero perturbation.

        ``P0`` is the joint covariance of ``[dtau, v, z]``; the cross blocks
        between ``dtau`` and the other states default to zero unless given.
        """
        m = group_of(X0).dim
        z0 = np.zeros(0) if z0 is None else np.atleast_1d(np.asarray(z0, dtype=float))
        return cls(
            model,
            np.array(X0, dtype=float),
            np.zeros(m),
            np.asarray(v0, dtype=float).copy(),
            z0.copy(),
            _check_psd(P0),
        )

    @property
    def group(self):
        return group_of(self.X)

    @property
    def m(self):
        return self.group.dim

    def estimate(self):
        """Current best group element ``X (+) dtau`` (or ``dtau (+) X`` in the global variant)."""
        if not self.dtau.any():
            return self.X.copy()
        G = self.group
        E = G.exp(self.dtau)
        return G.compose(self.X, E) if self.frame is Frame.LOCAL else G.compose(E, self.X)

    def state(self):
        return np.concatenate([self.dtau, self.v, self.z])

    def _set_state(self, x):
        m = self.m
        self.dtau, self.v, self.z = x[:m].copy(), x[m : 2 * m].copy(), x[2 * m :].copy()

    def predict(self, u=None, t=0.0):
        md = self.model
        m = self.m
        Xe = self.estimate()
        pdot = _finite(md.f_p(Xe, self.v, self.z, u, t), "dynamics")
        Ap = np.atleast_2d(md.A_p(Xe, self.v, self.z, u, t))
        N = self.P.shape[0]
        A = np.zeros((N, N))
        A[:m, m : 2 * m] = np.eye(m)
        A[m:, :] = Ap
        F = self._transition(A, md.dt, md.first_order)
        L = np.atleast_2d(md.L)
        self._set_state(self.state() + md.dt * np.concatenate([self.v, pdot]))
        self.P = _sym(F @ self.P @ F.T + L @ np.atleast_2d(md.Qc) @ L.T * md.dt)
        return self

    def predicted_observation(self, t=0.0):
        return np.atleast_1d(self.model.h(self.estimate(), self.v, self.z, t))

    def update(self, y, t=0.0):
        md = self.model
        Xe = self.estimate()
        H = np.atleast_2d(md.H(Xe, self.dtau, self.v, self.z, t))
        innov = np.atleast_1d(y) - self.predicted_observation(t)
        _, dx, self.P = joseph_update(self.P, H, np.atleast_2d(md.R), innov)
        self._set_state(self.state() + dx)
        if md.reset_every_update:
            self.reset()
        return self

    def reset_matrix(self):
        """``blkdiag(Ad_Exp(dtau)^-1, I)`` (local) or ``blkdiag(Ad_Exp(dtau), I)`` (global)."""
        G = self.group
        E = G.exp(self.dtau)
        D = np.eye(self.P.shape[0])
        D[: self.m, : self.m] = G.adjoint_inv(E) if self.frame is Frame.LOCAL else G.adjoint(E)
        return D

    def reset(self):
        """Fold ``dtau`` into ``X``, transform ``P`` and zero ``dtau``."""
        D = self.reset_matrix()
        self.X = self.estimate()
        self.P = _sym(D @ self.P @ D.T)
        self.dtau = np.zeros(self.m)
        return self


# ---------------------------------------------------------------------------
# attitude scenario: constant angular velocity, gyro-like propagation, vector observations


@dataclass(frozen=True)
class AttitudeScenario:
    dt: float = 0.01
    steps: int = 1000
    omega0: tuple = (0.1, -0.2, 0.3)
    q_omega: float = 1e-6
    sigma_meas: float = 0.01
    sigma_att0: float = np.deg2rad(2.0)
    sigma_omega0: float = 0.01
    references: tuple = ((1.0, 0.0, 0.0), (0.0, 0.0, 1.0))


def attitude_model(sc: AttitudeScenario) -> ManifoldModel:
    """Error state ``[dtau, omega]`` on SO(3) with body-frame rate and ``y_i = R^T u_i``."""
    from .so3 import hat, so3_jr

    U = np.asarray(sc.references, dtype=float)

    def h(Xe, v, z, t):
        return (U @ Xe).ravel()  # rows are (Xe^T u_i)^T

    def H(Xe, dtau, v, z, t):
        Jr = so3_jr(dtau)
        return np.vstack([np.hstack([hat(Xe.T @ u) @ Jr, np.zeros((3, 3))]) for u in U])

    L = np.vstack([np.zeros((3, 3)), np.eye(3)])
    return ManifoldModel(
        f_p=lambda Xe, v, z, u, t: np.zeros(3),
        A_p=lambda Xe, v, z, u, t: np.zeros((3, 6)),
        h=h,
        H=H,
        L=L,
        Qc=sc.q_omega * np.eye(3),
        R=sc.sigma_meas**2 * np.eye(3 * len(U)),
        dt=sc.dt,
    )


@dataclass
class AttitudeRun:
    att_error: np.ndarray  # rad, per step
    nees: np.ndarray  # attitude NEES per step
    max_reset_jump: float


def run_attitude(sc: AttitudeScenario, rng) -> AttitudeRun:
    """One Monte Carlo run: simulate truth, filter, and score attitude errors."""
    from .so3 import so3_exp, so3_log

    model = attitude_model(sc)
    model.reset_every_update = False  # reset explicitly to check observation invariance
    U = np.asarray(sc.references, dtype=float)
    w_nom = np.asarray(sc.omega0, dtype=float)
    R_true = so3_exp(sc.sigma_att0 * rng.normal(size=3))
    w_true = w_nom + sc.sigma_omega0 * rng.normal(size=3)
    P0 = np.diag([sc.sigma_att0**2] * 3 + [sc.sigma_omega0**2] * 3)
    f = ManifoldEkf.init(model, np.eye(3), w_nom, P0=P0)
    err = np.empty(sc.steps)
    nees = np.empty(sc.steps)
    jump = 0.0
    sq = np.sqrt(sc.q_omega * sc.dt)
    for k in range(sc.steps):
        R_true = R_true @ so3_exp(w_true * sc.dt)
        w_true = w_true + sq * rng.normal(size=3)
        y = (U @ R_true).ravel() + sc.sigma_meas * rng.normal(size=3 * len(U))
        f.predict()
        f.update(y)
        before = f.predicted_observation()
        f.reset()
        jump = max(jump, float(np.abs(f.predicted_observation() - before).max()))
        e = so3_log(f.X.T @ R_true)
        C = f.P[:3, :3]
        err[k] = np.linalg.norm(e)
        nees[k] = e @ np.linalg.solve(C, e)
    return AttitudeRun(err, nees, jump)
