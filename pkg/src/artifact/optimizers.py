"""Gauss-Newton and Levenberg-Marquardt for Euclidean and Lie-group parameters."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .manifold import Frame, group_of
from .stats import RobustKernel, irls_weights, mad_scale

COND_LIMIT = 1e12
GN_DIVERGE_STREAK = 5
LM_REJECT_STREAK = 20


class Termination(enum.Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    SINGULAR = "singular_normal_equations"
    DIVERGED = "diverged"


class SingularNormalEquations(np.linalg.LinAlgError):
    pass


@dataclass
class ResidualProblem:
    """Minimize the cost ``E(x)^T E(x)`` with ``E(x) = f(x) - f_T``.

    For a group-valued ``x0`` the Jacobian ``J(X)`` is the derivative of the
    residual wrt the tangent coordinates ``tau = Log(X)``, and ``side``
    selects global (left, boxplus) or local (right, plus) steps.
    ``block_size`` groups residual rows for robust reweighting.
    """

    residual: Callable
    jacobian: Callable
    x0: np.ndarray
    side: Frame = Frame.GLOBAL
    tol: float = 1e-12
    max_iter: int = 100
    kernel: Optional[RobustKernel] = None
    block_size: int = 1

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        self.side = Frame.parse(self.side)


@dataclass
class SolveReport:
    x: np.ndarray
    cost: float
    iterations: int
    history: list = field(default_factory=list)
    reason: Termination = Termination.MAX_ITER
    normal_residuals: list = field(default_factory=list)


def solve_normal(A, b):
    """Solve the SPD system ``A x = b`` by Cholesky, refusing ill-conditioned ``A``."""
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularNormalEquations(f"normal equations condition number {cond:.3g}")
    try:
        return cho_solve(cho_factor(A), b)
    except LinAlgError as exc:
        raise SingularNormalEquations(str(exc)) from exc


def _norm(e):
    return float(np.linalg.norm(e))


def _sq(e):
    return float(e @ e)


def _weights(problem, E):
    """Per-row IRLS weights: block residual norms over the MAD scale of all entries."""
    if problem.kernel is None:
        return None
    b = problem.block_size
    norms = np.linalg.norm(E.reshape(-1, b), axis=1)
    scale = mad_scale(E)
    if scale <= 0:
        scale = max(float(np.median(np.abs(E))), 1e-12)
    w = irls_weights(problem.kernel, norms / scale)
    return np.repeat(w, b)


def _weighted(E, J, w):
    if w is None:
        return E, J
    s = np.sqrt(w)
    return s * E, s[:, None] * J


def _step_jacobian(problem, X, J):
    """Chain the residual Jacobian through the inverse left/right Jacobian of Log."""
    if problem.x0 is None or np.ndim(X) != 2:
        return J
    G = group_of(X)
    tau = G.log(X)
    Jinv = G.jl(tau, inverse=True) if problem.side is Frame.GLOBAL else G.jr(tau, inverse=True)
    return J @ Jinv


def _apply(problem, x, dx):
    if np.ndim(x) != 2:
        return x + dx
    G = group_of(x)
    E = G.exp(dx)
    return G.compose(E, x) if problem.side is Frame.GLOBAL else G.compose(x, E)


def _cost(problem, x, w=None):
    E = np.asarray(problem.residual(x), dtype=float)
    if w is not None:
        E = np.sqrt(w) * E
    return _sq(E)


def gauss_newton(problem: ResidualProblem) -> SolveReport:
    """Gauss-Newton on vectors or on SO(3)/SE(3) elements (chosen by the shape of ``x0``).

    On the group the step is
    ``dtau = -[J_L^-T J^T J J_L^-1]^-1 J_L^-T J^T E`` applied as ``dtau (+) X``
    (left), or the same with ``J_R`` applied as ``X (+) dtau`` (right).
    Stops when the cost ``E^T E`` decreases by less than ``tol``.
    """
    x = np.array(problem.x0, dtype=float)
    E = np.asarray(problem.residual(x), dtype=float)
    history = [_sq(E)]
    report = SolveReport(x, history[0], 0, history)
    if history[0] == 0.0:
        report.reason = Termination.CONVERGED
        return report
    rising = 0
    for it in range(1, problem.max_iter + 1):
        w = _weights(problem, E)
        J = _step_jacobian(problem, x, np.asarray(problem.jacobian(x), dtype=float))
        Ew, Jw = _weighted(E, J, w)
        A, g = Jw.T @ Jw, Jw.T @ Ew
        try:
            dx = -solve_normal(A, g)
        except SingularNormalEquations:
            report.reason = Termination.SINGULAR
            break
        report.normal_residuals.append(_norm(A @ dx + g) / max(_norm(g), 1e-300))
        prev = _cost(problem, x, w)
        x = _apply(problem, x, dx)
        E = np.asarray(problem.residual(x), dtype=float)
        new = _cost(problem, x, w)
        history.append(_sq(E))
        report.x, report.cost, report.iterations = x, history[-1], it
        rising = rising + 1 if new > prev else 0
        if rising >= GN_DIVERGE_STREAK:
            report.reason = Termination.DIVERGED
            break
        if 0.0 <= prev - new < problem.tol:
            report.reason = Termination.CONVERGED
            break
    return report


def gauss_newton_euclidean(problem: ResidualProblem) -> SolveReport:
    return gauss_newton(problem)


def gauss_newton_manifold(problem: ResidualProblem) -> SolveReport:
    group_of(problem.x0)
    return gauss_newton(problem)


def levenberg_marquardt(problem: ResidualProblem, lam0=1e-3) -> SolveReport:
    """Marquardt-damped Gauss-Newton: ``(A + lam diag(A)) dx = -g``.

    A step that raises the cost is rejected and ``lam`` grows tenfold; an
    accepted step divides it by ten.  ``lam0 = 0`` reproduces Gauss-Newton
    while steps keep decreasing the cost.
    """
    x = np.array(problem.x0, dtype=float)
    E = np.asarray(problem.residual(x), dtype=float)
    history = [_sq(E)]
    report = SolveReport(x, history[0], 0, history)
    if history[0] == 0.0:
        report.reason = Termination.CONVERGED
        return report
    lam = float(lam0)
    rejects = 0
    for it in range(1, problem.max_iter + 1):
        w = _weights(problem, E)
        J = _step_jacobian(problem, x, np.asarray(problem.jacobian(x), dtype=float))
        Ew, Jw = _weighted(E, J, w)
        A, g = Jw.T @ Jw, Jw.T @ Ew
        prev = _cost(problem, x, w)
        try:
            dx = -solve_normal(A + lam * np.diag(np.diag(A)), g)
        except SingularNormalEquations:
            report.reason = Termination.SINGULAR
            break
        trial = _apply(problem, x, dx)
        new = _cost(problem, trial, w)
        report.iterations = it
        if new > prev:
            rejects += 1
            lam = lam * 10.0 if lam > 0 else 1e-6
            if rejects >= LM_REJECT_STREAK:
                report.reason = Termination.DIVERGED
                break
            continue
        rejects = 0
        lam /= 10.0
        x = trial
        E = np.asarray(problem.residual(x), dtype=float)
        history.append(_sq(E))
        report.x, report.cost = x, history[-1]
        if prev - new < problem.tol:
            report.reason = Termination.CONVERGED
            break
    return report
