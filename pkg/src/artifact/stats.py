"""Robust statistics and random-walk simulation."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

MAD_FACTOR = 1.4826
HUBER_K = 1.345
TUKEY_K = 4.685
MEDIAN_WEIGHT_CAP = 1e6


class UnboundedWeightError(ArithmeticError):
    """The median kernel weight 1/|x| is unbounded at x = 0."""


class KernelKind(enum.Enum):
    MEDIAN = "median"
    MEAN = "mean"
    HUBER = "huber"
    TUKEY = "tukey"


@dataclass(frozen=True)
class RobustKernel:
    kind: KernelKind
    delta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", KernelKind(self.kind))
        if self.kind in (KernelKind.HUBER, KernelKind.TUKEY) and not self.delta > 0:
            raise ValueError("delta must be positive for Huber and Tukey kernels")


def mad_scale(samples):
    """Normal-consistent scale ``1.4826 * median(|x - median(x)|)``."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("mad_scale needs at least one sample")
    return MAD_FACTOR * float(np.median(np.abs(x - np.median(x))))


def default_delta(kind, sigma=1.0):
    """Usual thresholds: 1.345 sigma (Huber) and 4.685 sigma (Tukey)."""
    kind = KernelKind(kind)
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if kind is KernelKind.HUBER:
        return HUBER_K * sigma
    if kind is KernelKind.TUKEY:
        return TUKEY_K * sigma
    raise ValueError(f"{kind.value} kernel has no threshold")


def kernel_eval(k: RobustKernel, x):
    """Return ``(rho, psi, weight)`` at scalar ``x``; ``psi = d rho/dx`` and ``weight = psi/x``."""
    x = float(x)
    ax = abs(x)
    d = k.delta
    if k.kind is KernelKind.MEAN:
        return 0.5 * x * x, x, 1.0
    if k.kind is KernelKind.MEDIAN:
        if ax == 0.0:
            raise UnboundedWeightError("median weight is unbounded at x = 0")
        return ax, float(np.sign(x)), 1.0 / ax
    if k.kind is KernelKind.HUBER:
        if ax <= d:
            return 0.5 * x * x, x, 1.0
        return d * (ax - 0.5 * d), d * float(np.sign(x)), d / ax
    # Tukey bisquare
    if ax <= d:
        u = x * x / (d * d)
        w = (1.0 - u) ** 2
        return 0.5 * x * x * (1.0 - u + u * u / 3.0), x * w, w
    return d * d / 6.0, 0.0, 0.0


def irls_weights(k: RobustKernel, x):
    """Vectorized weights for reweighting; the median weight is clamped at 1e6."""
    ax = np.abs(np.asarray(x, dtype=float))
    d = k.delta
    if k.kind is KernelKind.MEAN:
        return np.ones_like(ax)
    if k.kind is KernelKind.MEDIAN:
        with np.errstate(divide="ignore"):
            return np.minimum(1.0 / ax, MEDIAN_WEIGHT_CAP)
    if k.kind is KernelKind.HUBER:
        with np.errstate(divide="ignore"):
            return np.where(ax <= d, 1.0, d / np.maximum(ax, 1e-300))
    return np.where(ax <= d, (1.0 - (ax / d) ** 2) ** 2, 0.0)


# ---------------------------------------------------------------------------
# random walks


@dataclass(frozen=True)
class RandomWalkSpec:
    order: int = 1
    sigma: float = 1.0
    dt: float = 0.01
    steps: int = 1000
    trials: int = 10000
    seed: int = 42

    def __post_init__(self):
        if self.order not in (1, 2, 3):
            raise ValueError("order must be 1, 2 or 3")
        if not self.dt > 0 or self.steps < 1 or self.trials < 1 or self.sigma < 0:
            raise ValueError("need dt > 0, steps >= 1, trials >= 1, sigma >= 0")


@dataclass(frozen=True)
class RandomWalkResult:
    """Per-step statistics across trials; row ``i`` is the walk of order ``i + 1``."""

    t: np.ndarray
    mean: np.ndarray
    variance: np.ndarray


def trial_rng(seed, trial):
    """Independent generator for one trial, reproducible regardless of scheduling."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial)]))


def random_walk_paths(walk: RandomWalkSpec, trials):
    """Walks of orders 1..order for the given trial indices, shape (order, n, steps).

    White-noise draws ``w_i ~ N(0, sigma^2)`` are integrated with the
    rectangular rule: ``a_k = dt sum_{i<=k} w_i``, ``b_k = dt sum_{j<=k} a_j``,
    ``c_k = dt sum_{j<=k} b_j``.
    """
    w = np.stack([trial_rng(walk.seed, i).normal(0.0, 1.0, walk.steps) for i in trials])
    w *= walk.sigma
    out = []
    level = w
    for _ in range(walk.order):
        level = walk.dt * np.cumsum(level, axis=1)
        out.append(level)
    return np.stack(out)


def simulate_random_walk(walk: RandomWalkSpec, chunk=1000) -> RandomWalkResult:
    s1 = np.zeros((walk.order, walk.steps))
    s2 = np.zeros((walk.order, walk.steps))
    for start in range(0, walk.trials, chunk):
        paths = random_walk_paths(walk, range(start, min(start + chunk, walk.trials)))
        s1 += paths.sum(axis=1)
        s2 += (paths * paths).sum(axis=1)
    n = walk.trials
    mean = s1 / n
    var = (s2 - n * mean * mean) / max(n - 1, 1)
    t = walk.dt * np.arange(1, walk.steps + 1)
    return RandomWalkResult(t, mean, var)


def random_walk_variance(order, sigma, dt, k, exact=True):
    """Theoretical variance after ``k`` steps.

    ``exact`` gives the discrete sums; otherwise the continuous-time
    approximations sigma^2 t dt, sigma^2 t^3 dt / 3 and sigma^2 t^5 dt / 20.
    """
    t = k * dt
    s2 = sigma * sigma
    if not exact:
        return {1: s2 * t * dt, 2: s2 * t**3 * dt / 3.0, 3: s2 * t**5 * dt / 20.0}[order]
    if order == 1:
        return s2 * k * dt**2
    if order == 2:
        return s2 * dt**4 * k * (k + 1) * (2 * k + 1) / 6.0
    m = np.arange(1, k + 1, dtype=float)
    return s2 * dt**6 * float(np.sum((m * (m + 1) / 2.0) ** 2))
