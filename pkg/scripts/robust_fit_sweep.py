"""Rotation error of pose fits as the number of gross outliers grows."""

import argparse

import numpy as np

from artifact.cli import fit_problem, fit_residual, initial_guess, rotation_error
from artifact.optimizers import ResidualProblem, gauss_newton
from artifact.stats import RobustKernel, default_delta

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--group", choices=["so3", "se3"], default="se3")
parser.add_argument("--pairs", type=int, default=20)
parser.add_argument("--noise", type=float, default=0.01)
parser.add_argument("--max-outliers", type=int, default=6)
parser.add_argument("--seeds", type=int, default=20)
args = parser.parse_args()

kernels = {"none": None, "huber": RobustKernel("huber", default_delta("huber")),
           "tukey": RobustKernel("tukey", default_delta("tukey"))}  # fmt: skip
print(f"median rotation error [rad] over {args.seeds} seeds, {args.group}, {args.pairs} pairs")
print("outliers" + "".join(f"{k:>12s}" for k in kernels))
for n_out in range(args.max_outliers + 1):
    errs = {k: [] for k in kernels}
    for seed in range(args.seeds):
        rng = np.random.default_rng(seed)
        X_true, src, dst = fit_problem(args.group, args.pairs, rng, args.noise, n_out)
        residual, jacobian = fit_residual(args.group, src, dst)
        X0 = initial_guess(args.group, X_true, np.deg2rad(30.0), 1.0, rng)
        for name, k in kernels.items():
            rep = gauss_newton(ResidualProblem(residual, jacobian, X0, kernel=k, block_size=3))
            errs[name].append(rotation_error(args.group, rep.x, X_true))
    print(f"{n_out:8d}" + "".join(f"{np.median(errs[k]):12.4f}" for k in kernels))
