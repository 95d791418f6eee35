"""Global error of Euler, Heun and RK4 on two attitude problems.

The fixed-axis problem has a rate that changes only in magnitude; the
general one also turns the rotation axis.  Prints the error table and the
fitted log-log slopes.
"""

import argparse

import numpy as np

from artifact.cli import integration_errors

parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("--t", type=float, default=2.0)
parser.add_argument("--steps", default="25,50,100,200,400,800")
args = parser.parse_args()

counts = [int(s) for s in args.steps.split(",")]
dts = np.array([args.t / n for n in counts])
for problem in ("fixed-axis", "general"):
    print(f"\n{problem} (t = {args.t})")
    print("dt        " + "".join(f"{m:>12s}" for m in ("euler", "heun", "rk4")))
    errs = {m: np.array(integration_errors(m, problem, args.t, counts)) for m in ("euler", "heun", "rk4")}
    for i, dt in enumerate(dts):
        print(f"{dt:<10.5f}" + "".join(f"{errs[m][i]:12.3e}" for m in errs))
    print("slope     " + "".join(f"{np.polyfit(np.log(dts), np.log(errs[m]), 1)[0]:12.2f}" for m in errs))
