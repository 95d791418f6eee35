"""Command-line experiment harness.

Every subcommand writes one CSV or JSON report, prints its summary object as
JSON on stdout and exits with 0 (thresholds met), 1 (threshold failure) or
2 (usage error).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__


@dataclass
class ExperimentConfig:
    command: str
    seed: int = 42
    out: str | None = None
    format: str = "csv"
    params: dict = field(default_factory=dict)


@dataclass
class Report:
    records: list
    summary: dict
    passed: bool


def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


def _fmt_csv(x):
    x = _num(x)
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def render(report: Report, fmt: str, command: str) -> str:
    stamp = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    records = [{k: _num(v) for k, v in r.items()} for r in report.records]
    summary = {k: _num(v) for k, v in report.summary.items()}
    if fmt == "json":
        meta = json.dumps({"command": command, "version": __version__, "timestamp": stamp})
        body = json.dumps({"records": records, "summary": summary}, indent=1)
        return "{\"metadata\": " + meta + ",\n" + body[2:] + "\n"
    buf = io.StringIO()
    buf.write(f"# {command} artifact {__version__} {stamp}\n")
    if records:
        w = csv.writer(buf, lineterminator="\n")
        keys = list(records[0])
        w.writerow(keys)
        for r in records:
            w.writerow([_fmt_csv(r[k]) for k in keys])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# subcommands


def cmd_randomwalk(a) -> Report:
    from .stats import RandomWalkSpec, random_walk_variance, simulate_random_walk

    steps = int(round(a.t / a.dt))
    walk = RandomWalkSpec(a.order, a.sigma, a.dt, steps, a.trials, a.seed)
    res = simulate_random_walk(walk)
    stride = max(1, steps // a.records)
    records = []
    for k in range(stride - 1, steps, stride):
        rec = {"t": res.t[k]}
        for o in range(1, a.order + 1):
            rec[f"mean_{o}"] = res.mean[o - 1, k]
            rec[f"var_{o}"] = res.variance[o - 1, k]
            rec[f"theory_{o}"] = random_walk_variance(o, a.sigma, a.dt, k + 1, exact=False)
        records.append(rec)
    summary = {"order": a.order, "t": a.t, "trials": a.trials, "tolerance": a.tolerance}
    ok = True
    for o in range(1, a.order + 1):
        emp = res.variance[o - 1, -1]
        th = random_walk_variance(o, a.sigma, a.dt, steps, exact=False)
        rel = abs(emp - th) / th if th > 0 else abs(emp)
        summary[f"variance_{o}"] = emp
        summary[f"theory_{o}"] = th
        summary[f"rel_error_{o}"] = rel
        ok &= bool(rel < a.tolerance)
    summary["pass"] = ok
    return Report(records, summary, ok)


def attitude_problem(kind="fixed-axis"):
    """Exact attitude trajectory ``R(t)``, body rate ``w(t)`` and its derivative.

    ``fixed-axis``: rotation about a constant unit axis with angle
    ``0.5 t + 0.3 sin 2t`` (the rate varies in magnitude only).
    ``general``: ``R = Rz(a(t)) Rx(b(t))``, whose rate also changes direction.
    """
    from .so3 import so3_exp

    a = lambda t: 0.5 * t + 0.3 * np.sin(2 * t)  # noqa: E731
    ad = lambda t: 0.5 + 0.6 * np.cos(2 * t)  # noqa: E731
    add = lambda t: -1.2 * np.sin(2 * t)  # noqa: E731
    if kind == "fixed-axis":
        n = np.array([1.0, 2.0, 2.0]) / 3.0
        return (lambda t: so3_exp(a(t) * n), lambda t: ad(t) * n, lambda t: add(t) * n)
    b = lambda t: 0.4 * np.cos(1.5 * t)  # noqa: E731
    bd = lambda t: -0.6 * np.sin(1.5 * t)  # noqa: E731
    bdd = lambda t: -0.9 * np.cos(1.5 * t)  # noqa: E731

    def R(t):
        return so3_exp([0.0, 0.0, a(t)]) @ so3_exp([b(t), 0.0, 0.0])

    def w(t):
        return np.array([bd(t), ad(t) * np.sin(b(t)), ad(t) * np.cos(b(t))])

    def wd(t):
        s, c = np.sin(b(t)), np.cos(b(t))
        return np.array(
            [bdd(t), add(t) * s + ad(t) * bd(t) * c, add(t) * c - ad(t) * bd(t) * s]
        )

    return R, w, wd


def integration_errors(method, kind, t_end, step_counts):
    from .integrators import ManifoldIVP, integrate_manifold
    from .so3 import so3_log

    R, w, wd = attitude_problem(kind)
    errs = []
    for n in step_counts:
        ivp = ManifoldIVP(R(0.0), w(0.0), lambda y, v, X, t: wd(t), t_end / n, n)
        tr = integrate_manifold(method, ivp, store=False)
        errs.append(float(np.linalg.norm(so3_log(R(t_end).T @ tr.X[0]))))
    return errs


EXPECTED_ORDER = {"euler": (1.0, 0.2), "heun": (2.0, 0.2), "rk4": (4.0, 0.3)}


def cmd_integrate_order(a) -> Report:
    counts = [int(s) for s in a.steps_list.split(",")]
    records, summary, ok = [], {"problem": a.problem, "t": a.t}, True
    for method in ("euler", "heun", "rk4"):
        errs = integration_errors(method, a.problem, a.t, counts)
        dts = [a.t / n for n in counts]
        slope = float(np.polyfit(np.log(dts), np.log(errs), 1)[0])
        target, tol = EXPECTED_ORDER[method]
        good = abs(slope - target) <= tol
        ok &= good
        summary[f"slope_{method}"] = slope
        summary[f"pass_{method}"] = good
        for dt, e in zip(dts, errs):
            records.append({"method": method, "dt": dt, "error": e})
    if a.drift_steps > 0:
        from .integrators import ManifoldIVP, integrate_manifold

        R, w, wd = attitude_problem(a.problem)
        ivp = ManifoldIVP(R(0.0), w(0.0), lambda y, v, X, t: wd(t), 1e-3, a.drift_steps)
        X = integrate_manifold("rk4", ivp, store=False).X[0]
        drift = float(np.abs(X.T @ X - np.eye(3)).max())
        summary["orthogonality_drift"] = drift
        ok &= drift < 1e-9
    summary["pass"] = ok
    return Report(records, summary, ok)


def cmd_jacobian_audit(a) -> Report:
    from .audit import audit_table

    rows = audit_table(a.group, a.samples, a.seed)
    records = [
        {"kind": r.kind, "max_abs_error": r.max_abs_error, "pass": r.max_abs_error < a.tolerance}
        for r in rows
    ]
    worst = max(r.max_abs_error for r in rows)
    ok = worst < a.tolerance
    summary = {"group": a.group, "samples": a.samples, "rows": len(rows),
               "max_abs_error": worst, "tolerance": a.tolerance, "pass": ok}  # fmt: skip
    return Report(records, summary, ok)


def fit_problem(group, pairs, rng, noise=0.0, outliers=0):
    """Synthetic correspondences ``target_i = X_true . source_i`` (+ noise, + gross outliers)."""
    from .audit import random_tangent
    from .manifold import GROUPS

    G = GROUPS[group]
    X_true = G.exp(random_tangent(G, rng))
    src = rng.normal(size=(pairs, 3))
    R, T = (X_true, np.zeros(3)) if group == "so3" else (X_true[:3, :3], X_true[:3, 3])
    dst = src @ R.T + T + noise * rng.normal(size=(pairs, 3))
    for i in range(outliers):
        dst[i] = dst[i] + 10.0 * rng.normal(size=3)
    return X_true, src, dst


def fit_residual(group, src, dst):
    from .se3 import se3_log, se3_table_jacobian
    from .so3 import so3_log, so3_table_jacobian

    def apply(X):
        if group == "so3":
            return src @ X.T
        return src @ X[:3, :3].T + X[:3, 3]

    def residual(X):
        return (dst - apply(X)).ravel()

    def jacobian(X):
        if group == "so3":
            tau = so3_log(X)
            return -np.vstack([so3_table_jacobian("exp-action", tau=tau, v=p) for p in src])
        tau = se3_log(X)
        return -np.vstack([se3_table_jacobian("exp-action", tau=tau, v=p) for p in src])

    return residual, jacobian


def initial_guess(group, X_true, angle, offset, rng):
    from .manifold import GROUPS

    G = GROUPS[group]
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    if group == "so3":
        return G.compose(G.exp(angle * axis), X_true)
    u = rng.normal(size=3)
    u /= np.linalg.norm(u)
    M = G.compose(G.exp(np.concatenate([np.zeros(3), angle * axis])), X_true)
    M = M.copy()
    M[:3, 3] += offset * u
    return M


def rotation_error(group, X, X_true):
    from .so3 import so3_log

    R, Rt = (X, X_true) if group == "so3" else (X[:3, :3], X_true[:3, :3])
    return float(np.linalg.norm(so3_log(Rt.T @ R)))


def cmd_fit_pose(a) -> Report:
    from .optimizers import ResidualProblem, gauss_newton, levenberg_marquardt
    from .stats import KernelKind, RobustKernel, default_delta

    rng = np.random.default_rng(a.seed)
    X_true, src, dst = fit_problem(a.group, a.pairs, rng, a.noise, a.outliers)
    residual, jacobian = fit_residual(a.group, src, dst)
    X0 = initial_guess(a.group, X_true, np.deg2rad(a.angle_deg), a.offset, rng)
    kernel = None
    if a.kernel != "none":
        kind = KernelKind(a.kernel)
        kernel = RobustKernel(kind, default_delta(kind, 1.0))
    sides = ["global", "local"] if a.side == "both" else [a.side]
    solver = gauss_newton if a.method == "gn" else levenberg_marquardt
    records, summary, ok = [], {"group": a.group, "method": a.method, "kernel": a.kernel}, True
    robust = a.outliers > 0 or a.noise > 0
    for side in sides:
        prob = ResidualProblem(residual, jacobian, X0, side=side, kernel=kernel, block_size=3)
        rep = solver(prob)
        err = rotation_error(a.group, rep.x, X_true)
        for i, c in enumerate(rep.history):
            records.append({"side": side, "iteration": i, "cost": c})
        good = err < a.rot_tol if robust else (rep.cost < a.cost_tol and rep.iterations <= a.max_iter)
        ok &= bool(good)
        summary[f"{side}_cost"] = rep.cost
        summary[f"{side}_iterations"] = rep.iterations
        summary[f"{side}_rotation_error"] = err
        summary[f"{side}_reason"] = rep.reason.value
    summary["pass"] = ok
    return Report(records, summary, ok)


def nees_band(dof, runs, level=0.95):
    from scipy.stats import chi2

    lo, hi = chi2.ppf([(1 - level) / 2, (1 + level) / 2], dof * runs)
    return lo / runs, hi / runs


def cmd_ekf_attitude(a) -> Report:
    from .estimators import AttitudeScenario, run_attitude

    sc = AttitudeScenario(dt=a.dt, steps=a.steps)
    runs = [run_attitude(sc, np.random.default_rng([a.seed, i])) for i in range(a.runs)]
    err = np.array([r.att_error for r in runs])
    nees = np.array([r.nees for r in runs]).mean(axis=0)
    lo, hi = nees_band(3, a.runs)
    inside = (nees >= lo) & (nees <= hi)
    records = [
        {"step": k + 1, "mean_error_deg": np.rad2deg(err[:, k].mean()), "avg_nees": nees[k],
         "inside": bool(inside[k])}
        for k in range(a.steps)
    ]  # fmt: skip
    mean_deg = float(np.rad2deg(err.mean()))
    jump = max(r.max_reset_jump for r in runs)
    ok = mean_deg < 0.5 and inside.mean() >= 0.9 and jump < 1e-10
    summary = {"runs": a.runs, "steps": a.steps, "mean_error_deg": mean_deg,
               "nees_band_low": lo, "nees_band_high": hi, "fraction_inside": float(inside.mean()),
               "reset_observation_jump": jump, "pass": bool(ok)}  # fmt: skip
    return Report(records, summary, bool(ok))


def cmd_interp(a) -> Report:
    from .se3 import dq_from_pose, dq_to_pose, sclerp
    from .so3 import quat_exp, quat_identity, quat_log, so3_pow_slerp

    axis = {"x": np.array([1.0, 0, 0]), "y": np.array([0, 1.0, 0]), "z": np.array([0, 0, 1.0])}[a.axis]
    angle = np.deg2rad(a.angle_deg)
    q1 = quat_exp(angle * axis)
    if a.mode == "slerp":
        q = so3_pow_slerp(quat_identity(), q1, a.t)
        expect = quat_exp(a.t * angle * axis)
        dev = float(np.abs(q - expect).max())
        rec = {"t": a.t, "q0": q[0], "q1": q[1], "q2": q[2], "q3": q[3]}
        summary = {"mode": "slerp", "angle_deg": float(np.rad2deg(np.linalg.norm(quat_log(q))))}
    else:
        z1 = dq_from_pose(q1, a.translation * axis)
        z = sclerp(dq_from_pose(quat_identity(), np.zeros(3)), z1, a.t)
        q, T = dq_to_pose(z)
        expect_q, expect_T = quat_exp(a.t * angle * axis), a.t * a.translation * axis
        dev = float(max(np.abs(q - expect_q).max(), np.abs(T - expect_T).max()))
        rec = {"t": a.t, "q0": q[0], "q1": q[1], "q2": q[2], "q3": q[3],
               "tx": T[0], "ty": T[1], "tz": T[2]}  # fmt: skip
        summary = {"mode": "sclerp", "angle_deg": float(np.rad2deg(np.linalg.norm(quat_log(q)))),
                   "translation": float(np.linalg.norm(T))}  # fmt: skip
    ok = dev < a.tolerance
    summary.update({"max_deviation": dev, "tolerance": a.tolerance, "pass": bool(ok)})
    return Report([rec], summary, bool(ok))


# ---------------------------------------------------------------------------


def _positive(kind):
    def parse(s):
        v = kind(s)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {s}")
        return v

    return parse


def build_parser():
    pos_f, pos_i = _positive(float), _positive(int)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--out", default=None, help="report path (default <command>.<format>)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")

    p = argparse.ArgumentParser(prog="liekit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("randomwalk", parents=[common], help="random-walk variance growth")
    s.add_argument("--order", type=int, choices=[1, 2, 3], default=1)
    s.add_argument("--sigma", type=pos_f, default=1.0)
    s.add_argument("--dt", type=pos_f, default=0.01)
    s.add_argument("--t", type=pos_f, default=10.0)
    s.add_argument("--trials", type=pos_i, default=10000)
    s.add_argument("--tolerance", type=pos_f, default=0.05)
    s.add_argument("--records", type=pos_i, default=100, help="number of time samples reported")
    s.set_defaults(func=cmd_randomwalk)

    s = sub.add_parser("integrate-order", parents=[common], help="observed integrator orders")
    s.add_argument("--problem", choices=["fixed-axis", "general"], default="fixed-axis")
    s.add_argument("--t", type=pos_f, default=2.0)
    s.add_argument("--steps-list", default="50,100,200,400")
    s.add_argument("--drift-steps", type=int, default=0)
    s.set_defaults(func=cmd_integrate_order)

    s = sub.add_parser("jacobian-audit", parents=[common], help="finite-difference table audit")
    s.add_argument("--group", choices=["so3", "se3"], default="so3")
    s.add_argument("--samples", type=pos_i, default=1000)
    s.add_argument("--tolerance", type=pos_f, default=1e-5)
    s.set_defaults(func=cmd_jacobian_audit)

    s = sub.add_parser("fit-pose", parents=[common], help="Gauss-Newton / LM pose fitting")
    s.add_argument("--group", choices=["so3", "se3"], default="so3")
    s.add_argument("--pairs", type=pos_i, default=10)
    s.add_argument("--angle-deg", type=float, default=30.0)
    s.add_argument("--offset", type=float, default=1.0)
    s.add_argument("--noise", type=float, default=0.0)
    s.add_argument("--outliers", type=int, default=0)
    s.add_argument("--kernel", choices=["none", "mean", "huber", "tukey"], default="none")
    s.add_argument("--side", choices=["global", "local", "both"], default="both")
    s.add_argument("--method", choices=["gn", "lm"], default="gn")
    s.add_argument("--cost-tol", type=pos_f, default=1e-18)
    s.add_argument("--rot-tol", type=pos_f, default=0.01)
    s.add_argument("--max-iter", type=pos_i, default=10)
    s.set_defaults(func=cmd_fit_pose)

    s = sub.add_parser("ekf-attitude", parents=[common], help="error-state attitude filter")
    s.add_argument("--runs", type=pos_i, default=100)
    s.add_argument("--steps", type=pos_i, default=1000)
    s.add_argument("--dt", type=pos_f, default=0.01)
    s.set_defaults(func=cmd_ekf_attitude)

    s = sub.add_parser("interp", parents=[common], help="SLERP / ScLERP interpolation")
    s.add_argument("--mode", choices=["slerp", "sclerp"], default="slerp")
    s.add_argument("--t", type=float, default=0.5)
    s.add_argument("--angle-deg", type=float, default=90.0)
    s.add_argument("--axis", choices=["x", "y", "z"], default="z")
    s.add_argument("--translation", type=float, default=2.0)
    s.add_argument("--tolerance", type=pos_f, default=1e-12)
    s.set_defaults(func=cmd_interp)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        report = args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    path = args.out or f"{args.command}.{args.format}"
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(render(report, args.format, args.command))
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return 2
    print(json.dumps({k: _num(v) for k, v in report.summary.items()}))
    return 0 if report.passed else 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
