"""Command-line interface.

Subcommands: coeffs, symbol-check, integrate, shoot, energy, classify,
sweep.  Numeric flags accept decimals or exact ``num/den`` rationals.
Exit codes: 0 success, 1 usage or malformed input, 2 numerical failure
(divergence, step underflow) or violated identity.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import classify as classify_mod
from . import energy as energy_mod
from .coeffs import (
    Params,
    SignLemmaError,
    compute_coefficients,
    sign_report,
    verify_symbol_identity,
)
from .fileio import (
    CsvFormatError,
    format_exact,
    parse_exact,
    read_profile_csv,
    read_trajectory_csv,
    write_energy_csv,
    write_json_report,
    write_trajectory_csv,
)
from .ode import (
    EquilibriumKind,
    IntegrateOptions,
    IntegrationError,
    State,
    Termination,
    equilibrium_spectrum,
    fitted_growth_rate,
    integrate,
    shoot_regular,
)
from .svgplot import write_line_svg
from .transform import RadialProfile

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _params_from(args, allow_endpoint: bool = False) -> Params:
    p = parse_exact(args.p)
    endpoint_ok = allow_endpoint and getattr(args, "allow_endpoint", False)
    return Params(n=args.n, p=p, strict=not endpoint_ok)


def _parse_state(text: str, t0: float) -> State:
    parts = text.split(",")
    if len(parts) != 4:
        raise UsageError("--state needs 4 comma-separated values w,w1,w2,w3")
    return State(t=t0, y=tuple(float(parse_exact(c)) for c in parts))


def _integrate_options(args) -> IntegrateOptions:
    return IntegrateOptions(
        rtol=float(parse_exact(args.rtol)),
        atol=float(parse_exact(args.atol)),
        w_max=float(parse_exact(args.wmax)),
        max_steps=args.max_steps,
        h_max=float(parse_exact(args.hmax)),
    )


def cmd_coeffs(args) -> int:
    params = _params_from(args, allow_endpoint=True)
    cs = compute_coefficients(params)
    if params.strict:
        sign_report(params)  # SignLemmaError -> exit 2 (implementation bug)
    if args.json:
        sys.stdout.write(json.dumps(cs.to_dict(exact=args.exact), indent=2,
                                    sort_keys=True) + "\n")
    else:
        for name in ("K0", "K1", "K2", "K3", "J1", "gamma0"):
            value = getattr(cs, name)
            out = format_exact(value) if args.exact else repr(float(value))
            print(f"{name} = {out}")
        print(f"C_pn = {'unset' if cs.C_pn is None else repr(cs.C_pn)}")
    return EXIT_OK


def cmd_symbol_check(args) -> int:
    params = _params_from(args, allow_endpoint=True)
    rep = verify_symbol_identity(params, trials=args.trials, seed=args.seed)
    print(str(rep))
    return EXIT_OK if rep.ok else EXIT_NUMERICAL


def _emit_trajectory(args, traj, params) -> int:
    if args.out:
        write_trajectory_csv(args.out, traj)
    if args.svg:
        write_line_svg(args.svg, traj.t_array(), traj.w_array(),
                       title=f"w(t), n={params.n}, p={params.p}",
                       xlabel="t = ln r", ylabel="w")
    print(f"termination={traj.termination.value} steps={traj.steps} "
          f"rejected={traj.rejected_steps} t_final={traj.states[-1].t!r} "
          f"w_final={traj.states[-1].w!r}")
    if traj.termination in (Termination.DIVERGED, Termination.STEP_UNDERFLOW):
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_integrate(args) -> int:
    params = _params_from(args, allow_endpoint=True)
    t0 = float(parse_exact(args.t0))
    t1 = float(parse_exact(args.t1))
    initial = _parse_state(args.state, t0)
    traj = integrate(params, initial, t1, _integrate_options(args))
    return _emit_trajectory(args, traj, params)


def cmd_shoot(args) -> int:
    params = _params_from(args, allow_endpoint=True)
    t0 = float(parse_exact(args.t0))
    t1 = float(parse_exact(args.t1))
    u0 = float(parse_exact(args.u0))
    traj = shoot_regular(params, u0, t0, t1, _integrate_options(args))
    code = _emit_trajectory(args, traj, params)
    try:
        rate = fitted_growth_rate(traj, t0, min(t0 + 5.0, traj.states[-1].t))
        print(f"initial_rate={rate!r} expected={float(params.growth_exponent)!r}")
    except ValueError:
        pass
    return code


def cmd_energy(args) -> int:
    params = _params_from(args, allow_endpoint=True)
    traj = read_trajectory_csv(args.traj, params)
    audit = energy_mod.audit_monotonicity(params, traj)
    if args.out:
        write_energy_csv(args.out, audit)
    if args.svg:
        ts = [rec.t for rec in audit.records]
        es = [rec.E for rec in audit.records]
        write_line_svg(args.svg, ts, es,
                       title=f"E(t), n={params.n}, p={params.p}",
                       xlabel="t = ln r", ylabel="E")
    print(f"monotone={audit.monotone} max_violation={audit.max_violation!r} "
          f"median_identity_gap={audit.median_identity_gap!r}")
    return EXIT_OK


def cmd_classify(args) -> int:
    params = _params_from(args)
    r, u = read_profile_csv(args.profile)
    profile = RadialProfile(r=r, u=u, params=params)
    options = classify_mod.ClassifyOptions(
        window_fraction=float(parse_exact(args.window_fraction)),
        tol_limit=float(parse_exact(args.tol_limit)),
        tol_zero=float(parse_exact(args.tol_zero)),
        tol_rate=float(parse_exact(args.tol_rate)),
    )
    rep = classify_mod.classify_profile(params, profile, options)
    if args.out:
        write_json_report(args.out, rep.to_dict())
    if args.svg:
        mask = u > 0
        write_line_svg(args.svg, np.log(r[mask]), np.log(u[mask]),
                       title=f"verdict: {rep.verdict.value}",
                       xlabel="ln r", ylabel="ln u")
    print(f"verdict={rep.verdict.value} fitted_limit={rep.fitted_limit!r} "
          f"fitted_rate={rep.fitted_rate!r} C_pn={rep.C_pn!r}")
    return EXIT_OK


class SweepSpec:
    """Validated sweep request: p grid strictly inside the open window."""

    TASKS = ("coeffs", "signs", "levels", "spectrum")

    def __init__(self, n: int, p_min, p_max, steps: int, task: str):
        if task not in self.TASKS:
            raise UsageError(f"unknown sweep task {task!r}")
        if steps < 1:
            raise UsageError("--steps must be >= 1")
        if not p_min < p_max:
            raise UsageError("--p-min must be below --p-max")
        # both endpoints strictly inside the window, checked exactly
        Params(n=n, p=p_min, strict=True)
        Params(n=n, p=p_max, strict=True)
        self.n = n
        self.p_min = p_min
        self.p_max = p_max
        self.steps = steps
        self.task = task

    def grid(self):
        if self.steps == 1:
            return [self.p_min]
        return [self.p_min + (self.p_max - self.p_min) * Fraction(i, self.steps - 1)
                for i in range(self.steps)]


def _sweep_payload(task: str, params: Params) -> dict:
    if task == "coeffs":
        return compute_coefficients(params).to_dict(exact=True)
    if task == "signs":
        return sign_report(params).to_dict()
    if task == "levels":
        lv = energy_mod.energy_levels(params)
        return {"n": params.n, "p": str(params.p),
                "level_zero": lv.level_zero, "level_singular": lv.level_singular}
    if task == "spectrum":
        out = {"n": params.n, "p": str(params.p)}
        for kind in (EquilibriumKind.ZERO, EquilibriumKind.CONSTANT):
            spec = equilibrium_spectrum(params, kind)
            out[kind.value] = [[z.real, z.imag] for z in spec.roots]
        return out
    raise UsageError(f"unknown sweep task {task!r}")


def cmd_sweep(args) -> int:
    spec = SweepSpec(n=args.n, p_min=parse_exact(args.p_min),
                     p_max=parse_exact(args.p_max), steps=args.steps,
                     task=args.task)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = int(os.environ.get("BILANE_THREADS", "0")) or (os.cpu_count() or 1)

    def one(i_p):
        i, p = i_p
        params = Params(n=spec.n, p=p, strict=True)
        payload = _sweep_payload(spec.task, params)
        name = f"{spec.task}_{i:04d}.json"
        write_json_report(out_dir / name, payload)
        return name

    with ThreadPoolExecutor(max_workers=workers) as pool:
        names = list(pool.map(one, enumerate(spec.grid())))
    write_json_report(out_dir / "index.json", {
        "task": spec.task, "n": spec.n,
        "p_min": format_exact(spec.p_min), "p_max": format_exact(spec.p_max),
        "steps": spec.steps, "files": names,
    })
    print(f"wrote {len(names)} result files to {out_dir}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="bilane",
                     description="Biharmonic Lane-Emden analysis in log-radial coordinates")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_np(sp, endpoint=False):
        sp.add_argument("--n", type=int, required=True, help="spatial dimension")
        sp.add_argument("--p", required=True,
                        help="exponent p (> 1); decimal or num/den")
        if endpoint:
            sp.add_argument("--allow-endpoint", action="store_true",
                            help="accept p on/outside the open window (p > 1 still required)")

    def add_integrator(sp):
        sp.add_argument("--rtol", default="1e-10")
        sp.add_argument("--atol", default="1e-12")
        sp.add_argument("--wmax", default="1e6", help="divergence threshold on w")
        sp.add_argument("--hmax", default="inf", help="step-size cap")
        sp.add_argument("--max-steps", type=int, default=1_000_000)
        sp.add_argument("--out", help="trajectory CSV path (sidecar JSON alongside)")
        sp.add_argument("--svg", help="emit a w-vs-t SVG plot")

    sp = sub.add_parser("coeffs", help="transform coefficients and C_pn")
    add_np(sp, endpoint=True)
    sp.add_argument("--exact", action="store_true", help="print num/den rationals")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_coeffs)

    sp = sub.add_parser("symbol-check", help="exact separable-symbol identity check")
    add_np(sp, endpoint=True)
    sp.add_argument("--trials", type=int, default=32)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_symbol_check)

    sp = sub.add_parser("integrate", help="integrate the log-radial ODE")
    add_np(sp, endpoint=True)
    sp.add_argument("--t0", required=True)
    sp.add_argument("--t1", required=True)
    sp.add_argument("--state", required=True, help="initial w,w1,w2,w3")
    add_integrator(sp)
    sp.set_defaults(func=cmd_integrate)

    sp = sub.add_parser("shoot", help="shoot a solution bounded at the origin")
    add_np(sp, endpoint=True)
    sp.add_argument("--u0", required=True, help="center value u(0)")
    sp.add_argument("--t0", required=True)
    sp.add_argument("--t1", required=True)
    add_integrator(sp)
    sp.set_defaults(func=cmd_shoot)

    sp = sub.add_parser("energy", help="energy audit of a trajectory CSV")
    add_np(sp, endpoint=True)
    sp.add_argument("--traj", required=True, help="trajectory CSV path")
    sp.add_argument("--out", help="energy CSV path (sidecar JSON alongside)")
    sp.add_argument("--svg", help="emit an E-vs-t SVG plot")
    sp.set_defaults(func=cmd_energy)

    sp = sub.add_parser("classify", help="classify a sampled radial profile")
    add_np(sp)
    sp.add_argument("--profile", required=True, help="profile CSV path (r,u)")
    sp.add_argument("--window-fraction", default="1/3")
    sp.add_argument("--tol-limit", default="0.05")
    sp.add_argument("--tol-zero", default="0.01")
    sp.add_argument("--tol-rate", default="0.05")
    sp.add_argument("--out", help="JSON report path")
    sp.add_argument("--svg", help="emit a ln u vs ln r SVG plot")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("sweep", help="parameter sweep over p")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p-min", required=True)
    sp.add_argument("--p-max", required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--task", required=True,
                    choices=("coeffs", "signs", "levels", "spectrum"))
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CsvFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SignLemmaError as exc:
        print(f"identity violation: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (IntegrationError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
