"""Command-line front end.

Exit codes: 0 success, 1 failed checks (violations or failing example
lines), 2 parse/config error, 3 validation error, 4 dimension mismatch,
5 unknown example, 6 identical states given to ``optimize``.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

from . import applications, attainment, bounds, matrix_io, metrics, reproduce, sweep
from .errors import (
    DimensionMismatchError,
    NoSignalError,
    ParseError,
    QSNRError,
    ValidationError,
)
from .reproduce import UnknownExampleError

EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_DIM = 4
EXIT_UNKNOWN = 5
EXIT_IDENTICAL = 6

_GLOBAL_DEFAULTS = {"seed": 0, "tolerance": 1e-9, "out": None, "no_timestamp": False}


def _global_options() -> argparse.ArgumentParser:
    # defaults are suppressed so flags given before or after the subcommand both work
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="base random seed (default 0)")
    g.add_argument("--tolerance", type=float, default=argparse.SUPPRESS,
                   help="violation tolerance for verify (default 1e-9)")
    g.add_argument("--out", type=Path, default=argparse.SUPPRESS, help="also write the JSON report here")
    g.add_argument("--no-timestamp", action="store_true", default=argparse.SUPPRESS,
                   help="omit timestamps and wall times so reports are byte-reproducible")
    return p


def _csv_ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _csv(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = _global_options()
    parser = argparse.ArgumentParser(
        prog="qsnr", description="Fidelity-based SNR bounds for quantum detectors.", parents=[common]
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="all bound diagnostics for one triple")
    p.add_argument("state1", type=Path)
    p.add_argument("state2", type=Path)
    p.add_argument("observable", type=Path)

    p = sub.add_parser("examples", parents=[common], help="reproduce a worked example")
    p.add_argument("name", help=", ".join(reproduce.EXAMPLES))
    p.add_argument("--theta", type=float, default=math.pi / 6)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--p", type=float, default=0.3)
    p.add_argument("--sign", type=int, default=1, choices=(1, -1))
    p.add_argument("--nbar", type=float, default=1e-4)
    p.add_argument("--truncation", type=int, default=None)

    p = sub.add_parser("verify", parents=[common], help="randomized inequality sweep")
    p.add_argument("--config", type=Path, help="JSON sweep config (flags override it)")
    p.add_argument("--dims", type=_csv_ints)
    p.add_argument("--instances", type=int)
    p.add_argument("--checks", type=_csv)

    p = sub.add_parser("optimize", parents=[common], help="search for the SNR-maximizing observable")
    p.add_argument("state1", type=Path)
    p.add_argument("state2", type=Path)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--iterations", type=int, default=600)
    p.add_argument("--step-scale", type=float, default=0.5)
    p.add_argument("--step-tolerance", type=float, default=1e-10)

    p = sub.add_parser("coherent", parents=[common], help="coherent-state SNR bounds")
    p.add_argument("spec", type=Path, nargs="?", help='JSON {"nbar": ..., "truncation_dim": ...}')
    p.add_argument("--nbar", type=float)
    p.add_argument("--truncation", type=int)

    p = sub.add_parser("power", parents=[common], help="switching power and its bound")
    p.add_argument("system", type=Path, help="JSON switching-system document")
    return parser


def _states(path1: Path, path2: Path):
    return matrix_io.load_matrix(path1), matrix_io.load_matrix(path2)


def cmd_analyze(args) -> tuple[dict, int]:
    rho1, rho2 = _states(args.state1, args.state2)
    a = matrix_io.load_matrix(args.observable)
    return bounds.analyze(a, rho1, rho2).to_dict(), 0


def cmd_examples(args) -> tuple[dict, int]:
    params = {
        "oscillator": {"theta": args.theta, "omega": args.omega},
        "qubit": {"p": args.p, "sign": args.sign},
        "fidelity3x3": {},
        "coherent": {"nbar": args.nbar, "truncation_dim": args.truncation},
        "switching": {"seed": args.seed},
    }.get(args.name, {})
    report = reproduce.run_example(args.name, **params)
    return report, 0 if report["pass"] else EXIT_FAIL


def sweep_config_from_args(args) -> sweep.SweepConfig:
    doc = {}
    if args.config is not None:
        doc = matrix_io.load_document(args.config)
        if not isinstance(doc, dict):
            raise ParseError(f"{args.config}: sweep config must be a JSON object")
    explicit = getattr(args, "_explicit", set())
    fields = {
        "dims": args.dims if args.dims is not None else doc.get("dims", [2, 3, 4]),
        "instances_per_dim": args.instances if args.instances is not None else doc.get("instances_per_dim", 100),
        "base_seed": args.seed if "seed" in explicit else doc.get("base_seed", args.seed),
        "tolerance": args.tolerance if "tolerance" in explicit else doc.get("tolerance", args.tolerance),
        "checks": args.checks if args.checks is not None else doc.get("checks", list(sweep.ALL_CHECKS)),
    }
    try:
        return sweep.SweepConfig(**fields)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"invalid sweep config: {exc}") from None


def cmd_verify(args) -> tuple[dict, int]:
    cfg = sweep_config_from_args(args)
    report = sweep.run_sweep(cfg, timestamp=not args.no_timestamp)
    return report, 0 if report["total_violations"] == 0 else EXIT_FAIL


def cmd_optimize(args) -> tuple[dict, int]:
    rho1, rho2 = _states(args.state1, args.state2)
    cfg = attainment.OptimizerConfig(
        restarts=args.restarts,
        iterations=args.iterations,
        seed=args.seed,
        step_scale=args.step_scale,
        tolerance=args.step_tolerance,
    )
    a, value = attainment.optimize_observable(rho1, rho2, cfg)
    f = metrics.quantum_fidelity(rho1, rho2)
    bound = bounds.snr_bound_from_fidelity(f)
    slack = math.nan if math.isinf(value) and math.isinf(bound) else bound - value
    return {
        "observable": matrix_io.matrix_to_json(a.op),
        "snr": bounds.extended_to_json(value),
        "bound": bounds.extended_to_json(bound),
        "slack": bounds.extended_to_json(slack),
        "fidelity": f,
        "config": {"restarts": cfg.restarts, "iterations": cfg.iterations, "seed": cfg.seed,
                   "step_scale": cfg.step_scale, "tolerance": cfg.tolerance},
    }, 0


def cmd_coherent(args) -> tuple[dict, int]:
    nbar, trunc = args.nbar, args.truncation
    if args.spec is not None:
        doc = matrix_io.load_document(args.spec)
        if not isinstance(doc, dict) or "nbar" not in doc:
            raise ParseError(f"{args.spec}: expected an object with 'nbar'")
        nbar = doc["nbar"] if nbar is None else nbar
        trunc = doc.get("truncation_dim") if trunc is None else trunc
    if nbar is None:
        raise ParseError("coherent needs --nbar or a spec file")
    spec = applications.CoherentSpec(float(nbar), trunc)
    return {
        "nbar": spec.nbar,
        "truncation_dim": spec.truncation_dim,
        "fidelity": applications.coherent_fidelity(spec),
        "fidelity_truncated": applications.truncated_vacuum_fidelity(spec),
        "bound_eq3": bounds.extended_to_json(applications.coherent_snr_bound(spec, "eq3")),
        "bound_as_printed": bounds.extended_to_json(applications.coherent_snr_bound(spec, "as_printed")),
    }, 0


_SYSTEM_MATRICES = ("h_t", "h_c", "v_ct", "rho_t0", "rho_c_on", "rho_c_off")


def load_switching_system(path: Path) -> applications.SwitchingSystem:
    doc = matrix_io.load_document(path)
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected a JSON object")
    missing = [k for k in _SYSTEM_MATRICES if k not in doc]
    if missing:
        raise ParseError(f"{path}: missing fields {missing}")
    mats = {k: matrix_io.matrix_from_json(doc[k], f"{path}:{k}") for k in _SYSTEM_MATRICES}
    return applications.SwitchingSystem(**mats, tau=float(doc.get("tau", 1e-4)))


def switching_system_to_json(sys: applications.SwitchingSystem) -> dict:
    doc = {k: matrix_io.matrix_to_json(getattr(sys, k)) for k in _SYSTEM_MATRICES}
    doc["tau"] = sys.tau
    return doc


def cmd_power(args) -> tuple[dict, int]:
    sys_ = load_switching_system(args.system)
    p = applications.switching_power(sys_)
    bound = applications.switching_power_bound(sys_)
    return {
        "power": p,
        "bound": bounds.extended_to_json(bound),
        "within_bound": bool(abs(p) <= bound + 1e-9),
        "finite_difference": applications.finite_difference_power(sys_),
        "tau": sys_.tau,
        "observable": matrix_io.matrix_to_json(applications.switching_observable(sys_).op),
    }, 0


COMMANDS = {
    "analyze": cmd_analyze,
    "examples": cmd_examples,
    "verify": cmd_verify,
    "optimize": cmd_optimize,
    "coherent": cmd_coherent,
    "power": cmd_power,
}


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, UnknownExampleError):
        return EXIT_UNKNOWN
    if isinstance(exc, NoSignalError):
        return EXIT_IDENTICAL
    if isinstance(exc, DimensionMismatchError):
        return EXIT_DIM
    if isinstance(exc, ValidationError):
        return EXIT_VALIDATION
    return EXIT_VALIDATION


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._explicit = {k for k in _GLOBAL_DEFAULTS if hasattr(args, k)}
    for k, v in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    try:
        report, code = COMMANDS[args.command](args)
    except QSNRError as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"qsnr {args.command}: error: {msg}", file=sys.stderr)
        return _exit_code(exc)
    if not args.no_timestamp and "timestamp" not in report:
        report["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    text = matrix_io.dumps(report)
    sys.stdout.write(text)
    if args.out is not None:
        args.out.write_text(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
