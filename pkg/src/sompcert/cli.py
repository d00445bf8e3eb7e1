"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 inexact recovery against a supplied
truth support, 3 enumeration budget exceeded, 4 soundness violation (a
campaign trial where a recovery criterion held but recovery failed).
"""

import argparse
import json
import sys

from . import io as sio
from .certificates import erc_evaluate, ric_exact, roc_exact
from .errors import BudgetExceededError, DimensionError, RankDeficiencyError
from .experiments import TrialConfig, boundary_probe, run_campaign
from .greedy import SupportSet, somp

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INEXACT = 2
EXIT_BUDGET = 3
EXIT_SOUNDNESS = 4


class InputError(Exception):
    pass


def _emit(text, output_path):
    if output_path:
        with open(output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(path):
    try:
        return sio.read_matrix(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except sio.MatrixParseError as exc:
        raise InputError(str(exc)) from None


def _parse_support(text):
    try:
        return SupportSet(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError as exc:
        raise InputError(f"bad support {text!r}: {exc}") from None


def _load_config(path, seed=None):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: config must be a JSON object")
    if seed is not None:
        data["seed"] = seed
    try:
        config = TrialConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None
    errors = config.validation_errors()
    if errors:
        raise InputError(f"{path}: invalid config:\n  " + "\n  ".join(errors))
    return config


def cmd_recover(phi_path, y_path, s, truth=None, output_path=None):
    phi = _load(phi_path)
    y = _load(y_path)
    if phi.shape[0] != y.shape[0]:
        raise InputError(
            f"dimension mismatch: phi ({phi_path}) is {phi.shape[0]}x{phi.shape[1]}, "
            f"y ({y_path}) is {y.shape[0]}x{y.shape[1]}"
        )
    if truth is not None:
        truth = SupportSet(truth)
    try:
        trace = somp(phi, y, s, truth=truth)
    except (ValueError, DimensionError) as exc:
        if isinstance(exc, RankDeficiencyError):
            raise
        raise InputError(str(exc)) from None
    _emit(sio.dumps(trace.to_dict()), output_path)
    if truth is not None and not trace.exact_recovery:
        return EXIT_INEXACT
    return EXIT_OK


def cmd_certify(phi_path, s, output_path=None, budget=None):
    phi = _load(phi_path)
    try:
        report = erc_evaluate(phi, s, budget)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(sio.dumps(report.to_dict()), output_path)
    return EXIT_OK


def cmd_ric(phi_path, order, output_path=None, budget=None):
    phi = _load(phi_path)
    try:
        cert = ric_exact(phi, order, budget)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(sio.dumps(cert.to_dict()), output_path)
    return EXIT_OK


def cmd_roc(phi_path, alpha, alpha_prime, output_path=None, budget=None):
    phi = _load(phi_path)
    try:
        cert = roc_exact(phi, alpha, alpha_prime, budget)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(sio.dumps(cert.to_dict()), output_path)
    return EXIT_OK


def cmd_campaign(config_path, output_path=None, csv_path=None, seed=None, budget=None):
    config = _load_config(config_path, seed)
    report = run_campaign(config, budget=budget)
    _emit(sio.dumps(report.to_dict()), output_path)
    if csv_path:
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())
    return EXIT_SOUNDNESS if report.soundness_violations else EXIT_OK


def cmd_probe(config_path, steps, output_path=None, seed=None, budget=None):
    config = _load_config(config_path, seed)
    instances = boundary_probe(config, steps, budget=budget)
    failures = [e for e in instances if not e["exact_recovery"]]
    summary = {
        "config": config.to_dict(),
        "perturbation_steps": steps,
        "instances": instances,
        "failures": len(failures),
        "failures_with_any_erc": sum(1 for e in failures if e["any_erc"]),
        "sufficient_not_necessary": sum(1 for e in instances if e["sufficient_not_necessary"]),
        "replicated_mismatches": sum(1 for e in failures if e["replicated_equivalence"] is False),
    }
    _emit(sio.dumps(summary), output_path)
    return EXIT_SOUNDNESS if summary["failures_with_any_erc"] else EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors are input errors; exit code 2 means inexact recovery
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _global_flags(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=default, help="override the seed of a config file")
    parser.add_argument("--output", "-o", default=default, help="write JSON here instead of stdout")
    parser.add_argument("--csv", default=default, help="also write a per-trial CSV (campaign)")
    parser.add_argument("--budget", type=int, default=default,
                        help="enumeration budget (default 2000000 or $SOMP_CERT_BUDGET)")


def build_parser():
    parser = _Parser(
        prog="sompcert",
        description="Joint sparse recovery with SOMP and exact RIP/ROC recovery certificates.",
    )
    _global_flags(parser, suppress=False)
    common = _Parser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("recover", parents=[common], help="run SOMP on Y = Phi X")
    p.add_argument("phi")
    p.add_argument("y")
    p.add_argument("-s", "--sparsity", type=int, required=True)
    p.add_argument("--truth", default=None, help="comma-separated 0-based true support")

    p = sub.add_parser("certify", parents=[common], help="exact constants and recovery criteria for one sparsity")
    p.add_argument("phi")
    p.add_argument("-s", "--sparsity", type=int, required=True)

    p = sub.add_parser("ric", parents=[common], help="exact restricted isometry constant")
    p.add_argument("phi")
    p.add_argument("--order", type=int, required=True)

    p = sub.add_parser("roc", parents=[common], help="exact restricted orthogonality constant")
    p.add_argument("phi")
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--alpha-prime", type=int, required=True)

    p = sub.add_parser("campaign", parents=[common], help="seeded Monte-Carlo recovery campaign")
    p.add_argument("config")

    p = sub.add_parser("probe", parents=[common], help="randomized search near the criterion boundary")
    p.add_argument("config")
    p.add_argument("--steps", type=int, default=11)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "recover":
            truth = _parse_support(args.truth) if args.truth is not None else None
            return cmd_recover(args.phi, args.y, args.sparsity, truth, args.output)
        if args.command == "certify":
            return cmd_certify(args.phi, args.sparsity, args.output, args.budget)
        if args.command == "ric":
            return cmd_ric(args.phi, args.order, args.output, args.budget)
        if args.command == "roc":
            return cmd_roc(args.phi, args.alpha, args.alpha_prime, args.output, args.budget)
        if args.command == "campaign":
            return cmd_campaign(args.config, args.output, args.csv, args.seed, args.budget)
        if args.command == "probe":
            return cmd_probe(args.config, args.steps, args.output, args.seed, args.budget)
    except BudgetExceededError as exc:
        print(f"sompcert: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, RankDeficiencyError) as exc:
        print(f"sompcert: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
