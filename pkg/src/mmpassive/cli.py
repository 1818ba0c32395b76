"""Command-line front end: ``analyze``, ``montecarlo`` and ``audit``.

Exit codes: 0 success, 1 usage, 2 parse/validation, 3 solver failure,
4 audit violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiments
from .errors import MmPassiveError, ParseError, SolverError, ValidationError
from .network import ThresholdMap, load, load_thresholds
from .scheduler import BeamSchedule, audit_schedule

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_SOLVER, EXIT_AUDIT = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read: {exc.strerror}", path) from None


def _thresholds(net, theta: str | None) -> ThresholdMap:
    if theta is None:
        return ThresholdMap.from_network(net, 1.0)
    try:
        value = float(theta)
    except ValueError:
        return load_thresholds(_read(theta), net)
    if not 0.0 <= value <= 1.0:
        raise ValidationError([f"threshold {value} outside [0, 1]"])
    return ThresholdMap.from_network(net, value)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    net = load(_read(args.network))
    thresholds = _thresholds(net, args.theta)
    if args.lp_dump:
        Path(args.lp_dump).write_text(experiments.lp_dump(net, thresholds), encoding="utf-8")
    report = experiments.analyze(net, thresholds, args.m, args.k, args.theta_c)
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    theta = float(args.theta)
    result = experiments.run_montecarlo(
        args.n_relays,
        args.trials,
        theta,
        args.cap_mean,
        args.cap_var,
        args.topology,
        args.seed,
        args.jobs,
    )
    summary = experiments.rounded(result.summary())
    if args.format == "json":
        doc = {"summary": summary, "trials": experiments.record_dicts(result)}
        if not args.timing:
            for row in doc["trials"]:
                row.pop("wall_time_ms")
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        _emit(result.to_csv(timing=args.timing), args.out)
        if args.summary:
            Path(args.summary).write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
        else:
            print(json.dumps(summary), file=sys.stderr)
    return EXIT_OK


def cmd_audit(args) -> int:
    schedule = BeamSchedule.loads(_read(args.schedule))
    net = load(_read(args.network))
    thresholds = _thresholds(net, args.theta)
    report = audit_schedule(schedule, net, thresholds, args.m)
    doc = experiments.rounded(
        {
            "ok": report.ok,
            "rate": report.rate,
            "total_duration": report.total_duration,
            "states": len(schedule),
            "violations": report.violations,
            "links": report.links,
        }
    )
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK if report.ok else EXIT_AUDIT


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mmpassive", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="capacities, bounds, path counts and schedule for one network")
    p.add_argument("network")
    p.add_argument("--theta", help="uniform default threshold, or a threshold JSON file")
    p.add_argument("--m", type=int, default=None, help="beam count override")
    p.add_argument("--k", type=int, default=0, help="number of wiretapped links")
    p.add_argument("--theta-c", type=float, default=1.0, help="target fraction of capacity")
    p.add_argument("--lp-dump", help="write the constrained LP in CPLEX LP format")
    p.add_argument("--format", choices=["json"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("montecarlo", help="capacity ratio over random capacity draws")
    p.add_argument("--n-relays", type=int, default=10)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--theta", default="0.2")
    p.add_argument("--cap-mean", type=float, default=1.0)
    p.add_argument("--cap-var", type=float, default=0.1)
    p.add_argument("--topology", default="layered")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="add a wall_time_ms column")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--summary", help="write the summary JSON here instead of stderr")
    p.add_argument("--out")
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("audit", help="check a schedule dump against a network")
    p.add_argument("schedule")
    p.add_argument("network")
    p.add_argument("--theta")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except MmPassiveError as exc:
        if isinstance(exc.__cause__, SolverError):
            print(f"solver failure: {exc}", file=sys.stderr)
            return EXIT_SOLVER
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
