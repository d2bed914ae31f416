"""Command-line entry point.

    mddsim run --config cfg.json [--seed N] [--out DIR] [--jobs K]
    mddsim verify --suite {lemma,theorem,decay,bounds} [--seed N] [--out DIR]

Exit codes: 0 on success, 2 on configuration or usage errors, 3 when a
verifier finds a violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_VIOLATION,
    ConfigError,
    ExperimentConfig,
    VERIFY_SUITES,
    run,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mddsim",
                                     description="measurement-driven decoupling experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment from a JSON config")
    run_p.add_argument("--config", required=True, help="path to the JSON config")
    run_p.add_argument("--seed", type=int, default=None, help="override the config seed")
    run_p.add_argument("--out", default="out", help="output directory (default: ./out)")
    run_p.add_argument("--jobs", type=int, default=1, help="worker count for sweeps")

    ver_p = sub.add_parser("verify", help="run a built-in verifier suite")
    ver_p.add_argument("--suite", required=True, choices=sorted(VERIFY_SUITES))
    ver_p.add_argument("--seed", type=int, default=0)
    ver_p.add_argument("--out", default=None, help="optional directory for the JSON report")
    return parser


def _cmd_run(args) -> int:
    config = ExperimentConfig.from_file(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    result = run(config, Path(args.out), jobs=args.jobs)
    for path in result.files:
        print(path)
    print(f"{config.experiment}: {result.summary}")
    return result.exit_code


def _cmd_verify(args) -> int:
    report = VERIFY_SUITES[args.suite](seed=args.seed)
    line = f"{report['claim_id']}: {'PASS' if report['passed'] else 'FAIL'} (margin {report['margin']:.3e})"
    print(line)
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"verify_{args.suite}.json"
        path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        print(path)
    return EXIT_OK if report["passed"] else EXIT_VIOLATION


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, matching the config exit code
        return int(exc.code) if exc.code else EXIT_OK
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_verify(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
