"""Command-line front end.

Commands: converge, sweep, validate-gradient, validate-solver,
print-config.  Exit codes: 0 success, 1 validation failure, 2 config
error, 3 runtime error.
"""
from __future__ import annotations

import argparse
import json
import subprocess
import sys
import time
from pathlib import Path

from .config import ConfigError, format_config, parse_config
from .driver import ExperimentResult, run_convergence_experiment, \
    run_power_sweep
from .validation import format_table, gradient_checks, solver_checks

SCHEMA_VERSION = 1


def _git_describe() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=10)
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def emit_results(result: ExperimentResult, out_dir: str | Path,
                 config_text: str, seed: int,
                 wall_clock: float) -> list[Path]:
    """Write one CSV per curve plus a JSON manifest; CSV bytes depend only
    on the result contents."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        written: list[Path] = []
        for curve in result.curves:
            path = out / f"{result.kind}_{curve.label}.csv"
            rows = ["param,iteration,mean,std"]
            for x, mean, std in zip(curve.x, curve.mean, curve.std):
                rows.append(f"{curve.label},{x!r},{mean!r},{std!r}")
            path.write_text("\n".join(rows) + "\n")
            written.append(path)
        manifest = {
            "schema_version": SCHEMA_VERSION,
            "kind": result.kind,
            "config": config_text,
            "seed": seed,
            "git_describe": _git_describe(),
            "wall_clock_seconds": wall_clock,
            "files": [p.name for p in written],
        }
        manifest_path = out / "manifest.json"
        manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
        written.append(manifest_path)
        return written
    except OSError as exc:
        raise OSError(f"cannot write results under {out}: {exc}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dfrc",
        description="Joint radar precoder and IRS phase design experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, needs_out: bool) -> None:
        p.add_argument("--config", required=True,
                       help="config file path or preset name (e.g. table1)")
        p.add_argument("--set", dest="overrides", action="append",
                       default=[], metavar="KEY=VALUE",
                       help="override a config key")
        if needs_out:
            p.add_argument("--out", required=True, help="output directory")

    add_common(sub.add_parser("converge",
                              help="objective-vs-iteration curves"), True)
    add_common(sub.add_parser("sweep",
                              help="converged SNR vs power/M/N grid"), True)
    add_common(sub.add_parser("print-config",
                              help="print the resolved config"), False)
    sub.add_parser("validate-gradient",
                   help="finite-difference gradient check suite")
    sub.add_parser("validate-solver",
                   help="covariance solver oracle suite")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate-gradient":
            results = gradient_checks()
        elif args.command == "validate-solver":
            results = solver_checks()
        else:
            results = None
        if results is not None:
            print(format_table(results))
            if all(r.passed for r in results):
                return 0
            first_fail = next(r for r in results if not r.passed)
            print(f"FAILED: {first_fail.name} "
                  f"(measured {first_fail.measured:.3e}, "
                  f"tolerance {first_fail.tolerance:.1e})",
                  file=sys.stderr)
            return 1

        cfg = parse_config(args.config, args.overrides)
        if args.command == "print-config":
            sys.stdout.write(format_config(cfg))
            return 0

        start = time.perf_counter()
        if args.command == "converge":
            result = run_convergence_experiment(cfg, cfg.num_realizations,
                                                cfg.alphas)
        else:  # sweep
            result = run_power_sweep(cfg, cfg.sweep_p0, cfg.sweep_m,
                                     cfg.sweep_n, cfg.num_realizations)
        wall = time.perf_counter() - start
        files = emit_results(result, args.out, format_config(cfg),
                             cfg.seed, wall)
        for path in files:
            print(path)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - stable exit-code contract
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
