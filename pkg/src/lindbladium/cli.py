"""Command line front end: ``lindbladium run --config run.json``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from typing import Optional, Sequence

from .config import Experiment, OutputConfig, load_config
from .errors import ConfigError, ConvergenceError, SpecificationError
from .runner import RunReport, run, write_profiles_csv, write_report

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3

log = logging.getLogger("lindbladium")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lindbladium",
                                description="Boundary-driven spin chain steady states and symmetry audits.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="execute a JSON run configuration")
    r.add_argument("--config", required=True, help="path to the JSON configuration")
    r.add_argument("--experiment", choices=[e.value for e in Experiment],
                   help="override the configured experiment")
    r.add_argument("--out", help="directory for the report and CSV profiles")
    r.add_argument("--quiet", action="store_true", help="do not print the report")
    return p


def _resolve_outputs(out: OutputConfig, out_dir: Optional[str]) -> OutputConfig:
    if out_dir is None:
        return out
    os.makedirs(out_dir, exist_ok=True)
    report = os.path.join(out_dir, os.path.basename(out.report or "report.json"))
    csv_path = os.path.join(out_dir, os.path.basename(out.profiles_csv or "profiles.csv"))
    return OutputConfig(report, csv_path)


def _emit(report: RunReport, out: OutputConfig, quiet: bool) -> None:
    if out.report:
        write_report(report, out.report)
    if out.profiles_csv:
        write_profiles_csv(report, out.profiles_csv)
    if not quiet:
        sys.stdout.write(report.to_json())


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        log.error("cannot read configuration: %s", exc)
        return EXIT_CONFIG
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    if args.experiment:
        cfg = dataclasses.replace(cfg, experiment=Experiment(args.experiment))
    out = _resolve_outputs(cfg.output, args.out)
    try:
        report = run(cfg)
    except ConvergenceError as exc:
        log.error("%s", exc)
        if isinstance(exc.partial, RunReport):
            _emit(exc.partial, out, args.quiet)
        return EXIT_CONVERGENCE
    except SpecificationError as exc:
        log.error("invalid run: %s", exc)
        return EXIT_CONFIG
    _emit(report, out, args.quiet)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
