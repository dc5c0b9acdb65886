"""Command-line interface.

One subcommand per pipeline stage plus run-experiment (the whole chain)
and print-config. Exit codes: 0 success, 2 configuration error, 3 stale
or missing upstream manifest, 4 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, config_to_ini, load_config
from .experiment import STAGE_ORDER, Experiment
from .manifest import ManifestError, StaleManifestError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_STALE = 3
EXIT_RUNTIME = 4

log = logging.getLogger("robustsv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robustsv",
        description="Noise/reverberation-robust speaker verification "
                    "experiment pipeline.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI config file (defaults apply "
                                         "when omitted)")
    common.add_argument("--seed", type=int,
                        help="override the configured global seed")
    common.add_argument("--regime", action="append", dest="regimes",
                        metavar="NAME",
                        help="restrict to a regime (repeatable): "
                             "baseline, ae, mc, ae_mc")
    common.add_argument("--jobs", type=int, default=1,
                        help="worker-process cap (stages are deterministic "
                             "regardless of this value)")
    sub = parser.add_subparsers(dest="command", required=True)
    for stage in STAGE_ORDER:
        sub.add_parser(stage, parents=[common],
                       help=f"run the {stage} stage")
    run = sub.add_parser("run-experiment", parents=[common],
                         help="run every stage and print the EER report")
    run.add_argument("--stage", choices=STAGE_ORDER,
                     help="stop after this stage")
    sub.add_parser("print-config", parents=[common],
                   help="print the effective configuration")
    return parser


def _configure(args) -> Experiment:
    config = load_config(args.config)
    if args.regimes:
        config.regimes = tuple(args.regimes)
    if args.jobs is not None and args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    config.validate()
    return Experiment(config, seed=args.seed)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "print-config":
            config = load_config(args.config)
            if args.regimes:
                config.regimes = tuple(args.regimes)
            config.validate()
            sys.stdout.write(config_to_ini(config))
            return EXIT_OK
        experiment = _configure(args)
        if args.command == "run-experiment":
            stages = STAGE_ORDER
            if args.stage:
                stages = STAGE_ORDER[:STAGE_ORDER.index(args.stage) + 1]
            for stage in stages:
                log.info("stage %s", stage)
                experiment.run_stage(stage)
            if stages[-1] == "eer":
                sys.stdout.write(experiment.report_path().read_text())
            return EXIT_OK
        log.info("stage %s", args.command)
        experiment.run_stage(args.command)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (StaleManifestError, ManifestError) as exc:
        print(f"stale input: {exc}", file=sys.stderr)
        return EXIT_STALE
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
