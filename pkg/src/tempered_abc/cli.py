"""Command line entry point ``tempered-abc``.

Exit status is 0 only if every check of the invoked command passes; 1 for
a failed check and 2 for a bad config or a numerical error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .config import ExperimentConfig
from .errors import ConfigError, TemperedABCError
from .experiments import OUTPUT_ROOT_ENV, check_identities, run


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tempered-abc",
                                     description="Tempered subdiffusion with absorbing boundaries.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the experiment named in a config file")
    p_run.add_argument("config", type=Path)

    p_conv = sub.add_parser("convergence", help="refinement study for a config file")
    p_conv.add_argument("config", type=Path)
    p_conv.add_argument("--levels", type=int, default=None, help="number of refinement levels (>= 3)")

    p_id = sub.add_parser("check-identities", help="transform, Parseval and Alikhanov suites")
    p_id.add_argument("--output", type=Path, default=None,
                      help=f"output directory (default: ${OUTPUT_ROOT_ENV} or ./output)")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "check-identities":
            out = args.output or Path(os.environ.get(OUTPUT_ROOT_ENV, ".")) / "output" / "check-identities"
            report = check_identities(out)
        else:
            config = ExperimentConfig.load(args.config)
            if args.command == "convergence":
                if args.levels is not None and args.levels < 3:
                    raise ConfigError("--levels must be >= 3", field="levels")
                config = ExperimentConfig(**{**config.__dict__, "experiment": "convergence"})
                report = run(config, levels=args.levels)
            else:
                report = run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (TemperedABCError, ValueError, ArithmeticError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(report.summary())
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
