"""trisolve command-line entry point.

    python -m trisolve.main <eigen|check|solve|alternative|explore> --config FILE [--seed N] [--output DIR]
"""

import argparse
import logging
import sys

from trisolve.cli import load_config, run
from trisolve.config import settings
from trisolve.database import init_db
from trisolve.exceptions import ConfigError
from trisolve.models import Subcommand

logger = logging.getLogger(__name__)

CONFIG_ERROR_EXIT = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trisolve", description=__doc__.splitlines()[0])
    parser.add_argument("subcommand", choices=[s.value for s in Subcommand])
    parser.add_argument("--config", required=True, help="key = value run configuration")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--output", default=None, help="override output.dir")
    parser.add_argument("--log-level", default=None, help=f"default {settings.log_level}")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    overrides = {}
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.output is not None:
        overrides["output.dir"] = args.output
    try:
        config = load_config(args.config, overrides)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return CONFIG_ERROR_EXIT

    if settings.record_runs:
        try:
            init_db()
        except Exception as e:
            logger.warning("Run ledger unavailable: %s", e)

    return run(args.subcommand, config, config_path=args.config)


if __name__ == "__main__":
    sys.exit(main())
