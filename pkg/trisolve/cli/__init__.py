"""Run configuration, subcommands and report emission."""

from trisolve.cli.commands import Problem, build_problem, run
from trisolve.cli.report import SCHEMA_VERSION, to_jsonable
from trisolve.cli.runconfig import RunConfig, dump_config, flatten_config, load_config

__all__ = [
    "RunConfig",
    "load_config",
    "dump_config",
    "flatten_config",
    "Problem",
    "build_problem",
    "run",
    "SCHEMA_VERSION",
    "to_jsonable",
]
