"""Command-line entry point.

Grammar: sociotrace <subcommand> -c <config.yml> -o <out_dir>
         [--window-days N] [--granularity file|entity] [--branch NAME]

Flags override the corresponding config values. Exit codes: 0 success,
1 user error (bad arguments, config, or input data), 2 environment error
(missing binary, network failure). The environment variable
SOCIOTRACE_GIT overrides tool_paths.git.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import load_config, validate_config
from .errors import SocioTraceError, ToolEnvironmentError, UserInputError
from . import pipeline

SUBCOMMANDS = {
    "gitlog": pipeline.run_gitlog,
    "gitlog-entity": pipeline.run_gitlog_entity,
    "mbox": pipeline.run_mbox,
    "issues-fetch": pipeline.run_issues_fetch,
    "issues-parse": pipeline.run_issues_parse,
    "identity": pipeline.run_identity,
    "network": pipeline.run_network,
    "smells": pipeline.run_smells,
    "export-ui": pipeline.run_export_ui,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage problems; our contract reserves 2 for
    environment errors, so usage problems become exit 1."""

    def error(self, message):
        raise _UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="sociotrace", description=__doc__, add_help=True)
    subparsers = parser.add_subparsers(dest="subcommand", metavar="subcommand")
    for name in list(SUBCOMMANDS) + ["all"]:
        sub = subparsers.add_parser(name, add_help=True)
        sub.add_argument("-c", "--config", required=True, help="project configuration file (YAML)")
        sub.add_argument("-o", "--out", required=True, help="output directory")
        sub.add_argument("--window-days", type=int, default=None, help="override window_days")
        sub.add_argument(
            "--granularity", choices=["file", "entity"], default=None, help="override granularity"
        )
        sub.add_argument("--branch", default=None, help="override git_branch")
    return parser


def effective_config(args):
    config = load_config(args.config)
    overrides = {}
    if args.window_days is not None:
        overrides["window_days"] = args.window_days
    if args.granularity is not None:
        overrides["granularity"] = args.granularity
    if args.branch is not None:
        overrides["git_branch"] = args.branch
    if overrides:
        config = dataclasses.replace(config, **overrides)
    for finding in validate_config(config):
        if finding.severity == "error":
            raise UserInputError(f"{args.config}: {finding.field}: {finding.message}")
        print(f"warning: {finding.field}: {finding.message}", file=sys.stderr)
    return config


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    if not args.subcommand:
        parser.print_usage(sys.stderr)
        return 1
    try:
        config = effective_config(args)
        if args.subcommand == "all":
            manifest = pipeline.run_all(config, args.out, config_path=args.config)
            for name in manifest.outputs:
                print(name)
        else:
            for name in SUBCOMMANDS[args.subcommand](config, args.out):
                print(name)
        return 0
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc}", file=sys.stderr)
        return 1
    except ToolEnvironmentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except UserInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SocioTraceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
