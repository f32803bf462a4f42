import argparse
import sys

from loguru import logger

import logger as log_setup
from commands import commands, run_command
from models.schema import parse_config
from tools.errors import KgError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kgscope", description="Resonance analysis and pseudo-spectral "
                                                                 "simulation of multispeed Klein-Gordon systems")
    parser.add_argument("--log-level", default=None, help="overrides LOG_LEVEL from config.py")
    parser.add_argument("--archive", default=None, help="run archive URL, overrides RUN_ARCHIVE from config.py")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in commands:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="run configuration (JSON)")
        if name != "verify":
            p.add_argument("--out", default=None, help="output directory")
        if name == "decay":
            p.add_argument("--preset", default=None, help="decay preset name")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        log_setup.setup(args.log_level)
    try:
        cfg = parse_config(args.config)
        result = run_command(args.command, cfg, getattr(args, "out", None), getattr(args, "preset", None),
                             archive=args.archive)
    except KgError as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e.message}")
        return e.exit_code
    logger.info(f"{args.command} done, exit code {result.exit_code}")
    return result.exit_code


if __name__ == '__main__':
    sys.exit(main())
