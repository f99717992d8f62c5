import argparse
import logging
import sys
from typing import List, Optional

from dotenv import load_dotenv

from cli import analyze, render, run
from core.logging import config_logging

load_dotenv()
config_logging()
logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotasym",
        description="Reaction-diffusion runs on disks and annuli with reflection and foliated Schwarz symmetry diagnostics.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    run.register(subparsers)
    analyze.register(subparsers)
    render.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logger.debug("Dispatching command %s", args.command)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
