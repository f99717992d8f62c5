import argparse
import logging
from pathlib import Path

from constants.output import ExitCode
from services.render_service import get_render_service
from services.snapshot_service import get_snapshot_service

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("render", help="Write a PGM heatmap of a snapshot")
    parser.add_argument("field", help="Snapshot file")
    parser.add_argument("--out", default=None, help="Output path (default: the field path with a .pgm suffix)")
    parser.add_argument("--size", type=int, default=None, help="Raster size in pixels (default RENDER_SIZE)")
    parser.set_defaults(handler=handle_render)


def handle_render(args: argparse.Namespace) -> int:
    try:
        field = get_snapshot_service().read(args.field)
        out = Path(args.out) if args.out else Path(args.field).with_suffix(".pgm")
        path = get_render_service(args.size).write(field, out)

    except ValueError as e:
        logger.error("Cannot render %s: %s", args.field, e)
        print(f"error: {e}")
        return ExitCode.VALIDATION_ERROR

    logger.info("Heatmap written to %s", path)
    print(path)
    return ExitCode.SUCCESS
