import argparse
import logging

from constants.output import ExitCode
from services.scenario_service import get_scenario_service
from services.snapshot_service import get_snapshot_service

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("analyze", help="Run the symmetry pipeline on stored snapshots")
    parser.add_argument("files", nargs="*", help="Snapshot files on one grid")
    parser.add_argument("--tol", type=float, default=None, help="Scenario tolerance (default SCENARIO_TOL)")
    parser.add_argument("--e-start", type=float, default=0.0, help="Sweep start angle in radians, on the lattice")
    parser.add_argument("--window-fraction", type=float, default=None, help="Omega window as a fraction of the run")
    parser.add_argument("--poincare-period", type=float, default=None, help="Sample the omega window at this period")
    parser.add_argument("--expect-fss", action="store_true", help="Exit with 3 unless every representative is certified")
    parser.set_defaults(handler=handle_analyze)


def handle_analyze(args: argparse.Namespace) -> int:
    logger.info("Analysing %d snapshot files via CLI", len(args.files))

    try:
        fields = get_snapshot_service().read_many(args.files)
        summary = get_scenario_service().analyze(
            fields,
            tol=args.tol,
            e_start=args.e_start,
            window_fraction=args.window_fraction,
            poincare_period=args.poincare_period,
        )

    except ValueError as e:
        logger.error("Invalid analysis request: %s", e)
        print(f"error: {e}")
        return ExitCode.VALIDATION_ERROR

    print(summary.model_dump_json(indent=2))
    if args.expect_fss and not summary.all_fss:
        logger.warning("Foliated Schwarz certification failed")
        return ExitCode.CERTIFICATION_FAILURE
    return ExitCode.SUCCESS
