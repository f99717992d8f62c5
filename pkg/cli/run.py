import argparse
import logging

from constants.output import ExitCode
from core.exceptions import ConfigError, SolverAbortError
from services.config_service import get_config_service
from services.scenario_service import get_scenario_service

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("run", help="Integrate a scenario and run the symmetry pipeline")
    parser.add_argument("config", help="Scenario file (dotted key = value lines)")
    parser.add_argument("--out", default=None, help="Output directory, overrides ROTASYM_OUT and output.directory")
    parser.add_argument("--expect-fss", action="store_true", help="Exit with 3 unless every omega representative is certified")
    parser.set_defaults(handler=handle_run)


def handle_run(args: argparse.Namespace) -> int:
    logger.info("Running scenario via CLI: %s", args.config)

    try:
        config = get_config_service().load(args.config)
        summary = get_scenario_service().run(config, output_dir=args.out)

    except ConfigError as e:
        logger.error("Invalid scenario: %s", e)
        print(f"error: {e}")
        return ExitCode.VALIDATION_ERROR
    except SolverAbortError as e:
        logger.error("Solver aborted: %s", e)
        print(f"solver abort: {e}")
        return ExitCode.SOLVER_ABORT
    except ValueError as e:
        logger.error("Invalid scenario request: %s", e)
        print(f"error: {e}")
        return ExitCode.VALIDATION_ERROR

    print(summary.model_dump_json(indent=2))
    if args.expect_fss and not summary.all_fss:
        logger.warning("Foliated Schwarz certification failed")
        return ExitCode.CERTIFICATION_FAILURE

    logger.info("Scenario finished successfully via CLI")
    return ExitCode.SUCCESS
