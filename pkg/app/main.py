import sys
import logging
import argparse
from typing import List, Optional

from pydantic import ValidationError

from app.config import settings
from app.routers import checks, scenarios
from utils.file_utils import ConfigFileError, OutputWriteError
from utils.state_utils import SqueezeParameterError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID_CONFIG = 2


def create_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand group per router"""
    parser = argparse.ArgumentParser(
        prog="rindler-sim",
        description="Truncated-Fock-space simulator and verification suite for accelerated oscillator chains",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  rindler-sim run configs/single_chain.json --out reports
  rindler-sim sweep configs/ --out reports
  rindler-sim verify-identities --gamma 0.5 --cutoffs 6,8,10,12
  rindler-sim classical-scan --omega 1 --epsilon 0.1 --kmin 0.5 --kmax 1.5 --points 101
  rindler-sim coupling-report --sizes 16,64,256 --spacing 1 --a 1 --c 1 --omegas 0.5,1,1.5,2,2.5,3

Exit codes: 0 all assertions passed, 1 failed assertions, refusals or errors, 2 invalid configuration.
Environment: RINDLER_SIM_THREADS caps sweep parallelism; see .env.example for the other settings.
""",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")
    subparsers = parser.add_subparsers(dest="command", required=True, help="Commands")
    scenarios.register(subparsers)
    checks.register(subparsers)
    return parser


def configure_logging(verbose: bool = False) -> None:
    """Log to stderr so CSV written to stdout stays clean"""
    logging.basicConfig(
        level=logging.DEBUG if verbose else settings.log_level.upper(),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = create_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    try:
        settings.validate_config()
        logger.debug("Configuration validated")
    except Exception as e:
        logger.warning(f"Configuration validation failed: {e}")

    try:
        return args.func(args)
    except (ValidationError, ConfigFileError, SqueezeParameterError) as e:
        print(f"Invalid configuration: {e}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    except OutputWriteError as e:
        logger.error(f"{e}")
        return EXIT_FAILED
    except Exception as e:
        logger.error(f"Command '{args.command}' failed: {e}", exc_info=True)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
