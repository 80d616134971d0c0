"""
wavecoex command line.

    python main.py psd   [--config run.toml] [--out psd.csv]   [--seed N]
    python main.py alloc [--config run.toml] [--out alloc.csv] [--seed N]
    python main.py sweep [--config run.toml] [--out sweep.csv] [--seed N]

Exit codes: 0 success, 1 usage or configuration error, 2 runtime or I/O error.
"""

import argparse
import logging
import sys
from typing import List, Optional

from src.exceptions import ConfigurationError, WavecoexError
from src.services.config_service import load_config, log_level
from src.services.result_storage_service import ResultStorageService
from src.services.simulation_service import SimulationService

logger = logging.getLogger("wavecoex")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _seed(value: str) -> int:
    try:
        seed = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got '{value}'") from None
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return seed


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavecoex",
        description="Coexistence of OFDM, FBMC and UFMC systems sharing an LSA band.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    commands = {
        "psd": "Compare multi-subcarrier PSDs of the configured waveforms",
        "alloc": "Solve one power allocation per system",
        "sweep": "Sweep the interference threshold and record throughput and power loss",
    }
    for name, help_text in commands.items():
        sub = subparsers.add_parser(name, help=help_text, description=help_text)
        sub.add_argument("--config", help="TOML run configuration (default: built-in scenario)")
        sub.add_argument("--out", help="Output CSV path (default: under $WAVECOEX_DATA_DIR/results)")
        sub.add_argument("--seed", type=_seed, help="Override the configuration seed")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """CLI entry point; returns the process exit code."""
    logging.basicConfig(level=log_level(), format="[%(levelname)s] %(message)s")

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on usage errors; usage errors map to 1 here
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG

    storage = ResultStorageService()
    service = SimulationService(storage)
    handlers = {"psd": service.cmd_psd, "alloc": service.cmd_alloc, "sweep": service.cmd_sweep}

    try:
        config = load_config(args.config).with_seed(args.seed)
        _, summary = handlers[args.command](config, args.out)
    except ConfigurationError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        storage.log_error(args.command, str(e))
        return EXIT_CONFIG
    except (WavecoexError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        storage.log_error(args.command, str(e))
        return EXIT_RUNTIME

    print(summary)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
