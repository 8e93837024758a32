"""Command-line entry point: ``dep-repeater run``."""
import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from src.experiments.presets import PRESETS
from src.graph.nodes import EXIT_INVALID
from src.graph.workflow import experiment_workflow
from src.utils.config import config

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1; status 2 is reserved for oracle-check failures."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dep-repeater",
        description="Purification and repeater-chain experiments for doubly entangled photon pairs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {config.APP_VERSION}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = commands.add_parser("run", help="Run one experiment and emit CSV")
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", type=Path, help="key=value configuration file")
    source.add_argument("--preset", choices=sorted(PRESETS), help="Run a preset with default parameters")
    run.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override one configuration key (repeatable)",
    )
    run.add_argument("--out", help="CSV destination (stdout when omitted)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=config.LOG_LEVEL.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    args = build_parser().parse_args(argv)

    config_text = None
    if args.config is not None:
        try:
            config_text = args.config.read_text(encoding="utf-8")
        except OSError as e:
            print(f"dep-repeater: cannot read {args.config}: {e}", file=sys.stderr)
            return EXIT_INVALID

    state = experiment_workflow.invoke({
        "config_text": config_text,
        "preset": args.preset,
        "overrides": args.overrides,
        "out": args.out,
    })

    for error in state.get("errors", []):
        print(f"dep-repeater: {error['node']}: {error['error']}", file=sys.stderr)
    if state.get("csv_text"):
        sys.stdout.write(state["csv_text"])
    elif state.get("output_path"):
        logger.info("results written to %s", state["output_path"])
    logger.info("finished with status %s in %d ms", state["final_status"], state.get("runtime_ms", 0))
    return state["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
