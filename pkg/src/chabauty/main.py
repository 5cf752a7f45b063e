"""Entry point — configure logging and hand over to the CLI."""

from __future__ import annotations

import logging
import os

from chabauty.cli import main as cli

log = logging.getLogger("chabauty")

LOG_LEVEL_ENV = "CHABAUTY_LOG_LEVEL"


def run(argv: list[str] | None = None) -> None:
    level = os.environ.get(LOG_LEVEL_ENV, "INFO").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s %(levelname)-7s %(name)s: %(message)s",
        datefmt="%H:%M:%S",
    )
    try:
        cli.main(args=argv, prog_name="chabauty")
    except KeyboardInterrupt:
        pass


if __name__ == "__main__":
    run()
