"""Handles one CLI command by orchestrating config, the experiment runners and the writers."""

import logging
import sys
from typing import Dict

from . import app_service
from . import experiment_service
from . import output_service

from utils.errors import FramePathException


def handle_command(command: str, options: Dict[str, object]) -> int:
    """
    Runs `command` with the parsed CLI `options`.

    Returns:
        The process exit code: 0 on success, otherwise the exit code of the
        raised FramePathException (2 precondition, 3 capacity, 4 output).
    """
    try:
        config = app_service.build_config(command, options)
        logging.info(f"Running {command} with seed={config.seed}, threads={config.threads}")

        text = experiment_service.RUNNERS[command](config)
        output_service.write_text(text, config.out)
        return 0

    except FramePathException as e:
        logging.error(f"{command} failed ({type(e).__name__}): {e}")
        sys.stderr.write(f"Error: {e}\n")
        return e.exit_code
