##################################################################################################
#                                        OVERVIEW                                                #
#                                                                                                #
# This module provides a preconfigured logger with color-coded output based on log severity.     #
# It is shared by the verification modules, the CLI and the HTTP front end so that every stage   #
# of a proof protocol logs the same way. Output goes to stderr: stdout is reserved for reports.  #
# The level is taken from GJ_LOG_LEVEL (default INFO).                                           #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

import logging  # Logs and events
import os
import sys
import time
from typing import Any

import colorlog  # Logs and events

##################################################################################################
#                                       LOGGER CONFIGURATION                                     #
#                                                                                                #
# Configures the logger to display messages with different colors depending on the log level.   #
# Uses the colorlog library to differentiate between INFO, WARNING, ERROR, and CRITICAL levels.  #
##################################################################################################

# Define the color scheme for each log level
log_colors = {'DEBUG': 'cyan', 'INFO': 'green', 'WARNING': 'yellow', 'ERROR': 'red', 'CRITICAL': 'bold_red'}

# Create a handler that uses ColorLogFormatter
handler = colorlog.StreamHandler(stream=sys.stderr)
handler.setFormatter(colorlog.ColoredFormatter("%(log_color)s%(levelname)s - %(message)s", log_colors=log_colors))

# Set up logger with the color handler
logger = logging.getLogger("gj_crazy_verify")
logger.addHandler(handler)
_level = os.getenv("GJ_LOG_LEVEL", "INFO").upper()
_level_names = logging.getLevelNamesMapping() if hasattr(logging, "getLevelNamesMapping") else dict(logging._nameToLevel)  # Python 3.10 compat
logger.setLevel(_level if _level in _level_names else logging.INFO)


def log_completion(stage: str, start: float, digits: int = 3, **fields: Any) -> float:
    """
    Log `[stage] Completed → key=value | ... | duration=Xs` for a run started at `start`
    (a time.perf_counter() reading) and return the rounded duration in seconds.
    """
    duration = round(time.perf_counter() - start, digits)
    details = "".join(f"{key}={value} | " for key, value in fields.items())
    logger.info(f"[{stage}] Completed → {details}duration={duration}s")
    return duration
