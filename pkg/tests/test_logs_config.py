##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# Tests the global logger configuration defined in utils.logs_config.                            #
# Ensures INFO-level messages are logged, the logger has its service name and the verification   #
# modules log through it, and the completion line carries fields and the duration.               #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

import time

from src import compendium
from src.minimality import minimality_test
from utils.logs_config import log_completion, logger

##################################################################################################
#                                             TESTS                                              #
##################################################################################################


def test_logger_basic_usage(caplog):
    """
    Ensure the global logger is correctly configured and logs at expected levels.
    """
    with caplog.at_level("INFO"):
        logger.info("test message")
    assert any("test message" in rec.message for rec in caplog.records)
    assert logger.name == "gj_crazy_verify"


def test_minimality_logs_at_debug(caplog):
    """Per-run summaries are DEBUG records of the shared logger."""
    with caplog.at_level("DEBUG", logger="gj_crazy_verify"):
        minimality_test(compendium.gmic())
    assert any(rec.name == "gj_crazy_verify" and "[minimality] gmic" in rec.message for rec in caplog.records)


def test_log_completion_reports_fields_and_duration(caplog):
    """One INFO record with the stage tag, the fields and the rounded duration."""
    start = time.perf_counter()
    with caplog.at_level("INFO", logger="gj_crazy_verify"):
        duration = log_completion("minimality", start, exit=0)
    assert isinstance(duration, float) and duration >= 0
    message = caplog.records[-1].message
    assert message.startswith("[minimality] Completed → exit=0 | duration=")
    assert message.endswith("s")
