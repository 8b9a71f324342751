import json
import logging

import pytest

from decoupled_renewal.app import configure_logging
from decoupled_renewal.util import Timer


@pytest.fixture
def configured_logging(app_config):
    configure_logging(app_config)
    yield logging.getLogger("decoupled_renewal")
    logging.getLogger("decoupled_renewal").setLevel(logging.INFO)


def test_records_are_json_with_extras(configured_logging):
    (handler,) = configured_logging.handlers
    timer = Timer("survival-table", context={"alpha": 0.5})
    record = timer.logger.makeRecord(
        timer.logger.name,
        logging.INFO,
        __file__,
        0,
        "survival-table [0.25s]",
        (),
        None,
        extra={"alpha": 0.5, "timer": {"name": "survival-table", "timerResult": 0.25}},
    )
    payload = json.loads(handler.format(record))
    assert payload["message"] == "survival-table [0.25s]"
    assert payload["levelname"] == "INFO"
    assert payload["name"] == "decoupled_renewal.timer"
    assert payload["alpha"] == 0.5
    assert payload["timer"] == {"name": "survival-table", "timerResult": 0.25}


def test_timer_records_reach_the_package_handler(configured_logging):
    assert logging.getLogger(Timer.logger_name).propagate
    assert not configured_logging.propagate


def test_level_override(app_config, configured_logging):
    configure_logging(app_config, level="debug")
    assert configured_logging.level == logging.DEBUG
