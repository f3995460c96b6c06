import pathlib

import pytest

from twoway_covert import parse_channel

ROOT = pathlib.Path(__file__).resolve().parents[1]
EXAMPLE_PATH = ROOT / "channels" / "example.json"
ALARM_PATH = ROOT / "channels" / "example_alarm.json"


@pytest.fixture(scope="session")
def example_channel():
    """The worked three/four-symbol example channel (no alarm symbol)."""
    return parse_channel(EXAMPLE_PATH.read_text())


@pytest.fixture(scope="session")
def alarm_channel():
    """Same kernels on an extended eavesdropper alphabet with an alarm
    symbol that fires only on simultaneous 1-inputs."""
    return parse_channel(ALARM_PATH.read_text())
