import pathlib
import subprocess
import sys

import pytest

CHANNEL = pathlib.Path(__file__).resolve().parents[2] / "channels" / "example.json"


def _run(*args):
    subprocess.run([sys.executable, "-m", "twoway_covert.cli", *args],
                   check=True, capture_output=True)


@pytest.fixture(scope="session")
def region_csvs(tmp_path_factory):
    """pts.csv / capacity.csv produced by the twoway-covert CLI."""
    out = tmp_path_factory.mktemp("region")
    _run("region", str(CHANNEL), "--grid", "51",
         "--simplex-resolution", "10", "--out", str(out))
    return out / "pts.csv", out / "capacity.csv"


@pytest.fixture(scope="session")
def scaling_csvs(tmp_path_factory):
    """STS and TS scaling tables produced by the twoway-covert CLI."""
    out = tmp_path_factory.mktemp("scaling")
    sts = out / "sts.csv"
    ts = out / "ts.csv"
    _run("scaling", str(CHANNEL), "--scheme", "sts", "--q1", "0.9",
         "--q2", "0.9", "--out", str(sts))
    _run("scaling", str(CHANNEL), "--scheme", "ts", "--q1", "0.9",
         "--out", str(ts))
    return sts, ts
