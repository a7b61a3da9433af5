import json
import os
from pathlib import Path

import pytest
from hypothesis import settings

# property tests replay the same examples unless HYPOTHESIS_PROFILE=explore
settings.register_profile("repeatable", derandomize=True, database=None)
settings.register_profile("explore", database=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repeatable"))

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    if report.when == "call" or report.outcome != "passed":
        _criteria[number] = (title, "PASS" if report.passed else "FAIL")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    m = item.get_closest_marker("criterion")
    if m is not None:
        outcome.get_result().criterion = tuple(m.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, verdict = _criteria[number]
        terminalreporter.write_line(f"{verdict}  criterion {number:>2}: {title}")


@pytest.fixture
def config_path():
    def get(name: str) -> Path:
        return CONFIG_DIR / name
    return get


@pytest.fixture
def write_config(tmp_path):
    def write(data: dict, name: str = "cfg.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return path
    return write
