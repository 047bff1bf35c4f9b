from importlib import resources

import numpy as np
import pytest

from layernc import formats


def data_path(name):
    return resources.files("layernc") / "data" / name


@pytest.fixture
def fig2():
    return formats.network_from_json(formats.read_json(data_path("fig2.json")))


@pytest.fixture
def two_layer():
    return formats.load_any(formats.read_json(data_path("two_layer.json")))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# criterion number -> (passed, seconds, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, float, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, secs, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({secs:.2f}s) {detail}")
