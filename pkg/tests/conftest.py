from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from audel.frames import load_frame
from audel.model import load_model
from audel.semantics import EvalContext
from audel.testkit import bundled_data

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

DATA = bundled_data()


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture
def gruffalo_ctx() -> EvalContext:
    return EvalContext(directory=DATA / "gruffalo")


@pytest.fixture(scope="session")
def m0():
    return load_model(DATA / "gruffalo" / "M0.json")


def dorm(name):
    """(model, frame) of a bundled dorm example."""
    return load_model(DATA / "dorm" / f"{name}_model.json"), load_frame(DATA / "dorm" / f"{name}.json")


ACCEPTANCE: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
            terminalreporter.write_line(ACCEPTANCE[key])
