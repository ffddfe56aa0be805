import pathlib

import pytest

from elens.dsl import parse_case

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent
GOLDEN_PATH = REPO_ROOT / "examples" / "transparency.elens"
HR_PATH = REPO_ROOT / "examples" / "hr_shortlisting.elens"


@pytest.fixture(scope="session")
def golden_text() -> str:
    return GOLDEN_PATH.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def hr_text() -> str:
    return HR_PATH.read_text(encoding="utf-8")


@pytest.fixture
def golden_case(golden_text):
    return parse_case(golden_text)


@pytest.fixture
def hr_case(hr_text):
    return parse_case(hr_text)
