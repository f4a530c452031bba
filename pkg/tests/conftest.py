from pathlib import Path

import pytest

from varfont import parse_font

DATA = Path(__file__).parent / "data"
FIXTURES = DATA / "fixtures"
REAL_FONT = DATA / "real" / "SourceSans3VF-Upright.ttf"


def fixture_bytes(stem):
    return (FIXTURES / f"{stem}.ttf").read_bytes()


@pytest.fixture(scope="session")
def fix1():
    return parse_font(fixture_bytes("fix1"))


@pytest.fixture(scope="session")
def fix2():
    return parse_font(fixture_bytes("fix2"))


@pytest.fixture(scope="session")
def fix3():
    return parse_font(fixture_bytes("fix3"))


@pytest.fixture(scope="session")
def all_fixtures(fix1, fix2, fix3):
    return {"fix1": fix1, "fix2": fix2, "fix3": fix3}


@pytest.fixture(scope="session")
def real_font():
    return parse_font(REAL_FONT.read_bytes())
