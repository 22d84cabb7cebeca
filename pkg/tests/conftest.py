import pytest

from leginet.corpus import MasterList, load_master_list
from leginet.extract import compile_rules
from leginet.golden import bundled_golden_dir


@pytest.fixture(scope="session")
def rules():
    return compile_rules()


@pytest.fixture(scope="session")
def golden_dir():
    return bundled_golden_dir()


@pytest.fixture(scope="session")
def golden_master(golden_dir):
    return load_master_list(golden_dir / "master.txt")


@pytest.fixture
def small_master():
    return MasterList([
        "companies act 1993",
        "married women property protection act 1860",
        "social security act 2018",
        "trade marks act 2002",
        "trade marks amendment act 2005",
        "trade marks amendment act 2011",
    ])


# criterion number -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
