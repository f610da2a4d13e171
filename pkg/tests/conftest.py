from pathlib import Path

import pytest

from lcris import parse_scenario, run

REPO_ROOT = Path(__file__).resolve().parent.parent
FIG4_SCENARIO = REPO_ROOT / "scenarios" / "fig4.scenario"


@pytest.fixture(scope="session")
def fig4_scenario():
    return parse_scenario(FIG4_SCENARIO)


@pytest.fixture(scope="session")
def fig4_result(fig4_scenario):
    return run(fig4_scenario)
