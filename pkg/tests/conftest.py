"""
Test configuration and utilities for the axiomlab project.
"""

from fractions import Fraction
from pathlib import Path
import sys

import pytest

# Add project root to Python path for testing
project_root = Path(__file__).parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from src.models import Assignment, PreferenceProfile  # noqa: E402

BASE_ORDER = "a>b>c>d"


# Pytest configuration
def pytest_configure(config):
    """Configure pytest with custom markers and settings."""
    config.addinivalue_line(
        "markers", "unit: marks tests as unit tests (deselect with '-m \"not unit\"')"
    )
    config.addinivalue_line(
        "markers",
        "integration: marks tests as integration tests (deselect with '-m \"not integration\"')",
    )
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line(
        "markers", "property: marks hypothesis property tests"
    )


def four_agent_profile(**overrides: str) -> PreferenceProfile:
    """Four agents ranking a>b>c>d except where overridden, e.g. ``a3="b>a>c>d"``."""
    orders = {str(i): BASE_ORDER for i in range(1, 5)}
    for key, order in overrides.items():
        orders[key.lstrip("a")] = order
    return PreferenceProfile.from_orders(orders)


def matrix(*rows: str) -> Assignment:
    """Four-by-four assignment over agents 1..4 and objects a..d from row strings."""
    agents = [str(i) for i in range(1, len(rows) + 1)]
    objects = "abcdefghij"[: len(rows)]
    return Assignment.from_rows(
        agents, list(objects), [[Fraction(v) for v in row.split()] for row in rows]
    )


# Common test fixtures
@pytest.fixture
def common_profile():
    """Every agent ranks a>b>c>d."""
    return four_agent_profile()


@pytest.fixture
def first_theorem_profile():
    """Agent 4 swaps c and d at the bottom of the common order."""
    return four_agent_profile(a4="a>b>d>c")


@pytest.fixture
def second_theorem_profile():
    """Two agents rank a>b>c>d, two rank b>a>d>c."""
    return four_agent_profile(a3="b>a>d>c", a4="b>a>d>c")


@pytest.fixture
def three_agent_profile():
    """Small profile for exhaustive checks."""
    return PreferenceProfile.from_orders({"1": "a>b>c", "2": "a>c>b", "3": "b>a>c"})


@pytest.fixture
def sample_report():
    """Report mapping as produced by the command line."""
    return {
        "command": "check",
        "text": "swap-monotonicity: HOLDS (6 profiles, 12 transitions)",
        "records": [
            {"axiom": "swap-monotonicity", "holds": True, "checked": 12},
            {"axiom": "anonymity", "holds": False, "checked": 6},
        ],
    }
