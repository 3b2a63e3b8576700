"""
Test suite for the dominance module.

Tests first order stochastic dominance of rows and assignments.
"""

from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st
import pytest

from conftest import matrix
from property_settings import STANDARD_SETTINGS
from src.errors import DimensionError, InputError
from src.dominance import fosd_compare, ordinal_dominance
from src.models import AssignmentRow, DominanceRelation, PreferenceOrder

ORDER = PreferenceOrder.parse("a>b>c>d")


def row(*values: str) -> AssignmentRow:
    """Row over a..d from p/q strings."""
    return AssignmentRow(("a", "b", "c", "d"), tuple(Fraction(v) for v in values))


class TestFosdCompare:
    """Test cases for fosd_compare."""

    def test_equal_rows(self):
        """Test that identical rows compare Equal."""
        x = row("1/4", "1/4", "1/4", "1/4")
        assert fosd_compare(x, x, ORDER).relation is DominanceRelation.EQUAL

    def test_strict_dominance_witness(self):
        """Test the first strict prefix as witness."""
        x = row("1/4", "1/2", "0", "1/4")
        y = row("1/4", "1/4", "1/4", "1/4")

        verdict = fosd_compare(x, y, ORDER)
        assert verdict.relation is DominanceRelation.STRICTLY_DOMINATES
        assert verdict.witness == "b"

    def test_incomparable_witness(self):
        """Test the first violated prefix as witness."""
        x = row("1/2", "0", "0", "1/2")
        y = row("1/4", "1/4", "1/4", "1/4")

        verdict = fosd_compare(x, y, ORDER)
        assert verdict.relation is DominanceRelation.INCOMPARABLE
        assert verdict.witness == "c"

    def test_order_matters(self):
        """Test that the same rows compare differently at another order."""
        x = row("1", "0", "0", "0")
        y = row("0", "1", "0", "0")
        assert fosd_compare(x, y, ORDER).strictly_dominates
        assert not fosd_compare(x, y, PreferenceOrder.parse("b>a>c>d")).weakly_dominates

    def test_object_mismatch(self):
        """Test rows over other objects raise InputError."""
        other = AssignmentRow(("a", "b", "c", "e"), (Fraction(1), 0, 0, 0))
        with pytest.raises(InputError):
            fosd_compare(row("1", "0", "0", "0"), other, ORDER)

    @pytest.mark.property
    @given(
        st.lists(st.integers(min_value=0, max_value=12), min_size=4, max_size=4).filter(
            lambda weights: sum(weights) > 0
        )
    )
    @STANDARD_SETTINGS
    def test_every_lottery_weakly_dominates_itself(self, weights):
        """Dominance is reflexive."""
        total = sum(weights)
        x = row(*(str(Fraction(w, total)) for w in weights))
        assert fosd_compare(x, x, ORDER).weakly_dominates


class TestOrdinalDominance:
    """Test cases for ordinal_dominance."""

    def test_ps_dominates_uniform(self, first_theorem_profile):
        """Test that a c-for-d trade dominates the uniform matrix."""
        x = matrix(
            "1/4 1/4 1/3 1/6",
            "1/4 1/4 1/3 1/6",
            "1/4 1/4 1/3 1/6",
            "1/4 1/4 0 1/2",
        )
        y = matrix(*["1/4 1/4 1/4 1/4"] * 4)

        verdict = ordinal_dominance(x, y, first_theorem_profile)
        assert verdict.relation is DominanceRelation.STRICTLY_DOMINATES
        assert verdict.agent == "1"
        assert verdict.witness == "c"

    def test_incomparable_reports_agent(self, first_theorem_profile):
        """Test that the breaking agent and object are reported."""
        y = matrix(
            "1/4 1/4 1/3 1/6",
            "1/4 1/4 1/3 1/6",
            "1/4 1/4 1/3 1/6",
            "1/4 1/4 0 1/2",
        )
        x = matrix(*["1/4 1/4 1/4 1/4"] * 4)

        verdict = ordinal_dominance(x, y, first_theorem_profile)
        assert verdict.relation is DominanceRelation.INCOMPARABLE
        assert verdict.agent == "1"
        assert verdict.witness == "c"

    def test_equal_assignments(self, common_profile):
        """Test Equal for identical matrices."""
        x = matrix(*["1/4 1/4 1/4 1/4"] * 4)
        assert ordinal_dominance(x, x, common_profile).relation is DominanceRelation.EQUAL

    def test_dimension_mismatch(self, three_agent_profile):
        """Test that mismatched labels raise DimensionError."""
        x = matrix(*["1/4 1/4 1/4 1/4"] * 4)
        with pytest.raises(DimensionError):
            ordinal_dominance(x, x, three_agent_profile)
