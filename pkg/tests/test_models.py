"""
Test suite for the models module.

Tests the core data structures used throughout the application.
"""

from fractions import Fraction

import pytest

from src.errors import BistochasticityError, DimensionError, InputError, RankingError
from src.models import (
    Assignment,
    Counterexample,
    DominanceRelation,
    DominanceVerdict,
    PreferenceOrder,
    PreferenceProfile,
    canonical,
)


class TestPreferenceOrder:
    """Test cases for PreferenceOrder dataclass."""

    def test_parse_string(self):
        """Test parsing of the a>b>c form."""
        order = PreferenceOrder.parse("b > a > c")

        assert order.ranking == ("b", "a", "c")
        assert order.rank("b") == 0
        assert order.rank("c") == 2
        assert str(order) == "b>a>c"

    def test_parse_sequence_and_identity(self):
        """Test that sequences and existing orders are accepted."""
        order = PreferenceOrder.parse(["a", "b"])
        assert PreferenceOrder.parse(order) is order

    def test_prefers(self):
        """Test strict preference between two objects."""
        order = PreferenceOrder.parse("a>b>c")
        assert order.prefers("a", "c")
        assert not order.prefers("c", "b")

    def test_objects_are_canonical(self):
        """Test that objects come back in natural order."""
        assert PreferenceOrder.parse("c>a>b").objects == ("a", "b", "c")

    def test_duplicate_object_rejected(self):
        """Test that a repeated object raises RankingError."""
        with pytest.raises(RankingError, match="Duplicate object 'a'"):
            PreferenceOrder.parse("a>b>a")

    def test_unknown_object_rank(self):
        """Test that ranking an unknown object raises InputError."""
        with pytest.raises(InputError):
            PreferenceOrder.parse("a>b").rank("z")


class TestPreferenceProfile:
    """Test cases for PreferenceProfile dataclass."""

    def test_canonical_agent_order(self):
        """Test that agent order does not depend on insertion order."""
        first = PreferenceProfile.from_orders({"10": "a>b", "2": "b>a"})
        second = PreferenceProfile.from_orders({"2": "b>a", "10": "a>b"})

        assert first == second
        assert hash(first) == hash(second)
        assert first.agents == ("2", "10"), "numeric labels sort numerically"

    def test_accessors(self, first_theorem_profile):
        """Test n, objects, order_of and agent_index."""
        profile = first_theorem_profile

        assert profile.n == 4
        assert profile.objects == ("a", "b", "c", "d")
        assert str(profile.order_of("4")) == "a>b>d>c"
        assert profile.agent_index("3") == 2
        assert profile.object_index("d") == 3

    def test_with_order(self, common_profile):
        """Test replacing one agent's order."""
        changed = common_profile.with_order("2", "b>a>c>d")

        assert str(changed.order_of("2")) == "b>a>c>d"
        assert str(common_profile.order_of("2")) == "a>b>c>d", "original untouched"

    def test_as_dict_and_str(self):
        """Test the mapping and text renderings."""
        profile = PreferenceProfile.from_orders({"1": "a>b", "2": "b>a"})
        assert profile.as_dict() == {"1": "a>b", "2": "b>a"}
        assert str(profile) == "1: a>b; 2: b>a"

    def test_different_object_sets_rejected(self):
        """Test that agents must rank the same objects."""
        with pytest.raises(RankingError, match="different object set"):
            PreferenceProfile.from_orders({"1": "a>b", "2": "a>c"})

    def test_dimension_mismatch_rejected(self):
        """Test that agents and objects must be equally many."""
        with pytest.raises(DimensionError):
            PreferenceProfile.from_orders({"1": "a>b>c", "2": "c>b>a"})

    def test_unknown_agent(self, common_profile):
        """Test that unknown agents raise InputError."""
        with pytest.raises(InputError, match="Unknown agent"):
            common_profile.order_of("9")


class TestAssignment:
    """Test cases for Assignment dataclass."""

    def test_from_rows_accepts_strings(self):
        """Test that p/q strings are converted to exact rationals."""
        assignment = Assignment.from_rows(
            ["1", "2"], ["a", "b"], [["1/3", "2/3"], ["2/3", "1/3"]]
        )

        assert assignment.entry("1", "b") == Fraction(2, 3)
        assert assignment.column("a") == (Fraction(1, 3), Fraction(2, 3))
        assert assignment.row("2")["b"] == Fraction(1, 3)
        assert assignment.n == 2

    def test_uniform(self):
        """Test the uniform matrix."""
        assignment = Assignment.uniform(["1", "2", "3"], ["a", "b", "c"])
        assert all(v == Fraction(1, 3) for row in assignment.entries for v in row)
        assert not assignment.is_deterministic()

    def test_permutation(self):
        """Test deterministic assignments built from a matching."""
        assignment = Assignment.permutation(["1", "2"], ["a", "b"], {"1": "b", "2": "a"})

        assert assignment.is_deterministic()
        assert assignment.entry("1", "b") == 1
        assert assignment.entry("1", "a") == 0

    def test_row_sum_violation(self):
        """Test that a row not summing to one is rejected."""
        with pytest.raises(BistochasticityError, match="sums to"):
            Assignment.from_rows(["1", "2"], ["a", "b"], [["1/2", "1/3"], ["1/2", "2/3"]])

    def test_column_sum_violation(self):
        """Test that a column not summing to one is rejected."""
        with pytest.raises(BistochasticityError, match="Column 1"):
            Assignment.from_rows(["1", "2"], ["a", "b"], [[1, 0], [1, 0]])

    def test_negative_entry_rejected(self):
        """Test that entries outside [0, 1] are rejected."""
        with pytest.raises(BistochasticityError):
            Assignment.from_rows(["1", "2"], ["a", "b"], [[2, -1], [-1, 2]])

    def test_ragged_matrix_rejected(self):
        """Test that a ragged matrix raises DimensionError."""
        with pytest.raises(DimensionError):
            Assignment(("1", "2"), ("a", "b"), ((Fraction(1),), (Fraction(0), Fraction(1))))

    def test_to_lists(self):
        """Test conversion to nested lists."""
        assignment = Assignment.permutation(["1", "2"], ["a", "b"], {"1": "a", "2": "b"})
        assert assignment.to_lists() == [[1, 0], [0, 1]]


class TestDominanceVerdict:
    """Test cases for DominanceVerdict."""

    def test_weak_and_strict_flags(self):
        """Test the convenience properties for every relation."""
        strict = DominanceVerdict(DominanceRelation.STRICTLY_DOMINATES, witness="a")
        equal = DominanceVerdict(DominanceRelation.EQUAL)
        incomparable = DominanceVerdict(DominanceRelation.INCOMPARABLE, witness="b")

        assert strict.weakly_dominates and strict.strictly_dominates
        assert equal.weakly_dominates and not equal.strictly_dominates
        assert not incomparable.weakly_dominates


class TestCounterexample:
    """Test cases for Counterexample rendering."""

    def test_describe_with_swap(self, common_profile):
        """Test the one-line rendering of a misreport counterexample."""
        other = common_profile.with_order("1", "b>a>c>d")
        example = Counterexample(
            clause="swap-monotonicity",
            profile=common_profile,
            agent="1",
            pair=("a", "b"),
            other_profile=other,
            entries={"(1,a)": "1/4 -> 1/2"},
        )

        text = example.describe()
        assert text.startswith("swap-monotonicity at 1: a>b>c>d")
        assert "agent 1 swaps a,b" in text
        assert text.endswith("(1,a) 1/4 -> 1/2")

    def test_sort_key_is_deterministic(self, common_profile):
        """Test that sort keys order by profile then agent."""
        first = Counterexample("anonymity", common_profile, agent="1")
        second = Counterexample("anonymity", common_profile, agent="2")
        assert sorted([second, first], key=Counterexample.sort_key) == [first, second]


def test_canonical_mixed_labels():
    """Test natural order with numeric and textual labels."""
    assert canonical(["b", "10", "2", "a"]) == ("2", "10", "a", "b")
