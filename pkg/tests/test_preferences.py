"""
Test suite for the preferences module.

Tests swaps, contour sets, relabelings and domain enumeration.
"""

from hypothesis import given
from hypothesis import strategies as st
import pytest

from property_settings import STANDARD_SETTINGS
from src.errors import InputError
from src.models import PreferenceOrder, PreferenceProfile
from src.preferences import (
    adjacent_swaps,
    all_orders,
    all_profiles,
    contour_sets,
    default_labels,
    neighbours,
    relabel_objects,
    swap_agents,
    swapped_pair,
)

orders = st.permutations(["a", "b", "c", "d"]).map(PreferenceOrder)


class TestLabels:
    """Test cases for default_labels."""

    def test_default_labels(self):
        """Test the standard agent and object names."""
        assert default_labels(3) == (("1", "2", "3"), ("a", "b", "c"))

    @pytest.mark.parametrize("n", [0, 27])
    def test_out_of_range(self, n):
        """Test that unsupported sizes raise InputError."""
        with pytest.raises(InputError):
            default_labels(n)


class TestSwaps:
    """Test cases for adjacent swaps."""

    def test_adjacent_swaps(self):
        """Test the n-1 neighbours of an order and their pairs."""
        swaps = adjacent_swaps(PreferenceOrder.parse("a>b>c"))

        assert [str(order) for order, _ in swaps] == ["b>a>c", "a>c>b"]
        assert [pair for _, pair in swaps] == [("a", "b"), ("b", "c")]

    def test_swapped_pair(self):
        """Test recovery of the exchanged pair."""
        order = PreferenceOrder.parse("a>b>c>d")
        assert swapped_pair(order, PreferenceOrder.parse("a>b>d>c")) == ("c", "d")

    def test_swapped_pair_rejects_non_neighbours(self):
        """Test that distant orders raise InputError."""
        with pytest.raises(InputError, match="adjacent swap"):
            swapped_pair(PreferenceOrder.parse("a>b>c"), PreferenceOrder.parse("c>b>a"))

    @pytest.mark.property
    @given(order=orders)
    @STANDARD_SETTINGS
    def test_swaps_are_involutions(self, order):
        """Swapping the same pair back restores the original order."""
        for neighbour, pair in adjacent_swaps(order):
            assert swapped_pair(neighbour, order) == (pair[1], pair[0])

    def test_neighbours(self, common_profile):
        """Test profiles reached by one adjacent misreport."""
        reached = neighbours(common_profile, "2")

        assert len(reached) == 3
        assert all(profile.order_of("1") == common_profile.order_of("1") for profile, _ in reached)
        assert reached[0][1] == ("a", "b")


class TestContourSets:
    """Test cases for contour_sets."""

    def test_contour_sets(self):
        """Test upper and lower contour sets of a middle object."""
        above, below = contour_sets(PreferenceOrder.parse("a>b>c>d"), "b")
        assert above == frozenset({"a"})
        assert below == frozenset({"c", "d"})

    @pytest.mark.property
    @given(order=orders)
    @STANDARD_SETTINGS
    def test_contour_sets_partition(self, order):
        """Upper set, lower set and the object itself partition the objects."""
        for obj in order.ranking:
            above, below = contour_sets(order, obj)
            assert above | below | {obj} == set(order.ranking)
            assert not above & below


class TestRelabelings:
    """Test cases for object relabelings and agent swaps."""

    def test_relabel_objects(self, first_theorem_profile):
        """Test exchanging two object names in every order."""
        relabeled = relabel_objects(first_theorem_profile, "c", "d")

        assert str(relabeled.order_of("1")) == "a>b>d>c"
        assert str(relabeled.order_of("4")) == "a>b>c>d"

    def test_relabel_rejects_same_object(self, common_profile):
        """Test that j = j' is refused."""
        with pytest.raises(InputError):
            relabel_objects(common_profile, "a", "a")

    def test_swap_agents(self, first_theorem_profile):
        """Test exchanging the orders of two agents."""
        swapped = swap_agents(first_theorem_profile, "1", "4")

        assert str(swapped.order_of("1")) == "a>b>d>c"
        assert str(swapped.order_of("4")) == "a>b>c>d"


class TestEnumeration:
    """Test cases for full-domain enumeration."""

    def test_all_orders(self):
        """Test that every permutation is produced once."""
        produced = list(all_orders(["a", "b", "c"]))
        assert len(produced) == 6
        assert len(set(produced)) == 6

    def test_all_profiles_count(self):
        """Test the (n!)^n size of the domain."""
        profiles = list(all_profiles(["1", "2"], ["a", "b"]))
        assert len(profiles) == 4
        assert all(isinstance(p, PreferenceProfile) for p in profiles)
