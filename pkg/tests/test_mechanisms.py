"""
Test suite for the mechanisms module.

Tests serial dictatorship, RSD, PS and table mechanisms.
"""

from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st
import pytest

from conftest import four_agent_profile, matrix
from property_settings import SLOW_SETTINGS
from src.config import Config
from src.errors import CapacityError, DimensionError, DomainError, InputError
from src.mechanisms import (
    MechanismFactory,
    ProbabilisticSerial,
    RandomSerialDictatorship,
    SerialDictatorship,
    TableMechanism,
    ps,
    random_table,
    rsd,
    serial_dictatorship,
    table_from_mechanism,
)
from src.models import Assignment, PreferenceProfile
from src.preferences import all_profiles

ORDERS = ["a>b>c>d", "a>b>d>c", "b>a>c>d", "b>a>d>c", "a>d>b>c", "d>b>c>a"]

four_agent_profiles = st.lists(
    st.sampled_from(ORDERS), min_size=4, max_size=4
).map(lambda orders: PreferenceProfile.from_orders({str(i + 1): o for i, o in enumerate(orders)}))


class TestSerialDictatorship:
    """Test cases for serial dictatorship."""

    def test_priority_order(self, second_theorem_profile):
        """Test that each dictator takes the favourite remaining object."""
        taken = serial_dictatorship(second_theorem_profile, ["3", "1", "4", "2"])
        assert taken == {"3": "b", "1": "a", "4": "d", "2": "c"}

    def test_invalid_priority(self, common_profile):
        """Test that the priority must list every agent once."""
        with pytest.raises(InputError):
            serial_dictatorship(common_profile, ["1", "2", "3"])

    def test_mechanism_default_priority(self, common_profile):
        """Test the deterministic mechanism with agent order as priority."""
        assignment = SerialDictatorship().evaluate(common_profile)
        assert assignment == Assignment.permutation(
            common_profile.agents, common_profile.objects, {"1": "a", "2": "b", "3": "c", "4": "d"}
        )

    def test_priority_outside_domain(self, three_agent_profile):
        """Test that a priority over other agents is out of domain."""
        mechanism = SerialDictatorship(["1", "2"])
        assert not mechanism.in_domain(three_agent_profile)
        with pytest.raises(DomainError):
            mechanism.evaluate(three_agent_profile)


class TestRandomSerialDictatorship:
    """Test cases for RSD."""

    def test_second_theorem_profile(self, second_theorem_profile):
        """Test the exact RSD matrix over all 24 priority orders."""
        assignment = rsd(second_theorem_profile)

        assert assignment == matrix(
            "5/12 1/12 5/12 1/12",
            "5/12 1/12 5/12 1/12",
            "1/12 5/12 1/12 5/12",
            "1/12 5/12 1/12 5/12",
        )

    def test_identical_preferences_give_uniform(self, common_profile):
        """Test that RSD is uniform when everyone agrees."""
        assert rsd(common_profile) == Assignment.uniform(common_profile.agents, common_profile.objects)

    def test_capacity(self, monkeypatch, common_profile):
        """Test that the enumeration cap raises CapacityError."""
        monkeypatch.setattr(Config, "RSD_MAX_AGENTS", 3)
        with pytest.raises(CapacityError, match="AXIOMLAB_RSD_MAX_AGENTS"):
            rsd(common_profile)
        assert not RandomSerialDictatorship().in_domain(common_profile)

    @pytest.mark.slow
    def test_symmetric_on_full_three_agent_domain(self):
        """Test equal rows for equal orders on every n=3 profile."""
        for profile in all_profiles(["1", "2", "3"], ["a", "b", "c"]):
            assignment = rsd(profile)
            for i, first in enumerate(profile.agents):
                for second in profile.agents[i + 1 :]:
                    if profile.order_of(first) == profile.order_of(second):
                        assert assignment.row(first) == assignment.row(second), str(profile)


class TestProbabilisticSerial:
    """Test cases for PS."""

    def test_first_theorem_profile(self, first_theorem_profile):
        """Test the eating outcome when agent 4 swaps c and d."""
        assert ps(first_theorem_profile) == matrix(
            "1/4 1/4 1/3 1/6",
            "1/4 1/4 1/3 1/6",
            "1/4 1/4 1/3 1/6",
            "1/4 1/4 0 1/2",
        )

    def test_second_theorem_profile(self, second_theorem_profile):
        """Test the eating outcome with two disjoint groups."""
        assert ps(second_theorem_profile) == matrix(
            "1/2 0 1/2 0",
            "1/2 0 1/2 0",
            "0 1/2 0 1/2",
            "0 1/2 0 1/2",
        )

    def test_identical_preferences_give_uniform(self, common_profile):
        """Test that PS is uniform when everyone agrees."""
        assert ProbabilisticSerial().evaluate(common_profile) == Assignment.uniform(
            common_profile.agents, common_profile.objects
        )

    def test_single_agent(self):
        """Test the trivial one-agent profile."""
        profile = PreferenceProfile.from_orders({"1": "a"})
        assert ps(profile).entry("1", "a") == 1

    @pytest.mark.property
    @given(profile=four_agent_profiles)
    @SLOW_SETTINGS
    def test_outputs_are_bistochastic(self, profile):
        """PS and RSD always produce valid assignments with equal rows for equal orders."""
        for assignment in (ps(profile), rsd(profile)):
            assert assignment.agents == profile.agents
            for first, order in zip(profile.agents, profile.orders):
                for second in profile.agents:
                    if profile.order_of(second) == order:
                        assert assignment.row(first) == assignment.row(second)


class TestTableMechanism:
    """Test cases for table-backed mechanisms."""

    def setup_method(self):
        """Set up test fixtures."""
        self.profile = four_agent_profile(a4="a>b>d>c")
        self.assignment = matrix(
            "1/4 1/4 1/3 1/6",
            "1/4 1/4 1/3 1/6",
            "1/4 1/4 1/3 1/6",
            "1/4 1/4 0 1/2",
        )

    def test_lookup(self):
        """Test that stored matrices are returned unmodified."""
        table = TableMechanism({self.profile: self.assignment}, name="fixture")

        assert table.name == "fixture"
        assert len(table) == 1
        assert table.evaluate(self.profile) is self.assignment
        assert table.lookup(four_agent_profile()) is None

    def test_outside_domain(self):
        """Test that unknown profiles raise DomainError."""
        table = TableMechanism({self.profile: self.assignment})
        with pytest.raises(DomainError, match="outside the domain"):
            table.evaluate(four_agent_profile())

    def test_misaligned_matrix(self, three_agent_profile):
        """Test that a matrix over other labels is rejected."""
        with pytest.raises(DimensionError):
            TableMechanism({three_agent_profile: self.assignment})

    def test_conflicting_entries(self):
        """Test that the same profile with two matrices is rejected."""
        uniform = Assignment.uniform(self.profile.agents, self.profile.objects)
        with pytest.raises(InputError, match="appears twice"):
            TableMechanism.from_entries([(self.profile, self.assignment), (self.profile, uniform)])

    def test_table_from_mechanism(self, common_profile):
        """Test materializing PS on two profiles."""
        table = table_from_mechanism(ProbabilisticSerial(), [common_profile, self.profile])
        assert table.name == "ps"
        assert table.profiles == [common_profile, self.profile]
        assert table.evaluate(self.profile) == self.assignment

    def test_random_table_is_seeded(self, three_agent_profile):
        """Test that random tables depend only on the seed."""
        first = random_table(3, [three_agent_profile], seed=7)
        second = random_table(3, [three_agent_profile], seed=7)

        assert first.evaluate(three_agent_profile) == second.evaluate(three_agent_profile)
        assert first.name == "random:7"

    def test_random_table_rejects_wrong_size(self, three_agent_profile):
        """Test that every profile must have n agents."""
        with pytest.raises(DimensionError):
            random_table(4, [three_agent_profile], seed=0)
        with pytest.raises(InputError):
            random_table(1, [], seed=0)

    def test_random_table_entries_are_exact(self, three_agent_profile):
        """Test that generated entries are rationals with small denominators."""
        assignment = random_table(3, [three_agent_profile], seed=3).evaluate(three_agent_profile)
        assert all(isinstance(v, Fraction) for row in assignment.entries for v in row)


class TestMechanismFactory:
    """Test cases for MechanismFactory."""

    @pytest.mark.parametrize("selector, name", [("rsd", "rsd"), ("PS", "ps"), ("sd", "sd")])
    def test_builtin_selectors(self, selector, name):
        """Test the built-in selectors."""
        assert MechanismFactory.create_mechanism(selector).name == name

    def test_unknown_selector(self):
        """Test that unknown selectors list the supported ones."""
        with pytest.raises(InputError, match="Supported mechanisms: rsd, ps, sd"):
            MechanismFactory.create_mechanism("boston")

    def test_missing_table_file(self, tmp_path):
        """Test that a missing table file is reported."""
        with pytest.raises(InputError, match="does not exist"):
            MechanismFactory.create_mechanism(f"table:{tmp_path / 'missing.txt'}")

    def test_table_file(self, tmp_path, second_theorem_profile):
        """Test loading a table mechanism from disk."""
        path = tmp_path / "table.txt"
        path.write_text(
            "1: a>b>c>d\n2: a>b>c>d\n3: b>a>d>c\n4: b>a>d>c\n\n"
            "a b c d\n1/2 0 1/2 0\n1/2 0 1/2 0\n0 1/2 0 1/2\n0 1/2 0 1/2\n",
            encoding="utf-8",
        )

        mechanism = MechanismFactory.create_mechanism(f"table:{path}")
        assert mechanism.name == "table:table.txt"
        assert mechanism.evaluate(second_theorem_profile) == ps(second_theorem_profile)

    def test_supported_list(self):
        """Test the advertised selectors."""
        assert MechanismFactory.get_supported_mechanisms() == ["rsd", "ps", "sd", "table:<path>"]
