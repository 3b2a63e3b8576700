"""
Test suite for the efficiency module.

Tests the trading relation, strict dominators and ex-post efficiency.
"""

from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st
import pytest

from conftest import matrix
from property_settings import SLOW_SETTINGS
from src.config import Config
from src.domains import ExhaustiveDomain, SampledDomain
from src.dominance import ordinal_dominance
from src.efficiency import (
    find_strict_dominator,
    has_trading_cycle,
    is_expost_efficient,
    is_ordinally_efficient,
    pareto_undominated_permutations,
    trading_graph,
)
from src.errors import CapacityError, DimensionError
from src.mechanisms import ps, random_table, rsd
from src.models import Assignment, PreferenceOrder, PreferenceProfile

UNIFORM = ["1/4 1/4 1/4 1/4"] * 4

three_agent_profiles = st.lists(
    st.permutations(["a", "b", "c"]), min_size=3, max_size=3
).map(
    lambda orders: PreferenceProfile(
        ("1", "2", "3"), tuple(PreferenceOrder(tuple(o)) for o in orders)
    )
)
three_agent_matrices = st.lists(
    st.tuples(st.integers(min_value=1, max_value=4), st.permutations(range(3))),
    min_size=1,
    max_size=4,
).map(
    lambda components: Assignment(
        ("1", "2", "3"),
        ("a", "b", "c"),
        tuple(
            tuple(
                sum(
                    (Fraction(w, sum(v for v, _ in components)) for w, p in components if p[i] == j),
                    Fraction(0),
                )
                for j in range(3)
            )
            for i in range(3)
        ),
    )
)


class TestTradingRelation:
    """Test cases for the trading graph and ordinal efficiency."""

    def test_uniform_at_identical_preferences(self, common_profile):
        """Test that edges only run from better to worse objects."""
        x = matrix(*UNIFORM)
        graph = trading_graph(x, common_profile)

        assert set(graph.edges) == {
            ("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")
        }
        certificate = is_ordinally_efficient(x, common_profile)
        assert certificate.efficient
        assert certificate.topological_order == ["a", "b", "c", "d"]
        assert certificate.witness is None

    def test_raised_entry_creates_two_cycle(self, first_theorem_profile):
        """Test that agent 4 holding c while preferring d closes a cycle."""
        x = matrix(
            "1/4 1/4 1/4 1/4",
            "1/4 1/4 1/3 1/6",
            "1/4 1/4 1/3 1/6",
            "1/4 1/4 1/12 5/12",
        )

        assert has_trading_cycle(x, first_theorem_profile)
        certificate = is_ordinally_efficient(x, first_theorem_profile)
        assert not certificate.efficient
        assert {(better, worse) for better, worse, _ in certificate.cycle} == {("c", "d"), ("d", "c")}
        assert ordinal_dominance(certificate.witness, x, first_theorem_profile).strictly_dominates

    def test_rsd_is_dominated(self, second_theorem_profile):
        """Test that the RSD matrix is ordinally inefficient and PS dominates it."""
        x = rsd(second_theorem_profile)
        certificate = is_ordinally_efficient(x, second_theorem_profile)

        assert not certificate.efficient
        assert certificate.witness is not None
        assert ordinal_dominance(ps(second_theorem_profile), x, second_theorem_profile).strictly_dominates

    def test_ps_is_efficient(self, first_theorem_profile):
        """Test that the PS outcome has an acyclic trading relation."""
        assert is_ordinally_efficient(ps(first_theorem_profile), first_theorem_profile).efficient

    def test_misaligned_inputs(self, three_agent_profile):
        """Test that a 4x4 matrix does not fit a three-agent profile."""
        with pytest.raises(DimensionError):
            trading_graph(matrix(*UNIFORM), three_agent_profile)


class TestStrictDominator:
    """Test cases for the LP dominator search."""

    def test_efficient_input_has_no_dominator(self, first_theorem_profile):
        """Test that PS outputs have no strict dominator."""
        assert find_strict_dominator(ps(first_theorem_profile), first_theorem_profile) is None

    def test_rsd_has_dominator(self, second_theorem_profile):
        """Test that the LP finds a strict dominator of the RSD matrix."""
        x = rsd(second_theorem_profile)
        dominator = find_strict_dominator(x, second_theorem_profile)

        assert dominator is not None
        assert ordinal_dominance(dominator, x, second_theorem_profile).strictly_dominates

    @pytest.mark.property
    @given(profile=three_agent_profiles, x=three_agent_matrices)
    @SLOW_SETTINGS
    def test_oracles_agree(self, profile, x):
        """The trading relation and the dominator LP reach the same verdict."""
        certificate = is_ordinally_efficient(x, profile)
        dominator = find_strict_dominator(x, profile)

        assert certificate.efficient == (dominator is None)
        if dominator is not None:
            assert ordinal_dominance(dominator, x, profile).strictly_dominates

    @pytest.mark.slow
    def test_oracles_agree_on_three_agent_mechanism_outputs(self):
        """Test agreement on every RSD and PS output at n=3."""
        for profile in ExhaustiveDomain(3).profiles():
            for x in (rsd(profile), ps(profile)):
                efficient = is_ordinally_efficient(x, profile).efficient
                assert efficient == (find_strict_dominator(x, profile) is None), str(profile)

    @pytest.mark.slow
    @pytest.mark.parametrize("max_components", [2, None])
    def test_oracles_agree_on_sampled_four_agent_matrices(self, max_components):
        """Test agreement on 1000 seeded random matrices at n=4."""
        profiles = SampledDomain(4, 1000, seed=7).profiles()
        table = random_table(4, profiles, seed=7, max_components=max_components)
        disagreements = []
        verdicts = set()
        for profile in profiles:
            x = table.evaluate(profile)
            efficient = is_ordinally_efficient(x, profile).efficient
            verdicts.add(efficient)
            if efficient != (find_strict_dominator(x, profile) is None):
                disagreements.append(profile)

        assert len(profiles) > 990
        assert disagreements == []
        if max_components == 2:
            assert verdicts == {True, False}, "sparse mixtures should hit both verdicts"


class TestExPostEfficiency:
    """Test cases for ex-post efficiency."""

    def test_all_permutations_undominated_at_identical_preferences(self, common_profile):
        """Test that every deterministic assignment is efficient when all agree."""
        assert len(pareto_undominated_permutations(common_profile)) == 24

    def test_uniform_is_expost_efficient(self, common_profile):
        """Test the uniform matrix at identical preferences."""
        certificate = is_expost_efficient(matrix(*UNIFORM), common_profile)

        assert certificate.efficient
        assert certificate.undominated == 24
        assert sum(weight for weight, _ in certificate.lottery) == 1

    def test_rsd_is_expost_but_not_ordinally_efficient(self, second_theorem_profile):
        """Test the gap between ex-post and ordinal efficiency."""
        x = rsd(second_theorem_profile)
        certificate = is_expost_efficient(x, second_theorem_profile)

        assert certificate.efficient
        assert all(p.is_deterministic() for _, p in certificate.lottery)
        assert not is_ordinally_efficient(x, second_theorem_profile).efficient

    def test_deterministic_efficient_assignment(self, second_theorem_profile):
        """Test that an efficient permutation is its own lottery."""
        x = Assignment.permutation(
            second_theorem_profile.agents,
            second_theorem_profile.objects,
            {"1": "a", "2": "c", "3": "b", "4": "d"},
        )
        certificate = is_expost_efficient(x, second_theorem_profile)

        assert certificate.efficient
        assert certificate.lottery == [(1, x)]

    def test_dominated_permutation(self, three_agent_profile):
        """Test that a Pareto-dominated permutation is not ex-post efficient."""
        # 1: a>b>c gets c, 3: b>a>c gets a; swapping them helps both
        x = Assignment.permutation(("1", "2", "3"), ("a", "b", "c"), {"1": "c", "2": "b", "3": "a"})
        assert not is_expost_efficient(x, three_agent_profile).efficient

    def test_capacity(self, monkeypatch, common_profile):
        """Test the enumeration cap."""
        monkeypatch.setattr(Config, "EXPOST_MAX_AGENTS", 3)
        with pytest.raises(CapacityError, match="AXIOMLAB_EXPOST_MAX_AGENTS"):
            is_expost_efficient(matrix(*UNIFORM), common_profile)
