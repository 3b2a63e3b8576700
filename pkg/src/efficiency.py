"""
Efficiency oracles.

This module decides ordinal efficiency through the trading relation over
objects, searches for strict ordinal dominators by exact LP, and decides
ex-post efficiency as a lottery over Pareto-undominated deterministic
assignments.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
import logging
from typing import Dict, List, Optional, Tuple

import networkx as nx

from .config import Config
from .dominance import ordinal_dominance
from .errors import CapacityError, DimensionError
from .models import ZERO, Assignment, PreferenceProfile
from .simplex import LinearSystem, LPStatus, lp_solve

logger = logging.getLogger(__name__)

EFFICIENT = "efficient"
DOMINATED = "dominated"


@dataclass
class EfficiencyCertificate:
    """
    Ordinal efficiency verdict.

    Efficient matrices carry a topological order of the acyclic trading
    relation; dominated ones carry a trading cycle and a strict dominator.
    """

    verdict: str
    witness: Optional[Assignment] = None
    topological_order: Optional[List[str]] = None
    cycle: List[Tuple[str, str, str]] = field(default_factory=list)

    @property
    def efficient(self) -> bool:
        """True when no strict dominator exists."""
        return self.verdict == EFFICIENT


@dataclass
class ExPostCertificate:
    """Ex-post efficiency verdict with the lottery found by the LP."""

    efficient: bool
    lottery: List[Tuple[Fraction, Assignment]] = field(default_factory=list)
    undominated: int = 0


def _check_alignment(x: Assignment, profile: PreferenceProfile) -> None:
    if x.agents != profile.agents or x.objects != profile.objects:
        raise DimensionError(
            f"Assignment over {list(x.agents)} x {list(x.objects)} does not fit {profile}"
        )


def trading_graph(x: Assignment, profile: PreferenceProfile) -> nx.DiGraph:
    """
    Trading relation over objects.

    There is an edge j -> j' when some agent strictly prefers j to j' while
    holding j' with positive probability; the edge records that agent.

    Args:
        x: Assignment
        profile: Preferences

    Returns:
        Directed graph whose nodes are all objects
    """
    _check_alignment(x, profile)
    graph = nx.DiGraph()
    graph.add_nodes_from(profile.objects)
    for row, agent, order in zip(x.entries, profile.agents, profile.orders):
        held = {obj for obj, value in zip(x.objects, row) if value > 0}
        for position, better in enumerate(order.ranking):
            for worse in order.ranking[position + 1 :]:
                if worse in held and not graph.has_edge(better, worse):
                    graph.add_edge(better, worse, agent=agent)
    return graph


def has_trading_cycle(x: Assignment, profile: PreferenceProfile) -> bool:
    """True when the trading relation is cyclic."""
    return not nx.is_directed_acyclic_graph(trading_graph(x, profile))


def is_ordinally_efficient(x: Assignment, profile: PreferenceProfile) -> EfficiencyCertificate:
    """
    Decide ordinal efficiency by acyclicity of the trading relation.

    Args:
        x: Bistochastic assignment
        profile: Preferences

    Returns:
        EfficiencyCertificate; a dominated verdict carries a strict dominator
        built by trading half the smallest traded entry around a cycle
    """
    graph = trading_graph(x, profile)
    try:
        edges = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        order = list(nx.topological_sort(graph))
        return EfficiencyCertificate(EFFICIENT, topological_order=order)

    cycle = [(better, worse, graph.edges[better, worse]["agent"]) for better, worse in edges]
    epsilon = min(x.entry(agent, worse) for _, worse, agent in cycle) / 2
    entries = [list(row) for row in x.entries]
    for better, worse, agent in cycle:
        i = x.agents.index(agent)
        entries[i][x.objects.index(better)] += epsilon
        entries[i][x.objects.index(worse)] -= epsilon
    witness = Assignment(x.agents, x.objects, tuple(map(tuple, entries)))

    if not ordinal_dominance(witness, x, profile).strictly_dominates:
        raise ArithmeticError(f"Trade along {cycle} does not dominate the input")
    logger.debug(f"Trading cycle {cycle} with epsilon {epsilon}")
    return EfficiencyCertificate(DOMINATED, witness=witness, cycle=cycle)


def _prefix_terms(profile: PreferenceProfile) -> List[Tuple[int, List[int]]]:
    n = profile.n
    terms = []
    for i, order in enumerate(profile.orders):
        columns = [profile.objects.index(obj) for obj in order.ranking]
        for k in range(1, n):
            terms.append((i, [i * n + column for column in columns[:k]]))
    return terms


def find_strict_dominator(x: Assignment, profile: PreferenceProfile) -> Optional[Assignment]:
    """
    Search for a strict ordinal dominator by exact LP.

    Maximizes the total prefix mass over bistochastic matrices whose every
    prefix sum is at least the input's. An optimum above the input's total
    means the optimal matrix strictly dominates.

    Args:
        x: Bistochastic assignment
        profile: Preferences

    Returns:
        A strictly dominating assignment, or None if x is ordinally efficient
    """
    _check_alignment(x, profile)
    n = x.n
    flat = [value for row in x.entries for value in row]
    system = LinearSystem([f"y_{i}_{j}" for i in range(n) for j in range(n)])
    for i in range(n):
        system.add_constraint({i * n + j: 1 for j in range(n)}, "==", 1, f"row {i}")
        system.add_constraint({j * n + i: 1 for j in range(n)}, "==", 1, f"column {i}")

    objective: Dict[int, Fraction] = {}
    baseline = ZERO
    for agent_index, cells in _prefix_terms(profile):
        bound = sum((flat[cell] for cell in cells), ZERO)
        system.add_constraint({cell: 1 for cell in cells}, ">=", bound, f"prefix {agent_index}")
        baseline += bound
        for cell in cells:
            objective[cell] = objective.get(cell, ZERO) + 1
    system.set_objective(objective)

    result = lp_solve(system)
    if result.status is not LPStatus.OPTIMAL or result.value is None or result.point is None:
        raise ArithmeticError(f"Dominator LP returned {result.status.value}")
    if result.value <= baseline:
        return None
    point = result.point
    return Assignment(
        x.agents,
        x.objects,
        tuple(tuple(point[i * n + j] for j in range(n)) for i in range(n)),
    )


def pareto_undominated_permutations(profile: PreferenceProfile) -> List[Dict[str, str]]:
    """
    Deterministic assignments not Pareto dominated by another one.

    Args:
        profile: Preferences

    Returns:
        Matchings agent -> object in lexicographic order of object tuples

    Raises:
        CapacityError: If n exceeds the ex-post enumeration cap
    """
    if profile.n > Config.EXPOST_MAX_AGENTS:
        raise CapacityError(
            f"Ex-post check enumerates {profile.n}! assignments; the cap is "
            f"{Config.EXPOST_MAX_AGENTS} agents (AXIOMLAB_EXPOST_MAX_AGENTS)"
        )
    ranks = [
        {obj: order.rank(obj) for obj in order.ranking} for order in profile.orders
    ]
    matchings = list(permutations(profile.objects))
    scored = [[ranks[i][obj] for i, obj in enumerate(m)] for m in matchings]

    def dominates(a: List[int], b: List[int]) -> bool:
        return all(p <= q for p, q in zip(a, b)) and a != b

    undominated = [
        dict(zip(profile.agents, matching))
        for matching, score in zip(matchings, scored)
        if not any(dominates(other, score) for other in scored)
    ]
    return undominated


def is_expost_efficient(x: Assignment, profile: PreferenceProfile) -> ExPostCertificate:
    """
    Decide whether x is a lottery over Pareto-undominated permutations.

    Args:
        x: Bistochastic assignment
        profile: Preferences

    Returns:
        ExPostCertificate with the positive-weight lottery when efficient

    Raises:
        CapacityError: If n exceeds the ex-post enumeration cap
    """
    _check_alignment(x, profile)
    candidates = pareto_undominated_permutations(profile)
    n = x.n
    system = LinearSystem([f"w_{k}" for k in range(len(candidates))])
    for i, agent in enumerate(x.agents):
        for j, obj in enumerate(x.objects):
            system.add_constraint(
                {k: 1 for k, m in enumerate(candidates) if m[agent] == obj},
                "==",
                x.entries[i][j],
                f"cell {agent},{obj}",
            )
    result = lp_solve(system)
    if result.status is not LPStatus.OPTIMAL or result.point is None:
        logger.debug(f"No lottery over {len(candidates)} undominated permutations (n={n})")
        return ExPostCertificate(False, undominated=len(candidates))
    lottery = [
        (weight, Assignment.permutation(x.agents, x.objects, matching))
        for weight, matching in zip(result.point, candidates)
        if weight > 0
    ]
    return ExPostCertificate(True, lottery=lottery, undominated=len(candidates))
