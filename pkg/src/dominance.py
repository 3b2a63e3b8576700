"""
Stochastic dominance comparisons.

This module compares lotteries by first order stochastic dominance along an
agent's preference order and aggregates the comparison over a profile.
"""

from fractions import Fraction
from typing import Optional, Sequence

from .errors import DimensionError, InputError
from .models import (
    Assignment,
    AssignmentRow,
    DominanceRelation,
    DominanceVerdict,
    PreferenceOrder,
    PreferenceProfile,
)


def compare_prefixes(
    x: Sequence[Fraction], y: Sequence[Fraction], ranking: Sequence[str]
) -> DominanceVerdict:
    """
    Compare closed prefix sums of two lotteries listed in preference order.

    Args:
        x: Probabilities of the first lottery, aligned with ranking
        y: Probabilities of the second lottery, aligned with ranking
        ranking: Objects, most preferred first

    Returns:
        DominanceVerdict of x against y
    """
    x_mass = Fraction(0)
    y_mass = Fraction(0)
    strict_at: Optional[str] = None
    for obj, x_value, y_value in zip(ranking, x, y):
        x_mass += x_value
        y_mass += y_value
        if x_mass < y_mass:
            return DominanceVerdict(DominanceRelation.INCOMPARABLE, witness=obj)
        if x_mass > y_mass and strict_at is None:
            strict_at = obj

    if strict_at is not None:
        return DominanceVerdict(DominanceRelation.STRICTLY_DOMINATES, witness=strict_at)
    if list(x) == list(y):
        return DominanceVerdict(DominanceRelation.EQUAL)
    # Equal prefix sums force equal entries, so this only fires for
    # lotteries of different total mass.
    return DominanceVerdict(DominanceRelation.WEAKLY_DOMINATES)


def fosd_compare(
    x: AssignmentRow, y: AssignmentRow, order: PreferenceOrder
) -> DominanceVerdict:
    """
    First order stochastic dominance of x over y at order.

    Args:
        x: Candidate dominating row
        y: Row being compared against
        order: Preference order of the agent

    Returns:
        DominanceVerdict; Incomparable carries the first violated object

    Raises:
        InputError: If the rows and the order cover different object sets
    """
    objects = set(order.ranking)
    if set(x.objects) != objects or set(y.objects) != objects:
        raise InputError(
            f"Rows over {sorted(x.objects)} and {sorted(y.objects)} "
            f"cannot be compared at order {order}"
        )
    return compare_prefixes(
        [x[obj] for obj in order.ranking],
        [y[obj] for obj in order.ranking],
        order.ranking,
    )


def ordinal_dominance(
    x: Assignment, y: Assignment, profile: PreferenceProfile
) -> DominanceVerdict:
    """
    Aggregate fosd_compare over all agents of a profile.

    Args:
        x: Candidate dominating assignment
        y: Assignment being compared against
        profile: Preferences used for every row comparison

    Returns:
        StrictlyDominates when every agent weakly prefers x and one strictly;
        Equal when the matrices coincide; Incomparable otherwise, with the
        first agent and object that break dominance

    Raises:
        DimensionError: If the matrices and profile do not line up
    """
    if (
        x.agents != profile.agents
        or y.agents != profile.agents
        or x.objects != profile.objects
        or y.objects != profile.objects
    ):
        raise DimensionError(
            "Assignments and profile must share the same agents and objects"
        )

    strict: Optional[DominanceVerdict] = None
    for agent, order in zip(profile.agents, profile.orders):
        verdict = fosd_compare(x.row(agent), y.row(agent), order)
        if verdict.relation is DominanceRelation.INCOMPARABLE:
            return DominanceVerdict(
                DominanceRelation.INCOMPARABLE, witness=verdict.witness, agent=agent
            )
        if verdict.strictly_dominates and strict is None:
            strict = DominanceVerdict(
                DominanceRelation.STRICTLY_DOMINATES,
                witness=verdict.witness,
                agent=agent,
            )

    if strict is not None:
        return strict
    return DominanceVerdict(DominanceRelation.EQUAL)
