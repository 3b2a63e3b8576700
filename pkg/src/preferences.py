"""
Preference combinatorics.

This module handles the purely combinatorial operations on orders and
profiles (adjacent swaps, contour sets, agent swaps and object relabelings,
enumeration of the full domain), following the Single Responsibility
Principle.
"""

from itertools import permutations, product
import string
from typing import FrozenSet, Iterator, List, Sequence, Tuple

from .errors import InputError
from .models import PreferenceOrder, PreferenceProfile

Swap = Tuple[PreferenceOrder, Tuple[str, str]]


def default_labels(n: int) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """
    Standard labels: agents "1".."n", objects "a", "b", ...

    Args:
        n: Number of agents and objects

    Returns:
        Tuple of (agents, objects)

    Raises:
        InputError: If n is not between 1 and 26
    """
    if not 1 <= n <= len(string.ascii_lowercase):
        raise InputError(f"n must be between 1 and 26, got {n}")
    agents = tuple(str(i) for i in range(1, n + 1))
    objects = tuple(string.ascii_lowercase[:n])
    return agents, objects


def adjacent_swaps(order: PreferenceOrder) -> List[Swap]:
    """
    All orders differing from order by one consecutive transposition.

    Args:
        order: Reference order

    Returns:
        n-1 pairs (neighbour, (j, j')) with j above j' in the reference order
    """
    ranking = order.ranking
    swaps: List[Swap] = []
    for position in range(len(ranking) - 1):
        swapped = list(ranking)
        swapped[position], swapped[position + 1] = (
            swapped[position + 1],
            swapped[position],
        )
        swaps.append(
            (PreferenceOrder(tuple(swapped)), (ranking[position], ranking[position + 1]))
        )
    return swaps


def swapped_pair(order: PreferenceOrder, other: PreferenceOrder) -> Tuple[str, str]:
    """
    The pair (j, j') exchanged between two neighbouring orders.

    Raises:
        InputError: If the orders are not neighbours
    """
    for neighbour, pair in adjacent_swaps(order):
        if neighbour == other:
            return pair
    raise InputError(f"{order} and {other} do not differ by one adjacent swap")


def contour_sets(
    order: PreferenceOrder, j: str
) -> Tuple[FrozenSet[str], FrozenSet[str]]:
    """
    Upper and lower contour sets of j.

    Args:
        order: Preference order
        j: Object ranked by order

    Returns:
        Tuple of (objects strictly above j, objects strictly below j)

    Raises:
        InputError: If j is not ranked
    """
    position = order.rank(j)
    return frozenset(order.ranking[:position]), frozenset(order.ranking[position + 1 :])


def relabel_order(order: PreferenceOrder, j: str, j_prime: str) -> PreferenceOrder:
    """Exchange j and j' in place inside one order."""
    mapping = {j: j_prime, j_prime: j}
    return PreferenceOrder(tuple(mapping.get(obj, obj) for obj in order.ranking))


def relabel_objects(profile: PreferenceProfile, j: str, j_prime: str) -> PreferenceProfile:
    """
    Exchange the names of objects j and j' in every order.

    Args:
        profile: Source profile
        j: First object
        j_prime: Second object

    Returns:
        Relabeled profile

    Raises:
        InputError: If j equals j' or either object is unknown
    """
    if j == j_prime:
        raise InputError(f"Cannot relabel object '{j}' with itself")
    for obj in (j, j_prime):
        profile.object_index(obj)
    return PreferenceProfile(
        profile.agents,
        tuple(relabel_order(order, j, j_prime) for order in profile.orders),
    )


def swap_agents(profile: PreferenceProfile, i: str, i_prime: str) -> PreferenceProfile:
    """
    Exchange the orders of agents i and i'.

    Raises:
        InputError: If i equals i' or either agent is unknown
    """
    if i == i_prime:
        raise InputError(f"Cannot swap agent '{i}' with itself")
    first, second = profile.agent_index(i), profile.agent_index(i_prime)
    orders = list(profile.orders)
    orders[first], orders[second] = orders[second], orders[first]
    return PreferenceProfile(profile.agents, tuple(orders))


def all_orders(objects: Sequence[str]) -> Iterator[PreferenceOrder]:
    """Every strict order over objects, in lexicographic order of rankings."""
    for ranking in permutations(objects):
        yield PreferenceOrder(ranking)


def all_profiles(agents: Sequence[str], objects: Sequence[str]) -> Iterator[PreferenceProfile]:
    """Every profile over the given agents and objects ((n!)^n of them)."""
    orders = list(all_orders(objects))
    for combination in product(orders, repeat=len(agents)):
        yield PreferenceProfile(tuple(agents), combination)


def neighbours(profile: PreferenceProfile, agent: str) -> List[Tuple[PreferenceProfile, Tuple[str, str]]]:
    """Profiles reached by one adjacent misreport of agent, with the swapped pair."""
    return [
        (profile.with_order(agent, order), pair)
        for order, pair in adjacent_swaps(profile.order_of(agent))
    ]


def profile_key(profile: PreferenceProfile) -> Tuple[Tuple[str, ...], ...]:
    """Canonical sort key for profiles."""
    return tuple(order.ranking for order in profile.orders)
