"""
Core data models for random assignment.

This module defines the immutable value types used throughout the
application (preference orders, profiles, assignment matrices and dominance
verdicts), following the Single Responsibility Principle.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import BistochasticityError, DimensionError, InputError, RankingError
from .validators import AssignmentValidator, ProfileValidator

Rational = Fraction
OrderLike = Union["PreferenceOrder", str, Sequence[str]]

ZERO = Fraction(0)
ONE = Fraction(1)


def natural_key(label: str) -> Tuple[int, int, str]:
    """
    Sort key that orders numeric labels numerically and others lexically.

    Args:
        label: Agent or object identifier

    Returns:
        Tuple usable as a sort key
    """
    if label.isdigit():
        return (0, int(label), label)
    return (1, 0, label)


def canonical(labels: Iterable[str]) -> Tuple[str, ...]:
    """Return labels sorted by natural order."""
    return tuple(sorted(labels, key=natural_key))


@dataclass(frozen=True)
class PreferenceOrder:
    """Strict ranking of objects, most preferred first."""

    ranking: Tuple[str, ...]

    def __post_init__(self) -> None:
        """Validate the ranking after creation."""
        object.__setattr__(self, "ranking", tuple(self.ranking))
        is_valid, message = ProfileValidator().validate_ranking(self.ranking)
        if not is_valid:
            raise RankingError(message)

    @classmethod
    def parse(cls, value: OrderLike) -> "PreferenceOrder":
        """
        Build an order from an order, a "a>b>c" string or a sequence.

        Args:
            value: Order in any accepted form

        Returns:
            PreferenceOrder instance
        """
        if isinstance(value, PreferenceOrder):
            return value
        if isinstance(value, str):
            return cls(tuple(part.strip() for part in value.split(">")))
        return cls(tuple(value))

    @property
    def objects(self) -> Tuple[str, ...]:
        """Objects ranked by this order in canonical order."""
        return canonical(self.ranking)

    def rank(self, obj: str) -> int:
        """Zero-based position of obj (0 is the favourite)."""
        try:
            return self.ranking.index(obj)
        except ValueError:
            raise InputError(
                f"Object '{obj}' is not ranked by {self}"
            ) from None

    def prefers(self, j: str, j_prime: str) -> bool:
        """True when j is strictly above j_prime."""
        return self.rank(j) < self.rank(j_prime)

    def __len__(self) -> int:
        return len(self.ranking)

    def __str__(self) -> str:
        return ">".join(self.ranking)


@dataclass(frozen=True)
class PreferenceProfile:
    """
    One preference order per agent.

    Agents and objects are held in canonical natural order, so two profiles
    built from the same orders in a different insertion order are equal and
    hash alike.
    """

    agents: Tuple[str, ...]
    orders: Tuple[PreferenceOrder, ...]

    def __post_init__(self) -> None:
        """Canonicalize agent order and validate the profile."""
        if len(self.agents) != len(self.orders):
            raise DimensionError(
                f"{len(self.agents)} agents but {len(self.orders)} orders"
            )
        pairs = sorted(
            zip(self.agents, self.orders), key=lambda pair: natural_key(pair[0])
        )
        object.__setattr__(self, "agents", tuple(agent for agent, _ in pairs))
        object.__setattr__(self, "orders", tuple(order for _, order in pairs))
        validator = ProfileValidator()
        is_valid, message = validator.validate_orders(
            self.agents, [order.ranking for order in self.orders]
        )
        if not is_valid:
            raise RankingError(message)
        is_valid, message = validator.validate_dimensions(
            len(self.agents), len(self.orders[0]) if self.orders else 0
        )
        if not is_valid:
            raise DimensionError(message)

    @classmethod
    def from_orders(cls, orders: Mapping[str, OrderLike]) -> "PreferenceProfile":
        """
        Build a profile from a mapping agent -> order.

        Args:
            orders: Orders keyed by agent, each an order, string or sequence

        Returns:
            PreferenceProfile instance
        """
        agents = tuple(str(agent) for agent in orders)
        parsed = tuple(PreferenceOrder.parse(order) for order in orders.values())
        return cls(agents, parsed)

    @property
    def n(self) -> int:
        """Number of agents (equal to the number of objects)."""
        return len(self.agents)

    @property
    def objects(self) -> Tuple[str, ...]:
        """Canonical object labels."""
        return self.orders[0].objects if self.orders else ()

    def agent_index(self, agent: str) -> int:
        """Row index of agent."""
        try:
            return self.agents.index(agent)
        except ValueError:
            raise InputError(f"Unknown agent '{agent}'") from None

    def object_index(self, obj: str) -> int:
        """Column index of obj."""
        try:
            return self.objects.index(obj)
        except ValueError:
            raise InputError(f"Unknown object '{obj}'") from None

    def order_of(self, agent: str) -> PreferenceOrder:
        """Order reported by agent."""
        return self.orders[self.agent_index(agent)]

    def with_order(self, agent: str, order: OrderLike) -> "PreferenceProfile":
        """Copy of this profile with agent's order replaced."""
        index = self.agent_index(agent)
        orders = list(self.orders)
        orders[index] = PreferenceOrder.parse(order)
        return PreferenceProfile(self.agents, tuple(orders))

    def as_dict(self) -> Dict[str, str]:
        """Mapping agent -> "a>b>c" string."""
        return {agent: str(order) for agent, order in zip(self.agents, self.orders)}

    def __str__(self) -> str:
        return "; ".join(f"{agent}: {order}" for agent, order in self.as_dict().items())


@dataclass(frozen=True)
class AssignmentRow:
    """Lottery over objects for one agent."""

    objects: Tuple[str, ...]
    values: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        """Validate the row after creation."""
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))
        if len(self.objects) != len(self.values):
            raise DimensionError(
                f"Row has {len(self.values)} values for {len(self.objects)} objects"
            )
        is_valid, message = AssignmentValidator().validate_row(self.values)
        if not is_valid:
            raise BistochasticityError(message)

    @classmethod
    def from_mapping(cls, probabilities: Mapping[str, Fraction]) -> "AssignmentRow":
        """Build a row from a mapping object -> probability."""
        objects = canonical(probabilities)
        return cls(objects, tuple(Fraction(probabilities[obj]) for obj in objects))

    def __getitem__(self, obj: str) -> Fraction:
        try:
            return self.values[self.objects.index(obj)]
        except ValueError:
            raise InputError(f"Unknown object '{obj}'") from None

    def as_dict(self) -> Dict[str, Fraction]:
        """Mapping object -> probability."""
        return dict(zip(self.objects, self.values))


@dataclass(frozen=True)
class Assignment:
    """Bistochastic matrix of exact probabilities, rows are agents."""

    agents: Tuple[str, ...]
    objects: Tuple[str, ...]
    entries: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        """Normalize entries to Fractions and validate bistochasticity."""
        entries = tuple(tuple(Fraction(v) for v in row) for row in self.entries)
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "entries", entries)
        validator = AssignmentValidator()
        is_valid, message = validator.validate_shape(
            len(self.agents), len(self.objects), [len(row) for row in entries]
        )
        if not is_valid:
            raise DimensionError(message)
        is_valid, message = validator.validate_bistochastic(entries)
        if not is_valid:
            raise BistochasticityError(message)

    @classmethod
    def from_rows(
        cls,
        agents: Sequence[str],
        objects: Sequence[str],
        rows: Sequence[Sequence[Union[Fraction, int, str]]],
    ) -> "Assignment":
        """
        Build an assignment, accepting "p/q" strings as entries.

        Args:
            agents: Row labels
            objects: Column labels
            rows: Matrix rows

        Returns:
            Assignment instance
        """
        return cls(
            tuple(agents),
            tuple(objects),
            tuple(tuple(Fraction(v) for v in row) for row in rows),
        )

    @classmethod
    def uniform(cls, agents: Sequence[str], objects: Sequence[str]) -> "Assignment":
        """Matrix with every entry 1/n."""
        share = Fraction(1, len(agents))
        return cls(
            tuple(agents),
            tuple(objects),
            tuple(tuple(share for _ in objects) for _ in agents),
        )

    @classmethod
    def permutation(
        cls, agents: Sequence[str], objects: Sequence[str], matching: Mapping[str, str]
    ) -> "Assignment":
        """Deterministic assignment giving matching[agent] to each agent."""
        return cls(
            tuple(agents),
            tuple(objects),
            tuple(
                tuple(ONE if matching[agent] == obj else ZERO for obj in objects)
                for agent in agents
            ),
        )

    @property
    def n(self) -> int:
        """Matrix dimension."""
        return len(self.agents)

    def entry(self, agent: str, obj: str) -> Fraction:
        """Probability that agent receives obj."""
        return self.entries[self._agent_index(agent)][self._object_index(obj)]

    def row(self, agent: str) -> AssignmentRow:
        """Row of agent as an AssignmentRow."""
        return AssignmentRow(self.objects, self.entries[self._agent_index(agent)])

    def column(self, obj: str) -> Tuple[Fraction, ...]:
        """Column of obj, one value per agent."""
        index = self._object_index(obj)
        return tuple(row[index] for row in self.entries)

    def is_deterministic(self) -> bool:
        """True when every entry is 0 or 1."""
        return all(v in (ZERO, ONE) for row in self.entries for v in row)

    def to_lists(self) -> List[List[Fraction]]:
        """Entries as nested lists."""
        return [list(row) for row in self.entries]

    def _agent_index(self, agent: str) -> int:
        try:
            return self.agents.index(agent)
        except ValueError:
            raise InputError(f"Unknown agent '{agent}'") from None

    def _object_index(self, obj: str) -> int:
        try:
            return self.objects.index(obj)
        except ValueError:
            raise InputError(f"Unknown object '{obj}'") from None


class DominanceRelation(Enum):
    """Outcome of a stochastic-dominance comparison."""

    EQUAL = "Equal"
    WEAKLY_DOMINATES = "WeaklyDominates"
    STRICTLY_DOMINATES = "StrictlyDominates"
    INCOMPARABLE = "Incomparable"


@dataclass(frozen=True)
class DominanceVerdict:
    """
    Dominance relation with an optional witness.

    For StrictlyDominates the witness is the object whose prefix is strict;
    for Incomparable it is the object whose prefix is violated. Aggregated
    verdicts also carry the agent.
    """

    relation: DominanceRelation
    witness: Optional[str] = None
    agent: Optional[str] = None

    @property
    def weakly_dominates(self) -> bool:
        """True for Equal, WeaklyDominates and StrictlyDominates."""
        return self.relation is not DominanceRelation.INCOMPARABLE

    @property
    def strictly_dominates(self) -> bool:
        """True only for StrictlyDominates."""
        return self.relation is DominanceRelation.STRICTLY_DOMINATES


@dataclass
class Counterexample:
    """One violation found by an axiom checker."""

    clause: str
    profile: PreferenceProfile
    agent: Optional[str] = None
    pair: Optional[Tuple[str, str]] = None
    other_profile: Optional[PreferenceProfile] = None
    entries: Dict[str, str] = field(default_factory=dict)

    def sort_key(self) -> Tuple[str, str, str, str, str]:
        """Canonical ordering so reports do not depend on scheduling."""
        return (
            str(self.profile),
            self.agent or "",
            ",".join(self.pair) if self.pair else "",
            str(self.other_profile) if self.other_profile else "",
            self.clause,
        )

    def describe(self) -> str:
        """One-line rendering, e.g. ``swap-monotonicity at 1:a>b ...: (1,a) 1/2 -> 1/3``."""
        where = f"at {self.profile}"
        if self.agent is not None and self.pair is not None and self.other_profile is not None:
            where += f", agent {self.agent} swaps {self.pair[0]},{self.pair[1]}"
        elif self.pair is not None:
            where += f", agents {self.pair[0]},{self.pair[1]}"
        details = "; ".join(f"{key} {value}" for key, value in self.entries.items())
        return f"{self.clause} {where}: {details}" if details else f"{self.clause} {where}"
