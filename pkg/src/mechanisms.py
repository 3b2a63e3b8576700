"""
Random assignment mechanisms.

This module provides the reference mechanisms (serial dictatorship, random
serial dictatorship, probabilistic serial) and table-backed mechanisms over
explicit profile sets, following the Single Responsibility Principle.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import permutations
import logging
from math import factorial
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .config import Config
from .errors import CapacityError, DimensionError, DomainError, InputError
from .interfaces import IMechanism
from .models import ZERO, Assignment, PreferenceProfile
from .preferences import profile_key

logger = logging.getLogger(__name__)

_SEED_MASK = 0xFFFFFFFFFFFFFFFF


def serial_dictatorship(
    profile: PreferenceProfile, priority: Sequence[str]
) -> Dict[str, str]:
    """
    Let agents pick their favourite remaining object in priority order.

    Args:
        profile: Preferences
        priority: Every agent exactly once, first picker first

    Returns:
        Mapping agent -> object received

    Raises:
        InputError: If priority is not a permutation of the agents
    """
    if sorted(priority) != sorted(profile.agents):
        raise InputError(
            f"Priority {list(priority)} is not an ordering of agents {list(profile.agents)}"
        )
    taken: Dict[str, str] = {}
    remaining = set(profile.objects)
    for agent in priority:
        choice = next(obj for obj in profile.order_of(agent).ranking if obj in remaining)
        taken[agent] = choice
        remaining.discard(choice)
    return taken


@lru_cache(maxsize=4096)
def _rsd_assignment(profile: PreferenceProfile) -> Assignment:
    counts = {(agent, obj): 0 for agent in profile.agents for obj in profile.objects}
    for priority in permutations(profile.agents):
        for agent, obj in serial_dictatorship(profile, priority).items():
            counts[(agent, obj)] += 1
    total = factorial(profile.n)
    return Assignment(
        profile.agents,
        profile.objects,
        tuple(
            tuple(Fraction(counts[(agent, obj)], total) for obj in profile.objects)
            for agent in profile.agents
        ),
    )


def rsd(profile: PreferenceProfile) -> Assignment:
    """
    Random serial dictatorship: the uniform average over all priority orders.

    Args:
        profile: Preferences

    Returns:
        Exact assignment

    Raises:
        CapacityError: If n exceeds the enumeration cap
    """
    if profile.n > Config.RSD_MAX_AGENTS:
        raise CapacityError(
            f"RSD enumerates {profile.n}! priority orders; the cap is "
            f"{Config.RSD_MAX_AGENTS} agents (AXIOMLAB_RSD_MAX_AGENTS)"
        )
    return _rsd_assignment(profile)


@lru_cache(maxsize=4096)
def _ps_assignment(profile: PreferenceProfile) -> Assignment:
    remaining: Dict[str, Fraction] = {obj: Fraction(1) for obj in profile.objects}
    shares: Dict[Tuple[str, str], Fraction] = {}
    clock = Fraction(0)

    while clock < 1:
        targets = {
            agent: next(obj for obj in order.ranking if remaining[obj] > 0)
            for agent, order in zip(profile.agents, profile.orders)
        }
        eaters: Dict[str, int] = {}
        for obj in targets.values():
            eaters[obj] = eaters.get(obj, 0) + 1
        step = min(
            [remaining[obj] / count for obj, count in eaters.items()] + [1 - clock]
        )
        for agent, obj in targets.items():
            shares[(agent, obj)] = shares.get((agent, obj), ZERO) + step
        for obj, count in eaters.items():
            remaining[obj] -= step * count
        clock += step
        exhausted = [obj for obj, left in remaining.items() if left == 0]
        logger.debug(f"PS event at t={clock}: exhausted {exhausted}")

    return Assignment(
        profile.agents,
        profile.objects,
        tuple(
            tuple(shares.get((agent, obj), ZERO) for obj in profile.objects)
            for agent in profile.agents
        ),
    )


def ps(profile: PreferenceProfile) -> Assignment:
    """
    Probabilistic serial: simultaneous eating at unit speed.

    Every agent eats its favourite object with remaining supply; the
    simulation advances from one exhaustion event to the next until time 1.

    Args:
        profile: Preferences

    Returns:
        Exact assignment
    """
    return _ps_assignment(profile)


class SerialDictatorship(IMechanism):
    """Deterministic serial dictatorship with a fixed priority."""

    def __init__(self, priority: Optional[Sequence[str]] = None) -> None:
        """
        Initialize the mechanism.

        Args:
            priority: Picking order; defaults to the profile's agent order
        """
        self.priority = tuple(priority) if priority is not None else None

    @property
    def name(self) -> str:
        """Short identifier used in reports."""
        return "sd" if self.priority is None else f"sd:{','.join(self.priority)}"

    def in_domain(self, profile: PreferenceProfile) -> bool:
        """Defined wherever the priority lists exactly the profile's agents."""
        return self.priority is None or sorted(self.priority) == sorted(profile.agents)

    def evaluate(self, profile: PreferenceProfile) -> Assignment:
        """Deterministic assignment chosen by the dictators."""
        if not self.in_domain(profile):
            raise DomainError(f"Priority {self.priority} does not fit profile {profile}")
        priority = self.priority if self.priority is not None else profile.agents
        return Assignment.permutation(
            profile.agents, profile.objects, serial_dictatorship(profile, priority)
        )


class RandomSerialDictatorship(IMechanism):
    """Uniform lottery over serial dictatorships."""

    @property
    def name(self) -> str:
        """Short identifier used in reports."""
        return "rsd"

    def in_domain(self, profile: PreferenceProfile) -> bool:
        """Full domain up to the enumeration cap."""
        return profile.n <= Config.RSD_MAX_AGENTS

    def evaluate(self, profile: PreferenceProfile) -> Assignment:
        """Exact RSD assignment."""
        return rsd(profile)


class ProbabilisticSerial(IMechanism):
    """Simultaneous eating mechanism."""

    @property
    def name(self) -> str:
        """Short identifier used in reports."""
        return "ps"

    def in_domain(self, profile: PreferenceProfile) -> bool:
        """Full domain."""
        return True

    def evaluate(self, profile: PreferenceProfile) -> Assignment:
        """Exact PS assignment."""
        return ps(profile)


class TableMechanism(IMechanism):
    """Mechanism given by an explicit table over a finite set of profiles."""

    def __init__(
        self, table: Mapping[PreferenceProfile, Assignment], name: str = "table"
    ) -> None:
        """
        Initialize the table.

        Args:
            table: Assignment stored for every profile of the domain
            name: Identifier used in reports

        Raises:
            DimensionError: If a stored matrix does not fit its profile
        """
        for profile, assignment in table.items():
            if profile.agents != assignment.agents or profile.objects != assignment.objects:
                raise DimensionError(
                    f"Matrix over {list(assignment.agents)} x {list(assignment.objects)} "
                    f"does not fit profile {profile}"
                )
        self._table: Dict[PreferenceProfile, Assignment] = dict(table)
        self._name = name

    @classmethod
    def from_entries(
        cls, entries: Iterable[Tuple[PreferenceProfile, Assignment]], name: str = "table"
    ) -> "TableMechanism":
        """
        Build a table from (profile, assignment) pairs.

        Raises:
            InputError: If a profile appears twice with different matrices
        """
        table: Dict[PreferenceProfile, Assignment] = {}
        for profile, assignment in entries:
            if profile in table and table[profile] != assignment:
                raise InputError(f"Profile {profile} appears twice with different matrices")
            table[profile] = assignment
        return cls(table, name)

    @property
    def name(self) -> str:
        """Short identifier used in reports."""
        return self._name

    @property
    def profiles(self) -> List[PreferenceProfile]:
        """Domain of the table, sorted canonically."""
        return sorted(self._table, key=profile_key)

    def in_domain(self, profile: PreferenceProfile) -> bool:
        """True for stored profiles only."""
        return profile in self._table

    def evaluate(self, profile: PreferenceProfile) -> Assignment:
        """Return the stored matrix unmodified."""
        return table_eval(self, profile)

    def lookup(self, profile: PreferenceProfile) -> Optional[Assignment]:
        """Stored matrix or None."""
        return self._table.get(profile)

    def __len__(self) -> int:
        return len(self._table)


def table_eval(mech: TableMechanism, profile: PreferenceProfile) -> Assignment:
    """
    Look up the stored matrix of a table mechanism.

    Raises:
        DomainError: If the profile is not in the table
    """
    assignment = mech.lookup(profile)
    if assignment is None:
        raise DomainError(f"Profile {profile} is outside the domain of '{mech.name}'")
    return assignment


def random_table(
    n: int,
    profiles: Iterable[PreferenceProfile],
    seed: int,
    max_components: Optional[int] = None,
) -> TableMechanism:
    """
    Table whose matrices are random rational mixtures of permutations.

    Args:
        n: Number of agents of every profile
        profiles: Domain of the table
        seed: Any integer; reduced to 64 bits
        max_components: Largest number of permutations mixed per matrix

    Returns:
        Deterministic TableMechanism for the given seed

    Raises:
        InputError: If n < 2
        DimensionError: If a profile does not have n agents
    """
    if n < 2:
        raise InputError(f"Random tables need n >= 2, got {n}")
    rng = np.random.default_rng(seed & _SEED_MASK)
    limit = max_components if max_components is not None else n + 1
    table: Dict[PreferenceProfile, Assignment] = {}

    for profile in sorted(set(profiles), key=profile_key):
        if profile.n != n:
            raise DimensionError(f"Profile {profile} has {profile.n} agents, expected {n}")
        components = int(rng.integers(1, limit + 1))
        weights = [int(w) for w in rng.integers(1, 7, size=components)]
        total = sum(weights)
        entries = [[ZERO] * n for _ in range(n)]
        for weight in weights:
            permutation = rng.permutation(n)
            for row, column in enumerate(permutation):
                entries[row][int(column)] += Fraction(weight, total)
        table[profile] = Assignment(profile.agents, profile.objects, tuple(map(tuple, entries)))

    logger.debug(f"Generated random table over {len(table)} profiles (seed={seed})")
    return TableMechanism(table, name=f"random:{seed}")


def table_from_mechanism(
    mech: IMechanism, profiles: Iterable[PreferenceProfile], name: Optional[str] = None
) -> TableMechanism:
    """Materialize a mechanism on a finite set of profiles."""
    return TableMechanism(
        {profile: mech.evaluate(profile) for profile in profiles}, name or mech.name
    )


class MechanismFactory:
    """Factory for creating mechanisms from command-line selectors."""

    _mechanisms: Dict[str, Callable[[], IMechanism]] = {
        "rsd": RandomSerialDictatorship,
        "ps": ProbabilisticSerial,
        "sd": SerialDictatorship,
    }

    @classmethod
    def create_mechanism(cls, selector: str) -> IMechanism:
        """
        Create a mechanism for a selector.

        Args:
            selector: 'rsd', 'ps', 'sd' or 'table:<path>'

        Returns:
            Mechanism instance

        Raises:
            InputError: If the selector is unknown or the table file is missing
        """
        if selector.startswith("table:"):
            from .codec import parse_table

            path = Path(selector[len("table:") :])
            if not path.is_file():
                raise InputError(f"Table file '{path}' does not exist")
            entries = parse_table(path.read_text(encoding="utf-8"))
            return TableMechanism.from_entries(entries, name=f"table:{path.name}")

        key = selector.lower()
        if key not in cls._mechanisms:
            supported = ", ".join(cls.get_supported_mechanisms())
            raise InputError(
                f"Unsupported mechanism '{selector}'. Supported mechanisms: {supported}"
            )
        return cls._mechanisms[key]()

    @classmethod
    def get_supported_mechanisms(cls) -> List[str]:
        """
        Get list of supported mechanism selectors.

        Returns:
            List of selector strings
        """
        return list(cls._mechanisms.keys()) + ["table:<path>"]
