"""
Profile domains and transitions.

This module enumerates the profiles and agentwise misreports an axiom
checker sweeps over: the full domain for a given n, an explicit profile
set, or a seeded sample of transitions.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from itertools import permutations
import logging
from typing import Any, Dict, Iterable, Iterator, List, Optional, Set, Tuple

import numpy as np

from .errors import InputError
from .models import PreferenceOrder, PreferenceProfile
from .preferences import adjacent_swaps, all_profiles, default_labels, profile_key

logger = logging.getLogger(__name__)

_SEED_MASK = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class Transition:
    """
    One agent's misreport at a profile.

    For adjacent misreports pair is (j, j') with j above j' in the truthful
    order; global misreports that are not adjacent have pair None.
    """

    profile: PreferenceProfile
    agent: str
    pair: Optional[Tuple[str, str]]
    target: PreferenceProfile

    @property
    def truthful_order(self) -> PreferenceOrder:
        """The agent's order at the source profile."""
        return self.profile.order_of(self.agent)

    @property
    def is_adjacent(self) -> bool:
        """True for neighbourhood misreports."""
        return self.pair is not None


def transitions_from(
    profile: PreferenceProfile, global_mode: bool = False
) -> Iterator[Transition]:
    """
    All misreports at a profile, adjacent ones first.

    Args:
        profile: Truthful profile
        global_mode: Also yield every non-adjacent misreport

    Yields:
        Transition objects in canonical order
    """
    for agent in profile.agents:
        order = profile.order_of(agent)
        adjacent = adjacent_swaps(order)
        for neighbour, pair in adjacent:
            yield Transition(profile, agent, pair, profile.with_order(agent, neighbour))
        if global_mode:
            nearby = {neighbour for neighbour, _ in adjacent} | {order}
            for ranking in permutations(order.ranking):
                candidate = PreferenceOrder(ranking)
                if candidate not in nearby:
                    yield Transition(
                        profile, agent, None, profile.with_order(agent, candidate)
                    )


class ProfileDomain(ABC):
    """A set of profiles plus the transitions checked on it."""

    @abstractmethod
    def profiles(self) -> List[PreferenceProfile]:
        """Profiles of the domain in canonical order."""
        pass

    @abstractmethod
    def transitions(self, global_mode: bool = False) -> List[Transition]:
        """Transitions checked by the transition axioms."""
        pass

    @abstractmethod
    def descriptor(self) -> Dict[str, Any]:
        """JSON-ready description used in reports."""
        pass


class ExhaustiveDomain(ProfileDomain):
    """Every profile over n agents and n objects."""

    def __init__(self, n: int) -> None:
        """
        Initialize the domain.

        Raises:
            InputError: If n is not positive
        """
        if n < 1:
            raise InputError(f"Exhaustive domain needs n >= 1, got {n}")
        self.n = n
        self._profiles: Optional[List[PreferenceProfile]] = None

    def profiles(self) -> List[PreferenceProfile]:
        """All (n!)^n profiles."""
        if self._profiles is None:
            agents, objects = default_labels(self.n)
            self._profiles = list(all_profiles(agents, objects))
            logger.info(f"Exhaustive domain n={self.n}: {len(self._profiles)} profiles")
        return self._profiles

    def transitions(self, global_mode: bool = False) -> List[Transition]:
        """Every misreport at every profile."""
        return [
            transition
            for profile in self.profiles()
            for transition in transitions_from(profile, global_mode)
        ]

    def descriptor(self) -> Dict[str, Any]:
        """JSON-ready description used in reports."""
        return {"kind": "exhaustive", "n": self.n}


class ExplicitDomain(ProfileDomain):
    """A finite profile set; only transitions inside the set are checked."""

    def __init__(self, profiles: Iterable[PreferenceProfile], label: str = "explicit") -> None:
        """
        Initialize the domain.

        Raises:
            InputError: If the set is empty
        """
        unique: Set[PreferenceProfile] = set(profiles)
        if not unique:
            raise InputError("Explicit domain must contain at least one profile")
        self._profiles = sorted(unique, key=profile_key)
        self._members = unique
        self.label = label

    def profiles(self) -> List[PreferenceProfile]:
        """Profiles of the set in canonical order."""
        return list(self._profiles)

    def transitions(self, global_mode: bool = False) -> List[Transition]:
        """Misreports whose both endpoints lie in the set."""
        return [
            transition
            for profile in self._profiles
            for transition in transitions_from(profile, global_mode)
            if transition.target in self._members
        ]

    def descriptor(self) -> Dict[str, Any]:
        """JSON-ready description used in reports."""
        return {"kind": "explicit", "label": self.label, "profiles": len(self._profiles)}


class SampledDomain(ProfileDomain):
    """Seeded uniform sample of adjacent transitions over n agents."""

    def __init__(self, n: int, count: int, seed: int) -> None:
        """
        Initialize the domain.

        Args:
            n: Number of agents and objects (at least 2)
            count: Number of sampled transitions
            seed: Any integer; reduced to 64 bits

        Raises:
            InputError: If n < 2 or count < 1
        """
        if n < 2:
            raise InputError(f"Sampled domain needs n >= 2, got {n}")
        if count < 1:
            raise InputError(f"Sample count must be positive, got {count}")
        self.n = n
        self.count = count
        self.seed = seed
        self._transitions: Optional[List[Transition]] = None

    def _draw(self) -> List[Transition]:
        if self._transitions is None:
            rng = np.random.default_rng(self.seed & _SEED_MASK)
            agents, objects = default_labels(self.n)
            drawn = []
            for _ in range(self.count):
                orders = tuple(
                    PreferenceOrder(tuple(objects[int(k)] for k in rng.permutation(self.n)))
                    for _ in agents
                )
                profile = PreferenceProfile(agents, orders)
                agent = agents[int(rng.integers(0, self.n))]
                neighbour, pair = adjacent_swaps(profile.order_of(agent))[
                    int(rng.integers(0, self.n - 1))
                ]
                drawn.append(
                    Transition(profile, agent, pair, profile.with_order(agent, neighbour))
                )
            logger.info(f"Sampled {len(drawn)} transitions (n={self.n}, seed={self.seed})")
            self._transitions = drawn
        return self._transitions

    def profiles(self) -> List[PreferenceProfile]:
        """Source profiles of the sample, deduplicated, in canonical order."""
        return sorted({t.profile for t in self._draw()}, key=profile_key)

    def transitions(self, global_mode: bool = False) -> List[Transition]:
        """
        The sampled transitions; global mode adds all misreports of the
        sampled agent at each sampled profile.
        """
        sampled = self._draw()
        if not global_mode:
            return list(sampled)
        extra = [
            transition
            for t in sampled
            for transition in transitions_from(t.profile, True)
            if transition.agent == t.agent and not transition.is_adjacent
        ]
        return list(sampled) + extra

    def descriptor(self) -> Dict[str, Any]:
        """JSON-ready description used in reports."""
        return {"kind": "sampled", "n": self.n, "count": self.count, "seed": self.seed}
