"""
Input validation implementation.

This module handles validation of rankings, profiles and assignment
matrices, following the Single Responsibility Principle. Validators never
raise; they return (is_valid, message) and leave the choice of exception to
the caller.
"""

from fractions import Fraction
from typing import Sequence, Tuple


class ProfileValidator:
    """Validates rankings and preference profiles."""

    def validate_ranking(self, ranking: Sequence[str]) -> Tuple[bool, str]:
        """
        Validate that a ranking lists distinct, non-empty object labels.

        Args:
            ranking: Objects, most preferred first

        Returns:
            Tuple of (is_valid, message)
        """
        if not ranking:
            return False, "Ranking must contain at least one object"

        for obj in ranking:
            if not isinstance(obj, str) or not obj.strip():
                return False, f"Invalid object label {obj!r}"
            if obj != obj.strip() or ">" in obj or ":" in obj:
                return False, f"Object label {obj!r} contains reserved characters"

        seen = set()
        for obj in ranking:
            if obj in seen:
                return False, f"Duplicate object '{obj}' in ranking"
            seen.add(obj)

        return True, "Ranking is valid"

    def validate_dimensions(self, n_agents: int, n_objects: int) -> Tuple[bool, str]:
        """
        Validate that agents and objects are equally many.

        Args:
            n_agents: Number of agents
            n_objects: Number of objects

        Returns:
            Tuple of (is_valid, message)
        """
        if n_agents < 1:
            return False, "Profile must contain at least one agent"
        if n_agents != n_objects:
            return (
                False,
                f"Profile has {n_agents} agents but {n_objects} objects; "
                "equal numbers are required",
            )
        return True, "Dimensions are valid"

    def validate_orders(
        self, agents: Sequence[str], rankings: Sequence[Sequence[str]]
    ) -> Tuple[bool, str]:
        """
        Validate that every agent ranks the same object set.

        Args:
            agents: Agent labels
            rankings: One ranking per agent

        Returns:
            Tuple of (is_valid, message)
        """
        if len(set(agents)) != len(agents):
            return False, "Duplicate agent label in profile"
        for agent in agents:
            if not agent or ":" in agent or agent != agent.strip():
                return False, f"Invalid agent label {agent!r}"

        reference = set(rankings[0]) if rankings else set()
        for agent, ranking in zip(agents, rankings):
            if set(ranking) != reference:
                missing = sorted(reference - set(ranking))
                extra = sorted(set(ranking) - reference)
                return (
                    False,
                    f"Agent '{agent}' ranks a different object set "
                    f"(missing {missing}, unexpected {extra})",
                )
        return True, "Orders are valid"


class AssignmentValidator:
    """Validates probability rows and bistochastic matrices."""

    def validate_entry(self, value: Fraction) -> Tuple[bool, str]:
        """
        Validate that a probability lies in [0, 1].

        Args:
            value: Probability

        Returns:
            Tuple of (is_valid, message)
        """
        if not isinstance(value, Fraction):
            return False, f"Probability {value!r} is not an exact rational"
        if value < 0 or value > 1:
            return False, f"Probability {value} lies outside [0, 1]"
        return True, "Entry is valid"

    def validate_row(self, values: Sequence[Fraction]) -> Tuple[bool, str]:
        """
        Validate a single lottery: entries in [0, 1] summing to exactly 1.

        Args:
            values: Probabilities

        Returns:
            Tuple of (is_valid, message)
        """
        for value in values:
            is_valid, message = self.validate_entry(value)
            if not is_valid:
                return False, message
        total = sum(values, Fraction(0))
        if total != 1:
            return False, f"Row sums to {total}, expected 1"
        return True, "Row is valid"

    def validate_shape(
        self, n_rows: int, n_columns: int, row_lengths: Sequence[int]
    ) -> Tuple[bool, str]:
        """
        Validate that labels and entries form an n x n matrix.

        Args:
            n_rows: Number of agent labels
            n_columns: Number of object labels
            row_lengths: Length of each entry row

        Returns:
            Tuple of (is_valid, message)
        """
        if n_rows < 1:
            return False, "Matrix must have at least one row"
        if n_rows != n_columns:
            return False, f"Matrix has {n_rows} agents but {n_columns} objects"
        if len(row_lengths) != n_rows:
            return False, f"Expected {n_rows} rows, got {len(row_lengths)}"
        for index, length in enumerate(row_lengths):
            if length != n_columns:
                return (
                    False,
                    f"Row {index + 1} has {length} entries, expected {n_columns}",
                )
        return True, "Shape is valid"

    def validate_bistochastic(
        self, entries: Sequence[Sequence[Fraction]]
    ) -> Tuple[bool, str]:
        """
        Validate that every row and column sums to exactly 1.

        Args:
            entries: Square matrix of probabilities

        Returns:
            Tuple of (is_valid, message)
        """
        for index, row in enumerate(entries):
            is_valid, message = self.validate_row(row)
            if not is_valid:
                return False, f"Row {index + 1}: {message}"

        n = len(entries)
        for column in range(n):
            total = sum((row[column] for row in entries), Fraction(0))
            if total != 1:
                return False, f"Column {column + 1} sums to {total}, expected 1"
        return True, "Matrix is bistochastic"
