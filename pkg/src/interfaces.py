"""
Core interfaces and abstract base classes.

This module defines the contracts for mechanisms and report exporters,
following the Interface Segregation and Dependency Inversion principles.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict

from .models import Assignment, PreferenceProfile


class IMechanism(ABC):
    """Interface for random assignment mechanisms."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Short identifier used in reports."""
        pass

    @abstractmethod
    def evaluate(self, profile: PreferenceProfile) -> Assignment:
        """
        Compute the assignment chosen at a profile.

        Args:
            profile: Reported preferences

        Returns:
            Bistochastic assignment

        Raises:
            DomainError: If the profile lies outside the declared domain
        """
        pass

    @abstractmethod
    def in_domain(self, profile: PreferenceProfile) -> bool:
        """
        Check whether the mechanism is defined at a profile.

        Args:
            profile: Candidate profile

        Returns:
            True if evaluate accepts the profile
        """
        pass


class IReportExporter(ABC):
    """Interface for report export."""

    @abstractmethod
    def export(self, report: Dict[str, Any], filename: str) -> str:
        """
        Export a JSON-ready report.

        Args:
            report: Report mapping as produced by the CLI
            filename: Output filename

        Returns:
            Path to exported file
        """
        pass
