"""
Configuration management for the axiomlab project.

Handles environment variables for enumeration caps, search limits and
parallel sweeps.
"""

import os
from typing import Optional

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def _int_from_env(name: str, default: str) -> int:
    raw = os.getenv(name, default)
    try:
        return int(raw)
    except ValueError as e:
        raise ValueError(
            f"{name} must be an integer, got '{raw}'. "
            "Please check your .env file."
        ) from e


class Config:
    """Configuration class for application settings."""

    # Enumeration caps
    RSD_MAX_AGENTS: int = _int_from_env("AXIOMLAB_RSD_MAX_AGENTS", "6")
    EXPOST_MAX_AGENTS: int = _int_from_env("AXIOMLAB_EXPOST_MAX_AGENTS", "5")
    VERTEX_MAX_DIMENSION: int = _int_from_env("AXIOMLAB_VERTEX_MAX_DIMENSION", "10")

    # Proof replay and search
    BRANCH_LIMIT: int = _int_from_env("AXIOMLAB_BRANCH_LIMIT", "1000000")
    MAX_PROOF_AGENTS: int = _int_from_env("AXIOMLAB_MAX_PROOF_AGENTS", "5")

    # Sampling
    DEFAULT_SEED: int = _int_from_env("AXIOMLAB_DEFAULT_SEED", "0")

    # Logging
    LOG_LEVEL: str = os.getenv("AXIOMLAB_LOG_LEVEL", "WARNING").upper()

    @classmethod
    def get_threads(cls, override: Optional[int] = None) -> int:
        """
        Resolve the worker count for parallel sweeps.

        The command-line value wins; otherwise AXIOMLAB_THREADS is read at
        call time, defaulting to a single thread.

        Args:
            override: Explicit thread count (e.g. from --threads)

        Returns:
            Number of worker threads

        Raises:
            ValueError: If the resolved value is not a positive integer
        """
        threads = (
            override
            if override is not None
            else _int_from_env("AXIOMLAB_THREADS", "1")
        )
        if threads < 1:
            raise ValueError(
                f"Thread count must be at least 1, got {threads}. "
                "Set --threads or AXIOMLAB_THREADS to a positive integer."
            )
        return threads

    @classmethod
    def validate_caps(cls) -> None:
        """
        Validate that all enumeration caps are usable.

        Raises:
            ValueError: If any cap is not positive
        """
        invalid = [
            name
            for name in (
                "RSD_MAX_AGENTS",
                "EXPOST_MAX_AGENTS",
                "VERTEX_MAX_DIMENSION",
                "BRANCH_LIMIT",
                "MAX_PROOF_AGENTS",
            )
            if getattr(cls, name) < 1
        ]
        if invalid:
            raise ValueError(
                f"Invalid configuration values: {', '.join(invalid)}. "
                "All caps must be positive integers."
            )
