#!/usr/bin/env python3
"""
Demonstration script for axiomlab.

Evaluates RSD and PS at the profiles the impossibility proofs start from,
audits both mechanisms on every three-agent profile, and replays the two
proofs.
"""

import logging
from pathlib import Path
import sys

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent))

# ruff: noqa: E402
from src import (
    ExhaustiveDomain,
    PreferenceProfile,
    builtin_script,
    bvn_decompose,
    format_assignment,
    is_ordinally_efficient,
    ps,
    replay,
    rsd,
    run_checks,
)
from src.mechanisms import MechanismFactory

# Configure logging
logging.basicConfig(
    level=logging.WARNING, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(__name__)


def main() -> None:
    """Walk through mechanisms, axiom audits and proof replay."""
    print("axiomlab demonstration")
    print("=" * 60)

    profile = PreferenceProfile.from_orders(
        {"1": "a>b>c>d", "2": "a>b>c>d", "3": "b>a>d>c", "4": "b>a>d>c"}
    )
    for name, mechanism in (("RSD", rsd), ("PS", ps)):
        assignment = mechanism(profile)
        certificate = is_ordinally_efficient(assignment, profile)
        verdict = "efficient" if certificate.efficient else "dominated"
        print(f"\n{name} ({verdict}):")
        print(format_assignment(assignment))

    lottery = bvn_decompose(ps(profile))
    print(f"\nPS as a lottery over {len(lottery)} deterministic assignments")

    print("\nAxiom audit on every three-agent profile")
    domain = ExhaustiveDomain(3)
    axioms = ["swap-monotonicity", "upper-invariance", "lower-invariance", "ordinal-efficiency"]
    for selector in ("rsd", "ps"):
        mechanism = MechanismFactory.create_mechanism(selector)
        for verdict in run_checks(mechanism, domain, axioms):
            status = "holds" if verdict.holds else f"{len(verdict.counterexamples)} violations"
            print(f"  {selector:4} {verdict.axiom:20} {status}")

    for theorem in (1, 2):
        report = replay(builtin_script(theorem))
        print(f"\nTheorem {theorem}: {len(report.verdicts)} steps, success={report.success}")
        if report.contradiction is not None:
            print(f"  {report.contradiction.message}")


if __name__ == "__main__":
    main()
