"""
axiomlab: random assignment mechanisms with exact rationals.

Evaluates RSD, PS and table mechanisms, audits them against incentive,
fairness and efficiency axioms, decomposes assignments into lotteries and
replays the constraint-propagation proofs of two impossibility theorems.

Example:
    Basic usage:
    ```python
    from src import PreferenceProfile, builtin_script, format_assignment, ps, replay

    profile = PreferenceProfile.from_orders(
        {"1": "a>b>c>d", "2": "b>a>d>c", "3": "a>b>c>d", "4": "b>a>d>c"}
    )
    print(format_assignment(ps(profile)))

    report = replay(builtin_script(1))
    assert report.success
    print(report.contradiction.message)
    ```

Components:
    - PreferenceProfile, Assignment: Domain dataclasses
    - MechanismFactory: rsd, ps, sd and table mechanisms
    - run_checks: Axiom audits over exhaustive, explicit or sampled domains
    - is_ordinally_efficient, is_expost_efficient: Efficiency certificates
    - bvn_decompose: Birkhoff-von Neumann lotteries
    - replay, builtin_script, pad_script: Proof replay
    - independent_search: Branch-and-propagate re-proof
"""

from .axioms import ALL_AXIOMS, AxiomVerdict, decomposition_agreement, run_checks
from .codec import (
    format_assignment,
    format_profile,
    load_assignment,
    load_profile,
    parse_assignment,
    parse_profile,
    parse_rational,
)
from .config import Config
from .constraints import ConstraintSystem, EntryValue, ProofState
from .domains import ExhaustiveDomain, ExplicitDomain, SampledDomain, Transition
from .dominance import fosd_compare, ordinal_dominance
from .efficiency import (
    find_strict_dominator,
    is_expost_efficient,
    is_ordinally_efficient,
    pareto_undominated_permutations,
)

# Errors
from .errors import (
    AxiomLabError,
    BistochasticityError,
    CapacityError,
    CertificationFailed,
    DomainError,
    InputError,
    ParseError,
    PreconditionFailed,
)
from .exporters import ReportExporterFactory

# Interfaces (for custom mechanisms and exporters)
from .interfaces import IMechanism, IReportExporter
from .mechanisms import (
    MechanismFactory,
    ProbabilisticSerial,
    RandomSerialDictatorship,
    SerialDictatorship,
    TableMechanism,
    ps,
    rsd,
)

# Data models
from .models import Assignment, Counterexample, PreferenceOrder, PreferenceProfile
from .polytope import BvnDecomposition, bvn_decompose, enumerate_vertices
from .proof_engine import ProofReport, apply_step, certify_efficiency_zero, replay
from .proof_scripts import InferenceStep, ProofScript, StepKind, builtin_script, pad_script
from .proof_search import SearchResult, fragment_violations, independent_search
from .simplex import LinearSystem, lp_solve

__version__ = "0.1.0"
__all__ = [
    # Data models
    "PreferenceOrder",
    "PreferenceProfile",
    "Assignment",
    "Counterexample",
    # Configuration
    "Config",
    # Text and JSON forms
    "parse_rational",
    "parse_profile",
    "parse_assignment",
    "load_profile",
    "load_assignment",
    "format_profile",
    "format_assignment",
    # Mechanisms
    "IMechanism",
    "MechanismFactory",
    "RandomSerialDictatorship",
    "ProbabilisticSerial",
    "SerialDictatorship",
    "TableMechanism",
    "rsd",
    "ps",
    # Axioms and efficiency
    "ALL_AXIOMS",
    "AxiomVerdict",
    "run_checks",
    "decomposition_agreement",
    "ExhaustiveDomain",
    "ExplicitDomain",
    "SampledDomain",
    "Transition",
    "fosd_compare",
    "ordinal_dominance",
    "is_ordinally_efficient",
    "is_expost_efficient",
    "find_strict_dominator",
    "pareto_undominated_permutations",
    # Polytopes
    "LinearSystem",
    "lp_solve",
    "enumerate_vertices",
    "BvnDecomposition",
    "bvn_decompose",
    # Proofs
    "EntryValue",
    "ConstraintSystem",
    "ProofState",
    "InferenceStep",
    "StepKind",
    "ProofScript",
    "builtin_script",
    "pad_script",
    "apply_step",
    "certify_efficiency_zero",
    "replay",
    "ProofReport",
    "independent_search",
    "fragment_violations",
    "SearchResult",
    # Export
    "IReportExporter",
    "ReportExporterFactory",
    # Errors
    "AxiomLabError",
    "InputError",
    "ParseError",
    "BistochasticityError",
    "DomainError",
    "CapacityError",
    "PreconditionFailed",
    "CertificationFailed",
]
