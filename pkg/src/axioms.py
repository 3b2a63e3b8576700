"""
Axiom checkers.

This module evaluates incentive, fairness and efficiency axioms of a
mechanism over a profile domain and reports every violation found as a
concrete counterexample.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
import logging
import time
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .codec import format_rational
from .config import Config
from .domains import ProfileDomain, Transition
from .dominance import fosd_compare
from .efficiency import is_expost_efficient, is_ordinally_efficient
from .errors import DomainError, InputError
from .interfaces import IMechanism
from .models import Assignment, Counterexample, PreferenceProfile
from .preferences import contour_sets, relabel_objects, swap_agents

logger = logging.getLogger(__name__)

LOCAL_SP = "local-sp"
SWAP_MONOTONICITY = "swap-monotonicity"
UPPER_INVARIANCE = "upper-invariance"
LOWER_INVARIANCE = "lower-invariance"
NON_BOSSINESS = "non-bossiness"
SYMMETRY = "symmetry"
ANONYMITY = "anonymity"
NEUTRALITY = "neutrality"
ORDINAL_EFFICIENCY = "ordinal-efficiency"
EXPOST_EFFICIENCY = "ex-post-efficiency"

TRANSITION_AXIOMS = (
    LOCAL_SP,
    SWAP_MONOTONICITY,
    UPPER_INVARIANCE,
    LOWER_INVARIANCE,
    NON_BOSSINESS,
)
PROFILE_AXIOMS = (SYMMETRY, ANONYMITY, NEUTRALITY, ORDINAL_EFFICIENCY, EXPOST_EFFICIENCY)
ALL_AXIOMS = TRANSITION_AXIOMS + PROFILE_AXIOMS

# Axioms whose quantification extends to non-adjacent misreports in global mode
GLOBAL_CAPABLE = (LOCAL_SP, NON_BOSSINESS)


@dataclass
class AxiomVerdict:
    """Outcome of one axiom over one domain."""

    axiom: str
    domain: Dict[str, Any]
    checked: int = 0
    counterexamples: List[Counterexample] = field(default_factory=list)
    profiles: int = 0
    elapsed: float = 0.0

    @property
    def holds(self) -> bool:
        """True iff no counterexample was found."""
        return not self.counterexamples


Entries = Dict[str, str]


def _cell(agent: str, obj: str) -> str:
    return f"({agent},{obj})"


def _change(before: Any, after: Any) -> str:
    return f"{format_rational(before)} -> {format_rational(after)}"


def local_sp_violation(
    truthful: Assignment, misreport: Assignment, transition: Transition
) -> Optional[Entries]:
    """Offending prefix when the truthful row fails to dominate the misreport row."""
    agent = transition.agent
    verdict = fosd_compare(
        truthful.row(agent), misreport.row(agent), transition.truthful_order
    )
    if verdict.weakly_dominates:
        return None
    witness = verdict.witness or ""
    return {_cell(agent, witness): "prefix mass decreases under truthful report"}


def swap_monotonicity_violation(
    truthful: Assignment, misreport: Assignment, transition: Transition
) -> Optional[Entries]:
    """Offending entries when the row changes without moving mass from j' to j."""
    if transition.pair is None:
        return None
    agent = transition.agent
    if truthful.row(agent) == misreport.row(agent):
        return None
    j, j_prime = transition.pair
    if (
        truthful.entry(agent, j) > misreport.entry(agent, j)
        and truthful.entry(agent, j_prime) < misreport.entry(agent, j_prime)
    ):
        return None
    return {
        _cell(agent, j): _change(truthful.entry(agent, j), misreport.entry(agent, j)),
        _cell(agent, j_prime): _change(
            truthful.entry(agent, j_prime), misreport.entry(agent, j_prime)
        ),
    }


def _invariance_violation(
    truthful: Assignment, misreport: Assignment, transition: Transition, upper: bool
) -> Optional[Entries]:
    if transition.pair is None:
        return None
    agent = transition.agent
    j, j_prime = transition.pair
    order = transition.truthful_order
    cells = contour_sets(order, j)[0] if upper else contour_sets(order, j_prime)[1]
    changed = {
        _cell(agent, obj): _change(truthful.entry(agent, obj), misreport.entry(agent, obj))
        for obj in sorted(cells, key=order.rank)
        if truthful.entry(agent, obj) != misreport.entry(agent, obj)
    }
    return changed or None


def upper_invariance_violation(
    truthful: Assignment, misreport: Assignment, transition: Transition
) -> Optional[Entries]:
    """Changed entries inside the upper contour set of j."""
    return _invariance_violation(truthful, misreport, transition, upper=True)


def lower_invariance_violation(
    truthful: Assignment, misreport: Assignment, transition: Transition
) -> Optional[Entries]:
    """Changed entries inside the lower contour set of j'."""
    return _invariance_violation(truthful, misreport, transition, upper=False)


def non_bossiness_violation(
    truthful: Assignment, misreport: Assignment, transition: Transition
) -> Optional[Entries]:
    """Changed entries of other agents when the swapper's row is unchanged."""
    agent = transition.agent
    if truthful.row(agent) != misreport.row(agent):
        return None
    changed = {
        _cell(other, obj): _change(truthful.entry(other, obj), misreport.entry(other, obj))
        for other in truthful.agents
        for obj in truthful.objects
        if truthful.entry(other, obj) != misreport.entry(other, obj)
    }
    return changed or None


TransitionClause = Callable[[Assignment, Assignment, Transition], Optional[Entries]]

TRANSITION_CLAUSES: Dict[str, TransitionClause] = {
    LOCAL_SP: local_sp_violation,
    SWAP_MONOTONICITY: swap_monotonicity_violation,
    UPPER_INVARIANCE: upper_invariance_violation,
    LOWER_INVARIANCE: lower_invariance_violation,
    NON_BOSSINESS: non_bossiness_violation,
}


def _evaluator(mech: IMechanism) -> Callable[[PreferenceProfile], Assignment]:
    cache: Dict[PreferenceProfile, Assignment] = {}

    def evaluate(profile: PreferenceProfile) -> Assignment:
        if profile not in cache:
            if not mech.in_domain(profile):
                raise DomainError(
                    f"Profile {profile} is outside the domain of '{mech.name}'"
                )
            cache[profile] = mech.evaluate(profile)
        return cache[profile]

    return evaluate


def _chunks(items: Sequence[Any], parts: int) -> List[Sequence[Any]]:
    size = max(1, -(-len(items) // parts))
    return [items[k : k + size] for k in range(0, len(items), size)]


def _validate_axioms(axioms: Iterable[str], allowed: Sequence[str]) -> List[str]:
    requested = list(axioms)
    unknown = [axiom for axiom in requested if axiom not in allowed]
    if unknown:
        raise InputError(
            f"Unknown axiom(s) {unknown}. Supported axioms: {', '.join(allowed)}"
        )
    return requested


def check_transition_axioms(
    mech: IMechanism,
    domain: ProfileDomain,
    axioms: Iterable[str] = TRANSITION_AXIOMS,
    global_mode: bool = False,
    threads: Optional[int] = None,
) -> Dict[str, AxiomVerdict]:
    """
    Evaluate transition axioms at every transition of a domain.

    Args:
        mech: Mechanism under test
        domain: Profiles and transitions to sweep
        axioms: Subset of TRANSITION_AXIOMS
        global_mode: Extend local-SP and non-bossiness to all misreports
        threads: Worker count; defaults to Config.get_threads()

    Returns:
        Mapping axiom -> AxiomVerdict with canonically sorted counterexamples

    Raises:
        DomainError: If a transition endpoint lies outside the mechanism's domain
        InputError: If an axiom name is unknown
    """
    requested = _validate_axioms(axioms, TRANSITION_AXIOMS)
    workers = Config.get_threads(threads)
    started = time.perf_counter()
    transitions = domain.transitions(global_mode)
    logger.info(
        f"Checking {requested} for '{mech.name}' on {len(transitions)} transitions "
        f"({workers} thread(s))"
    )

    def sweep(batch: Sequence[Transition]) -> Dict[str, Tuple[int, List[Counterexample]]]:
        evaluate = _evaluator(mech)
        found: Dict[str, Tuple[int, List[Counterexample]]] = {a: (0, []) for a in requested}
        for transition in batch:
            truthful = evaluate(transition.profile)
            misreport = evaluate(transition.target)
            for axiom in requested:
                if not transition.is_adjacent and axiom not in GLOBAL_CAPABLE:
                    continue
                count, examples = found[axiom]
                entries = TRANSITION_CLAUSES[axiom](truthful, misreport, transition)
                if entries is not None:
                    examples.append(
                        Counterexample(
                            clause=axiom,
                            profile=transition.profile,
                            agent=transition.agent,
                            pair=transition.pair,
                            other_profile=transition.target,
                            entries=entries,
                        )
                    )
                found[axiom] = (count + 1, examples)
        return found

    batches = _chunks(transitions, workers)
    if workers > 1 and len(batches) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(sweep, batches))
    else:
        results = [sweep(batch) for batch in batches]

    elapsed = time.perf_counter() - started
    profiles = len({t.profile for t in transitions})
    verdicts: Dict[str, AxiomVerdict] = {}
    for axiom in requested:
        verdict = AxiomVerdict(axiom, domain.descriptor(), profiles=profiles, elapsed=elapsed)
        for result in results:
            count, examples = result[axiom]
            verdict.checked += count
            verdict.counterexamples.extend(examples)
        verdict.counterexamples.sort(key=Counterexample.sort_key)
        verdicts[axiom] = verdict
        logger.info(
            f"{axiom}: {'holds' if verdict.holds else 'violated'} "
            f"({len(verdict.counterexamples)} counterexample(s) in {verdict.checked})"
        )
    return verdicts


def _partner(
    evaluate: Callable[[PreferenceProfile], Assignment],
    mech: IMechanism,
    profile: PreferenceProfile,
    skip_missing: bool,
) -> Optional[Assignment]:
    if skip_missing and not mech.in_domain(profile):
        return None
    return evaluate(profile)


def check_symmetry(mech: IMechanism, domain: ProfileDomain) -> AxiomVerdict:
    """
    Equal orders must receive equal rows at every profile of the domain.

    Args:
        mech: Mechanism under test
        domain: Profiles to check

    Returns:
        AxiomVerdict; counterexamples name the two agents and their rows
    """
    started = time.perf_counter()
    evaluate = _evaluator(mech)
    verdict = AxiomVerdict(SYMMETRY, domain.descriptor())
    for profile in domain.profiles():
        x = evaluate(profile)
        verdict.profiles += 1
        for first, second in combinations(profile.agents, 2):
            if profile.order_of(first) != profile.order_of(second):
                continue
            verdict.checked += 1
            if x.row(first) != x.row(second):
                verdict.counterexamples.append(
                    Counterexample(
                        clause=SYMMETRY,
                        profile=profile,
                        agent=first,
                        pair=(first, second),
                        entries={
                            f"row {first}": " ".join(map(format_rational, x.row(first).values)),
                            f"row {second}": " ".join(
                                map(format_rational, x.row(second).values)
                            ),
                        },
                    )
                )
    verdict.elapsed = time.perf_counter() - started
    return verdict


def check_anonymity(
    mech: IMechanism, domain: ProfileDomain, skip_missing: bool = False
) -> AxiomVerdict:
    """
    Rows travel with preference orders when two agents exchange them.

    For every profile and every pair of agents, the profile with the two
    orders exchanged must give each agent the row the other agent had.

    Args:
        mech: Mechanism under test
        domain: Profiles to check
        skip_missing: Skip partner profiles outside the mechanism's domain
            instead of raising

    Returns:
        AxiomVerdict

    Raises:
        DomainError: If a partner profile is missing and skip_missing is False
    """
    started = time.perf_counter()
    evaluate = _evaluator(mech)
    verdict = AxiomVerdict(ANONYMITY, domain.descriptor())
    for profile in domain.profiles():
        x = evaluate(profile)
        verdict.profiles += 1
        for first, second in combinations(profile.agents, 2):
            swapped = (
                profile
                if profile.order_of(first) == profile.order_of(second)
                else swap_agents(profile, first, second)
            )
            y = _partner(evaluate, mech, swapped, skip_missing)
            if y is None:
                continue
            verdict.checked += 1
            if x.row(first) != y.row(second) or x.row(second) != y.row(first):
                verdict.counterexamples.append(
                    Counterexample(
                        clause=ANONYMITY,
                        profile=profile,
                        pair=(first, second),
                        other_profile=swapped,
                        entries={
                            f"row {first}": " ".join(map(format_rational, x.row(first).values)),
                            f"row {second} after swap": " ".join(
                                map(format_rational, y.row(second).values)
                            ),
                        },
                    )
                )
    verdict.elapsed = time.perf_counter() - started
    return verdict


def check_neutrality(
    mech: IMechanism, domain: ProfileDomain, skip_missing: bool = False
) -> AxiomVerdict:
    """
    Columns travel with objects under renaming of two objects.

    Renaming j and j' exchanges the two columns and leaves every other
    column unchanged.

    Args:
        mech: Mechanism under test
        domain: Profiles to check
        skip_missing: Skip relabeled profiles outside the mechanism's domain

    Returns:
        AxiomVerdict

    Raises:
        DomainError: If a relabeled profile is missing and skip_missing is False
    """
    started = time.perf_counter()
    evaluate = _evaluator(mech)
    verdict = AxiomVerdict(NEUTRALITY, domain.descriptor())
    for profile in domain.profiles():
        x = evaluate(profile)
        verdict.profiles += 1
        for j, j_prime in combinations(profile.objects, 2):
            relabeled = relabel_objects(profile, j, j_prime)
            y = _partner(evaluate, mech, relabeled, skip_missing)
            if y is None:
                continue
            verdict.checked += 1
            rename = {j: j_prime, j_prime: j}
            changed = {
                _cell(agent, obj): _change(
                    x.entry(agent, obj), y.entry(agent, rename.get(obj, obj))
                )
                for agent in profile.agents
                for obj in profile.objects
                if x.entry(agent, obj) != y.entry(agent, rename.get(obj, obj))
            }
            if changed:
                verdict.counterexamples.append(
                    Counterexample(
                        clause=NEUTRALITY,
                        profile=profile,
                        pair=(j, j_prime),
                        other_profile=relabeled,
                        entries=changed,
                    )
                )
    verdict.elapsed = time.perf_counter() - started
    return verdict


def check_efficiency(mech: IMechanism, domain: ProfileDomain, axiom: str) -> AxiomVerdict:
    """
    Ordinal or ex-post efficiency of the mechanism's output at every profile.

    Args:
        mech: Mechanism under test
        domain: Profiles to check
        axiom: ORDINAL_EFFICIENCY or EXPOST_EFFICIENCY

    Returns:
        AxiomVerdict; ordinal counterexamples carry the trading cycle
    """
    if axiom not in (ORDINAL_EFFICIENCY, EXPOST_EFFICIENCY):
        raise InputError(f"'{axiom}' is not an efficiency axiom")
    started = time.perf_counter()
    evaluate = _evaluator(mech)
    verdict = AxiomVerdict(axiom, domain.descriptor())
    for profile in domain.profiles():
        x = evaluate(profile)
        verdict.profiles += 1
        verdict.checked += 1
        if axiom == ORDINAL_EFFICIENCY:
            certificate = is_ordinally_efficient(x, profile)
            if not certificate.efficient:
                verdict.counterexamples.append(
                    Counterexample(
                        clause=axiom,
                        profile=profile,
                        entries={
                            f"{better}>{worse}": f"agent {agent} holds {worse}"
                            for better, worse, agent in certificate.cycle
                        },
                    )
                )
        elif not is_expost_efficient(x, profile).efficient:
            verdict.counterexamples.append(
                Counterexample(clause=axiom, profile=profile, entries={})
            )
    verdict.elapsed = time.perf_counter() - started
    return verdict


def run_checks(
    mech: IMechanism,
    domain: ProfileDomain,
    axioms: Iterable[str],
    global_mode: bool = False,
    threads: Optional[int] = None,
    skip_missing: bool = False,
) -> List[AxiomVerdict]:
    """
    Dispatch every requested axiom to its checker.

    Returns:
        Verdicts in the order the axioms were requested
    """
    requested = _validate_axioms(axioms, ALL_AXIOMS)
    transition_axioms = [a for a in requested if a in TRANSITION_AXIOMS]
    results: Dict[str, AxiomVerdict] = {}
    if transition_axioms:
        results.update(
            check_transition_axioms(mech, domain, transition_axioms, global_mode, threads)
        )
    for axiom in requested:
        if axiom == SYMMETRY:
            results[axiom] = check_symmetry(mech, domain)
        elif axiom == ANONYMITY:
            results[axiom] = check_anonymity(mech, domain, skip_missing)
        elif axiom == NEUTRALITY:
            results[axiom] = check_neutrality(mech, domain, skip_missing)
        elif axiom in (ORDINAL_EFFICIENCY, EXPOST_EFFICIENCY):
            results[axiom] = check_efficiency(mech, domain, axiom)
    return [results[axiom] for axiom in requested]


@dataclass
class Disagreement:
    """Transition where two-sided local-SP and its decomposition differ."""

    transition: Transition
    two_sided_sp: bool
    decomposition: bool


def decomposition_agreement(mech: IMechanism, domain: ProfileDomain) -> List[Disagreement]:
    """
    Compare two-sided local-SP with swap monotonicity, upper invariance and
    lower invariance at every adjacent transition of the domain.

    Two-sided local-SP requires the truthful row to dominate the misreport
    row at the truthful order and, conversely, the misreport row to dominate
    the truthful row at the misreported order.

    Returns:
        Every transition where the two verdicts differ
    """
    evaluate = _evaluator(mech)
    disagreements = []
    for transition in domain.transitions():
        truthful = evaluate(transition.profile)
        misreport = evaluate(transition.target)
        agent = transition.agent
        forward = fosd_compare(
            truthful.row(agent), misreport.row(agent), transition.truthful_order
        ).weakly_dominates
        backward = fosd_compare(
            misreport.row(agent), truthful.row(agent), transition.target.order_of(agent)
        ).weakly_dominates
        decomposed = all(
            clause(truthful, misreport, transition) is None
            for clause in (
                swap_monotonicity_violation,
                upper_invariance_violation,
                lower_invariance_violation,
            )
        )
        if (forward and backward) != decomposed:
            disagreements.append(Disagreement(transition, forward and backward, decomposed))
    logger.info(f"Decomposition check for '{mech.name}': {len(disagreements)} disagreement(s)")
    return disagreements
