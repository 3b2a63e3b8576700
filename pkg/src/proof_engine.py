"""
Proof replay.

Steps of a ProofScript are applied in order to a shared ProofState. Every
step checks its own preconditions and raises PreconditionFailed when they
do not hold, so a replay either reaches the expected contradiction through
licensed inferences only or stops at the first unlicensed one. Entries set
to zero by ordinal efficiency are certified on the vertices of the node's
polytope before they are fixed.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import logging
import time
from typing import Any, Callable, Dict, List, Optional, Tuple

from .axioms import UPPER_INVARIANCE
from .codec import format_rational
from .config import Config
from .constraints import (
    COLUMN,
    ConstraintSystem,
    Contradiction,
    EntryValue,
    ProofState,
    format_entry,
    parse_line,
)
from .efficiency import has_trading_cycle
from .errors import CertificationFailed, InputError, PreconditionFailed
from .models import ZERO, Assignment, PreferenceProfile
from .polytope import birkhoff_face_vertices, enumerate_vertices
from .preferences import contour_sets, relabel_objects, swap_agents
from .proof_scripts import InferenceStep, ProofScript, ScriptNode, StepKind
from .simplex import LPStatus, minimize

logger = logging.getLogger(__name__)

BIRKHOFF = "birkhoff-face"
VERTEX = "vertex-enumeration"


@dataclass(frozen=True)
class EfficiencyZeroCertificate:
    """Every vertex with the entry positive carries a trading cycle."""

    node: str
    entry: Tuple[str, str]
    method: str
    vertices: int
    positive: int

    def __str__(self) -> str:
        return (
            f"{format_entry(*self.entry)} at profile {self.node}: {self.positive} of "
            f"{self.vertices} vertices put mass on it, each with a trading cycle "
            f"({self.method})"
        )

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready mapping."""
        return {
            "node": self.node,
            "entry": list(self.entry),
            "method": self.method,
            "vertices": self.vertices,
            "positive": self.positive,
        }


def certify_efficiency_zero(
    system: ConstraintSystem, agent: str, obj: str
) -> EfficiencyZeroCertificate:
    """
    Certify that ordinal efficiency forces an entry to zero.

    The matrices consistent with the node's constraints form a polytope. If
    every vertex putting positive mass on the entry has a cyclic trading
    relation, so does every point that puts positive mass on it, because
    such a point mixes in one of those vertices and its support contains
    the vertex's support.

    Args:
        system: Constraint view of the node
        agent: Row of the entry
        obj: Column of the entry

    Returns:
        EfficiencyZeroCertificate

    Raises:
        PreconditionFailed: If no matrix satisfies the node's constraints
        CertificationFailed: If some vertex with the entry positive is efficient
        CapacityError: If the polytope is too large to enumerate
    """
    profile = system.profile
    i, j = profile.agent_index(agent), profile.object_index(obj)
    zero_cells = system.birkhoff_zero_cells()
    if zero_cells is not None:
        method = BIRKHOFF
        n = system.n
        matrices = [
            Assignment(
                profile.agents,
                profile.objects,
                tuple(tuple(point[r * n : (r + 1) * n]) for r in range(n)),
            )
            for point in birkhoff_face_vertices(n, zero_cells)
        ]
    else:
        method = VERTEX
        lp, variables = system.linear_system()
        points = enumerate_vertices(lp, Config.VERTEX_MAX_DIMENSION)
        matrices = [system.matrix(variables, point) for point in points]
    if not matrices:
        raise PreconditionFailed(
            f"No matrix satisfies the constraints at profile {system.node}"
        )

    positive = [m for m in matrices if m.entries[i][j] > 0]
    for matrix in positive:
        if not has_trading_cycle(matrix, profile):
            raise CertificationFailed(
                f"{format_entry(agent, obj)} at profile {system.node}: the vertex "
                f"{[[format_rational(v) for v in row] for row in matrix.entries]} puts "
                f"{format_rational(matrix.entries[i][j])} on it and is ordinally efficient"
            )
    certificate = EfficiencyZeroCertificate(
        system.node, (agent, obj), method, len(matrices), len(positive)
    )
    logger.debug(f"Certified {certificate}")
    return certificate


@dataclass
class StepVerdict:
    """Outcome of one step."""

    index: int
    step: InferenceStep
    applied: bool
    detail: str
    certificates: List[EfficiencyZeroCertificate] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready mapping."""
        return {
            "index": self.index,
            "step": self.step.describe(),
            "license": list(self.step.license),
            "applied": self.applied,
            "detail": self.detail,
            "certificates": [c.to_dict() for c in self.certificates],
        }


@dataclass
class NodeComparison:
    """Derived matrix of a node against its expected matrix."""

    node: str
    profile: PreferenceProfile
    derived: List[List[str]]
    expected: Optional[List[List[str]]] = None
    mismatches: List[str] = field(default_factory=list)

    @property
    def matched(self) -> bool:
        """True when the node has an expected matrix and every entry agrees."""
        return self.expected is not None and not self.mismatches

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready mapping."""
        return {
            "node": self.node,
            "orders": self.profile.as_dict(),
            "derived": self.derived,
            "expected": self.expected,
            "matched": self.matched,
            "mismatches": list(self.mismatches),
        }


@dataclass
class ProofReport:
    """Verdicts, node comparisons and the contradiction of one replay."""

    script: str
    theorem: Optional[int]
    axioms: Tuple[str, ...]
    total_steps: int
    expected_contradiction: str
    verdicts: List[StepVerdict] = field(default_factory=list)
    nodes: List[NodeComparison] = field(default_factory=list)
    contradiction: Optional[Contradiction] = None
    wall_time: float = 0.0

    @property
    def failed_step(self) -> Optional[StepVerdict]:
        """First step whose precondition failed, if any."""
        return next((v for v in self.verdicts if not v.applied), None)

    @property
    def mismatched(self) -> List[NodeComparison]:
        """Nodes with an expected matrix the replay did not reproduce."""
        return [c for c in self.nodes if c.expected is not None and not c.matched]

    @property
    def success(self) -> bool:
        """True when all steps applied, all nodes matched and the contradiction fired."""
        return (
            len(self.verdicts) == self.total_steps
            and self.failed_step is None
            and not self.mismatched
            and self.contradiction is not None
            and self.contradiction.message == self.expected_contradiction
        )

    def certificates(self) -> List[EfficiencyZeroCertificate]:
        """Every efficiency certificate issued during the replay."""
        return [c for verdict in self.verdicts for c in verdict.certificates]

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready mapping."""
        return {
            "script": self.script,
            "theorem": self.theorem,
            "axioms": list(self.axioms),
            "success": self.success,
            "contradiction": (
                {"node": self.contradiction.node, "message": self.contradiction.message}
                if self.contradiction is not None
                else None
            ),
            "expected_contradiction": self.expected_contradiction,
            "steps": [v.to_dict() for v in self.verdicts],
            "nodes": [c.to_dict() for c in self.nodes],
            "wall_time": round(self.wall_time, 3),
        }


def _swap_move(
    state: ProofState, step: InferenceStep
) -> Tuple[PreferenceProfile, PreferenceProfile, str, str]:
    """
    Check that the target arises from the source by the step's adjacent swap.

    Returns:
        Tuple of (source profile, target profile, j, j') with j moving down
    """
    assert step.source is not None and step.agent is not None and step.pair is not None
    source = state.profile(step.source)
    target = state.profile(step.target)
    j, j_prime = step.pair
    order = source.order_of(step.agent)
    if order.rank(j_prime) != order.rank(j) + 1:
        raise PreconditionFailed(
            f"Agent {step.agent} does not rank {j} directly above {j_prime} "
            f"at profile {step.source}"
        )
    ranking = list(order.ranking)
    position = order.rank(j)
    ranking[position], ranking[position + 1] = j_prime, j
    if source.with_order(step.agent, ranking) != target:
        raise PreconditionFailed(
            f"Profile {step.target} does not arise from {step.source} by agent "
            f"{step.agent} swapping {j} and {j_prime}"
        )
    return source, target, j, j_prime


def _known(state: ProofState, node: str, agent: str, obj: str) -> Fraction:
    value = state.value(node, agent, obj)
    if value is None:
        raise PreconditionFailed(f"{format_entry(agent, obj)} at profile {node} is not known")
    return value


def _uniform(state: ProofState, step: InferenceStep) -> str:
    profile = state.profile(step.target)
    group = step.agents or profile.agents
    if len({profile.order_of(agent) for agent in group}) != 1:
        raise PreconditionFailed(
            f"Agents {', '.join(group)} do not share one order at profile {step.target}"
        )
    others = [agent for agent in profile.agents if agent not in group]
    for obj in profile.objects:
        mass = sum((_known(state, step.target, agent, obj) for agent in others), ZERO)
        share = (1 - mass) / len(group)
        for agent in group:
            state.fix(state.cell(step.target, agent, obj), share, step.target)
    return f"agents {', '.join(group)} split the remaining mass of every object evenly"


def _invariance_link(state: ProofState, step: InferenceStep) -> str:
    source, _, j, j_prime = _swap_move(state, step)
    assert step.source is not None and step.agent is not None
    order = source.order_of(step.agent)
    if step.kind is StepKind.UPPER_INVARIANCE_LINK:
        kept = contour_sets(order, j)[0]
    else:
        kept = contour_sets(order, j_prime)[1]
    if step.objects:
        outside = set(step.objects) - kept
        if outside:
            raise PreconditionFailed(
                f"Objects {sorted(outside)} are not kept by {step.kind.value} when agent "
                f"{step.agent} swaps {j} and {j_prime}"
            )
        kept = frozenset(step.objects)
    copied = []
    for obj in sorted(kept, key=order.rank):
        value = _known(state, step.source, step.agent, obj)
        state.fix(state.cell(step.target, step.agent, obj), value, step.target)
        copied.append(f"{format_entry(step.agent, obj)}={format_rational(value)}")
    return "copied " + (", ".join(copied) if copied else "nothing")


def _efficiency_zero(
    state: ProofState,
    step: InferenceStep,
    certificates: List[EfficiencyZeroCertificate],
) -> str:
    zeroed = []
    for agent, obj in step.entries:
        cell = state.cell(step.target, agent, obj)
        current = state.known.get(cell)
        if current == 0:
            continue
        if current is not None:
            raise PreconditionFailed(
                f"{format_entry(agent, obj)} at profile {step.target} is already known to be "
                f"{format_rational(current)}"
            )
        certificates.append(certify_efficiency_zero(state.system(step.target), agent, obj))
        state.fix(cell, ZERO, step.target)
        state.resolve()
        zeroed.append(format_entry(agent, obj))
    return "zeroed " + (" ".join(zeroed) if zeroed else "nothing new")


def _symmetry_equalize(state: ProofState, step: InferenceStep) -> str:
    profile = state.profile(step.target)
    candidates = step.agents or profile.agents
    groups: Dict[str, List[str]] = {}
    for agent in candidates:
        groups.setdefault(str(profile.order_of(agent)), []).append(agent)
    merged = [members for members in groups.values() if len(members) > 1]
    if not merged:
        raise PreconditionFailed(f"No two agents share an order at profile {step.target}")
    for members in merged:
        for agent in members[1:]:
            for obj in profile.objects:
                state.alias(
                    state.cell(step.target, members[0], obj),
                    state.cell(step.target, agent, obj),
                    step.target,
                )
    return "equal rows for " + "; ".join(",".join(members) for members in merged)


def _bistochastic_complete(state: ProofState, step: InferenceStep) -> str:
    profile = state.profile(step.target)
    lines = [parse_line(text) for text in step.lines]
    for kind, label in lines:
        try:
            if kind == COLUMN:
                profile.object_index(label)
            else:
                profile.agent_index(label)
        except InputError as e:
            raise PreconditionFailed(f"{e} at profile {step.target}") from e
    added = state.add_line_sums(
        step.target, lines or None, provenance=f"bistochasticity at {step.target}"
    )
    return f"added {added} line sums"


def _swap_null(state: ProofState, step: InferenceStep) -> str:
    source, target, j, j_prime = _swap_move(state, step)
    assert step.source is not None and step.agent is not None
    agent = step.agent

    def known_or_none(node: str, obj: str) -> Optional[Fraction]:
        return state.value(node, agent, obj)

    down = known_or_none(step.source, j)
    up_source = known_or_none(step.source, j_prime)
    up_target = known_or_none(step.target, j_prime)
    down_target = known_or_none(step.target, j)
    if down == 0:
        reason = f"{format_entry(agent, j)} is 0 at profile {step.source}"
    elif up_source is not None and up_target is not None and up_source >= up_target:
        reason = f"{format_entry(agent, j_prime)} cannot increase"
    elif down is not None and down_target is not None and down <= down_target:
        reason = f"{format_entry(agent, j)} cannot decrease"
    else:
        raise PreconditionFailed(
            f"Swap monotonicity allows agent {agent}'s assignment to change when swapping "
            f"{j} and {j_prime} at profile {step.source}"
        )
    agents = source.agents if step.whole else (agent,)
    for row in agents:
        for obj in source.objects:
            state.alias(
                state.cell(step.source, row, obj),
                state.cell(step.target, row, obj),
                step.target,
            )
    scope = "whole matrix" if step.whole else f"row {agent}"
    return f"{reason}; {scope} unchanged"


def _anonymity(state: ProofState, step: InferenceStep) -> str:
    assert step.source is not None
    first, second = step.agents
    source = state.profile(step.source)
    if swap_agents(source, first, second) != state.profile(step.target):
        raise PreconditionFailed(
            f"Profile {step.target} does not arise from {step.source} by agents {first} and "
            f"{second} exchanging orders"
        )
    for obj in source.objects:
        for mine, theirs in ((first, second), (second, first)):
            state.alias(
                state.cell(step.source, mine, obj),
                state.cell(step.target, theirs, obj),
                step.target,
            )
    return f"rows {first} and {second} exchanged"


def _neutrality(state: ProofState, step: InferenceStep) -> str:
    assert step.source is not None
    j, j_prime = step.objects
    source = state.profile(step.source)
    if relabel_objects(source, j, j_prime) != state.profile(step.target):
        raise PreconditionFailed(
            f"Profile {step.target} does not arise from {step.source} by renaming "
            f"{j} and {j_prime}"
        )
    renamed = {j: j_prime, j_prime: j}
    for agent in source.agents:
        for obj in source.objects:
            state.alias(
                state.cell(step.source, agent, obj),
                state.cell(step.target, agent, renamed.get(obj, obj)),
                step.target,
            )
    return f"columns {j} and {j_prime} exchanged"


def _interval_transfer(state: ProofState, step: InferenceStep) -> str:
    source, _, j, j_prime = _swap_move(state, step)
    assert step.source is not None and step.agent is not None
    (agent, obj), = step.entries
    if agent != step.agent:
        raise PreconditionFailed(f"Only agent {step.agent}'s entries move with its own swap")
    order = source.order_of(agent)
    upper, lower = contour_sets(order, j)[0], contour_sets(order, j_prime)[1]
    allowed = upper if step.clause == UPPER_INVARIANCE else lower
    if obj not in allowed:
        raise PreconditionFailed(
            f"{step.clause} does not keep {format_entry(agent, obj)} when agent {agent} swaps "
            f"{j} and {j_prime}"
        )
    interval = state.system(step.source).interval(agent, obj)
    assert interval.lo is not None and interval.hi is not None
    state.set_bounds(
        state.cell(step.target, agent, obj),
        interval.lo,
        interval.hi,
        step.target,
        entry=(agent, obj),
    )
    return f"{format_entry(agent, obj)} at profile {step.target} lies in {interval}"


def _contradiction_check(state: ProofState, step: InferenceStep) -> str:
    lines = [parse_line(text) for text in step.lines]
    found = state.contradiction
    if found is not None:
        if found.node != step.target:
            raise PreconditionFailed(
                f"The contradiction arose at profile {found.node}, not {step.target}"
            )
        prefixes = tuple(f"{kind} {label} " for kind, label in lines)
        if prefixes and not found.message.startswith(prefixes):
            raise PreconditionFailed(
                f"The contradiction at profile {step.target} is not on {', '.join(step.lines)}"
            )
        return f"confirmed: {found.message}"

    view = state.system(step.target)
    for line in lines or view.lines():
        system, variables = view.linear_system(omit=line)
        position = {cell: k for k, cell in enumerate(variables)}
        coefficients: Dict[int, int] = {}
        for cell in view.line_cells(line):
            if cell in position:
                coefficients[position[cell]] = coefficients.get(position[cell], 0) + 1
        known_mass = view.line_mass(line)[0]
        result = minimize(system, coefficients)
        kind, label = line
        if result.status is LPStatus.INFEASIBLE:
            state.contradict(
                step.target, f"constraints at profile {step.target} are infeasible"
            )
        elif result.value is not None and known_mass + result.value > 1:
            state.contradict(
                step.target,
                f"{kind} {label} at profile {step.target}: mass at least "
                f"{format_rational(known_mass + result.value)} exceeds 1",
            )
        if state.contradiction is not None:
            return f"raised: {state.contradiction.message}"
    raise PreconditionFailed(f"No line at profile {step.target} is overloaded")


_HANDLERS: Dict[StepKind, Callable[[ProofState, InferenceStep], str]] = {
    StepKind.UNIFORM_BY_SYMMETRY: _uniform,
    StepKind.UPPER_INVARIANCE_LINK: _invariance_link,
    StepKind.LOWER_INVARIANCE_LINK: _invariance_link,
    StepKind.SYMMETRY_EQUALIZE: _symmetry_equalize,
    StepKind.BISTOCHASTIC_COMPLETE: _bistochastic_complete,
    StepKind.SWAP_NULL_PROPAGATION: _swap_null,
    StepKind.ANONYMITY_RELABEL: _anonymity,
    StepKind.NEUTRALITY_RELABEL: _neutrality,
    StepKind.INTERVAL_TRANSFER: _interval_transfer,
    StepKind.CONTRADICTION_CHECK: _contradiction_check,
}


def apply_step(
    step: InferenceStep,
    state: ProofState,
    certificates: Optional[List[EfficiencyZeroCertificate]] = None,
) -> str:
    """
    Apply one inference to the store and propagate.

    Args:
        step: Inference to apply; its nodes must be registered in state
        state: Store, modified in place
        certificates: Receives the certificates of EfficiencyZero steps

    Returns:
        Human-readable summary of what the step derived

    Raises:
        PreconditionFailed: If the step is not licensed in the current state
        CertificationFailed: If an EfficiencyZero entry cannot be certified
    """
    if state.contradiction is not None and step.kind is not StepKind.CONTRADICTION_CHECK:
        raise PreconditionFailed(
            f"A contradiction was already raised: {state.contradiction.message}"
        )
    if step.kind is StepKind.EFFICIENCY_ZERO:
        detail = _efficiency_zero(state, step, certificates if certificates is not None else [])
    else:
        detail = _HANDLERS[step.kind](state, step)
    state.resolve()
    return detail


def _compare(state: ProofState, node: ScriptNode) -> NodeComparison:
    view = state.system(node.name)
    profile = node.profile
    derived: List[List[EntryValue]] = []
    mismatches: List[str] = []
    for agent in profile.agents:
        row = []
        for obj in profile.objects:
            value = view.entry(agent, obj)
            if not value.is_known:
                try:
                    value = view.interval(agent, obj)
                except PreconditionFailed:
                    pass
            row.append(value)
            if node.expected is None:
                continue
            expected = node.expected_value(agent, obj)
            if value.lo != expected.lo or value.hi != expected.hi:
                mismatches.append(
                    f"{format_entry(agent, obj)}: expected {expected}, derived {value}"
                )
        derived.append(row)
    return NodeComparison(
        node=node.name,
        profile=profile,
        derived=[[str(v) for v in row] for row in derived],
        expected=[list(row) for row in node.expected] if node.expected is not None else None,
        mismatches=mismatches,
    )


def replay(script: ProofScript) -> ProofReport:
    """
    Replay a script and compare every node with its expected matrix.

    Replay stops at the first step whose precondition fails. Nodes are
    compared once all steps have run.

    Args:
        script: Proof script

    Returns:
        ProofReport; ``success`` tells whether the proof went through
    """
    started = time.perf_counter()
    state = ProofState()
    for node in script.nodes:
        state.add_node(node.name, node.profile)
    report = ProofReport(
        script=script.name,
        theorem=script.theorem,
        axioms=script.axioms,
        total_steps=len(script.steps),
        expected_contradiction=script.expected_contradiction,
    )

    for index, step in enumerate(script.steps):
        certificates: List[EfficiencyZeroCertificate] = []
        try:
            detail = apply_step(step, state, certificates)
        except PreconditionFailed as e:
            logger.warning(f"Step {index} ({step.describe()}) failed: {e}")
            report.verdicts.append(StepVerdict(index, step, False, str(e), certificates))
            break
        logger.debug(f"Step {index}: {step.describe()} -> {detail}")
        report.verdicts.append(StepVerdict(index, step, True, detail, certificates))

    report.nodes = [_compare(state, node) for node in script.nodes]
    report.contradiction = state.contradiction
    report.wall_time = time.perf_counter() - started
    logger.info(
        f"Replayed {len(report.verdicts)}/{len(script.steps)} steps of '{script.name}' in "
        f"{report.wall_time:.2f}s; success={report.success}"
    )
    return report
