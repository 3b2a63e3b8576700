"""
Proof scripts.

A script names the profiles an impossibility proof visits (its nodes,
with the matrices the proof derives for them) and lists the inference
steps that link them, in order. Two builtin scripts encode the proofs
that no mechanism for four agents satisfies

1. upper invariance, lower invariance, ordinal efficiency and symmetry;
2. swap monotonicity, lower invariance, ordinal efficiency, anonymity,
   neutrality and non-bossiness.

Scripts can be padded with extra agents and travel as JSON.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
import json
import logging
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from .axioms import (
    ANONYMITY,
    LOWER_INVARIANCE,
    NEUTRALITY,
    NON_BOSSINESS,
    ORDINAL_EFFICIENCY,
    SWAP_MONOTONICITY,
    SYMMETRY,
    UPPER_INVARIANCE,
)
from .codec import format_rational, parse_rational
from .config import Config
from .constraints import EntryValue, parse_affine, parse_line
from .errors import CapacityError, DimensionError, InputError, ParseError
from .models import Assignment, PreferenceProfile
from .preferences import default_labels, relabel_objects

logger = logging.getLogger(__name__)

BISTOCHASTICITY = "bistochasticity"
BASE_ORDER = "a>b>c>d"


class StepKind(Enum):
    """Inference patterns used by the proofs."""

    UNIFORM_BY_SYMMETRY = "UniformBySymmetry"
    UPPER_INVARIANCE_LINK = "UpperInvarianceLink"
    LOWER_INVARIANCE_LINK = "LowerInvarianceLink"
    EFFICIENCY_ZERO = "EfficiencyZero"
    SYMMETRY_EQUALIZE = "SymmetryEqualize"
    BISTOCHASTIC_COMPLETE = "BistochasticComplete"
    SWAP_NULL_PROPAGATION = "SwapNullPropagation"
    ANONYMITY_RELABEL = "AnonymityRelabel"
    NEUTRALITY_RELABEL = "NeutralityRelabel"
    INTERVAL_TRANSFER = "IntervalTransfer"
    CONTRADICTION_CHECK = "ContradictionCheck"


# Steps that only read derived values; replay matches nodes before them
TERMINAL_KINDS = (StepKind.INTERVAL_TRANSFER, StepKind.CONTRADICTION_CHECK)

_LINKED_KINDS = (
    StepKind.UPPER_INVARIANCE_LINK,
    StepKind.LOWER_INVARIANCE_LINK,
    StepKind.SWAP_NULL_PROPAGATION,
    StepKind.INTERVAL_TRANSFER,
)

_LICENSES: Dict[StepKind, Tuple[str, ...]] = {
    StepKind.UNIFORM_BY_SYMMETRY: (SYMMETRY, BISTOCHASTICITY),
    StepKind.UPPER_INVARIANCE_LINK: (UPPER_INVARIANCE,),
    StepKind.LOWER_INVARIANCE_LINK: (LOWER_INVARIANCE,),
    StepKind.EFFICIENCY_ZERO: (ORDINAL_EFFICIENCY,),
    StepKind.SYMMETRY_EQUALIZE: (SYMMETRY,),
    StepKind.BISTOCHASTIC_COMPLETE: (BISTOCHASTICITY,),
    StepKind.SWAP_NULL_PROPAGATION: (SWAP_MONOTONICITY,),
    StepKind.ANONYMITY_RELABEL: (ANONYMITY,),
    StepKind.NEUTRALITY_RELABEL: (NEUTRALITY,),
    StepKind.INTERVAL_TRANSFER: (),
    StepKind.CONTRADICTION_CHECK: (BISTOCHASTICITY,),
}


@dataclass(frozen=True)
class InferenceStep:
    """
    One inference of a proof.

    Linking kinds read the source node and write the target node; the
    others work inside the target. ``pair`` is always (j, j') with j ranked
    directly above j' by ``agent`` at the source.
    """

    kind: StepKind
    target: str
    source: Optional[str] = None
    agent: Optional[str] = None
    pair: Optional[Tuple[str, str]] = None
    objects: Tuple[str, ...] = ()
    entries: Tuple[Tuple[str, str], ...] = ()
    agents: Tuple[str, ...] = ()
    lines: Tuple[str, ...] = ()
    clause: str = LOWER_INVARIANCE
    whole: bool = True
    note: str = ""

    def __post_init__(self) -> None:
        """Check that the fields required by the kind are present."""
        kind = self.kind
        if kind in _LINKED_KINDS and (
            self.source is None or self.agent is None or self.pair is None
        ):
            raise InputError(f"{kind.value} needs a source, an agent and a swapped pair")
        if kind is StepKind.ANONYMITY_RELABEL and (
            self.source is None or len(self.agents) != 2
        ):
            raise InputError("AnonymityRelabel needs a source and two agents")
        if kind is StepKind.NEUTRALITY_RELABEL and (
            self.source is None or len(self.objects) != 2
        ):
            raise InputError("NeutralityRelabel needs a source and two objects")
        if kind is StepKind.EFFICIENCY_ZERO and not self.entries:
            raise InputError("EfficiencyZero needs at least one entry")
        if kind is StepKind.INTERVAL_TRANSFER:
            if len(self.entries) != 1:
                raise InputError("IntervalTransfer moves exactly one entry")
            if self.clause not in (UPPER_INVARIANCE, LOWER_INVARIANCE):
                raise InputError(
                    f"IntervalTransfer clause must be an invariance, got {self.clause}"
                )
        for line in self.lines:
            parse_line(line)

    @property
    def license(self) -> Tuple[str, ...]:
        """Axioms (and bistochasticity) the step relies on."""
        if self.kind is StepKind.INTERVAL_TRANSFER:
            return (self.clause,)
        if self.kind is StepKind.SWAP_NULL_PROPAGATION and self.whole:
            return (SWAP_MONOTONICITY, NON_BOSSINESS)
        return _LICENSES[self.kind]

    def describe(self) -> str:
        """One-line summary, e.g. ``UpperInvarianceLink I -> II (agent 4 swaps c,d)``."""
        head = self.kind.value
        where = f"{self.source} -> {self.target}" if self.source else self.target
        details = []
        if self.agent is not None and self.pair is not None:
            details.append(f"agent {self.agent} swaps {self.pair[0]},{self.pair[1]}")
        if self.agents:
            details.append("agents " + ",".join(self.agents))
        if self.objects:
            details.append("objects " + ",".join(self.objects))
        if self.entries:
            details.append(" ".join(f"({i},{j})" for i, j in self.entries))
        if self.lines:
            details.append(" ".join(self.lines))
        if self.kind is StepKind.SWAP_NULL_PROPAGATION and not self.whole:
            details.append("row only")
        if self.note:
            details.append(self.note)
        suffix = f" ({'; '.join(details)})" if details else ""
        return f"{head} {where}{suffix}"

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready mapping; defaults are omitted."""
        data: Dict[str, Any] = {"kind": self.kind.value, "target": self.target}
        if self.source is not None:
            data["source"] = self.source
        if self.agent is not None:
            data["agent"] = self.agent
        if self.pair is not None:
            data["pair"] = list(self.pair)
        if self.objects:
            data["objects"] = list(self.objects)
        if self.entries:
            data["entries"] = [list(entry) for entry in self.entries]
        if self.agents:
            data["agents"] = list(self.agents)
        if self.lines:
            data["lines"] = list(self.lines)
        if self.kind is StepKind.INTERVAL_TRANSFER:
            data["clause"] = self.clause
        if self.kind is StepKind.SWAP_NULL_PROPAGATION:
            data["whole"] = self.whole
        if self.note:
            data["note"] = self.note
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "InferenceStep":
        """
        Parse the mapping produced by to_dict.

        Raises:
            ParseError: If the kind is unknown or a field has the wrong shape
        """
        try:
            kind = StepKind(data["kind"])
            pair = data.get("pair")
            return cls(
                kind=kind,
                target=str(data["target"]),
                source=str(data["source"]) if "source" in data else None,
                agent=str(data["agent"]) if "agent" in data else None,
                pair=(str(pair[0]), str(pair[1])) if pair is not None else None,
                objects=tuple(str(o) for o in data.get("objects", ())),
                entries=tuple((str(i), str(j)) for i, j in data.get("entries", ())),
                agents=tuple(str(a) for a in data.get("agents", ())),
                lines=tuple(str(line) for line in data.get("lines", ())),
                clause=str(data.get("clause", LOWER_INVARIANCE)),
                whole=bool(data.get("whole", True)),
                note=str(data.get("note", "")),
            )
        except (KeyError, ValueError, TypeError, IndexError) as e:
            raise ParseError(f"Malformed step {dict(data)}: {e}") from e


@dataclass(frozen=True)
class ScriptNode:
    """
    A profile visited by a proof.

    Expected entries are rationals or affine expressions in one parameter
    x ranging over ``parameter``; nodes without an expected matrix are
    auxiliary profiles the proof passes through.
    """

    name: str
    profile: PreferenceProfile
    expected: Optional[Tuple[Tuple[str, ...], ...]] = None
    parameter: Optional[Tuple[Fraction, Fraction]] = None
    note: str = ""

    def __post_init__(self) -> None:
        """Validate the expected matrix against the profile."""
        if self.expected is None:
            return
        n = self.profile.n
        if len(self.expected) != n or any(len(row) != n for row in self.expected):
            raise DimensionError(f"Expected matrix of node '{self.name}' is not {n}x{n}")
        slopes = [parse_affine(text)[1] for row in self.expected for text in row]
        if any(slopes) and self.parameter is None:
            raise InputError(f"Node '{self.name}' uses x but declares no parameter range")
        if self.parameter is not None and self.parameter[0] > self.parameter[1]:
            raise InputError(f"Node '{self.name}' has an empty parameter range")

    @property
    def auxiliary(self) -> bool:
        """True for nodes without an expected matrix."""
        return self.expected is None

    def expected_value(self, agent: str, obj: str) -> EntryValue:
        """
        Expected entry as a known value or the interval swept by x.

        Raises:
            InputError: If the node has no expected matrix
        """
        if self.expected is None:
            raise InputError(f"Node '{self.name}' has no expected matrix")
        text = self.expected[self.profile.agent_index(agent)][self.profile.object_index(obj)]
        constant, slope = parse_affine(text)
        if not slope or self.parameter is None:
            return EntryValue.known(constant)
        ends = sorted(constant + slope * bound for bound in self.parameter)
        return EntryValue.interval(ends[0], ends[1])

    def instantiate(self, x: Fraction = Fraction(0)) -> Assignment:
        """
        Expected matrix with the parameter set to x.

        Raises:
            InputError: If the node has no expected matrix
            BistochasticityError: If the result is not bistochastic
        """
        if self.expected is None:
            raise InputError(f"Node '{self.name}' has no expected matrix")
        rows = []
        for row in self.expected:
            values = []
            for text in row:
                constant, slope = parse_affine(text)
                values.append(constant + slope * x)
            rows.append(values)
        return Assignment.from_rows(self.profile.agents, self.profile.objects, rows)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready mapping."""
        data: Dict[str, Any] = {"name": self.name, "orders": self.profile.as_dict()}
        if self.expected is not None:
            data["expected"] = [list(row) for row in self.expected]
        if self.parameter is not None:
            data["parameter"] = [format_rational(bound) for bound in self.parameter]
        if self.note:
            data["note"] = self.note
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ScriptNode":
        """
        Parse the mapping produced by to_dict.

        Raises:
            ParseError: If a field is missing or malformed
        """
        try:
            expected = data.get("expected")
            parameter = data.get("parameter")
            return cls(
                name=str(data["name"]),
                profile=PreferenceProfile.from_orders(
                    {str(agent): order for agent, order in data["orders"].items()}
                ),
                expected=(
                    tuple(tuple(str(v) for v in row) for row in expected)
                    if expected is not None
                    else None
                ),
                parameter=(
                    (parse_rational(parameter[0]), parse_rational(parameter[1]))
                    if parameter is not None
                    else None
                ),
                note=str(data.get("note", "")),
            )
        except (KeyError, TypeError, AttributeError, IndexError) as e:
            raise ParseError(f"Malformed node {dict(data)}: {e}") from e


@dataclass
class ProofScript:
    """Nodes, ordered steps and the contradiction the steps must reach."""

    name: str
    nodes: List[ScriptNode]
    steps: List[InferenceStep]
    expected_contradiction: str
    axioms: Tuple[str, ...] = ()
    theorem: Optional[int] = None
    notes: List[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        """Check node names and step references."""
        names = [node.name for node in self.nodes]
        if len(set(names)) != len(names):
            raise InputError(f"Script '{self.name}' declares a node twice")
        known = set(names)
        for step in self.steps:
            for ref in (step.target, step.source):
                if ref is not None and ref not in known:
                    raise InputError(f"Step '{step.describe()}' refers to unknown node '{ref}'")
        sizes = {node.profile.n for node in self.nodes}
        if len(sizes) > 1:
            raise DimensionError(f"Script '{self.name}' mixes profile sizes {sorted(sizes)}")

    @property
    def n(self) -> int:
        """Number of agents of every node."""
        return self.nodes[0].profile.n if self.nodes else 0

    def node(self, name: str) -> ScriptNode:
        """
        Look up a node.

        Raises:
            InputError: If the name is unknown
        """
        for node in self.nodes:
            if node.name == name:
                return node
        raise InputError(f"Script '{self.name}' has no node '{name}'")

    def profiles(self) -> List[PreferenceProfile]:
        """Distinct profiles in node order."""
        seen: List[PreferenceProfile] = []
        for node in self.nodes:
            if node.profile not in seen:
                seen.append(node.profile)
        return seen

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready mapping."""
        return {
            "name": self.name,
            "theorem": self.theorem,
            "axioms": list(self.axioms),
            "notes": list(self.notes),
            "expected_contradiction": self.expected_contradiction,
            "nodes": [node.to_dict() for node in self.nodes],
            "steps": [step.to_dict() for step in self.steps],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ProofScript":
        """
        Parse the mapping produced by to_dict.

        Raises:
            ParseError: If a required key is missing
        """
        if not isinstance(data, Mapping):
            raise ParseError("Script JSON must be an object")
        try:
            return cls(
                name=str(data["name"]),
                nodes=[ScriptNode.from_dict(node) for node in data["nodes"]],
                steps=[InferenceStep.from_dict(step) for step in data["steps"]],
                expected_contradiction=str(data["expected_contradiction"]),
                axioms=tuple(str(a) for a in data.get("axioms", ())),
                theorem=data.get("theorem"),
                notes=[str(note) for note in data.get("notes", ())],
            )
        except KeyError as e:
            raise ParseError(f"Script JSON is missing {e}") from e


def script_to_json(script: ProofScript) -> str:
    """Serialize a script with stable key order."""
    return json.dumps(script.to_dict(), indent=2)


def script_from_json(text: str) -> ProofScript:
    """
    Parse a script serialized by script_to_json.

    Raises:
        ParseError: If the text is not valid JSON or not a script
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"Invalid JSON: {e}") from e
    return ProofScript.from_dict(data)


def _profile(**orders: str) -> PreferenceProfile:
    """Four-agent profile; agents not named rank a>b>c>d."""
    base = {str(agent): BASE_ORDER for agent in range(1, 5)}
    base.update({name.lstrip("_"): order for name, order in orders.items()})
    return PreferenceProfile.from_orders(base)


def _matrix(*rows: str) -> Tuple[Tuple[str, ...], ...]:
    return tuple(tuple(row.split()) for row in rows)


def _upper(source: str, target: str, agent: str, pair: str, objects: str = "") -> InferenceStep:
    return InferenceStep(
        StepKind.UPPER_INVARIANCE_LINK,
        target,
        source=source,
        agent=agent,
        pair=(pair[0], pair[1]),
        objects=tuple(objects),
    )


def _lower(source: str, target: str, agent: str, pair: str) -> InferenceStep:
    return InferenceStep(
        StepKind.LOWER_INVARIANCE_LINK,
        target,
        source=source,
        agent=agent,
        pair=(pair[0], pair[1]),
    )


def _zero(target: str, *entries: str) -> InferenceStep:
    return InferenceStep(
        StepKind.EFFICIENCY_ZERO, target, entries=tuple((e[0], e[1]) for e in entries)
    )


def _symmetry(target: str) -> InferenceStep:
    return InferenceStep(StepKind.SYMMETRY_EQUALIZE, target)


def _complete(target: str, *lines: str) -> InferenceStep:
    return InferenceStep(StepKind.BISTOCHASTIC_COMPLETE, target, lines=tuple(lines))


def _swap_null(
    source: str, target: str, agent: str, pair: str, whole: bool = True
) -> InferenceStep:
    return InferenceStep(
        StepKind.SWAP_NULL_PROPAGATION,
        target,
        source=source,
        agent=agent,
        pair=(pair[0], pair[1]),
        whole=whole,
    )


def _anonymity(source: str, target: str, agents: str) -> InferenceStep:
    return InferenceStep(
        StepKind.ANONYMITY_RELABEL, target, source=source, agents=tuple(agents)
    )


def _neutrality(source: str, target: str, objects: str) -> InferenceStep:
    return InferenceStep(
        StepKind.NEUTRALITY_RELABEL, target, source=source, objects=tuple(objects)
    )


def _first_script() -> ProofScript:
    nodes = [
        ScriptNode("I", _profile(), _matrix(*["1/4 1/4 1/4 1/4"] * 4)),
        ScriptNode(
            "II",
            _profile(_4="a>b>d>c"),
            _matrix(*["1/4 1/4 1/3 1/6"] * 3, "1/4 1/4 0 1/2"),
        ),
        ScriptNode(
            "III",
            _profile(_4="a>d>b>c"),
            _matrix(*["1/4 1/3 1/3 1/12"] * 3, "1/4 0 0 3/4"),
        ),
        ScriptNode(
            "IV",
            _profile(_3="a>b>d>c", _4="a>b>d>c"),
            _matrix(*["1/4 1/4 1/2 0"] * 2, *["1/4 1/4 0 1/2"] * 2),
        ),
        ScriptNode(
            "V",
            _profile(_3="a>b>d>c", _4="a>d>b>c"),
            _matrix(*["1/4 1/3 5/12 0"] * 2, "1/4 1/3 1/6 1/4", "1/4 0 0 3/4"),
        ),
        ScriptNode(
            "VI",
            _profile(_3="b>a>c>d"),
            _matrix(*["1/3 1/6 1/4 1/4"] * 2, "0 1/2 1/4 1/4", "1/3 1/6 1/4 1/4"),
        ),
        ScriptNode(
            "VII-a",
            _profile(_3="b>a>c>d", _4="a>b>d>c"),
            note="agent 4 swaps d above c at VI before swapping d above b",
        ),
        ScriptNode(
            "VII",
            _profile(_3="b>a>c>d", _4="a>d>b>c"),
            _matrix(*["1/3 5/24 1/3 1/8"] * 2, "0 7/12 1/3 1/12", "1/3 0 0 2/3"),
        ),
        ScriptNode(
            "VI'",
            _profile(_3="b>a>d>c"),
            note="agent 3 swaps c,d at VI; carries agent 4's share of a towards VIII",
        ),
        ScriptNode(
            "VIII-a",
            _profile(_3="b>a>d>c", _4="a>b>d>c"),
            note="agent 4 swaps d above c at VI' before swapping d above b",
        ),
        ScriptNode(
            "VIII",
            _profile(_3="b>a>d>c", _4="a>d>b>c"),
            _matrix(
                *["1/3 5/24 11/24 0"] * 2,
                "0 7/12 x 5/12-x",
                "1/3 0 1/12-x 7/12+x",
            ),
            parameter=(Fraction(0), Fraction(1, 12)),
        ),
    ]
    steps = [
        InferenceStep(StepKind.UNIFORM_BY_SYMMETRY, "I", agents=("1", "2", "3", "4")),
        # II
        _upper("I", "II", "4", "cd"),
        _symmetry("II"),
        _zero("II", "4c"),
        _complete("II"),
        # III
        _upper("II", "III", "4", "bd"),
        _lower("II", "III", "4", "bd"),
        _symmetry("III"),
        _zero("III", "4b"),
        _complete("III"),
        # IV
        _upper("II", "IV", "3", "cd"),
        _symmetry("IV"),
        _complete("IV"),
        _zero("IV", "3c", "4c"),
        # V
        _upper("III", "V", "3", "cd"),
        _upper("IV", "V", "4", "bd"),
        _lower("IV", "V", "4", "bd"),
        _symmetry("V"),
        _zero("V", "4b"),
        _complete("V"),
        _zero("V", "1d", "2d"),
        # VI
        _lower("I", "VI", "3", "ab"),
        _symmetry("VI"),
        _zero("VI", "3a"),
        _complete("VI"),
        # VII
        _lower("III", "VII", "3", "ab"),
        _symmetry("VII"),
        _zero("VII", "3a"),
        _zero("VII", "4b", "4c"),
        _upper("VI", "VII-a", "4", "cd"),
        _upper("VII-a", "VII", "4", "bd"),
        _complete("VII"),
        # VIII
        _upper("VII", "VIII", "3", "cd"),
        _upper("VI", "VI'", "3", "cd"),
        _symmetry("VI'"),
        _complete("VI'", "column:a"),
        _upper("VI'", "VIII-a", "4", "cd", objects="a"),
        _upper("VIII-a", "VIII", "4", "bd"),
        _symmetry("VIII"),
        _zero("VIII", "4b"),
        _complete("VIII"),
        _zero("VIII", "1d", "2d"),
        # VIII and V are one swap of agent 3 apart
        InferenceStep(
            StepKind.INTERVAL_TRANSFER,
            "V",
            source="VIII",
            agent="3",
            pair=("b", "a"),
            entries=(("3", "c"),),
            clause=LOWER_INVARIANCE,
            note="(3,c) lies in the lower contour of the swapped pair b,a",
        ),
        InferenceStep(StepKind.CONTRADICTION_CHECK, "V"),
    ]
    return ProofScript(
        name="theorem-1",
        theorem=1,
        axioms=(UPPER_INVARIANCE, LOWER_INVARIANCE, ORDINAL_EFFICIENCY, SYMMETRY),
        nodes=nodes,
        steps=steps,
        expected_contradiction=(
            "entry (3,c) at profile V: derived 1/6, transferred bound [0,1/12]"
        ),
        notes=[
            "VII is reached from VI by two upper-invariance swaps of agent 4 through VII-a",
            "VIII learns agent 4's share of a from VI through VI' and VIII-a",
            "the transfer from VIII to V keeps (3,c) because c lies below a in b>a>d>c",
        ],
    )


def _second_script() -> ProofScript:
    first = _matrix(*["1/2 0 1/2 0"] * 2, *["0 1/2 0 1/2"] * 2)
    fourth = _matrix(*["1/2 1/8 3/8 0"] * 2, "0 3/4 1/4 0", "0 0 0 1")
    nodes = [
        ScriptNode("I", _profile(_3="b>a>d>c", _4="b>a>d>c"), first),
        ScriptNode("I-a", _profile(_1="b>a>d>c", _4="b>a>d>c")),
        ScriptNode(
            "I'",
            _profile(_1="b>a>d>c", _2="b>a>d>c"),
            _matrix(*["0 1/2 0 1/2"] * 2, *["1/2 0 1/2 0"] * 2),
        ),
        ScriptNode("I'-b", _profile(_1="a>b>d>c", _2="a>b>d>c", _3="b>a>c>d", _4="b>a>c>d")),
        ScriptNode("I''", _profile(_3="b>a>d>c", _4="b>a>d>c"), first),
        ScriptNode("II-a", _profile(_3="b>d>a>c", _4="b>a>d>c")),
        ScriptNode("II-b", _profile(_3="b>d>c>a", _4="b>a>d>c")),
        ScriptNode("II-c", _profile(_3="b>d>c>a", _4="b>d>a>c")),
        ScriptNode("II", _profile(_3="b>d>c>a", _4="b>d>c>a"), first),
        ScriptNode(
            "III",
            _profile(_3="d>b>c>a", _4="d>b>c>a"),
            _matrix(*["1/2 1/4 1/4 0"] * 2, *["0 1/4 1/4 1/2"] * 2),
        ),
        ScriptNode("III-a", _profile(_1="d>b>c>a", _4="d>b>c>a")),
        ScriptNode("III'", _profile(_1="d>b>c>a", _2="d>b>c>a")),
        ScriptNode("IV", _profile(_3="b>d>c>a", _4="d>b>c>a"), fourth),
        ScriptNode("IV-a", _profile(_3="b>c>d>a", _4="d>b>c>a")),
        ScriptNode("V", _profile(_3="b>c>a>d", _4="d>b>c>a"), fourth),
        ScriptNode("VI", _profile(_3="b>a>c>d", _4="d>b>c>a"), fourth),
        ScriptNode("VII", _profile(_4="d>b>c>a")),
    ]
    steps = [
        # I, via I' and I''
        _symmetry("I"),
        _anonymity("I", "I-a", "13"),
        _symmetry("I-a"),
        _anonymity("I-a", "I'", "24"),
        _symmetry("I'"),
        _neutrality("I'", "I'-b", "ab"),
        _neutrality("I'-b", "I''", "cd"),
        _complete("I"),
        _zero("I", "3c"),
        _zero("I", "3a"),
        # II: agents 3 and 4 move a to the bottom
        _swap_null("I", "II-a", "3", "ad"),
        _swap_null("II-a", "II-b", "3", "ac"),
        _swap_null("II-b", "II-c", "4", "ad"),
        _swap_null("II-c", "II", "4", "ac"),
        # III
        _symmetry("III"),
        _anonymity("III", "III-a", "13"),
        _symmetry("III-a"),
        _anonymity("III-a", "III'", "24"),
        _symmetry("III'"),
        _neutrality("III'", "III", "ad"),
        _complete("III"),
        _zero("III", "1d"),
        # IV
        _lower("III", "IV", "3", "db"),
        _lower("II", "IV", "4", "bd"),
        _symmetry("IV"),
        _zero("IV", "1d", "2d"),
        _zero("IV", "4b"),
        _complete("IV"),
        # V: agent 3 moves d to the bottom
        _swap_null("IV", "IV-a", "3", "dc"),
        _swap_null("IV-a", "V", "3", "da"),
        # VI
        _lower("V", "VI", "3", "ca"),
        _zero("VI", "1d"),
        _zero("VI", "2d"),
        _complete("VI"),
        _zero("VI", "3a"),
        _swap_null("V", "VI", "3", "ca", whole=False),
        _symmetry("VI"),
        # VII
        _lower("VI", "VII", "3", "ba"),
        _symmetry("VII"),
        _complete("VII", "column:c", "column:d"),
        InferenceStep(StepKind.CONTRADICTION_CHECK, "VII", lines=("row:4",)),
    ]
    return ProofScript(
        name="theorem-2",
        theorem=2,
        axioms=(
            SWAP_MONOTONICITY,
            LOWER_INVARIANCE,
            ORDINAL_EFFICIENCY,
            ANONYMITY,
            NEUTRALITY,
            NON_BOSSINESS,
        ),
        nodes=nodes,
        steps=steps,
        expected_contradiction="row 4 at profile VII: known mass 5/4 exceeds 1",
        notes=[
            "I-a and III-a are the half-way profiles of the two anonymity exchanges",
            "I'-b is the half-way profile of the renaming a<->b, c<->d",
            "II-a, II-b, II-c and IV-a are the intermediate misreports of a move to the bottom",
        ],
    )


def builtin_script(theorem: int) -> ProofScript:
    """
    Script of one of the two impossibility proofs.

    Args:
        theorem: 1 or 2

    Returns:
        Fresh ProofScript

    Raises:
        InputError: For any other theorem number
    """
    if theorem == 1:
        return _first_script()
    if theorem == 2:
        return _second_script()
    raise InputError(f"There are builtin scripts for theorems 1 and 2, not {theorem}")


def _padded_profile(
    profile: PreferenceProfile, agents: Sequence[str], objects: Sequence[str], n: int
) -> PreferenceProfile:
    old_objects = tuple(objects[:n])
    new_objects = tuple(objects[n:])
    orders: Dict[str, Any] = {
        agent: order.ranking + new_objects
        for agent, order in zip(profile.agents, profile.orders)
    }
    for agent, top in zip(agents[n:], new_objects):
        orders[agent] = (top,) + old_objects + tuple(o for o in new_objects if o != top)
    return PreferenceProfile.from_orders(orders)


def pad_script(script: ProofScript, extra_agents: int) -> ProofScript:
    """
    Embed a script into a larger market.

    Every node gains ``extra_agents`` agents, each ranking its own new
    object first; old agents rank the new objects last. Each new agent is
    first shown to receive its object with certainty at every profile, so
    the expected matrices gain an identity block. A renaming of objects
    moves the old objects inside a new agent's order too; the padded
    script restores that order with swaps the new agent makes below its
    top object, which change nothing by swap monotonicity and
    non-bossiness.

    Args:
        script: Script over n agents
        extra_agents: Number k of agents to add

    Returns:
        Script over n + k agents with the same expected contradiction

    Raises:
        InputError: If k < 1
        CapacityError: If n + k exceeds Config.MAX_PROOF_AGENTS
    """
    if extra_agents < 1:
        raise InputError(f"Padding needs at least one extra agent, got {extra_agents}")
    n = script.n
    total = n + extra_agents
    if total > Config.MAX_PROOF_AGENTS:
        raise CapacityError(
            f"Padded proofs are limited to {Config.MAX_PROOF_AGENTS} agents "
            f"(AXIOMLAB_MAX_PROOF_AGENTS), requested {total}"
        )
    agents, objects = default_labels(total)
    new_agents = agents[n:]
    new_objects = objects[n:]

    nodes: List[ScriptNode] = []
    for node in script.nodes:
        expected = None
        if node.expected is not None:
            expected = tuple(row + ("0",) * extra_agents for row in node.expected) + tuple(
                tuple("1" if obj == top else "0" for obj in objects) for top in new_objects
            )
        nodes.append(
            replace(
                node,
                profile=_padded_profile(node.profile, agents, objects, n),
                expected=expected,
            )
        )
    by_name = {node.name: node for node in nodes}

    prefix: List[InferenceStep] = []
    covered: List[PreferenceProfile] = []
    for node in nodes:
        if node.profile in covered:
            continue
        covered.append(node.profile)
        for agent, top in zip(new_agents, new_objects):
            prefix.append(
                InferenceStep(
                    StepKind.EFFICIENCY_ZERO,
                    node.name,
                    entries=tuple((agent, obj) for obj in objects if obj != top),
                    note="the padded agent's top object is ranked last by everyone else",
                )
            )
            prefix.append(
                InferenceStep(
                    StepKind.BISTOCHASTIC_COMPLETE,
                    node.name,
                    lines=(f"row:{agent}", f"column:{top}"),
                )
            )

    steps: List[InferenceStep] = list(prefix)
    for step in script.steps:
        if step.kind is not StepKind.NEUTRALITY_RELABEL or step.source is None:
            steps.append(step)
            continue
        target = by_name[step.target].profile
        relabeled = relabel_objects(by_name[step.source].profile, *step.objects)
        if relabeled == target:
            steps.append(step)
            continue
        bridge = f"{step.target}~"
        nodes.append(ScriptNode(bridge, relabeled, note="renamed padded profile"))
        steps.append(replace(step, target=bridge))
        current_name, current = bridge, relabeled
        counter = 0
        for agent in new_agents:
            goal = target.order_of(agent)
            while current.order_of(agent) != goal:
                ranking = current.order_of(agent).ranking
                position = next(
                    k
                    for k in range(len(ranking) - 1)
                    if goal.rank(ranking[k]) > goal.rank(ranking[k + 1])
                )
                swapped = list(ranking)
                swapped[position : position + 2] = swapped[position + 1], swapped[position]
                following = current.with_order(agent, swapped)
                if following == target:
                    following_name = step.target
                else:
                    counter += 1
                    following_name = f"{bridge}{counter}"
                    nodes.append(
                        ScriptNode(following_name, following, note="realigned padded agent")
                    )
                steps.append(
                    InferenceStep(
                        StepKind.SWAP_NULL_PROPAGATION,
                        following_name,
                        source=current_name,
                        agent=agent,
                        pair=(ranking[position], ranking[position + 1]),
                    )
                )
                current_name, current = following_name, following
        logger.debug(
            f"Padded renaming into {step.target} realigned through {counter + 1} nodes"
        )

    return ProofScript(
        name=f"{script.name}+{extra_agents}",
        nodes=nodes,
        steps=steps,
        expected_contradiction=script.expected_contradiction,
        axioms=script.axioms,
        theorem=script.theorem,
        notes=list(script.notes)
        + [f"padded with {extra_agents} agent(s) ranking a new object first"],
    )
