"""
Text and JSON forms of profiles and assignments.

Profile text: one line per agent, ``<agent>: <obj>><obj>>...``.
Matrix text: a header line of object names, then one line per agent of
whitespace separated rationals, optionally prefixed by ``<agent>:``.
Table text: profile blocks and matrix blocks alternating, separated by
blank lines. ``#`` starts a comment everywhere.
"""

from fractions import Fraction
import json
import re
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import DimensionError, ParseError, RationalFormatError
from .models import Assignment, PreferenceOrder, PreferenceProfile, canonical

_RATIONAL = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def parse_rational(text: Union[str, int]) -> Fraction:
    """
    Parse an integer or ``p/q`` string into an exact rational.

    Args:
        text: Rational literal; decimals and exponents are rejected

    Returns:
        Fraction in lowest terms

    Raises:
        RationalFormatError: If the literal is malformed or q is zero
    """
    if isinstance(text, bool):
        raise RationalFormatError(f"Malformed rational {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    literal = str(text).strip()
    if not _RATIONAL.match(literal):
        raise RationalFormatError(
            f"Malformed rational '{literal}': expected an integer or p/q"
        )
    try:
        return Fraction(literal)
    except ZeroDivisionError:
        raise RationalFormatError(f"Zero denominator in '{literal}'") from None


def format_rational(value: Fraction) -> str:
    """Render a rational as ``p/q`` in lowest terms, or an integer."""
    return str(Fraction(value))


def _content_lines(text: str) -> List[str]:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return lines


def _blocks(text: str) -> List[List[str]]:
    blocks: List[List[str]] = []
    current: List[str] = []
    for raw in text.splitlines():
        stripped = raw.strip()
        if not stripped:
            if current:
                blocks.append(current)
                current = []
            continue
        line = raw.split("#", 1)[0].strip()
        if line:
            current.append(line)
    if current:
        blocks.append(current)
    return blocks


def parse_profile(text: str) -> PreferenceProfile:
    """
    Parse the profile text form.

    Args:
        text: Lines ``agent: a>b>c``

    Returns:
        PreferenceProfile

    Raises:
        ParseError: On malformed lines or repeated agents
        RankingError: On duplicate or missing objects
    """
    orders: Dict[str, PreferenceOrder] = {}
    for line in _content_lines(text):
        if ":" not in line:
            raise ParseError(f"Profile line '{line}' lacks 'agent:' prefix")
        agent, ranking = (part.strip() for part in line.split(":", 1))
        if not agent:
            raise ParseError(f"Profile line '{line}' has an empty agent label")
        if agent in orders:
            raise ParseError(f"Agent '{agent}' appears twice")
        orders[agent] = PreferenceOrder.parse(ranking)
    if not orders:
        raise ParseError("Profile text contains no agents")
    return PreferenceProfile.from_orders(orders)


def parse_profiles(text: str) -> List[PreferenceProfile]:
    """
    Parse several profile blocks separated by blank lines.

    Raises:
        ParseError: If the text holds no profile
    """
    blocks = _blocks(text)
    if not blocks:
        raise ParseError("Profile list contains no profiles")
    return [parse_profile("\n".join(block)) for block in blocks]


def format_profile(profile: PreferenceProfile) -> str:
    """Render a profile in its text form."""
    return "\n".join(
        f"{agent}: {order}" for agent, order in zip(profile.agents, profile.orders)
    )


def parse_assignment(
    text: str, agents: Optional[Sequence[str]] = None
) -> Assignment:
    """
    Parse the matrix text form.

    Args:
        text: Header of object names followed by rows of rationals
        agents: Row labels for unlabelled rows; defaults to "1".."n"

    Returns:
        Assignment

    Raises:
        RationalFormatError: On malformed entries
        DimensionError: On ragged rows or label mismatch
        BistochasticityError: If the matrix is not bistochastic
    """
    lines = _content_lines(text)
    if not lines:
        raise ParseError("Matrix text contains no header")
    objects = tuple(lines[0].split())
    # object labels may be numeric; a data row shows itself by a label or a fraction
    if ":" in lines[0] or any("/" in token for token in objects):
        raise ParseError(f"Matrix text must start with a header of objects, got '{lines[0]}'")
    labels: List[str] = []
    rows: List[List[Fraction]] = []
    for index, line in enumerate(lines[1:]):
        if ":" in line:
            label, values = (part.strip() for part in line.split(":", 1))
        else:
            label = agents[index] if agents and index < len(agents) else str(index + 1)
            values = line
        labels.append(label)
        rows.append([parse_rational(token) for token in values.split()])

    if agents is not None and set(labels) != set(agents):
        raise DimensionError(
            f"Matrix rows {labels} do not match agents {list(agents)}"
        )
    for row in rows:
        if len(row) != len(objects):
            raise DimensionError(
                f"Matrix row has {len(row)} entries for {len(objects)} objects"
            )
    return _canonical_assignment(labels, objects, rows)


def _canonical_assignment(
    agents: Sequence[str], objects: Sequence[str], rows: Sequence[Sequence[Fraction]]
) -> Assignment:
    if len(set(agents)) != len(agents) or len(set(objects)) != len(objects):
        raise DimensionError("Matrix labels must be distinct")
    agent_order = canonical(agents)
    object_order = canonical(objects)
    by_agent = {agent: row for agent, row in zip(agents, rows)}
    column = {obj: index for index, obj in enumerate(objects)}
    return Assignment(
        agent_order,
        object_order,
        tuple(
            tuple(by_agent[agent][column[obj]] for obj in object_order)
            for agent in agent_order
        ),
    )


def format_assignment(assignment: Assignment) -> str:
    """Render an assignment in its labelled text form."""
    rendered = [
        [format_rational(value) for value in row] for row in assignment.entries
    ]
    width = max(
        [len(obj) for obj in assignment.objects]
        + [len(value) for row in rendered for value in row]
    )
    label_width = max(len(agent) for agent in assignment.agents) + 2
    lines = [" " * label_width + " ".join(obj.rjust(width) for obj in assignment.objects)]
    for agent, row in zip(assignment.agents, rendered):
        lines.append(
            f"{agent}:".ljust(label_width) + " ".join(value.rjust(width) for value in row)
        )
    return "\n".join(lines)


def parse_table(text: str) -> List[Tuple[PreferenceProfile, Assignment]]:
    """
    Parse alternating profile and matrix blocks.

    Raises:
        ParseError: If a profile block has no matching matrix block
    """
    blocks = _blocks(text)
    if not blocks:
        raise ParseError("Table text contains no entries")
    if len(blocks) % 2:
        raise ParseError("Table text ends with a profile that has no matrix")
    entries = []
    for profile_block, matrix_block in zip(blocks[0::2], blocks[1::2]):
        profile = parse_profile("\n".join(profile_block))
        assignment = parse_assignment("\n".join(matrix_block), profile.agents)
        _check_alignment(profile, assignment)
        entries.append((profile, assignment))
    return entries


def format_table(entries: Sequence[Tuple[PreferenceProfile, Assignment]]) -> str:
    """Render table entries in the table text form."""
    return "\n\n".join(
        f"{format_profile(profile)}\n\n{format_assignment(assignment)}"
        for profile, assignment in entries
    )


def _check_alignment(profile: PreferenceProfile, assignment: Assignment) -> None:
    if profile.agents != assignment.agents or profile.objects != assignment.objects:
        raise DimensionError(
            f"Matrix over agents {list(assignment.agents)} and objects "
            f"{list(assignment.objects)} does not fit profile {profile}"
        )


def to_json(
    profile: Optional[PreferenceProfile] = None,
    assignment: Optional[Assignment] = None,
) -> Dict[str, Any]:
    """
    JSON-ready mapping with keys agents, objects, orders and matrix.

    Either argument may be omitted; the labels come from whichever is given.
    """
    source = profile if profile is not None else assignment
    if source is None:
        raise ParseError("Nothing to serialize")
    data: Dict[str, Any] = {
        "agents": list(source.agents),
        "objects": list(source.objects),
    }
    if profile is not None:
        data["orders"] = profile.as_dict()
    if assignment is not None:
        data["matrix"] = [
            [format_rational(value) for value in row] for row in assignment.entries
        ]
    return data


def from_json(
    data: Mapping[str, Any]
) -> Tuple[Optional[PreferenceProfile], Optional[Assignment]]:
    """
    Parse the JSON mapping produced by to_json.

    Orders may be strings ``"a>b>c"`` or lists of objects; matrix entries
    may be ``"p/q"`` strings or integers.

    Raises:
        ParseError: If a required key is missing or has the wrong shape
    """
    if not isinstance(data, Mapping):
        raise ParseError("JSON input must be an object")

    profile: Optional[PreferenceProfile] = None
    assignment: Optional[Assignment] = None

    if "orders" in data:
        orders = data["orders"]
        if not isinstance(orders, Mapping):
            raise ParseError("'orders' must map agents to orders")
        profile = PreferenceProfile.from_orders(
            {str(agent): order for agent, order in orders.items()}
        )

    if "matrix" in data:
        matrix = data["matrix"]
        if not isinstance(matrix, list) or not all(isinstance(r, list) for r in matrix):
            raise ParseError("'matrix' must be a list of rows")
        agents = [str(a) for a in data.get("agents", [])] or (
            list(profile.agents)
            if profile is not None
            else [str(i + 1) for i in range(len(matrix))]
        )
        objects = [str(o) for o in data.get("objects", [])] or (
            list(profile.objects) if profile is not None else []
        )
        if len(agents) != len(matrix):
            raise DimensionError(
                f"{len(agents)} agents but {len(matrix)} matrix rows"
            )
        rows = [[parse_rational(value) for value in row] for row in matrix]
        for row in rows:
            if len(row) != len(objects):
                raise DimensionError(
                    f"Matrix row has {len(row)} entries for {len(objects)} objects"
                )
        assignment = _canonical_assignment(agents, objects, rows)
        if profile is not None:
            _check_alignment(profile, assignment)

    if profile is None and assignment is None:
        raise ParseError("JSON input has neither 'orders' nor 'matrix'")
    return profile, assignment


def dumps(
    profile: Optional[PreferenceProfile] = None,
    assignment: Optional[Assignment] = None,
) -> str:
    """Serialize to a JSON string with stable key order."""
    return json.dumps(to_json(profile, assignment), indent=2)


def loads(text: str) -> Tuple[Optional[PreferenceProfile], Optional[Assignment]]:
    """
    Parse a JSON string produced by dumps.

    Raises:
        ParseError: If the text is not valid JSON
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"Invalid JSON: {e}") from e
    return from_json(data)


def load_profile(text: str) -> PreferenceProfile:
    """Parse a profile from either its text or its JSON form."""
    if text.lstrip().startswith("{"):
        profile, _ = loads(text)
        if profile is None:
            raise ParseError("JSON input has no 'orders'")
        return profile
    return parse_profile(text)


def load_assignment(
    text: str, agents: Optional[Sequence[str]] = None
) -> Assignment:
    """Parse an assignment from either its text or its JSON form."""
    if text.lstrip().startswith("{"):
        _, assignment = loads(text)
        if assignment is None:
            raise ParseError("JSON input has no 'matrix'")
        return assignment
    return parse_assignment(text, agents)
