"""
Constraint store for proof replay.

Every matrix entry at every profile a proof touches is a cell. Cells live
in a union-find registry: equalities licensed by symmetry, relabelings or
non-bossiness merge cells, and nodes with the same profile share their
cells. Known values, transferred bounds and explicit line-sum rows sit on
top of the registry; propagation fixes values the rows force and raises a
contradiction as soon as the constraints cannot be met.
"""

from dataclasses import dataclass
from fractions import Fraction
import logging
import re
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .codec import format_rational, parse_rational
from .errors import DomainError, InputError, PreconditionFailed
from .models import ONE, ZERO, Assignment, PreferenceProfile
from .polytope import rref
from .simplex import LinearSystem, LPStatus, maximize, minimize

logger = logging.getLogger(__name__)

ROW = "row"
COLUMN = "column"

CellKey = Tuple[PreferenceProfile, str, str]
Line = Tuple[str, str]

_LINE = re.compile(r"^\s*(row|column)\s*[:\s]\s*(\S+)\s*$")


def parse_line(text: str) -> Line:
    """
    Parse a line reference such as ``row:4`` or ``column:c``.

    Raises:
        InputError: If the text names neither a row nor a column
    """
    match = _LINE.match(text)
    if match is None:
        raise InputError(f"Line '{text}' must look like 'row:<agent>' or 'column:<object>'")
    return match.group(1), match.group(2)


def format_line(line: Line) -> str:
    """Inverse of parse_line."""
    return f"{line[0]}:{line[1]}"


def format_entry(agent: str, obj: str) -> str:
    """Entry label used in diagnostics, e.g. ``(3,c)``."""
    return f"({agent},{obj})"


def format_interval(lo: Fraction, hi: Fraction) -> str:
    """Closed interval with exact endpoints, e.g. ``[0,1/12]``."""
    return f"[{format_rational(lo)},{format_rational(hi)}]"


@dataclass(frozen=True)
class EntryValue:
    """
    State of one matrix entry: known, an interval, or unknown.

    A known value k is the interval [k, k]; an unknown entry has no bounds.
    """

    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None

    def __post_init__(self) -> None:
        """Validate the interval."""
        if (self.lo is None) != (self.hi is None):
            raise InputError("Interval needs both endpoints or neither")
        if self.lo is not None and self.hi is not None and self.lo > self.hi:
            raise InputError(f"Empty interval {format_interval(self.lo, self.hi)}")

    @classmethod
    def known(cls, value: Fraction) -> "EntryValue":
        """Exactly known entry."""
        return cls(Fraction(value), Fraction(value))

    @classmethod
    def interval(cls, lo: Fraction, hi: Fraction) -> "EntryValue":
        """Entry confined to [lo, hi]."""
        return cls(Fraction(lo), Fraction(hi))

    @classmethod
    def unknown(cls) -> "EntryValue":
        """Entry without any information."""
        return cls()

    @property
    def is_known(self) -> bool:
        """True for a degenerate interval."""
        return self.lo is not None and self.lo == self.hi

    @property
    def is_unknown(self) -> bool:
        """True when no bounds are recorded."""
        return self.lo is None

    @property
    def value(self) -> Fraction:
        """
        The known value.

        Raises:
            InputError: If the entry is not known
        """
        if not self.is_known or self.lo is None:
            raise InputError(f"Entry {self} is not known")
        return self.lo

    def contains(self, value: Fraction) -> bool:
        """True if value lies in the interval (always true when unknown)."""
        if self.lo is None or self.hi is None:
            return True
        return self.lo <= value <= self.hi

    def __str__(self) -> str:
        if self.lo is None or self.hi is None:
            return "?"
        if self.lo == self.hi:
            return format_rational(self.lo)
        return format_interval(self.lo, self.hi)


@dataclass(frozen=True)
class Contradiction:
    """A constraint that cannot be met, located at a proof node."""

    node: str
    message: str

    def __str__(self) -> str:
        return self.message


@dataclass
class LinearRow:
    """Explicit equality sum(coefficients[cell] * cell) = rhs over cell ids."""

    coefficients: Dict[int, Fraction]
    rhs: Fraction
    node: str
    provenance: str
    line: Optional[Line] = None


@dataclass
class ConstraintSystem:
    """
    View of the constraint store restricted to one node.

    Holds the node's profile, the cell id of every entry, and the known
    values and bounds of those cells. Linear programs built from the view
    use the node's own line sums only, so their feasible set contains every
    matrix consistent with the full store.
    """

    node: str
    profile: PreferenceProfile
    cells: Tuple[Tuple[int, ...], ...]
    known: Dict[int, Fraction]
    bounds: Dict[int, Tuple[Fraction, Fraction]]

    @property
    def n(self) -> int:
        """Number of agents."""
        return self.profile.n

    def cell(self, agent: str, obj: str) -> int:
        """Cell id of an entry."""
        return self.cells[self.profile.agent_index(agent)][self.profile.object_index(obj)]

    def entry(self, agent: str, obj: str) -> EntryValue:
        """Known value, transferred bound or unknown."""
        cell = self.cell(agent, obj)
        if cell in self.known:
            return EntryValue.known(self.known[cell])
        if cell in self.bounds:
            return EntryValue.interval(*self.bounds[cell])
        return EntryValue.unknown()

    def entries(self) -> List[List[EntryValue]]:
        """Entry states, rows by agent."""
        return [
            [self.entry(agent, obj) for obj in self.profile.objects]
            for agent in self.profile.agents
        ]

    def unknowns(self) -> List[int]:
        """Distinct unknown cell ids of the node, ascending."""
        return sorted({c for row in self.cells for c in row if c not in self.known})

    def has_aliases(self) -> bool:
        """True if two entries of the node share a cell."""
        return len({c for row in self.cells for c in row}) < self.n * self.n

    def line_cells(self, line: Line) -> List[int]:
        """Cell ids along a row or column."""
        kind, label = line
        if kind == ROW:
            return list(self.cells[self.profile.agent_index(label)])
        column = self.profile.object_index(label)
        return [row[column] for row in self.cells]

    def lines(self) -> List[Line]:
        """Every row then every column."""
        return [(ROW, agent) for agent in self.profile.agents] + [
            (COLUMN, obj) for obj in self.profile.objects
        ]

    def linear_system(self, omit: Optional[Line] = None) -> Tuple[LinearSystem, List[int]]:
        """
        Linear program over the node's unknown cells.

        Line sums of every row and column (except omit) hold with known
        values moved to the right-hand side; transferred bounds become
        inequalities.

        Returns:
            Tuple of (system, cell id of each variable)
        """
        variables = self.unknowns()
        position = {cell: k for k, cell in enumerate(variables)}
        system = LinearSystem([f"x{cell}" for cell in variables])
        for line in self.lines():
            if line == omit:
                continue
            coefficients: Dict[int, Fraction] = {}
            rhs = ONE
            for cell in self.line_cells(line):
                if cell in self.known:
                    rhs -= self.known[cell]
                else:
                    coefficients[position[cell]] = coefficients.get(position[cell], ZERO) + 1
            if coefficients:
                system.add_constraint(coefficients, "==", rhs, format_line(line))
        for cell, (lo, hi) in sorted(self.bounds.items()):
            if cell in position:
                system.add_constraint({position[cell]: 1}, ">=", lo, f"bound x{cell}")
                system.add_constraint({position[cell]: 1}, "<=", hi, f"bound x{cell}")
        return system, variables

    def interval(self, agent: str, obj: str) -> EntryValue:
        """
        Tightest interval of an entry over the node's linear relaxation.

        Raises:
            PreconditionFailed: If the node's constraints are infeasible
        """
        cell = self.cell(agent, obj)
        if cell in self.known:
            return EntryValue.known(self.known[cell])
        system, variables = self.linear_system()
        index = variables.index(cell)
        low = minimize(system, {index: 1})
        high = maximize(system, {index: 1})
        if low.status is not LPStatus.OPTIMAL or high.status is not LPStatus.OPTIMAL:
            raise PreconditionFailed(f"Constraints at profile {self.node} are infeasible")
        assert low.value is not None and high.value is not None
        return EntryValue.interval(low.value, high.value)

    def resolved(self) -> List[List[EntryValue]]:
        """Entry states with every unknown replaced by its LP interval."""
        return [
            [self.interval(agent, obj) for obj in self.profile.objects]
            for agent in self.profile.agents
        ]

    def line_mass(self, line: Line) -> Tuple[Fraction, bool]:
        """Known mass on a line and whether the whole line is known."""
        cells = self.line_cells(line)
        mass = sum((self.known[c] for c in cells if c in self.known), ZERO)
        return mass, all(c in self.known for c in cells)

    def matrix(self, variables: Sequence[int], point: Sequence[Fraction]) -> Assignment:
        """
        Assignment at an LP point.

        Raises:
            BistochasticityError: If the point does not satisfy the line sums
        """
        values = dict(self.known)
        values.update(zip(variables, point))
        return Assignment(
            self.profile.agents,
            self.profile.objects,
            tuple(tuple(values[c] for c in row) for row in self.cells),
        )

    def birkhoff_zero_cells(self) -> Optional[List[Tuple[int, int]]]:
        """
        Zero pattern of a face of the Birkhoff polytope, if the node is one.

        Applies when no entries share a cell, no bounds are recorded and
        every known value is 0 or 1; a known 1 forbids the rest of its row
        and column.
        """
        if self.has_aliases() or any(
            c in self.bounds for row in self.cells for c in row
        ):
            return None
        zeros: Set[Tuple[int, int]] = set()
        for i, row in enumerate(self.cells):
            for j, cell in enumerate(row):
                value = self.known.get(cell)
                if value is None:
                    continue
                if value == 0:
                    zeros.add((i, j))
                elif value == 1:
                    zeros.update((i, k) for k in range(self.n) if k != j)
                    zeros.update((k, j) for k in range(self.n) if k != i)
                else:
                    return None
        return sorted(zeros)


class ProofState:
    """
    Union-find registry of cells with known values, bounds and rows.

    The first contradiction raised is kept; later ones are ignored.
    """

    def __init__(self) -> None:
        """Initialize an empty store."""
        self._nodes: Dict[str, PreferenceProfile] = {}
        self._keys: Dict[CellKey, int] = {}
        self._labels: List[Tuple[str, str, str]] = []
        self._parent: List[int] = []
        self._lines: Set[Tuple[PreferenceProfile, str, str]] = set()
        self.known: Dict[int, Fraction] = {}
        self.bounds: Dict[int, Tuple[Fraction, Fraction]] = {}
        self.rows: List[LinearRow] = []
        self.contradiction: Optional[Contradiction] = None

    def copy(self) -> "ProofState":
        """Independent copy sharing only immutable data."""
        duplicate = ProofState()
        duplicate._nodes = dict(self._nodes)
        duplicate._keys = dict(self._keys)
        duplicate._labels = list(self._labels)
        duplicate._parent = list(self._parent)
        duplicate._lines = set(self._lines)
        duplicate.known = dict(self.known)
        duplicate.bounds = dict(self.bounds)
        duplicate.rows = list(self.rows)
        duplicate.contradiction = self.contradiction
        return duplicate

    # Registry

    def add_node(self, name: str, profile: PreferenceProfile) -> None:
        """
        Register a node; nodes with equal profiles share their cells.

        Raises:
            InputError: If the name is already bound to another profile
        """
        if name in self._nodes:
            if self._nodes[name] != profile:
                raise InputError(f"Node '{name}' is already bound to another profile")
            return
        self._nodes[name] = profile
        for agent in profile.agents:
            for obj in profile.objects:
                key = (profile, agent, obj)
                if key not in self._keys:
                    self._keys[key] = len(self._parent)
                    self._parent.append(len(self._parent))
                    self._labels.append((name, agent, obj))

    @property
    def nodes(self) -> List[str]:
        """Node names in registration order."""
        return list(self._nodes)

    def profile(self, node: str) -> PreferenceProfile:
        """
        Profile of a node.

        Raises:
            DomainError: If the node is not registered
        """
        try:
            return self._nodes[node]
        except KeyError:
            raise DomainError(f"Unknown proof node '{node}'") from None

    def find(self, cell: int) -> int:
        """Representative of a cell."""
        root = cell
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[cell] != root:
            self._parent[cell], cell = root, self._parent[cell]
        return root

    def cell(self, node: str, agent: str, obj: str) -> int:
        """
        Representative cell of an entry.

        Raises:
            DomainError: If the node is unknown
            InputError: If the agent or object is not part of the profile
        """
        profile = self.profile(node)
        profile.agent_index(agent)
        profile.object_index(obj)
        return self.find(self._keys[(profile, agent, obj)])

    def value(self, node: str, agent: str, obj: str) -> Optional[Fraction]:
        """Known value of an entry, or None."""
        return self.known.get(self.cell(node, agent, obj))

    def describe(self, cell: int) -> str:
        """Human label of a cell, e.g. ``(4,c) at profile II``."""
        node, agent, obj = self._labels[cell]
        return f"{format_entry(agent, obj)} at profile {node}"

    def system(self, node: str) -> ConstraintSystem:
        """Constraint view of one node."""
        profile = self.profile(node)
        cells = tuple(
            tuple(self.cell(node, agent, obj) for obj in profile.objects)
            for agent in profile.agents
        )
        members = {c for row in cells for c in row}
        return ConstraintSystem(
            node,
            profile,
            cells,
            {c: self.known[c] for c in members if c in self.known},
            {c: self.bounds[c] for c in members if c in self.bounds},
        )

    def unknown_cells(self) -> List[int]:
        """Representatives without a known value, ascending."""
        return sorted({self.find(c) for c in range(len(self._parent))} - set(self.known))

    def linear_system(self) -> Tuple[LinearSystem, List[int]]:
        """
        Linear program over every unknown cell of the store.

        Explicit rows hold with known values moved to the right-hand side;
        bounds become inequalities.

        Returns:
            Tuple of (system, cell id of each variable)
        """
        variables = self.unknown_cells()
        position = {cell: k for k, cell in enumerate(variables)}
        system = LinearSystem([f"x{cell}" for cell in variables])
        for coefficients, rhs, row in self._substituted():
            if coefficients:
                system.add_constraint(
                    {position[c]: v for c, v in coefficients.items()}, "==", rhs, row.provenance
                )
        for cell, (lo, hi) in sorted(self.bounds.items()):
            if cell in position:
                system.add_constraint({position[cell]: 1}, ">=", lo, f"bound x{cell}")
                system.add_constraint({position[cell]: 1}, "<=", hi, f"bound x{cell}")
        return system, variables

    # Mutation

    def contradict(self, node: str, message: str) -> None:
        """Record a contradiction unless one is already recorded."""
        if self.contradiction is None:
            self.contradiction = Contradiction(node, message)
            logger.info(f"Contradiction: {message}")

    def alias(self, first: int, second: int, context: str) -> bool:
        """
        Merge two cells.

        Args:
            first: Cell id
            second: Cell id
            context: Node the equality is derived at, for diagnostics

        Returns:
            True if the cells were distinct before
        """
        a, b = self.find(first), self.find(second)
        if a == b:
            return False
        root, child = min(a, b), max(a, b)
        if root in self.known and child in self.known:
            if self.known[root] != self.known[child]:
                self.contradict(
                    context,
                    f"{self.describe(root)} equals {self.describe(child)}, "
                    f"but they hold {format_rational(self.known[root])} and "
                    f"{format_rational(self.known[child])}",
                )
        self._parent[child] = root
        if child in self.known:
            self.known.setdefault(root, self.known.pop(child))
        if child in self.bounds:
            lo, hi = self.bounds.pop(child)
            if root in self.bounds:
                lo, hi = max(lo, self.bounds[root][0]), min(hi, self.bounds[root][1])
            self._set_bounds(root, lo, hi, context)
        return True

    def fix(self, cell: int, value: Fraction, context: str) -> bool:
        """
        Record a known value.

        Returns:
            True if the value is new
        """
        cell = self.find(cell)
        value = Fraction(value)
        if cell in self.known:
            if self.known[cell] != value:
                self.contradict(
                    context,
                    f"{self.describe(cell)}: derived {format_rational(value)}, "
                    f"already known {format_rational(self.known[cell])}",
                )
            return False
        if not ZERO <= value <= ONE:
            self.contradict(
                context,
                f"{self.describe(cell)}: forced value {format_rational(value)} outside [0,1]",
            )
        self.known[cell] = value
        self._check_bounds(cell, context)
        return True

    def set_bounds(
        self,
        cell: int,
        lo: Fraction,
        hi: Fraction,
        context: str,
        entry: Optional[Tuple[str, str]] = None,
    ) -> None:
        """
        Intersect the bounds of a cell with [lo, hi].

        Args:
            cell: Cell id
            lo: Lower bound
            hi: Upper bound
            context: Node the bound applies at
            entry: (agent, object) of the entry at context, for diagnostics
        """
        cell = self.find(cell)
        if cell in self.bounds:
            lo, hi = max(lo, self.bounds[cell][0]), min(hi, self.bounds[cell][1])
        self._set_bounds(cell, lo, hi, context, entry)

    def _set_bounds(
        self,
        cell: int,
        lo: Fraction,
        hi: Fraction,
        context: str,
        entry: Optional[Tuple[str, str]] = None,
    ) -> None:
        if lo > hi:
            self.contradict(context, f"{self.describe(cell)}: bounds are empty")
            return
        self.bounds[cell] = (lo, hi)
        self._check_bounds(cell, context, entry)

    def _check_bounds(
        self, cell: int, context: str, entry: Optional[Tuple[str, str]] = None
    ) -> None:
        if cell not in self.known or cell not in self.bounds:
            return
        lo, hi = self.bounds[cell]
        value = self.known[cell]
        if not lo <= value <= hi:
            node, agent, obj = self._labels[cell]
            if entry is not None:
                node, (agent, obj) = context, entry
            self.contradict(
                context,
                f"entry {format_entry(agent, obj)} at profile {node}: derived "
                f"{format_rational(value)}, transferred bound {format_interval(lo, hi)}",
            )

    def add_row(
        self,
        coefficients: Dict[int, Fraction],
        rhs: Fraction,
        node: str,
        provenance: str,
        line: Optional[Line] = None,
    ) -> None:
        """Append an explicit equality over cell ids."""
        self.rows.append(LinearRow(dict(coefficients), Fraction(rhs), node, provenance, line))

    def add_line_sums(
        self, node: str, lines: Optional[Sequence[Line]] = None, provenance: str = ""
    ) -> int:
        """
        Add row and column sums of a node as explicit equalities.

        Args:
            node: Node name
            lines: Lines to add; all rows and columns by default
            provenance: Tag stored with every row

        Returns:
            Number of rows added (lines already present are skipped)
        """
        view = self.system(node)
        selected = list(lines) if lines else view.lines()
        added = 0
        for line in selected:
            key = (view.profile, line[0], line[1])
            if key in self._lines:
                continue
            self._lines.add(key)
            coefficients: Dict[int, Fraction] = {}
            for cell in view.line_cells(line):
                coefficients[cell] = coefficients.get(cell, ZERO) + 1
            self.add_row(coefficients, ONE, node, provenance or "bistochasticity", line)
            added += 1
        return added

    # Propagation

    def _substituted(self) -> List[Tuple[Dict[int, Fraction], Fraction, LinearRow]]:
        substituted = []
        for row in self.rows:
            coefficients: Dict[int, Fraction] = {}
            rhs = row.rhs
            for cell, coefficient in row.coefficients.items():
                rep = self.find(cell)
                if rep in self.known:
                    rhs -= coefficient * self.known[rep]
                    continue
                total = coefficients.get(rep, ZERO) + coefficient
                if total:
                    coefficients[rep] = total
                else:
                    coefficients.pop(rep, None)
            substituted.append((coefficients, rhs, row))
        return substituted

    def _row_failure(self, row: LinearRow, rhs: Fraction, open_row: bool) -> None:
        if row.line is not None:
            mass = row.rhs - rhs
            kind, label = row.line
            if mass > row.rhs:
                self.contradict(
                    row.node,
                    f"{kind} {label} at profile {row.node}: known mass "
                    f"{format_rational(mass)} exceeds 1",
                )
            elif not open_row:
                self.contradict(
                    row.node,
                    f"{kind} {label} at profile {row.node}: entries sum to "
                    f"{format_rational(mass)} instead of 1",
                )
            return
        self.contradict(row.node, f"constraint '{row.provenance}' at profile {row.node} fails")

    def resolve(self) -> None:
        """
        Propagate until nothing new is forced.

        Each round row-reduces the explicit rows with known values moved to
        the right-hand side, fixes every cell a reduced row pins down, and
        zeroes the cells of any sign-definite row with right-hand side 0.
        Afterwards every line of every node is checked for excess mass.
        """
        while self.contradiction is None:
            substituted = self._substituted()
            equations: List[Tuple[Dict[int, Fraction], Fraction]] = []
            for coefficients, rhs, row in substituted:
                if not coefficients:
                    if rhs != 0:
                        self._row_failure(row, rhs, open_row=False)
                    continue
                equations.append((coefficients, rhs))
                signs = {c > 0 for c in coefficients.values()}
                if len(signs) == 1 and (rhs < 0 if True in signs else rhs > 0):
                    self._row_failure(row, rhs, open_row=True)
            if self.contradiction is not None or not equations:
                break

            columns = sorted({cell for coefficients, _ in equations for cell in coefficients})
            position = {cell: k for k, cell in enumerate(columns)}
            reduced = rref(
                [{position[c]: v for c, v in coefficients.items()} for coefficients, _ in equations],
                [rhs for _, rhs in equations],
            )
            if not reduced.consistent:
                self.contradict(
                    self.rows[0].node if self.rows else "",
                    "the line-sum equalities are inconsistent",
                )
                break
            candidates = equations + [
                ({columns[k]: v for k, v in row.items()}, rhs)
                for row, rhs in zip(reduced.rows, reduced.rhs)
            ]

            forced: Dict[int, Fraction] = {}
            for coefficients, rhs in candidates:
                if len(coefficients) == 1:
                    (cell, coefficient), = coefficients.items()
                    forced.setdefault(cell, rhs / coefficient)
                    continue
                signs = {c > 0 for c in coefficients.values()}
                if len(signs) == 1 and rhs == 0:
                    for cell in coefficients:
                        forced.setdefault(cell, ZERO)
            if not forced:
                break
            for cell, value in sorted(forced.items()):
                node = self._labels[cell][0]
                self.fix(cell, value, node)
            logger.debug(f"Propagation fixed {len(forced)} cells")

        if self.contradiction is None:
            self._check_lines()

    def _check_lines(self) -> None:
        seen: Set[PreferenceProfile] = set()
        for node, profile in self._nodes.items():
            if profile in seen:
                continue
            seen.add(profile)
            view = self.system(node)
            for line in view.lines():
                mass, complete = view.line_mass(line)
                kind, label = line
                if mass > 1:
                    self.contradict(
                        node,
                        f"{kind} {label} at profile {node}: known mass "
                        f"{format_rational(mass)} exceeds 1",
                    )
                    return
                if complete and mass != 1:
                    self.contradict(
                        node,
                        f"{kind} {label} at profile {node}: entries sum to "
                        f"{format_rational(mass)} instead of 1",
                    )
                    return


def parse_affine(text: str) -> Tuple[Fraction, Fraction]:
    """
    Parse an expected entry such as ``1/4``, ``x``, ``1/12-x`` or ``7/12+x``.

    Returns:
        Tuple of (constant, coefficient of the node parameter)

    Raises:
        RationalFormatError: If a term is not a rational
    """
    compact = text.replace(" ", "").replace("*", "")
    if "x" not in compact:
        return parse_rational(compact), ZERO
    constant = ZERO
    slope = ZERO
    for term in re.findall(r"[+-]?[^+-]+", compact):
        if term.endswith("x"):
            factor = term[:-1]
            if factor in ("", "+"):
                slope += 1
            elif factor == "-":
                slope -= 1
            else:
                slope += parse_rational(factor)
        else:
            constant += parse_rational(term)
    return constant, slope
