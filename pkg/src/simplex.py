"""
Exact rational linear programming.

This module implements a two-phase tableau simplex over Fractions with
Bland's least-index pivot rule. All variables are nonnegative; constraints
are equalities or one-sided inequalities.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import logging
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import InputError

logger = logging.getLogger(__name__)

Coefficients = Dict[int, Fraction]
VariableRef = Union[int, str]


class Sense(Enum):
    """Relation between a constraint's left-hand side and its bound."""

    EQ = "=="
    LE = "<="
    GE = ">="


@dataclass
class Constraint:
    """Linear row sum(coefficients[v] * x_v) <sense> rhs."""

    coefficients: Coefficients
    sense: Sense
    rhs: Fraction
    label: str = ""

    def evaluate(self, point: Sequence[Fraction]) -> Fraction:
        """Left-hand side at point."""
        return sum(
            (coefficient * point[index] for index, coefficient in self.coefficients.items()),
            Fraction(0),
        )

    def is_satisfied(self, point: Sequence[Fraction]) -> bool:
        """Check the row exactly at point."""
        value = self.evaluate(point)
        if self.sense is Sense.EQ:
            return value == self.rhs
        if self.sense is Sense.LE:
            return value <= self.rhs
        return value >= self.rhs


@dataclass
class LinearSystem:
    """
    Named nonnegative variables, linear constraints and an optional objective.

    Coefficients may be given by variable index or by variable name.
    """

    variables: List[str] = field(default_factory=list)
    constraints: List[Constraint] = field(default_factory=list)
    objective: Optional[Coefficients] = None
    maximize: bool = True

    def __post_init__(self) -> None:
        """Build the name index."""
        self._index: Dict[str, int] = {}
        for position, name in enumerate(self.variables):
            if name in self._index:
                raise InputError(f"Duplicate variable '{name}'")
            self._index[name] = position

    def add_variable(self, name: str) -> int:
        """
        Declare a variable.

        Returns:
            Index of the new variable

        Raises:
            InputError: If the name is already declared
        """
        if name in self._index:
            raise InputError(f"Duplicate variable '{name}'")
        self._index[name] = len(self.variables)
        self.variables.append(name)
        return self._index[name]

    def index(self, ref: VariableRef) -> int:
        """
        Resolve a variable reference.

        Raises:
            InputError: If the variable is not declared
        """
        if isinstance(ref, int):
            if not 0 <= ref < len(self.variables):
                raise InputError(f"Variable index {ref} out of range")
            return ref
        try:
            return self._index[ref]
        except KeyError:
            raise InputError(f"Unknown variable '{ref}'") from None

    def _resolve(self, coefficients: Mapping[VariableRef, Union[Fraction, int]]) -> Coefficients:
        resolved: Coefficients = {}
        for ref, value in coefficients.items():
            index = self.index(ref)
            total = resolved.get(index, Fraction(0)) + Fraction(value)
            if total:
                resolved[index] = total
            else:
                resolved.pop(index, None)
        return resolved

    def add_constraint(
        self,
        coefficients: Mapping[VariableRef, Union[Fraction, int]],
        sense: Union[Sense, str],
        rhs: Union[Fraction, int],
        label: str = "",
    ) -> Constraint:
        """
        Append a constraint.

        Args:
            coefficients: Variable -> coefficient
            sense: Sense or one of '==', '<=', '>='
            rhs: Right-hand side
            label: Provenance tag

        Returns:
            The stored constraint
        """
        constraint = Constraint(
            self._resolve(coefficients), Sense(sense), Fraction(rhs), label
        )
        self.constraints.append(constraint)
        return constraint

    def set_objective(
        self, coefficients: Mapping[VariableRef, Union[Fraction, int]], maximize: bool = True
    ) -> None:
        """Set the linear objective."""
        self.objective = self._resolve(coefficients)
        self.maximize = maximize

    def copy(self) -> "LinearSystem":
        """Independent copy (constraints are shared read-only)."""
        duplicate = LinearSystem(list(self.variables), list(self.constraints))
        duplicate.objective = dict(self.objective) if self.objective is not None else None
        duplicate.maximize = self.maximize
        return duplicate

    def is_satisfied(self, point: Sequence[Fraction]) -> bool:
        """Check nonnegativity and every constraint exactly."""
        return all(value >= 0 for value in point) and all(
            constraint.is_satisfied(point) for constraint in self.constraints
        )


class LPStatus(Enum):
    """Outcome of lp_solve."""

    INFEASIBLE = "infeasible"
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    """Verdict of an exact LP solve."""

    status: LPStatus
    value: Optional[Fraction] = None
    point: Optional[List[Fraction]] = None
    pivots: int = 0
    infeasibility: Optional[Fraction] = None

    @property
    def feasible(self) -> bool:
        """True unless the system is infeasible."""
        return self.status is not LPStatus.INFEASIBLE

    def named_point(self, system: LinearSystem) -> Dict[str, Fraction]:
        """Point keyed by variable name."""
        if self.point is None:
            return {}
        return dict(zip(system.variables, self.point))


class _Tableau:
    """Sparse simplex tableau; rows are dicts column -> coefficient."""

    def __init__(self, rows: List[Coefficients], rhs: List[Fraction], basis: List[int]) -> None:
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.cost: Coefficients = {}
        self.value = Fraction(0)
        self.pivots = 0

    def price(self, objective: Mapping[int, Fraction], allowed: int) -> None:
        """Load reduced costs for objective relative to the current basis."""
        self.cost = {k: Fraction(v) for k, v in objective.items() if v and k < allowed}
        self.value = Fraction(0)
        for row, rhs, basic in zip(self.rows, self.rhs, self.basis):
            factor = self.cost.get(basic)
            if not factor:
                continue
            for column, coefficient in row.items():
                updated = self.cost.get(column, Fraction(0)) - factor * coefficient
                if updated:
                    self.cost[column] = updated
                else:
                    self.cost.pop(column, None)
            self.value += factor * rhs

    def pivot(self, r: int, c: int) -> None:
        row = self.rows[r]
        pivot = row[c]
        if pivot != 1:
            row = {column: value / pivot for column, value in row.items()}
            self.rows[r] = row
            self.rhs[r] /= pivot
        rhs_r = self.rhs[r]
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            factor = other.get(c)
            if not factor:
                continue
            for column, value in row.items():
                updated = other.get(column, Fraction(0)) - factor * value
                if updated:
                    other[column] = updated
                else:
                    other.pop(column, None)
            self.rhs[i] -= factor * rhs_r
        factor = self.cost.get(c)
        if factor:
            for column, value in row.items():
                updated = self.cost.get(column, Fraction(0)) - factor * value
                if updated:
                    self.cost[column] = updated
                else:
                    self.cost.pop(column, None)
            self.value += factor * rhs_r
        self.basis[r] = c
        self.pivots += 1

    def optimize(self, allowed: int) -> bool:
        """
        Run Bland's rule on columns below allowed.

        Returns:
            False if the objective is unbounded
        """
        while True:
            entering = min(
                (column for column, value in self.cost.items() if value > 0 and column < allowed),
                default=None,
            )
            if entering is None:
                return True
            best: Optional[Tuple[Fraction, int, int]] = None
            for i, row in enumerate(self.rows):
                coefficient = row.get(entering)
                if coefficient is not None and coefficient > 0:
                    candidate = (self.rhs[i] / coefficient, self.basis[i], i)
                    if best is None or candidate < best:
                        best = candidate
            if best is None:
                return False
            self.pivot(best[2], entering)


def lp_solve(system: LinearSystem) -> LPResult:
    """
    Solve a linear system exactly.

    Without an objective the result is a feasibility verdict: OPTIMAL with
    value 0 and a feasible point, or INFEASIBLE.

    Args:
        system: Variables, constraints and optional objective

    Returns:
        LPResult with status, optimal value and point
    """
    n = len(system.variables)
    rows: List[Coefficients] = []
    rhs: List[Fraction] = []
    basis: List[Optional[int]] = []
    next_column = n

    for constraint in system.constraints:
        row = dict(constraint.coefficients)
        bound = constraint.rhs
        slack: Optional[int] = None
        if constraint.sense is not Sense.EQ:
            slack = next_column
            next_column += 1
            row[slack] = Fraction(1) if constraint.sense is Sense.LE else Fraction(-1)
        if bound < 0:
            row = {column: -value for column, value in row.items()}
            bound = -bound
        rows.append(row)
        rhs.append(bound)
        basis.append(slack if slack is not None and row[slack] == 1 else None)

    first_artificial = next_column
    for i, basic in enumerate(basis):
        if basic is None:
            rows[i][next_column] = Fraction(1)
            basis[i] = next_column
            next_column += 1

    tableau = _Tableau(rows, rhs, [b for b in basis if b is not None])
    artificials = range(first_artificial, next_column)

    if next_column > first_artificial:
        tableau.price({a: Fraction(-1) for a in artificials}, next_column)
        tableau.optimize(next_column)
        if tableau.value < 0:
            logger.debug(f"Phase 1 infeasible after {tableau.pivots} pivots")
            return LPResult(
                LPStatus.INFEASIBLE, pivots=tableau.pivots, infeasibility=-tableau.value
            )
        _drive_out_artificials(tableau, first_artificial)

    objective = system.objective or {}
    if not system.maximize:
        objective = {k: -v for k, v in objective.items()}
    tableau.price(objective, first_artificial)
    if not tableau.optimize(first_artificial):
        logger.debug(f"Unbounded after {tableau.pivots} pivots")
        return LPResult(LPStatus.UNBOUNDED, pivots=tableau.pivots)

    point = [Fraction(0)] * n
    for basic, value in zip(tableau.basis, tableau.rhs):
        if basic < n:
            point[basic] = value
    value = tableau.value if system.maximize else -tableau.value
    logger.debug(f"LP optimal value {value} after {tableau.pivots} pivots")
    return LPResult(LPStatus.OPTIMAL, value=value, point=point, pivots=tableau.pivots)


def _drive_out_artificials(tableau: _Tableau, first_artificial: int) -> None:
    i = 0
    while i < len(tableau.rows):
        if tableau.basis[i] >= first_artificial:
            column = min(
                (c for c, v in tableau.rows[i].items() if v and c < first_artificial),
                default=None,
            )
            if column is None:
                # Redundant row
                del tableau.rows[i]
                del tableau.rhs[i]
                del tableau.basis[i]
                continue
            tableau.pivot(i, column)
        i += 1
    for row in tableau.rows:
        for column in [c for c in row if c >= first_artificial]:
            del row[column]


def maximize(system: LinearSystem, coefficients: Mapping[VariableRef, Union[Fraction, int]]) -> LPResult:
    """Solve a copy of system with the given objective maximized."""
    problem = system.copy()
    problem.set_objective(coefficients, maximize=True)
    return lp_solve(problem)


def minimize(system: LinearSystem, coefficients: Mapping[VariableRef, Union[Fraction, int]]) -> LPResult:
    """Solve a copy of system with the given objective minimized."""
    problem = system.copy()
    problem.set_objective(coefficients, maximize=False)
    return lp_solve(problem)
