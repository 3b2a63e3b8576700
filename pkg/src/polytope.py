"""
Polytope operations over exact rationals.

This module eliminates equalities, enumerates vertices of small polytopes by
basis enumeration, and decomposes bistochastic matrices into lotteries over
permutation matrices (Birkhoff-von Neumann).
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
import logging
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .config import Config
from .errors import CapacityError
from .models import ZERO, Assignment
from .simplex import LinearSystem, LPStatus, Sense, lp_solve

logger = logging.getLogger(__name__)

Point = Tuple[Fraction, ...]
# Affine expression: (constant, {free parameter position: coefficient})
Affine = Tuple[Fraction, Dict[int, Fraction]]


@dataclass
class ReducedEqualities:
    """Row-reduced equality system."""

    pivots: List[int]
    rows: List[Dict[int, Fraction]]
    rhs: List[Fraction]
    consistent: bool

    def free_columns(self, n_variables: int) -> List[int]:
        """Columns without a pivot."""
        pivot_set = set(self.pivots)
        return [column for column in range(n_variables) if column not in pivot_set]


def rref(rows: Sequence[Dict[int, Fraction]], rhs: Sequence[Fraction]) -> ReducedEqualities:
    """
    Gauss-Jordan elimination of sparse rows with least-index pivots.

    Args:
        rows: Coefficient rows keyed by column
        rhs: Right-hand sides

    Returns:
        Reduced rows; consistent is False if some row reads 0 = c with c != 0
    """
    work = [dict(row) for row in rows]
    bounds = [Fraction(b) for b in rhs]
    pivots: List[int] = []
    reduced: List[Dict[int, Fraction]] = []
    reduced_rhs: List[Fraction] = []

    pending = list(range(len(work)))
    while pending:
        best: Optional[Tuple[int, int]] = None
        for i in pending:
            if work[i]:
                column = min(work[i])
                if best is None or column < best[0]:
                    best = (column, i)
        if best is None:
            break
        column, i = best
        pending.remove(i)
        pivot = work[i][column]
        row = {c: v / pivot for c, v in work[i].items()}
        bound = bounds[i] / pivot
        for k in pending:
            factor = work[k].get(column)
            if factor:
                _subtract(work[k], row, factor)
                bounds[k] -= factor * bound
        for k, other in enumerate(reduced):
            factor = other.get(column)
            if factor:
                _subtract(other, row, factor)
                reduced_rhs[k] -= factor * bound
        pivots.append(column)
        reduced.append(row)
        reduced_rhs.append(bound)

    consistent = all(bounds[i] == 0 for i in pending if not work[i])
    return ReducedEqualities(pivots, reduced, reduced_rhs, consistent)


def _subtract(target: Dict[int, Fraction], row: Dict[int, Fraction], factor: Fraction) -> None:
    for column, value in row.items():
        updated = target.get(column, ZERO) - factor * value
        if updated:
            target[column] = updated
        else:
            target.pop(column, None)


def parametrize(reduced: ReducedEqualities, n_variables: int) -> Tuple[List[int], List[Affine]]:
    """
    Express every variable as an affine function of the free columns.

    Returns:
        Tuple of (free columns, one affine expression per variable)
    """
    free = reduced.free_columns(n_variables)
    position = {column: k for k, column in enumerate(free)}
    expressions: List[Affine] = [(ZERO, {}) for _ in range(n_variables)]
    for column in free:
        expressions[column] = (ZERO, {position[column]: Fraction(1)})
    for pivot, row, bound in zip(reduced.pivots, reduced.rows, reduced.rhs):
        expressions[pivot] = (
            bound,
            {position[c]: -v for c, v in row.items() if c != pivot},
        )
    return free, expressions


def _solve_square(matrix: List[List[Fraction]], rhs: List[Fraction]) -> Optional[List[Fraction]]:
    size = len(matrix)
    work = [row[:] + [b] for row, b in zip(matrix, rhs)]
    for column in range(size):
        pivot_row = next((r for r in range(column, size) if work[r][column] != 0), None)
        if pivot_row is None:
            return None
        work[column], work[pivot_row] = work[pivot_row], work[column]
        pivot = work[column][column]
        work[column] = [v / pivot for v in work[column]]
        for r in range(size):
            if r != column and work[r][column] != 0:
                factor = work[r][column]
                work[r] = [a - factor * b for a, b in zip(work[r], work[column])]
    return [row[size] for row in work]


def enumerate_vertices(system: LinearSystem, max_dimension: Optional[int] = None) -> List[Point]:
    """
    All vertices of a bounded polytope {x >= 0 : system constraints}.

    Equalities are eliminated first; vertices are the feasible solutions of
    every choice of d tight inequalities, d being the remaining dimension.

    Args:
        system: Linear system (the objective is ignored)
        max_dimension: Dimension cap; defaults to Config.VERTEX_MAX_DIMENSION

    Returns:
        Deduplicated vertices in lexicographic order

    Raises:
        CapacityError: If the dimension after elimination exceeds the cap
    """
    cap = max_dimension if max_dimension is not None else Config.VERTEX_MAX_DIMENSION
    n = len(system.variables)
    equalities = [c for c in system.constraints if c.sense is Sense.EQ]
    reduced = rref([c.coefficients for c in equalities], [c.rhs for c in equalities])
    if not reduced.consistent:
        return []
    free, expressions = parametrize(reduced, n)
    dimension = len(free)
    if dimension > cap:
        raise CapacityError(
            f"Polytope has dimension {dimension}; vertex enumeration is capped at {cap} "
            "(AXIOMLAB_VERTEX_MAX_DIMENSION)"
        )

    def substitute(coefficients: Dict[int, Fraction]) -> Affine:
        constant = ZERO
        linear: Dict[int, Fraction] = {}
        for variable, coefficient in coefficients.items():
            base, terms = expressions[variable]
            constant += coefficient * base
            for k, v in terms.items():
                linear[k] = linear.get(k, ZERO) + coefficient * v
        return constant, {k: v for k, v in linear.items() if v}

    # Every inequality as constant + linear . t >= 0
    inequalities: List[Affine] = list(expressions)
    for constraint in system.constraints:
        if constraint.sense is Sense.EQ:
            continue
        constant, linear = substitute(constraint.coefficients)
        if constraint.sense is Sense.LE:
            inequalities.append((constraint.rhs - constant, {k: -v for k, v in linear.items()}))
        else:
            inequalities.append((constant - constraint.rhs, linear))

    facets: List[Affine] = []
    seen: Set[Tuple[Fraction, FrozenSet[Tuple[int, Fraction]]]] = set()
    for constant, linear in inequalities:
        if not linear:
            if constant < 0:
                return []
            continue
        key = (constant, frozenset(linear.items()))
        if key not in seen:
            seen.add(key)
            facets.append((constant, linear))

    def lift(parameters: Sequence[Fraction]) -> Point:
        return tuple(
            base + sum((v * parameters[k] for k, v in terms.items()), ZERO)
            for base, terms in expressions
        )

    def feasible(parameters: Sequence[Fraction]) -> bool:
        return all(
            constant + sum((v * parameters[k] for k, v in linear.items()), ZERO) >= 0
            for constant, linear in facets
        )

    if dimension == 0:
        return [lift([])] if feasible([]) else []

    vertices: Set[Point] = set()
    for tight in combinations(facets, dimension):
        matrix = [[linear.get(k, ZERO) for k in range(dimension)] for _, linear in tight]
        solution = _solve_square(matrix, [-constant for constant, _ in tight])
        if solution is not None and feasible(solution):
            vertices.add(lift(solution))
    logger.debug(f"Enumerated {len(vertices)} vertices in dimension {dimension}")
    return sorted(vertices)


def birkhoff_face_vertices(n: int, zero_cells: Iterable[Tuple[int, int]]) -> List[Point]:
    """
    Vertices of the face of the Birkhoff polytope with the given cells at 0.

    The vertices are the permutation matrices avoiding every zero cell,
    flattened row-major.
    """
    forbidden = set(zero_cells)
    vertices = []
    for columns in permutations(range(n)):
        if any((row, column) in forbidden for row, column in enumerate(columns)):
            continue
        flat = [ZERO] * (n * n)
        for row, column in enumerate(columns):
            flat[row * n + column] = Fraction(1)
        vertices.append(tuple(flat))
    return sorted(vertices)


def birkhoff_system(n: int) -> LinearSystem:
    """Line-sum equalities of n x n bistochastic matrices, variables x_i_j."""
    system = LinearSystem([f"x_{i}_{j}" for i in range(n) for j in range(n)])
    for i in range(n):
        system.add_constraint({i * n + j: 1 for j in range(n)}, "==", 1, f"row {i}")
    for j in range(n):
        system.add_constraint({i * n + j: 1 for i in range(n)}, "==", 1, f"column {j}")
    return system


@dataclass
class BvnDecomposition:
    """Lottery over deterministic assignments."""

    components: List[Tuple[Fraction, Assignment]]

    def reconstruct(self) -> Assignment:
        """Weighted sum of the permutation matrices."""
        first = self.components[0][1]
        n = first.n
        entries = [[ZERO] * n for _ in range(n)]
        for weight, permutation in self.components:
            for i, row in enumerate(permutation.entries):
                for j, value in enumerate(row):
                    if value:
                        entries[i][j] += weight * value
        return Assignment(first.agents, first.objects, tuple(map(tuple, entries)))

    def total_weight(self) -> Fraction:
        """Sum of weights (1 for a valid decomposition)."""
        return sum((weight for weight, _ in self.components), ZERO)

    def __len__(self) -> int:
        return len(self.components)


def _perfect_matching(residual: List[List[Fraction]]) -> Dict[int, int]:
    n = len(residual)
    graph = nx.Graph()
    rows = [("row", i) for i in range(n)]
    graph.add_nodes_from(rows, bipartite=0)
    graph.add_nodes_from((("col", j) for j in range(n)), bipartite=1)
    graph.add_edges_from(
        (("row", i), ("col", j)) for i in range(n) for j in range(n) if residual[i][j] > 0
    )
    matching = nx.bipartite.maximum_matching(graph, top_nodes=rows)
    return {i: matching[("row", i)][1] for i in range(n) if ("row", i) in matching}


def bvn_decompose(x: Assignment) -> BvnDecomposition:
    """
    Decompose a bistochastic matrix into weighted permutation matrices.

    Repeatedly finds a perfect matching inside the positive support and
    peels off its smallest entry. When the greedy result has more than
    (n-1)^2+1 components it is reduced to a basic solution of the weight LP.

    Args:
        x: Bistochastic assignment

    Returns:
        BvnDecomposition reconstructing x exactly
    """
    n = x.n
    residual = [list(row) for row in x.entries]
    matchings: List[Tuple[Fraction, Dict[int, int]]] = []
    while any(value > 0 for row in residual for value in row):
        matching = _perfect_matching(residual)
        if len(matching) < n:
            raise ArithmeticError("Residual support has no perfect matching")
        weight = min(residual[i][j] for i, j in matching.items())
        for i, j in matching.items():
            residual[i][j] -= weight
        matchings.append((weight, matching))

    bound = (n - 1) ** 2 + 1
    if len(matchings) > bound:
        logger.info(f"Greedy BvN used {len(matchings)} components; reducing to at most {bound}")
        matchings = _basic_weights(x, [m for _, m in matchings])

    components = [
        (
            weight,
            Assignment.permutation(
                x.agents, x.objects, {x.agents[i]: x.objects[j] for i, j in matching.items()}
            ),
        )
        for weight, matching in matchings
    ]
    return BvnDecomposition(components)


def _basic_weights(
    x: Assignment, matchings: List[Dict[int, int]]
) -> List[Tuple[Fraction, Dict[int, int]]]:
    n = x.n
    system = LinearSystem([f"w_{k}" for k in range(len(matchings))])
    for i in range(n):
        for j in range(n):
            system.add_constraint(
                {k: 1 for k, m in enumerate(matchings) if m[i] == j}, "==", x.entries[i][j]
            )
    result = lp_solve(system)
    if result.status is not LPStatus.OPTIMAL or result.point is None:
        raise ArithmeticError("Weight LP of a valid decomposition is infeasible")
    return [(w, m) for w, m in zip(result.point, matchings) if w > 0]
