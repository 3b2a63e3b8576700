"""
Independent re-proof of the impossibility theorems.

The matrices at every profile of a builtin script are unknowns. Line sums,
symmetry-type equalities and invariance equalities along every adjacent
swap inside the profile set are linear and go into a shared constraint
store. Ordinal efficiency, swap monotonicity and non-bossiness are
disjunctive; they are checked lazily at the LP solution of each branch and
split the branch when violated. The search ends with no feasible branch
(infeasible), a fragment meeting every constraint (witness), or the branch
limit (inconclusive).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
import logging
import time
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from .axioms import (
    ANONYMITY,
    LOWER_INVARIANCE,
    NEUTRALITY,
    NON_BOSSINESS,
    ORDINAL_EFFICIENCY,
    SWAP_MONOTONICITY,
    SYMMETRY,
    UPPER_INVARIANCE,
    run_checks,
)
from .codec import format_rational
from .config import Config
from .constraints import ProofState
from .domains import ExplicitDomain, Transition, transitions_from
from .efficiency import trading_graph
from .errors import InputError
from .mechanisms import TableMechanism
from .models import ZERO, Assignment, PreferenceProfile
from .preferences import contour_sets, relabel_objects, swap_agents
from .proof_scripts import builtin_script
from .simplex import LinearSystem, LPStatus, lp_solve, maximize

logger = logging.getLogger(__name__)

INFEASIBLE = "infeasible"
WITNESS = "witness"
INCONCLUSIVE = "inconclusive"

SEARCH_FAMILIES = (
    UPPER_INVARIANCE,
    LOWER_INVARIANCE,
    SWAP_MONOTONICITY,
    NON_BOSSINESS,
    ORDINAL_EFFICIENCY,
    SYMMETRY,
    ANONYMITY,
    NEUTRALITY,
)

THEOREM_FAMILIES: Dict[int, Tuple[str, ...]] = {
    1: (UPPER_INVARIANCE, LOWER_INVARIANCE, ORDINAL_EFFICIENCY, SYMMETRY),
    2: (
        SWAP_MONOTONICITY,
        LOWER_INVARIANCE,
        ORDINAL_EFFICIENCY,
        ANONYMITY,
        NEUTRALITY,
        NON_BOSSINESS,
    ),
}

# A strict constraint: sum of coefficient * cell > 0
StrictForm = Tuple[Tuple[int, Fraction], ...]


def axiom_families(
    theorem: int, drop: Iterable[str] = (), add: Iterable[str] = ()
) -> Tuple[str, ...]:
    """
    Axiom families of a theorem after dropping and adding some.

    Raises:
        InputError: If the theorem is unknown, a family is not supported or
            a dropped family is not part of the theorem
    """
    if theorem not in THEOREM_FAMILIES:
        raise InputError(f"Theorems 1 and 2 can be searched, not {theorem}")
    families = list(THEOREM_FAMILIES[theorem])
    for name in list(drop) + list(add):
        if name not in SEARCH_FAMILIES:
            raise InputError(
                f"Unknown axiom family '{name}'. Supported: {', '.join(SEARCH_FAMILIES)}"
            )
    for name in drop:
        if name not in families:
            raise InputError(f"Theorem {theorem} does not use {name}")
        families.remove(name)
    for name in add:
        if name not in families:
            families.append(name)
    return tuple(families)


@dataclass
class SearchResult:
    """Verdict of an independent search with its evidence."""

    theorem: int
    axioms: Tuple[str, ...]
    verdict: str
    branches: int
    profiles: Dict[str, PreferenceProfile]
    witness: Dict[str, Assignment] = field(default_factory=dict)
    certificate: str = ""
    violations: List[str] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def infeasible(self) -> bool:
        """True when no mechanism on the profile set meets the axioms."""
        return self.verdict == INFEASIBLE

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready mapping."""
        return {
            "theorem": self.theorem,
            "axioms": list(self.axioms),
            "verdict": self.verdict,
            "branches": self.branches,
            "certificate": self.certificate,
            "profiles": {name: p.as_dict() for name, p in self.profiles.items()},
            "witness": {
                name: [[format_rational(v) for v in row] for row in x.entries]
                for name, x in self.witness.items()
            },
            "violations": list(self.violations),
            "wall_time": round(self.wall_time, 3),
        }


@dataclass
class _Branch:
    state: ProofState
    positive: FrozenSet[int] = frozenset()
    strict: Tuple[StrictForm, ...] = ()
    depth: int = 0


@dataclass
class _Outcome:
    verdict: str
    branches: int
    witness: Optional[Dict[str, Assignment]] = None


class _Search:
    """Constraint store and lazy checks shared by every branch."""

    def __init__(self, nodes: Dict[str, PreferenceProfile], families: Sequence[str]) -> None:
        self.nodes = nodes
        self.families = set(families)
        by_profile = {profile: name for name, profile in nodes.items()}
        self.edges: List[Tuple[str, str, Transition]] = [
            (by_profile[t.profile], by_profile[t.target], t)
            for profile in nodes.values()
            for t in transitions_from(profile)
            if t.target in by_profile
        ]
        self.by_profile = by_profile

    def root(self) -> ProofState:
        state = ProofState()
        for name, profile in self.nodes.items():
            state.add_node(name, profile)
        if SYMMETRY in self.families:
            self._symmetry(state)
        if ANONYMITY in self.families:
            self._anonymity(state)
        if NEUTRALITY in self.families:
            self._neutrality(state)
        for invariance in (UPPER_INVARIANCE, LOWER_INVARIANCE):
            if invariance in self.families:
                self._invariance(state, upper=invariance == UPPER_INVARIANCE)
        for name in self.nodes:
            state.add_line_sums(name, provenance=f"bistochasticity at {name}")
        state.resolve()
        return state

    def _symmetry(self, state: ProofState) -> None:
        for name, profile in self.nodes.items():
            for first, second in combinations(profile.agents, 2):
                if profile.order_of(first) == profile.order_of(second):
                    for obj in profile.objects:
                        state.alias(
                            state.cell(name, first, obj), state.cell(name, second, obj), name
                        )

    def _anonymity(self, state: ProofState) -> None:
        for name, profile in self.nodes.items():
            for first, second in combinations(profile.agents, 2):
                if profile.order_of(first) == profile.order_of(second):
                    other = name
                else:
                    partner = swap_agents(profile, first, second)
                    if partner not in self.by_profile:
                        continue
                    other = self.by_profile[partner]
                for obj in profile.objects:
                    state.alias(state.cell(name, first, obj), state.cell(other, second, obj), name)
                    state.alias(state.cell(name, second, obj), state.cell(other, first, obj), name)

    def _neutrality(self, state: ProofState) -> None:
        for name, profile in self.nodes.items():
            for j, j_prime in combinations(profile.objects, 2):
                partner = relabel_objects(profile, j, j_prime)
                if partner not in self.by_profile:
                    continue
                other = self.by_profile[partner]
                renamed = {j: j_prime, j_prime: j}
                for agent in profile.agents:
                    for obj in profile.objects:
                        state.alias(
                            state.cell(name, agent, obj),
                            state.cell(other, agent, renamed.get(obj, obj)),
                            name,
                        )

    def _invariance(self, state: ProofState, upper: bool) -> None:
        for source, target, transition in self.edges:
            assert transition.pair is not None
            j, j_prime = transition.pair
            order = transition.truthful_order
            kept = contour_sets(order, j)[0] if upper else contour_sets(order, j_prime)[1]
            for obj in kept:
                state.alias(
                    state.cell(source, transition.agent, obj),
                    state.cell(target, transition.agent, obj),
                    target,
                )

    def solve(self, branch: _Branch) -> Optional[Dict[str, Assignment]]:
        """Matrices at an LP point of the branch, or None if it is infeasible."""
        state = branch.state
        system, variables = state.linear_system()
        position = {cell: k for k, cell in enumerate(variables)}
        forms: List[Tuple[Fraction, Dict[int, Fraction]]] = []
        for form in branch.strict:
            constant = ZERO
            linear: Dict[int, Fraction] = {}
            for cell, coefficient in form:
                rep = state.find(cell)
                if rep in state.known:
                    constant += coefficient * state.known[rep]
                else:
                    linear[position[rep]] = linear.get(position[rep], ZERO) + coefficient
            linear = {k: v for k, v in linear.items() if v}
            if not linear:
                if constant <= 0:
                    return None
                continue
            forms.append((constant, linear))

        if forms:
            slack = len(variables)
            problem = LinearSystem(list(system.variables) + ["t"], list(system.constraints))
            for constant, linear in forms:
                problem.add_constraint({**linear, slack: -1}, ">=", -constant, "strict")
            problem.add_constraint({slack: 1}, "<=", 1, "strict cap")
            result = maximize(problem, {slack: 1})
            if result.status is not LPStatus.OPTIMAL or not result.value or result.value <= 0:
                return None
        else:
            result = lp_solve(system)
            if result.status is not LPStatus.OPTIMAL:
                return None
        assert result.point is not None
        point = result.point[: len(variables)]
        return {name: state.system(name).matrix(variables, point) for name in self.nodes}

    def _forced_cycle(self, state: ProofState, positive: Iterable[int]) -> bool:
        reps = {state.find(cell) for cell in positive}
        for name, profile in self.nodes.items():
            graph = nx.DiGraph()
            for agent, order in zip(profile.agents, profile.orders):
                for position, worse in enumerate(order.ranking):
                    if state.cell(name, agent, worse) in reps:
                        graph.add_edges_from((better, worse) for better in order.ranking[:position])
            if not nx.is_directed_acyclic_graph(graph):
                return True
        return False

    def _child(self, branch: _Branch, **changes: Any) -> _Branch:
        return _Branch(
            state=changes.get("state", branch.state.copy()),
            positive=changes.get("positive", branch.positive),
            strict=branch.strict + changes.get("strict", ()),
            depth=branch.depth + 1,
        )

    def _merged(
        self, branch: _Branch, pairs: Iterable[Tuple[int, int]], node: str
    ) -> Optional[_Branch]:
        state = branch.state.copy()
        for first, second in pairs:
            state.alias(first, second, node)
        state.resolve()
        if state.contradiction is not None:
            return None
        return self._child(branch, state=state)

    def refine(self, branch: _Branch, matrices: Dict[str, Assignment]) -> Optional[List[_Branch]]:
        """
        Children of a branch whose LP point violates a disjunctive axiom.

        Returns:
            None when the point meets every axiom, otherwise the children
            (possibly none, when the branch is dead)
        """
        state = branch.state
        if ORDINAL_EFFICIENCY in self.families:
            for name, profile in self.nodes.items():
                graph = trading_graph(matrices[name], profile)
                try:
                    cycle = nx.find_cycle(graph)
                except nx.NetworkXNoCycle:
                    continue
                cells = [
                    state.cell(name, graph.edges[better, worse]["agent"], worse)
                    for better, worse in cycle
                ]
                forced = {state.find(c) for c in branch.positive}
                open_cells = [c for c in cells if c not in forced]
                if not open_cells:
                    return []
                cell = open_cells[0]
                children = []
                zeroed = branch.state.copy()
                zeroed.fix(cell, ZERO, name)
                zeroed.resolve()
                if zeroed.contradiction is None:
                    children.append(self._child(branch, state=zeroed))
                positive = branch.positive | {cell}
                if not self._forced_cycle(state, positive):
                    children.append(
                        self._child(branch, positive=positive, strict=(((cell, Fraction(1)),),))
                    )
                return children

        for source, target, transition in self.edges:
            agent = transition.agent
            x, y = matrices[source], matrices[target]
            row_equal = x.row(agent) == y.row(agent)
            assert transition.pair is not None
            j, j_prime = transition.pair
            whole = [
                (state.cell(source, i, o), state.cell(target, i, o))
                for i in x.agents
                for o in x.objects
            ]
            if SWAP_MONOTONICITY in self.families and not row_equal:
                if x.entry(agent, j) > y.entry(agent, j) and x.entry(agent, j_prime) < y.entry(
                    agent, j_prime
                ):
                    continue
                row = [
                    (state.cell(source, agent, o), state.cell(target, agent, o))
                    for o in x.objects
                ]
                children = []
                equal = self._merged(
                    branch, whole if NON_BOSSINESS in self.families else row, target
                )
                if equal is not None:
                    children.append(equal)
                down = (
                    (state.cell(source, agent, j), Fraction(1)),
                    (state.cell(target, agent, j), Fraction(-1)),
                )
                up = (
                    (state.cell(target, agent, j_prime), Fraction(1)),
                    (state.cell(source, agent, j_prime), Fraction(-1)),
                )
                children.append(self._child(branch, strict=(down, up)))
                return children
            if NON_BOSSINESS in self.families and row_equal and x != y:
                children = []
                equal = self._merged(branch, whole, target)
                if equal is not None:
                    children.append(equal)
                for obj in x.objects:
                    first, second = state.cell(source, agent, obj), state.cell(target, agent, obj)
                    for sign in (1, -1):
                        form = ((first, Fraction(sign)), (second, Fraction(-sign)))
                        children.append(self._child(branch, strict=(form,)))
                return children
        return None


def _explore(search: _Search, start: List[_Branch], limit: int) -> _Outcome:
    stack = list(reversed(start))
    count = 0
    while stack:
        if count >= limit:
            return _Outcome(INCONCLUSIVE, count)
        branch = stack.pop()
        count += 1
        matrices = search.solve(branch)
        if matrices is None:
            continue
        children = search.refine(branch, matrices)
        if children is None:
            return _Outcome(WITNESS, count, matrices)
        logger.debug(f"Branch at depth {branch.depth} splits into {len(children)}")
        stack.extend(reversed(children))
    return _Outcome(INFEASIBLE, count)


def independent_search(
    theorem: int,
    drop: Iterable[str] = (),
    add: Iterable[str] = (),
    branch_limit: Optional[int] = None,
    threads: Optional[int] = None,
) -> SearchResult:
    """
    Decide whether any mechanism on a theorem's profile set meets its axioms.

    Args:
        theorem: 1 or 2
        drop: Axiom families to remove from the theorem's set
        add: Axiom families to add (e.g. swap monotonicity for the corollary)
        branch_limit: Largest number of branches; defaults to Config.BRANCH_LIMIT
        threads: Workers for the subtrees below the root split

    Returns:
        SearchResult with verdict infeasible, witness or inconclusive

    Raises:
        InputError: If the theorem or a family is unknown
    """
    families = axiom_families(theorem, drop, add)
    limit = branch_limit if branch_limit is not None else Config.BRANCH_LIMIT
    workers = Config.get_threads(threads)
    started = time.perf_counter()

    script = builtin_script(theorem)
    nodes: Dict[str, PreferenceProfile] = {}
    for node in script.nodes:
        if node.profile not in nodes.values():
            nodes[node.name] = node.profile
    search = _Search(nodes, families)
    logger.info(
        f"Searching theorem {theorem} with {', '.join(families)} over {len(nodes)} profiles "
        f"and {len(search.edges)} transitions"
    )
    result = SearchResult(theorem, families, INFEASIBLE, 0, nodes)

    root = _Branch(search.root())
    if root.state.contradiction is not None:
        result.branches = 1
        result.certificate = f"propagation alone: {root.state.contradiction.message}"
    else:
        matrices = search.solve(root)
        children = search.refine(root, matrices) if matrices is not None else []
        if matrices is not None and children is None:
            outcome = _Outcome(WITNESS, 1, matrices)
        elif workers > 1 and children and len(children) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(lambda child: _explore(search, [child], limit), children))
            verdicts = [o.verdict for o in outcomes]
            total = 1 + sum(o.branches for o in outcomes)
            found = next((o for o in outcomes if o.verdict == WITNESS), None)
            if found is not None:
                outcome = _Outcome(WITNESS, total, found.witness)
            elif INCONCLUSIVE in verdicts:
                outcome = _Outcome(INCONCLUSIVE, total)
            else:
                outcome = _Outcome(INFEASIBLE, total)
        else:
            explored = _explore(search, children or [], limit)
            outcome = _Outcome(explored.verdict, explored.branches + 1, explored.witness)
        result.verdict = outcome.verdict
        result.branches = outcome.branches
        if outcome.verdict == INFEASIBLE:
            result.certificate = f"all {outcome.branches} branches are infeasible"
        elif outcome.verdict == INCONCLUSIVE:
            result.certificate = f"branch limit {limit} reached"
            logger.warning(f"Search for theorem {theorem} is inconclusive after {limit} branches")
        elif outcome.witness is not None:
            result.witness = outcome.witness
            result.violations = fragment_violations(
                theorem, {nodes[name]: x for name, x in outcome.witness.items()}, drop, add
            )
            result.certificate = f"fragment over {len(nodes)} profiles"
            if result.violations:
                logger.warning(f"Witness violates {len(result.violations)} constraint(s)")

    result.wall_time = time.perf_counter() - started
    logger.info(
        f"Theorem {theorem} search: {result.verdict} after {result.branches} branches "
        f"in {result.wall_time:.2f}s"
    )
    return result


def fragment_violations(
    theorem: int,
    matrices: Mapping[PreferenceProfile, Assignment],
    drop: Iterable[str] = (),
    add: Iterable[str] = (),
) -> List[str]:
    """
    Check a map profile -> matrix against a theorem's axiom families.

    Only relations between profiles of the theorem's script are checked,
    exactly as the independent search asserts them.

    Args:
        theorem: 1 or 2
        matrices: Matrix at every profile of the script (extra profiles are ignored)
        drop: Families to leave out
        add: Families to add

    Returns:
        One line per violation, empty when the fragment meets every family

    Raises:
        InputError: If a profile of the script has no matrix
    """
    families = axiom_families(theorem, drop, add)
    profiles = builtin_script(theorem).profiles()
    missing = [p for p in profiles if p not in matrices]
    if missing:
        raise InputError(f"No matrix for {len(missing)} profile(s), e.g. {missing[0]}")
    table = TableMechanism({p: matrices[p] for p in profiles}, name=f"fragment-{theorem}")
    domain = ExplicitDomain(profiles, label=f"theorem-{theorem}")
    return [
        example.describe()
        for verdict in run_checks(table, domain, families, skip_missing=True)
        for example in verdict.counterexamples
    ]
