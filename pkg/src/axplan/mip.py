"""A small exact 0/1-integer solver: depth-first branch and bound with
bound propagation over linear constraints."""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence

from .errors import TooLarge
from .ip import BINARY, EQ, GE, LE, LinearConstraint, MilpModel, check_assignment, translate_axioms
from .logic import NormalLogicProgram, dependency_graph

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
LIMIT = "limit"

INDEX = "index"
MOST_CONSTRAINED = "most_constrained"


@dataclass
class SolverConfig:
    node_limit: Optional[int] = None
    time_limit: Optional[float] = None
    branch_order: str = INDEX
    # minimise the model objective instead of stopping at the first solution
    optimize: bool = False

    def __post_init__(self):
        if self.node_limit is not None and self.node_limit <= 0:
            raise ValueError("node limit must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time limit must be positive")
        if self.branch_order not in (INDEX, MOST_CONSTRAINED):
            raise ValueError("unknown branch order %r" % self.branch_order)


@dataclass
class SolveResult:
    status: str
    assignment: Optional[Dict[str, int]] = None
    objective: Optional[int] = None
    nodes: int = 0
    stats: Dict[str, int] = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.assignment is not None


class _Search:
    """Rows are kept in ``sum a_i x_i <= b`` form over variable indices."""

    def __init__(self, model: MilpModel, extra: Sequence[LinearConstraint] = ()):
        self.names = list(model.variables)
        self.pos = {n: i for i, n in enumerate(self.names)}
        var = [model.variables[n] for n in self.names]
        self.lo = [v.lower for v in var]
        self.hi = [v.upper for v in var]
        self.high_first = [v.prefer_high for v in var]
        # binaries first, then general integers, each in declaration order
        self.order = sorted(range(len(var)), key=lambda i: var[i].kind != BINARY)
        self.rows: List[tuple] = []
        for c in list(model.constraints) + list(extra):
            self._add_row(c.terms, c.sense, c.rhs)
        self.occurs: List[List[int]] = [[] for _ in self.names]
        for r, (idx, _, _) in enumerate(self.rows):
            for i in idx:
                self.occurs[i].append(r)
        self.trail: List[tuple] = []

    def _add_row(self, terms, sense, rhs):
        idx = tuple(self.pos[v] for _, v in terms)
        coef = tuple(c for c, _ in terms)
        if sense in (LE, EQ):
            self.rows.append((idx, coef, rhs))
        if sense in (GE, EQ):
            self.rows.append((idx, tuple(-c for c in coef), -rhs))

    def add_row(self, terms, sense, rhs):
        start = len(self.rows)
        self._add_row(terms, sense, rhs)
        for r in range(start, len(self.rows)):
            for i in self.rows[r][0]:
                self.occurs[i].append(r)
        return list(range(start, len(self.rows)))

    def _set(self, i, lo, hi):
        self.trail.append((i, self.lo[i], self.hi[i]))
        self.lo[i], self.hi[i] = lo, hi

    def undo(self, mark):
        trail, lo, hi = self.trail, self.lo, self.hi
        while len(trail) > mark:
            i, a, b = trail.pop()
            lo[i], hi[i] = a, b

    def propagate(self, rows) -> bool:
        lo, hi, rows_all, occurs = self.lo, self.hi, self.rows, self.occurs
        queue = list(rows)
        queued = set(queue)
        while queue:
            r = queue.pop()
            queued.discard(r)
            idx, coef, rhs = rows_all[r]
            minact = 0
            for i, a in zip(idx, coef):
                minact += a * lo[i] if a > 0 else a * hi[i]
            if minact > rhs:
                return False
            slack = rhs - minact
            for i, a in zip(idx, coef):
                if a > 0:
                    bound = lo[i] + slack // a
                    if bound < hi[i]:
                        self._set(i, lo[i], bound)
                    else:
                        continue
                else:
                    bound = hi[i] - (slack // -a)
                    if bound > lo[i]:
                        self._set(i, bound, hi[i])
                    else:
                        continue
                for r2 in occurs[i]:
                    if r2 != r and r2 not in queued:
                        queued.add(r2)
                        queue.append(r2)
        return True

    def entailed(self, r) -> bool:
        idx, coef, rhs = self.rows[r]
        lo, hi = self.lo, self.hi
        maxact = 0
        for i, a in zip(idx, coef):
            maxact += a * hi[i] if a > 0 else a * lo[i]
        return maxact <= rhs

    def pick(self, order: str) -> Optional[int]:
        """Next branching variable, ignoring variables whose rows all hold
        whatever values they take."""
        lo, hi = self.lo, self.hi
        best, best_score = None, -1
        for i in self.order:
            if lo[i] == hi[i]:
                continue
            open_rows = sum(1 for r in self.occurs[i] if not self.entailed(r))
            if not open_rows:
                continue
            if order == INDEX:
                return i
            if open_rows > best_score:
                best, best_score = i, open_rows
        return best

    def values(self, i) -> List[int]:
        vals = list(range(self.lo[i], self.hi[i] + 1))
        return vals[::-1] if self.high_first[i] else vals

    def assignment(self) -> Dict[str, int]:
        return {n: self.lo[i] for i, n in enumerate(self.names)}


class _Limit(Exception):
    pass


def propagate(model: MilpModel):
    """Bounds after propagation to a fixpoint, or None when infeasible."""
    s = _Search(model)
    if not s.propagate(range(len(s.rows))):
        return None
    return {n: (s.lo[i], s.hi[i]) for i, n in enumerate(s.names)}


def _wall_deadline(config: SolverConfig):
    if config.time_limit is None:
        return None
    return time.monotonic() + config.time_limit


def solve(model: MilpModel, config: Optional[SolverConfig] = None,
          extra: Sequence[LinearConstraint] = ()) -> SolveResult:
    """Find a feasible (or, with ``config.optimize`` and an objective, an
    optimal) assignment."""
    config = config or SolverConfig()
    s = _Search(model, extra)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * len(s.names) + 1000))
    deadline = _wall_deadline(config)
    objective = model.objective if config.optimize and model.objective else None
    obj_rows: List[int] = []
    nodes = 0
    best: Optional[Dict[str, int]] = None
    best_value: Optional[int] = None

    def tick():
        nonlocal nodes
        nodes += 1
        if config.node_limit is not None and nodes > config.node_limit:
            raise _Limit()
        if deadline is not None and nodes % 64 == 0 and time.monotonic() > deadline:
            raise _Limit()

    def dfs() -> bool:
        nonlocal best, best_value
        tick()
        i = s.pick(config.branch_order)
        if i is None:
            found = s.assignment()
            if objective is None:
                best = found
                return True
            value = sum(c * found[v] for c, v in objective)
            best, best_value = found, value
            # later solutions must be strictly better
            obj_rows.extend(s.add_row(objective, LE, value - 1))
            return False
        for x in s.values(i):
            mark = len(s.trail)
            s._set(i, x, x)
            rows = list(s.occurs[i]) + obj_rows
            if s.propagate(rows) and dfs():
                return True
            s.undo(mark)
        return False

    status = INFEASIBLE
    try:
        if s.propagate(range(len(s.rows))):
            if dfs():
                status = FEASIBLE
            elif best is not None:
                status = FEASIBLE
    except _Limit:
        status = LIMIT
    if best is not None:
        if check_assignment(model, best) or any(not c.satisfied(best) for c in extra):
            raise AssertionError("solver returned an assignment that violates the model")
        if status == LIMIT:
            status = FEASIBLE
    if objective is not None and best is not None:
        best_value = sum(c * best[v] for c, v in objective)
    elif model.objective and best is not None:
        best_value = sum(c * best[v] for c, v in model.objective)
    return SolveResult(status, best, best_value, nodes,
                       {"variables": len(s.names), "rows": len(s.rows)})


def stable_model_milp(p: NormalLogicProgram) -> MilpModel:
    """The one-layer translation of ``p`` with every atom derived."""
    graph = dependency_graph(p)
    model = MilpModel()
    variables, constraints = translate_axioms(p, graph, 0)
    model.extend(variables, constraints)
    return model


def enumerate_projections(model: MilpModel, names: Sequence[str],
                          config: Optional[SolverConfig] = None) -> List[FrozenSet[str]]:
    """Every distinct set of ``names`` set to 1 in some solution, found by
    repeated solving with a blocking no-good per projection."""
    found: List[FrozenSet[str]] = []
    blocks: List[LinearConstraint] = []
    while True:
        result = solve(model, config, blocks)
        if result.status == LIMIT:
            raise TimeoutError("solver limit reached while enumerating")
        if not result.found:
            return found
        true = frozenset(n for n in names if result.assignment[n])
        found.append(true)
        # some variable has to flip
        terms = tuple((-1 if n in true else 1, n) for n in names)
        blocks.append(LinearConstraint(terms, GE, 1 - len(true), "block"))


def solve_stable_models(p: NormalLogicProgram, config: Optional[SolverConfig] = None,
                        max_atoms: int = 64) -> List[FrozenSet[str]]:
    """Answer sets of ``p`` as the sat-projections of its translation."""
    if len(p.atoms) > max_atoms:
        raise TooLarge("%d atoms exceed the limit of %d" % (len(p.atoms), max_atoms))
    sat = {"sat_%s_t0" % a: a for a in p.atoms}
    found = [frozenset(sat[n] for n in m)
             for m in enumerate_projections(stable_model_milp(p), list(sat), config)]
    ids = p.atom_ids
    return sorted(found, key=lambda m: sorted(ids[a] for a in m))
