"""Transition semantics with axioms, plan validation and a BFS oracle."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import (ConflictingEffects, ForallWithAxioms, GoalUnsatisfied, InvalidPlan,
                     NotApplicable, StateSpaceTooLarge, StepConflict)
from .logic import perfect_model
from .sas import Assignment, Operator, SasTask, task_to_nlp

SEQ = "seq"
FORALL = "forall"

STATE_CAP = 10 ** 6


@dataclass(frozen=True)
class ExtendedState:
    """Values of all variables, indexed by variable id.

    Derived variables hold 0/1 and are always the axiom closure of the
    primary part.
    """

    values: Tuple[int, ...]

    def holds(self, fluent: Assignment) -> bool:
        return self.values[fluent.var] == fluent.value

    def satisfies(self, fluents: Iterable[Assignment]) -> bool:
        return all(self.values[f.var] == f.value for f in fluents)

    def primary(self, task: SasTask) -> Dict[int, int]:
        return {v.id: self.values[v.id] for v in task.primary_vars}

    def derived(self, task: SasTask) -> Dict[int, bool]:
        return {v.id: bool(self.values[v.id]) for v in task.derived_vars}


@dataclass(frozen=True)
class Plan:
    """Steps of operator ids; seq plans have one operator per step."""

    steps: Tuple[Tuple[int, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(tuple(sorted(s)) for s in self.steps))
        if any(not s for s in self.steps):
            raise InvalidPlan("plans have no empty steps")

    @classmethod
    def sequential(cls, op_ids: Sequence[int]) -> "Plan":
        return cls(tuple((o,) for o in op_ids))

    @property
    def makespan(self) -> int:
        return len(self.steps)

    @property
    def length(self) -> int:
        return sum(len(s) for s in self.steps)

    def is_sequential(self) -> bool:
        return all(len(s) == 1 for s in self.steps)

    def operators(self) -> List[int]:
        return [o for step in self.steps for o in step]

    def cost(self, task: SasTask) -> int:
        return sum(task.operators[o].cost for o in self.operators())


@dataclass(frozen=True)
class PlanReport:
    makespan: int
    cost: int
    length: int


def evaluate_axioms(task: SasTask, primary: Dict[int, int]) -> ExtendedState:
    values = [0] * len(task.variables)
    for var in task.primary_vars:
        values[var.id] = primary[var.id]
    if task.axioms:
        model = perfect_model(task_to_nlp(task, primary), task.axiom_stratification)
        for var in task.derived_vars:
            values[var.id] = 1 if var.name in model else 0
    return ExtendedState(tuple(values))


def initial_state(task: SasTask) -> ExtendedState:
    return evaluate_axioms(task, task.init_values)


def fired_effects(task: SasTask, s: ExtendedState, op: Operator):
    return [e for e in op.effects if s.satisfies(e.condition)]


def apply_operator(task: SasTask, s: ExtendedState, op: Operator) -> ExtendedState:
    if not s.satisfies(op.precondition):
        raise NotApplicable(op.name)
    new = dict(s.primary(task))
    assigned = {}
    for eff in fired_effects(task, s, op):
        var, value = eff.affected
        if assigned.setdefault(var, value) != value:
            raise ConflictingEffects("operator %s assigns %s twice"
                                     % (op.name, task.variables[var].name))
        new[var] = value
    return evaluate_axioms(task, new)


def goal_holds(task: SasTask, s: ExtendedState) -> bool:
    return s.satisfies(task.goal)


def _may_add(op: Operator) -> List[Assignment]:
    return [e.affected for e in op.effects]


def check_step(task: SasTask, step_no: int, ops: Sequence[Operator]):
    """Pairwise conflicts of one parallel step: no op may add a fluent whose
    variable another op demands or adds with a different value, or reads in
    an effect condition at all."""
    for o in ops:
        for o2 in ops:
            if o is o2:
                continue
            for add in _may_add(o):
                clash = [d for d in o2.precondition if d.var == add.var and d.value != add.value]
                clash += [c for e in o2.effects for c in e.condition if c.var == add.var]
                clash += [a for a in _may_add(o2) if a.var == add.var and a.value != add.value]
                if clash:
                    first, second = sorted([o, o2], key=lambda x: x.id)
                    raise StepConflict(step_no, first.name, second.name)


def simulate(task: SasTask, plan: Plan, semantics: str = SEQ) -> List[ExtendedState]:
    """States before the first and after every step; raises on any error
    except an unsatisfied goal."""
    if semantics == FORALL:
        if task.has_axioms:
            raise ForallWithAxioms()
    elif semantics == SEQ:
        if not plan.is_sequential():
            raise InvalidPlan("seq plans have exactly one operator per step")
    else:
        raise ValueError("unknown semantics %r" % semantics)
    states = [initial_state(task)]
    for step_no, step in enumerate(plan.steps, 1):
        for o in step:
            if not 0 <= o < len(task.operators):
                raise InvalidPlan("unknown operator id %d" % o)
        ops = [task.operators[o] for o in step]
        check_step(task, step_no, ops)
        s = states[-1]
        for op in ops:
            try:
                s = apply_operator(task, s, op)
            except NotApplicable:
                raise NotApplicable(op.name, step_no) from None
        states.append(s)
    return states


def validate_plan(task: SasTask, plan: Plan, semantics: str = SEQ) -> PlanReport:
    states = simulate(task, plan, semantics)
    if not goal_holds(task, states[-1]):
        raise GoalUnsatisfied("goal does not hold after %d steps" % plan.makespan)
    return PlanReport(plan.makespan, plan.cost(task), plan.length)


def successors(task: SasTask, s: ExtendedState):
    for op in task.operators:
        if s.satisfies(op.precondition):
            yield op, apply_operator(task, s, op)


def oracle_plan(task: SasTask, max_makespan: int, semantics: str = SEQ,
                state_cap: int = STATE_CAP) -> Optional[Plan]:
    """Minimal-makespan sequential plan by breadth-first search, or None."""
    if semantics != SEQ:
        raise ValueError("the oracle searches sequential plans only")
    start = initial_state(task)
    if goal_holds(task, start):
        return Plan()
    parent = {start: None}
    frontier = deque([(start, 0)])
    while frontier:
        s, depth = frontier.popleft()
        if depth >= max_makespan:
            continue
        for op, t in successors(task, s):
            if t in parent:
                continue
            parent[t] = (s, op.id)
            if len(parent) > state_cap:
                raise StateSpaceTooLarge("more than %d states" % state_cap)
            if goal_holds(task, t):
                ops = []
                node = t
                while parent[node] is not None:
                    node, o = parent[node]
                    ops.append(o)
                return Plan.sequential(ops[::-1])
            frontier.append((t, depth + 1))
    return None


def reachable_states(task: SasTask, state_cap: int = STATE_CAP) -> List[ExtendedState]:
    start = initial_state(task)
    seen = {start: None}
    order = [start]
    i = 0
    while i < len(order):
        for _, t in successors(task, order[i]):
            if t not in seen:
                seen[t] = None
                order.append(t)
                if len(order) > state_cap:
                    raise StateSpaceTooLarge("more than %d states" % state_cap)
        i += 1
    return order


# ---------------------------------------------------------------------------
# Plan text format

def format_plan(task: SasTask, plan: Plan) -> str:
    lines = []
    for step in plan.steps:
        names = []
        for o in step:
            name = task.operators[o].name
            names.append("(%s)" % name if " " in name else name)
        lines.append(" ".join(names))
    return "".join(line + "\n" for line in lines)


_PAREN = re.compile(r"\(([^()]*)\)")


def parse_plan(task: SasTask, text: str) -> Plan:
    """Read a plan: one step per line, operator names separated by spaces
    (names containing spaces are parenthesised); ``;`` starts a comment."""
    ids = {}
    for op in task.operators:
        ids.setdefault(op.name, op.id)
    steps = []
    for raw in text.splitlines():
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        if "(" in line:
            names = [n.strip() for n in _PAREN.findall(line)]
        else:
            names = line.split()
        step = []
        for name in names:
            if name not in ids:
                raise InvalidPlan("unknown operator %r" % name)
            step.append(ids[name])
        steps.append(tuple(step))
    return Plan(tuple(steps))
