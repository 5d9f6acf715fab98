"""SAS+ tasks with axioms, and the translator's ``.sas`` text format (version 3)."""

from __future__ import annotations

import io
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, NamedTuple, Optional, Tuple

from .errors import SasSyntaxError, StratificationError, UnsupportedFeature
from .logic import NormalLogicProgram, Rule, Stratification, find_stratification

SAS_FILE_VERSION = 3

PRIMARY = "primary"
SECONDARY = "secondary"


class Assignment(NamedTuple):
    var: int
    value: int


@dataclass(frozen=True)
class SasVariable:
    id: int
    name: str
    kind: str
    domain_size: int
    value_names: Tuple[str, ...]
    axiom_layer: int = -1

    @property
    def is_derived(self) -> bool:
        return self.kind == SECONDARY


@dataclass(frozen=True)
class Effect:
    condition: Tuple[Assignment, ...]
    affected: Assignment


@dataclass(frozen=True)
class Operator:
    id: int
    name: str
    precondition: Tuple[Assignment, ...]
    effects: Tuple[Effect, ...]
    cost: int = 1

    @property
    def has_conditional_effects(self) -> bool:
        return any(e.condition for e in self.effects)


@dataclass(frozen=True)
class Axiom:
    """``head <- pos_body, not neg_body``.

    ``neg_body`` lists derived atoms as ``(u, 1)``; in the file they are
    conditions ``u = 0``.
    """

    head: Assignment
    pos_body: Tuple[Assignment, ...]
    neg_body: Tuple[Assignment, ...] = ()


@dataclass(frozen=True)
class MutexGroup:
    fluents: Tuple[Assignment, ...]


@dataclass(frozen=True)
class SasTask:
    variables: Tuple[SasVariable, ...]
    axioms: Tuple[Axiom, ...]
    operators: Tuple[Operator, ...]
    mutex_groups: Tuple[MutexGroup, ...]
    init: Tuple[Assignment, ...]
    goal: Tuple[Assignment, ...]
    metric: bool = False

    @property
    def primary_vars(self) -> List[SasVariable]:
        return [v for v in self.variables if not v.is_derived]

    @property
    def derived_vars(self) -> List[SasVariable]:
        return [v for v in self.variables if v.is_derived]

    @property
    def has_axioms(self) -> bool:
        return bool(self.axioms)

    @property
    def has_conditional_effects(self) -> bool:
        return any(o.has_conditional_effects for o in self.operators)

    @property
    def init_values(self) -> Dict[int, int]:
        return {a.var: a.value for a in self.init}

    def operator_by_name(self, name: str) -> Operator:
        for op in self.operators:
            if op.name == name:
                return op
        raise KeyError(name)

    def atom(self, fluent: Assignment) -> str:
        """Atom label of a fluent in the per-state axiom program."""
        var = self.variables[fluent.var]
        if var.is_derived:
            return var.name
        return "%s_%d" % (var.name, fluent.value)

    def fluent_name(self, fluent: Assignment) -> str:
        var = self.variables[fluent.var]
        return "%s=%s" % (var.name, var.value_names[fluent.value])

    @cached_property
    def axiom_program(self) -> NormalLogicProgram:
        """The axioms alone, as a program over fluent atoms."""
        rules = []
        for i, ax in enumerate(self.axioms):
            rules.append(Rule(self.atom(ax.head),
                              frozenset(self.atom(b) for b in ax.pos_body),
                              frozenset(self.atom(c) for c in ax.neg_body),
                              "r%d" % i))
        return NormalLogicProgram(tuple(rules), tuple(v.name for v in self.derived_vars))

    @cached_property
    def axiom_stratification(self) -> Optional[Stratification]:
        return find_stratification(self.axiom_program)

    def validate(self):
        """Check the structural invariants; raise on the first violation."""
        for i, var in enumerate(self.variables):
            assert var.id == i, "variable ids must be dense"
            assert var.domain_size >= 2
            assert len(var.value_names) == var.domain_size
            if var.is_derived:
                assert var.domain_size == 2
        primary = {v.id for v in self.primary_vars}
        assert sorted(a.var for a in self.init) == sorted(primary), "init must be total over primary variables"
        for fluent in self.init:
            self._check_fluent(fluent)
        assert len({a.var for a in self.goal}) == len(self.goal)
        for fluent in self.goal:
            self._check_fluent(fluent)
        for op in self.operators:
            assert len({a.var for a in op.precondition}) == len(op.precondition)
            for fluent in op.precondition:
                self._check_fluent(fluent)
            seen = {}
            for eff in op.effects:
                assert not self.variables[eff.affected.var].is_derived, \
                    "operator %s affects a derived variable" % op.name
                self._check_fluent(eff.affected)
                key = (eff.condition, eff.affected.var)
                assert seen.setdefault(key, eff.affected.value) == eff.affected.value
            assert op.cost >= 0
        for ax in self.axioms:
            assert self.variables[ax.head.var].is_derived and ax.head.value == 1
            for c in ax.neg_body:
                assert self.variables[c.var].is_derived
        for group in self.mutex_groups:
            assert len(group.fluents) >= 2 and len(set(group.fluents)) == len(group.fluents)
            for f in group.fluents:
                assert not self.variables[f.var].is_derived

    def _check_fluent(self, fluent: Assignment):
        assert 0 <= fluent.var < len(self.variables), fluent
        assert 0 <= fluent.value < self.variables[fluent.var].domain_size, fluent


def task_to_nlp(task: SasTask, state: Dict[int, int]) -> NormalLogicProgram:
    """Per-state axiom program: the axioms plus, as facts, the primary
    fluents that hold in ``state`` and occur in some axiom body."""
    body_fluents = set()
    for ax in task.axioms:
        for b in ax.pos_body:
            if not task.variables[b.var].is_derived:
                body_fluents.add(b)
    facts = [Rule(task.atom(f)) for f in sorted(body_fluents) if state[f.var] == f.value]
    return NormalLogicProgram(task.axiom_program.rules + tuple(facts), task.axiom_program.atoms)


# ---------------------------------------------------------------------------
# Parsing

class _Lines:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0
        self.section = None

    def next(self) -> str:
        while self.pos < len(self.lines):
            line = self.lines[self.pos].strip()
            self.pos += 1
            if line:
                return line
        raise self.error("unexpected end of file")

    def error(self, message):
        return SasSyntaxError(message, line=self.pos, section=self.section)

    def expect(self, word: str):
        line = self.next()
        if line != word:
            raise self.error("expected %r, got %r" % (word, line))

    def ints(self, count: Optional[int] = None) -> List[int]:
        line = self.next()
        try:
            values = [int(x) for x in line.split()]
        except ValueError:
            raise self.error("expected integers, got %r" % line) from None
        if count is not None and len(values) != count:
            raise self.error("expected %d integers, got %r" % (count, line))
        return values

    def int(self) -> int:
        return self.ints(1)[0]

    def at_end(self) -> bool:
        return all(not line.strip() for line in self.lines[self.pos:])


def parse_sas(text) -> SasTask:
    """Parse a ``.sas`` task.  ``text`` may be a string or a text stream."""
    if not isinstance(text, str):
        text = text.read()
    lines = _Lines(text)

    lines.section = "version"
    lines.expect("begin_version")
    version = lines.int()
    if version != SAS_FILE_VERSION:
        raise UnsupportedFeature("unsupported .sas version %d" % version)
    lines.expect("end_version")

    lines.section = "metric"
    lines.expect("begin_metric")
    metric = lines.int()
    if metric not in (0, 1):
        raise lines.error("metric flag must be 0 or 1")
    lines.expect("end_metric")

    lines.section = "variables"
    raw_vars = []
    for _ in range(lines.int()):
        lines.expect("begin_variable")
        name = lines.next()
        layer = lines.int()
        size = lines.int()
        names = tuple(lines.next() for _ in range(size))
        lines.expect("end_variable")
        if size < 2:
            raise lines.error("variable %s has domain size %d" % (name, size))
        if layer >= 0 and size != 2:
            raise UnsupportedFeature("derived variable %s is not binary" % name)
        if layer < -1:
            raise lines.error("bad axiom layer %d" % layer)
        raw_vars.append((name, layer, size, names))
    variables = tuple(
        SasVariable(i, name, SECONDARY if layer >= 0 else PRIMARY, size, names, layer)
        for i, (name, layer, size, names) in enumerate(raw_vars))

    def fluent(var, value):
        if not 0 <= var < len(variables):
            raise lines.error("unknown variable %d" % var)
        if not 0 <= value < variables[var].domain_size:
            raise lines.error("value %d out of range for variable %s" % (value, variables[var].name))
        return Assignment(var, value)

    lines.section = "mutex_group"
    groups = []
    for _ in range(lines.int()):
        lines.expect("begin_mutex_group")
        facts = tuple(fluent(*lines.ints(2)) for _ in range(lines.int()))
        lines.expect("end_mutex_group")
        groups.append(MutexGroup(facts))

    lines.section = "state"
    lines.expect("begin_state")
    init = []
    for var in variables:
        value = fluent(var.id, lines.int()).value
        if var.is_derived:
            if value != 0:
                raise UnsupportedFeature("derived variable %s has default value %d" % (var.name, value))
        else:
            init.append(Assignment(var.id, value))
    lines.expect("end_state")

    lines.section = "goal"
    lines.expect("begin_goal")
    goal = tuple(fluent(*lines.ints(2)) for _ in range(lines.int()))
    lines.expect("end_goal")
    if len({g.var for g in goal}) != len(goal):
        raise lines.error("goal assigns a variable twice")

    lines.section = "operator"
    operators = []
    for op_id in range(lines.int()):
        lines.expect("begin_operator")
        name = lines.next()
        pre = {}
        for _ in range(lines.int()):
            f = fluent(*lines.ints(2))
            pre[f.var] = f.value
        effects = []
        for _ in range(lines.int()):
            nums = lines.ints()
            if not nums or len(nums) != 2 * nums[0] + 4:
                raise lines.error("malformed effect line")
            ncond = nums[0]
            cond = tuple(fluent(nums[1 + 2 * i], nums[2 + 2 * i]) for i in range(ncond))
            var, old, new = nums[-3:]
            affected = fluent(var, new)
            if variables[var].is_derived:
                raise lines.error("operator %s affects derived variable %s" % (name, variables[var].name))
            if old != -1:
                fluent(var, old)
                if pre.get(var, old) != old:
                    raise lines.error("operator %s has two preconditions on %s" % (name, variables[var].name))
                pre[var] = old
            effects.append(Effect(cond, affected))
        cost = lines.int()
        lines.expect("end_operator")
        operators.append(Operator(op_id, name,
                                  tuple(Assignment(v, x) for v, x in sorted(pre.items())),
                                  tuple(effects), cost if metric else 1))

    lines.section = "rule"
    axioms = []
    for _ in range(lines.int()):
        lines.expect("begin_rule")
        body = [fluent(*lines.ints(2)) for _ in range(lines.int())]
        var, old, new = lines.ints(3)
        fluent(var, new)
        head_var = variables[var]
        if not head_var.is_derived:
            raise StratificationError("axiom head %s has no axiom layer" % head_var.name)
        if old != 0 or new != 1:
            raise UnsupportedFeature("axiom for %s must derive 0 -> 1" % head_var.name)
        lines.expect("end_rule")
        pos = tuple(b for b in body if not (variables[b.var].is_derived and b.value == 0))
        neg = tuple(Assignment(b.var, 1) for b in body if variables[b.var].is_derived and b.value == 0)
        axioms.append(Axiom(Assignment(var, 1), pos, neg))

    if not lines.at_end():
        lines.section = None
        raise lines.error("trailing content after axiom rules")

    task = SasTask(variables, tuple(axioms), tuple(operators), tuple(groups),
                   tuple(init), goal, bool(metric))
    if task.axiom_stratification is None:
        raise StratificationError("axioms are not stratified")
    return task


def read_sas(path) -> SasTask:
    with open(path, encoding="utf-8") as f:
        return parse_sas(f.read())


# ---------------------------------------------------------------------------
# Writing

def serialize_sas(task: SasTask) -> str:
    out = io.StringIO()
    w = lambda *items: print(*items, file=out)
    w("begin_version")
    w(SAS_FILE_VERSION)
    w("end_version")
    w("begin_metric")
    w(int(task.metric))
    w("end_metric")
    w(len(task.variables))
    for var in task.variables:
        w("begin_variable")
        w(var.name)
        w(var.axiom_layer if var.is_derived else -1)
        w(var.domain_size)
        for name in var.value_names:
            w(name)
        w("end_variable")
    w(len(task.mutex_groups))
    for group in task.mutex_groups:
        w("begin_mutex_group")
        w(len(group.fluents))
        for f in group.fluents:
            w(f.var, f.value)
        w("end_mutex_group")
    w("begin_state")
    init = task.init_values
    for var in task.variables:
        w(0 if var.is_derived else init[var.id])
    w("end_state")
    w("begin_goal")
    w(len(task.goal))
    for g in task.goal:
        w(g.var, g.value)
    w("end_goal")
    w(len(task.operators))
    for op in task.operators:
        pre = dict(op.precondition)
        affected = {e.affected.var for e in op.effects}
        prevail = [(v, x) for v, x in sorted(pre.items()) if v not in affected]
        w("begin_operator")
        w(op.name)
        w(len(prevail))
        for v, x in prevail:
            w(v, x)
        w(len(op.effects))
        for e in op.effects:
            cond = " ".join("%d %d" % (c.var, c.value) for c in e.condition)
            parts = [str(len(e.condition))] + ([cond] if cond else [])
            parts += [str(e.affected.var), str(pre.get(e.affected.var, -1)), str(e.affected.value)]
            w(" ".join(parts))
        w(op.cost)
        w("end_operator")
    w(len(task.axioms))
    for ax in task.axioms:
        body = list(ax.pos_body) + [Assignment(c.var, 0) for c in ax.neg_body]
        w("begin_rule")
        w(len(body))
        for b in body:
            w(b.var, b.value)
        w(ax.head.var, 0, 1)
        w("end_rule")
    return out.getvalue()
