"""k-step answer-set programs for SAS+ tasks with axioms and conditional effects.

The ground program is kept as structured statements so it can be checked
internally (reduct + least model) as well as printed for an external
grounder/solver.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .errors import ForallWithAxioms, InvalidPlan, MalformedModel, NotStratified
from .logic import NormalLogicProgram, Rule, find_stratification, is_answer_set, perfect_model
from .sas import Assignment, SasTask
from .semantics import FORALL, SEQ, Plan, simulate


@dataclass(frozen=True)
class Statement:
    """A ground rule; ``head is None`` makes it an integrity constraint."""

    head: Optional[str]
    pos: Tuple[str, ...] = ()
    neg: Tuple[str, ...] = ()

    def text(self) -> str:
        body = list(self.pos) + ["not " + a for a in self.neg]
        if self.head is None:
            return ":- %s." % ", ".join(body)
        if not body:
            return "%s." % self.head
        return "%s :- %s." % (self.head, ", ".join(body))

    def violated_by(self, model) -> bool:
        return all(a in model for a in self.pos) and not any(a in model for a in self.neg)


@dataclass(frozen=True)
class Choice:
    atoms: Tuple[str, ...]
    lower: int
    upper: Optional[int]

    def text(self) -> str:
        upper = "" if self.upper is None else " %d" % self.upper
        return "%d { %s }%s." % (self.lower, "; ".join(self.atoms), upper)


@dataclass
class AspProgram:
    horizon: int
    semantics: str
    facts: List[Statement] = field(default_factory=list)
    rules: List[Statement] = field(default_factory=list)
    constraints: List[Statement] = field(default_factory=list)
    choice_rules: List[Choice] = field(default_factory=list)
    atom_index: Dict[tuple, str] = field(default_factory=dict)
    names: Dict[str, str] = field(default_factory=dict)
    template: str = ""

    @property
    def const_n(self) -> int:
        return self.horizon

    def statements(self):
        return itertools.chain(self.facts, self.rules, self.choice_rules, self.constraints)

    def to_text(self) -> str:
        lines = ["%% ground program, horizon %d, %s semantics" % (self.horizon, self.semantics)]
        lines += [s.text() for s in self.statements()]
        return "\n".join(lines) + "\n"

    def name_map_text(self) -> str:
        return "".join("%s %s\n" % (k, v) for k, v in self.names.items())

    # -- internal answer-set checking ---------------------------------------

    def normal_program(self) -> Tuple[NormalLogicProgram, List[Statement]]:
        """Normal rules plus integrity constraints, with every choice rule
        replaced by its even-loop simulation."""
        rules = [Rule(s.head, frozenset(s.pos), frozenset(s.neg)) for s in self.facts + self.rules]
        constraints = list(self.constraints)
        for choice in self.choice_rules:
            for a in choice.atoms:
                rules.append(Rule(a, neg=frozenset([_unchosen(a)])))
                rules.append(Rule(_unchosen(a), neg=frozenset([a])))
            if choice.lower >= 1:
                assert choice.lower == 1
                constraints.append(Statement(None, (), choice.atoms))
            if choice.upper is not None:
                assert choice.upper == 1
                for a, b in itertools.combinations(choice.atoms, 2):
                    constraints.append(Statement(None, (a, b)))
        return NormalLogicProgram(tuple(rules)), constraints

    def is_answer_set(self, model) -> bool:
        model = frozenset(model)
        program, constraints = self.normal_program()
        if any(c.violated_by(model) for c in constraints):
            return False
        return is_answer_set(program, model)

    def answer_sets(self) -> List[FrozenSet[str]]:
        """All answer sets.

        Choice atoms are guessed one step at a time.  Layers up to ``t`` do
        not depend on later steps, so a guess is extended only while the
        constraints confined to layers ``<= t`` hold.  Every full candidate
        is then checked with the reduct.
        """
        program, constraints = self.normal_program()
        fixed = [Rule(s.head, frozenset(s.pos), frozenset(s.neg)) for s in self.facts + self.rules]
        choice_atoms = [a for c in self.choice_rules for a in c.atoms]
        skeleton = NormalLogicProgram(tuple(fixed), tuple(choice_atoms)
                                      + tuple(_unchosen(a) for a in choice_atoms))
        strat = find_stratification(skeleton)
        if strat is None:
            raise NotStratified("program without its choice rules is not stratified")
        by_layer: Dict[int, List[Statement]] = {}
        for c in constraints:
            last = max((_layer(a) for a in c.pos + c.neg), default=0)
            by_layer.setdefault(min(last, self.horizon), []).append(c)
        options = []
        for choice in self.choice_rules:
            upper = len(choice.atoms) if choice.upper is None else choice.upper
            picks = []
            for size in range(choice.lower, upper + 1):
                picks.extend(itertools.combinations(choice.atoms, size))
            options.append(picks)

        def model_for(chosen):
            facts = tuple(Rule(a) if a in chosen else Rule(_unchosen(a)) for a in choice_atoms)
            return perfect_model(NormalLogicProgram(skeleton.rules + facts, skeleton.atoms), strat)

        found = []

        def extend(t, chosen):
            candidate = model_for(chosen)
            if any(c.violated_by(candidate) for c in by_layer.get(t, ())):
                return
            if t == len(options):
                if is_answer_set(program, candidate):
                    found.append(candidate)
                return
            for pick in options[t]:
                extend(t + 1, chosen | set(pick))

        extend(0, frozenset())
        return found


_LAYER = re.compile(r",(-?\d+)\)+$")


def _layer(atom: str) -> int:
    match = _LAYER.search(atom)
    return int(match.group(1)) if match else 0


def _unchosen(atom: str) -> str:
    return "unchosen(%s)" % atom


def _f(fluent: Assignment) -> str:
    return "f(v%d,%d)" % fluent


def holds(fluent: Assignment, t) -> str:
    return "holds(%s,%s)" % (_f(fluent), t)


def apply_atom(op_id: int, t) -> str:
    return "apply(o%d,%s)" % (op_id, t)


def effect_id(op_id: int, eff_id: int) -> str:
    return "o%d_e%d" % (op_id, eff_id)


def _conflicting_pairs(task: SasTask, include_conditions=True):
    """Operator pairs that may not share a forall step."""
    pairs = set()
    for o in task.operators:
        for o2 in task.operators:
            if o.id == o2.id:
                continue
            others = list(o2.precondition) + [e.affected for e in o2.effects]
            # an effect condition on a written variable depends on the order
            read = {c.var for e in o2.effects for c in e.condition} if include_conditions else set()
            for e in o.effects:
                x, y = e.affected
                if x in read or any(z.var == x and z.value != y for z in others):
                    pairs.add((min(o.id, o2.id), max(o.id, o2.id)))
                    break
    return sorted(pairs)


def encode_asp(task: SasTask, k: int, semantics: str = SEQ, literal_conditions: bool = False) -> AspProgram:
    """Ground k-step program.

    ``literal_conditions`` evaluates effect conditions at layer T instead of
    T-1 (the pre-state); kept only for compatibility.
    """
    if k < 0:
        raise ValueError("horizon must be non-negative")
    if semantics not in (SEQ, FORALL):
        raise ValueError("unknown semantics %r" % semantics)
    if semantics == FORALL and task.has_axioms:
        raise ForallWithAxioms()
    prog = AspProgram(k, semantics)
    steps = range(1, k + 1)
    layers = range(0, k + 1)
    derived = [v for v in task.derived_vars]
    primary = task.primary_vars

    prog.names.update(("v%d" % v.id, v.name) for v in task.variables)
    prog.names.update(("o%d" % o.id, o.name) for o in task.operators)

    idx = prog.atom_index
    for var in task.variables:
        for x in range(var.domain_size):
            for t in layers:
                idx[("holds", var.id, x, t)] = holds(Assignment(var.id, x), t)
    for o in task.operators:
        for t in steps:
            idx[("apply", o.id, t)] = apply_atom(o.id, t)
    for var in primary:
        for t in steps:
            idx[("changed", var.id, t)] = "changed(v%d,%d)" % (var.id, t)
    for o in task.operators:
        for j, e in enumerate(o.effects):
            if e.condition:
                for t in steps:
                    idx[("fired", o.id, j, t)] = "fired(%s,%d)" % (effect_id(o.id, j), t)

    fact = lambda atom: prog.facts.append(Statement(atom))
    rule = lambda head, pos=(), neg=(): prog.rules.append(Statement(head, tuple(pos), tuple(neg)))
    constraint = lambda pos=(), neg=(): prog.constraints.append(Statement(None, tuple(pos), tuple(neg)))

    for f in task.init:
        fact(holds(f, 0))
    for g in task.goal:
        fact("goal(%s)" % _f(g))
    for o in task.operators:
        fact("operators(o%d)" % o.id)
        for d in o.precondition:
            fact("demands(o%d,%s)" % (o.id, _f(d)))
        for j, e in enumerate(o.effects):
            if e.condition:
                fact("effect(%s)" % effect_id(o.id, j))
                fact("add(%s,%s)" % (effect_id(o.id, j), _f(e.affected)))
            else:
                fact("add(o%d,%s)" % (o.id, _f(e.affected)))
    for var in primary:
        for x in range(var.domain_size):
            fact("inertial(%s)" % _f(Assignment(var.id, x)))

    # operators: preconditions, effects, frame
    for t in steps:
        for o in task.operators:
            a = apply_atom(o.id, t)
            for d in o.precondition:
                constraint([a], [holds(d, t - 1)])
            for j, e in enumerate(o.effects):
                changed = idx[("changed", e.affected.var, t)]
                if e.condition:
                    fired = idx[("fired", o.id, j, t)]
                    when = t if literal_conditions else t - 1
                    rule(fired, [a] + [holds(c, when) for c in e.condition])
                    rule(holds(e.affected, t), [fired])
                    rule(changed, [fired])
                else:
                    rule(holds(e.affected, t), [a])
                    rule(changed, [a])
        for var in primary:
            for x in range(var.domain_size):
                f = Assignment(var.id, x)
                rule(holds(f, t), [holds(f, t - 1)], [idx[("changed", var.id, t)]])

    # axioms, stamped on every layer so the initial state is closed too
    for t in layers:
        for ax in task.axioms:
            rule(holds(ax.head, t), [holds(b, t) for b in ax.pos_body], [holds(c, t) for c in ax.neg_body])
        for var in derived:
            on, off = Assignment(var.id, 1), Assignment(var.id, 0)
            rule(holds(off, t), [], [holds(on, t)])
            constraint([], [holds(off, t), holds(on, t)])

    # step semantics
    for t in steps:
        atoms = tuple(apply_atom(o.id, t) for o in task.operators)
        prog.choice_rules.append(Choice(atoms, 1, 1 if semantics == SEQ else None))
        if semantics == FORALL:
            for o, o2 in _conflicting_pairs(task):
                constraint([apply_atom(o, t), apply_atom(o2, t)])

    # mutexes: values of one variable, then the task's mutex groups
    for t in layers:
        for var in task.variables:
            for y, z in itertools.combinations(range(var.domain_size), 2):
                constraint([holds(Assignment(var.id, y), t), holds(Assignment(var.id, z), t)])
        for group in task.mutex_groups:
            for f, g in itertools.combinations(group.fluents, 2):
                if f.var != g.var:
                    constraint([holds(f, t), holds(g, t)])

    for g in task.goal:
        constraint([], [holds(g, k)])

    prog.template = templated_text(task, k, semantics, literal_conditions)
    return prog


def templated_text(task: SasTask, k: int, semantics: str = SEQ, literal_conditions: bool = False) -> str:
    """First-order form for an external grounder such as gringo."""
    out = []
    w = out.append
    w("#const n=%d." % k)
    w("step(1..n).")
    w("layer(0..n).")
    for f in task.init:
        w("holds(%s,0)." % _f(f))
    for g in task.goal:
        w("goal(%s)." % _f(g))
    conditional = task.has_conditional_effects
    for o in task.operators:
        w("operators(o%d)." % o.id)
        for d in o.precondition:
            w("demands(o%d,%s)." % (o.id, _f(d)))
        for j, e in enumerate(o.effects):
            if e.condition:
                w("effect(%s)." % effect_id(o.id, j))
                w("effectof(%s,o%d)." % (effect_id(o.id, j), o.id))
                w("add(%s,%s)." % (effect_id(o.id, j), _f(e.affected)))
                for c in e.condition:
                    w("condition(o%d,%s)." % (o.id, _f(c)))
            else:
                w("add(o%d,%s)." % (o.id, _f(e.affected)))
    for var in task.primary_vars:
        for x in range(var.domain_size):
            w("inertial(%s)." % _f(Assignment(var.id, x)))
    w(":- goal(F), not holds(F,n).")
    w(":- apply(O,T), demands(O,F), not holds(F,T-1), step(T).")
    w("holds(F,T) :- apply(O,T), add(O,F), step(T).")
    w("changed(X,T) :- apply(O,T), add(O,f(X,Y)), step(T).")
    w("holds(f(X,Y),T) :- holds(f(X,Y),T-1), step(T), inertial(f(X,Y)), not changed(X,T).")
    if conditional:
        when = "T" if literal_conditions else "T-1"
        for o in task.operators:
            for j, e in enumerate(o.effects):
                if e.condition:
                    conds = ", ".join("holds(%s,%s)" % (_f(c), when) for c in e.condition)
                    w("fired(%s,T) :- apply(o%d,T), %s, step(T)." % (effect_id(o.id, j), o.id, conds))
        w("holds(F,T) :- fired(E,T), add(E,F), effect(E), step(T).")
        w("changed(X,T) :- fired(E,T), add(E,f(X,Y)), effect(E), step(T).")
    if semantics == SEQ:
        w("1 { apply(O,T) : operators(O) } 1 :- step(T).")
    else:
        w("1 { apply(O,T) : operators(O) } :- step(T).")
        adds = "add"
        if conditional:
            adds = "adds"
            w("adds(O,F) :- add(O,F), operators(O).")
            w("adds(O,F) :- effectof(E,O), add(E,F).")
            w(":- apply(O,T), apply(P,T), adds(O,f(X,Y)), condition(P,f(X,Z)), step(T), O != P.")
        w(":- apply(O,T), apply(P,T), %s(O,f(X,Y)), demands(P,f(X,Z)), step(T), O != P, Y != Z." % adds)
        w(":- apply(O,T), apply(P,T), %s(O,f(X,Y)), %s(P,f(X,Z)), step(T), O != P, Y != Z." % (adds, adds))
    w(":- holds(f(X,Y),T), holds(f(X,Z),T), Y != Z, layer(T).")
    for group in task.mutex_groups:
        for f, g in itertools.combinations(group.fluents, 2):
            if f.var != g.var:
                w(":- holds(%s,T), holds(%s,T), layer(T)." % (_f(f), _f(g)))
    for ax in task.axioms:
        body = ["holds(%s,T)" % _f(b) for b in ax.pos_body]
        body += ["not holds(%s,T)" % _f(c) for c in ax.neg_body]
        body.append("layer(T)")
        w("holds(%s,T) :- %s." % (_f(ax.head), ", ".join(body)))
    for var in task.derived_vars:
        w("holds(f(v%d,0),T) :- not holds(f(v%d,1),T), layer(T)." % (var.id, var.id))
        w(":- not holds(f(v%d,0),T), not holds(f(v%d,1),T), layer(T)." % (var.id, var.id))
    w("#show apply/2.")
    return "\n".join(out) + "\n"


_APPLY = re.compile(r"^apply\(o(\d+),(-?\d+)\)$")


def decode_plan(program: AspProgram, model: Iterable[str]) -> Plan:
    steps: Dict[int, List[int]] = {}
    for atom in model:
        match = _APPLY.match(atom)
        if not match:
            continue
        o, t = int(match.group(1)), int(match.group(2))
        if not 1 <= t <= program.horizon:
            raise MalformedModel("%s lies outside steps 1..%d" % (atom, program.horizon))
        steps.setdefault(t, []).append(o)
    return Plan(tuple(tuple(steps[t]) for t in sorted(steps)))


def plan_to_model(task: SasTask, k: int, semantics: str, plan: Plan,
                  program: Optional[AspProgram] = None) -> FrozenSet[str]:
    """The intended answer set of the k-step program for ``plan``."""
    if plan.makespan != k:
        raise InvalidPlan("plan makespan %d differs from horizon %d" % (plan.makespan, k))
    states = simulate(task, plan, semantics)
    if program is None:
        program = encode_asp(task, k, semantics)
    model = {s.head for s in program.facts}
    for t, s in enumerate(states):
        for var in task.variables:
            model.add(holds(Assignment(var.id, s.values[var.id]), t))
    for t, step in enumerate(plan.steps, 1):
        before = states[t - 1]
        for o in task.operators:
            a = apply_atom(o.id, t)
            model.add(a if o.id in step else _unchosen(a))
        for o_id in step:
            op = task.operators[o_id]
            for j, e in enumerate(op.effects):
                if e.condition:
                    if not before.satisfies(e.condition):
                        continue
                    model.add("fired(%s,%d)" % (effect_id(o_id, j), t))
                model.add("changed(v%d,%d)" % (e.affected.var, t))
    return frozenset(model)
