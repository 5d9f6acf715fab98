"""State-change integer programs for SAS+ tasks, with axioms translated
through level rankings."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import (ConditionalEffectsUnsupported, ForallWithAxioms, InvalidPlan,
                     MalformedAssignment)
from .logic import (DependencyGraph, NormalLogicProgram, Rule, classify_rules, dependency_graph,
                    perfect_model_rounds)
from .sas import Assignment, SasTask
from .semantics import FORALL, SEQ, Plan, simulate

BINARY = "binary"
INTEGER = "integer"

LE, GE, EQ = "<=", ">=", "="


@dataclass(frozen=True)
class MilpVariable:
    name: str
    kind: str = BINARY
    lower: int = 0
    upper: int = 1
    # branch on 1 before 0
    prefer_high: bool = False

    def __post_init__(self):
        if self.kind == BINARY and (self.lower, self.upper) != (0, 1):
            raise ValueError("binary variable %s must have bounds [0, 1]" % self.name)
        if self.lower > self.upper:
            raise ValueError("empty bounds for %s" % self.name)


@dataclass(frozen=True)
class LinearConstraint:
    terms: Tuple[Tuple[int, str], ...]
    sense: str
    rhs: int
    tag: str

    def __post_init__(self):
        names = [v for _, v in self.terms]
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable in %s constraint" % self.tag)
        if self.sense not in (LE, GE, EQ):
            raise ValueError("bad sense %r" % self.sense)

    def activity(self, values: Mapping[str, int]) -> int:
        return sum(c * values[v] for c, v in self.terms)

    def satisfied(self, values: Mapping[str, int]) -> bool:
        lhs = self.activity(values)
        if self.sense == LE:
            return lhs <= self.rhs
        if self.sense == GE:
            return lhs >= self.rhs
        return lhs == self.rhs

    def text(self) -> str:
        return "%s %s %d" % (format_terms(self.terms), self.sense, self.rhs)


def format_terms(terms) -> str:
    parts = []
    for coef, var in terms:
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = var if mag == 1 else "%d %s" % (mag, var)
        if not parts:
            parts.append(body if sign == "+" else "- " + body)
        else:
            parts.append("%s %s" % (sign, body))
    return " ".join(parts) if parts else "0"


@dataclass
class MilpModel:
    variables: Dict[str, MilpVariable] = field(default_factory=dict)
    constraints: List[LinearConstraint] = field(default_factory=list)
    objective: Optional[List[Tuple[int, str]]] = None
    horizon: int = 0
    info: dict = field(default_factory=dict)

    def add_var(self, name, kind=BINARY, lower=0, upper=1, prefer_high=False) -> str:
        if name in self.variables:
            raise ValueError("variable %s declared twice" % name)
        self.variables[name] = MilpVariable(name, kind, lower, upper, prefer_high)
        return name

    def add(self, terms, sense, rhs, tag) -> Optional[LinearConstraint]:
        terms = tuple((c, v) for c, v in terms if c != 0)
        for _, v in terms:
            if v not in self.variables:
                raise KeyError("constraint %s references undeclared %s" % (tag, v))
        if not terms:
            # constant constraint: keep the model honest either way
            if not LinearConstraint((), sense, rhs, tag).satisfied({}):
                raise ValueError("constant %s constraint is violated" % tag)
            return None
        con = LinearConstraint(terms, sense, rhs, tag)
        self.constraints.append(con)
        return con

    def extend(self, variables: Sequence[MilpVariable], constraints: Sequence[LinearConstraint]):
        for v in variables:
            if v.name in self.variables:
                raise ValueError("variable %s declared twice" % v.name)
            self.variables[v.name] = v
        for c in constraints:
            for _, name in c.terms:
                if name not in self.variables:
                    raise KeyError("constraint %s references undeclared %s" % (c.tag, name))
            self.constraints.append(c)

    def tags(self):
        return sorted({c.tag for c in self.constraints})


def check_assignment(model: MilpModel, values: Mapping[str, int]) -> List[LinearConstraint]:
    """Violated constraints (plus a ValueError for bad domains)."""
    for name, var in model.variables.items():
        if name not in values:
            raise ValueError("no value for %s" % name)
        x = values[name]
        if x != int(x) or not var.lower <= x <= var.upper:
            raise ValueError("%s = %r outside [%d, %d]" % (name, x, var.lower, var.upper))
    return [c for c in model.constraints if not c.satisfied(values)]


# ---------------------------------------------------------------------------
# Fluent index

@dataclass(frozen=True)
class FluentIndex:
    fluents: Tuple[Assignment, ...]
    ids: Mapping[Assignment, int]
    pre: Mapping[int, Tuple[int, ...]]
    add: Mapping[int, Tuple[int, ...]]
    delete: Mapping[int, Tuple[int, ...]]

    def classes(self, f: int):
        """Operator ids split as (add\\pre, del\\pre, pre\\del, pre&del)."""
        pre, add, dele = set(self.pre[f]), set(self.add[f]), set(self.delete[f])
        return (sorted(add - pre), sorted(dele - pre), sorted(pre - dele), sorted(pre & dele))


def build_fluent_index(task: SasTask) -> FluentIndex:
    if task.has_conditional_effects:
        raise ConditionalEffectsUnsupported("the IP encoding does not support conditional effects")
    fluents = tuple(Assignment(v.id, x) for v in task.primary_vars for x in range(v.domain_size))
    ids = {f: i for i, f in enumerate(fluents)}
    pre = {i: [] for i in ids.values()}
    add = {i: [] for i in ids.values()}
    dele = {i: [] for i in ids.values()}
    for op in task.operators:
        demanded = dict(op.precondition)
        for d in op.precondition:
            if d in ids:
                pre[ids[d]].append(op.id)
        for e in op.effects:
            v, y = e.affected
            add[ids[e.affected]].append(op.id)
            if v in demanded:
                if demanded[v] != y:
                    dele[ids[Assignment(v, demanded[v])]].append(op.id)
            else:
                for z in range(task.variables[v].domain_size):
                    if z != y:
                        dele[ids[Assignment(v, z)]].append(op.id)
    freeze = lambda d: {k: tuple(sorted(set(v))) for k, v in d.items()}
    return FluentIndex(fluents, ids, freeze(pre), freeze(add), freeze(dele))


# ---------------------------------------------------------------------------
# Axiom translation

def default_rule_key(nlp: NormalLogicProgram) -> Callable[[int], str]:
    """Rules named ``r<k>`` keep k; others use their position."""
    def key(i):
        name = nlp.rules[i].name or ""
        return name[1:] if re.fullmatch(r"r\d+", name) else str(i)
    return key


def translate_axioms(nlp: NormalLogicProgram, graph: DependencyGraph, t: int,
                     derived: Optional[Sequence[str]] = None,
                     sat: Optional[Callable[[str], str]] = None,
                     atom_key: Optional[Callable[[str], str]] = None,
                     rule_key: Optional[Callable[[int], str]] = None):
    """Linear constraints whose solutions, projected on the sat variables of
    ``derived``, are the answer sets of ``nlp`` given the other atoms.

    Returns ``(variables, constraints)``; sat variables of non-derived atoms
    are expected to exist already.
    """
    if derived is None:
        derived = list(nlp.atoms)
    if sat is None:
        sat = lambda a: "sat_%s_t%d" % (a, t)
    if atom_key is None:
        atom_key = lambda a: a
    if rule_key is None:
        rule_key = default_rule_key(nlp)
    bd = lambda i: "bd_r%s_t%d" % (rule_key(i), t)
    sr = lambda i: "s_r%s_t%d" % (rule_key(i), t)
    gt = lambda u, b: "gt_u%s_b%s_t%d" % (atom_key(u), atom_key(b), t)
    z = lambda a: "z_u%s_t%d" % (atom_key(a), t)

    variables: List[MilpVariable] = []
    constraints: List[LinearConstraint] = []
    declared = set()

    def var(name, kind=BINARY, lower=0, upper=1, prefer_high=False):
        if name not in declared:
            declared.add(name)
            variables.append(MilpVariable(name, kind, lower, upper, prefer_high))
        return name

    def add(terms, sense, rhs, tag):
        terms = tuple((c, v) for c, v in terms if c != 0)
        if terms:
            constraints.append(LinearConstraint(terms, sense, rhs, tag))

    derived_set = set(derived)
    classes = {u: classify_rules(nlp, graph, u) for u in derived}
    for u in derived:
        var(sat(u), prefer_high=True)
    for i, rule in enumerate(nlp.rules):
        if rule.head in derived_set:
            var(bd(i))
    for u in derived:
        cls = classes[u]
        scc = graph.scc(u)
        for i in cls.internal:
            var(sr(i))
            for b in sorted(cls.support[i]):
                var(gt(u, b))
        if cls.internal:
            for a in sorted(scc):
                var(z(a), INTEGER, 0, len(scc) - 1)

    for u in derived:
        defining = classes[u].defining
        if defining:
            add([(1, bd(i)) for i in defining] + [(-len(defining), sat(u))], LE, 0, "axiom_def")
    for i, rule in enumerate(nlp.rules):
        if rule.head not in derived_set:
            continue
        lits = [(1, sat(b)) for b in sorted(rule.pos)] + [(-1, sat(c)) for c in sorted(rule.neg)]
        size = len(rule.pos) + len(rule.neg)
        add(lits + [(-size, bd(i))], GE, -len(rule.neg), "axiom_body_lo")
        add(lits + [(-1, bd(i))], LE, len(rule.pos) - 1, "axiom_body_hi")
    for u in derived:
        cls = classes[u]
        add([(1, bd(i)) for i in cls.external] + [(1, sr(i)) for i in cls.internal]
            + [(-1, sat(u))], GE, 0, "axiom_support")
    for u in derived:
        cls = classes[u]
        size = len(graph.scc(u))
        done = set()
        for i in cls.internal:
            support = sorted(cls.support[i])
            add([(1, bd(i)), (-1, sr(i))], GE, 0, "axiom_rank_s")
            add([(1, gt(u, b)) for b in support] + [(-len(support), sr(i))], GE, 0, "axiom_rank_gt")
            for b in support:
                if b in done:
                    continue
                done.add(b)
                if b == u:
                    add([(-size, gt(u, b))], GE, 1 - size, "axiom_rank_z")
                else:
                    add([(1, z(u)), (-1, z(b)), (-size, gt(u, b))], GE, 1 - size, "axiom_rank_z")
    return variables, constraints


def translation_witness(nlp: NormalLogicProgram, graph: DependencyGraph, t: int,
                        true_inputs: Sequence[str], derived: Optional[Sequence[str]] = None,
                        sat=None, atom_key=None, rule_key=None) -> Dict[str, int]:
    """Values for the translation variables matching the perfect model of
    ``nlp`` plus ``true_inputs``; z comes from derivation rounds, densely
    ranked inside each component."""
    if derived is None:
        derived = list(nlp.atoms)
    facts = tuple(Rule(a) for a in true_inputs)
    rounds = perfect_model_rounds(NormalLogicProgram(nlp.rules + facts, nlp.atoms))
    truth = set(rounds)
    variables, _ = translate_axioms(nlp, graph, t, derived, sat, atom_key, rule_key)
    sat = sat or (lambda a: "sat_%s_t%d" % (a, t))
    atom_key = atom_key or (lambda a: a)
    rule_key = rule_key or default_rule_key(nlp)
    values = {v.name: 0 for v in variables}
    rank = {}
    for comp in graph.components:
        true_rounds = sorted({rounds[a] for a in comp if a in truth})
        dense = {r: i for i, r in enumerate(true_rounds)}
        for a in comp:
            rank[a] = dense[rounds[a]] if a in truth else 0
    for u in derived:
        values[sat(u)] = int(u in truth)
    derived_set = set(derived)
    for i, rule in enumerate(nlp.rules):
        if rule.head in derived_set:
            values["bd_r%s_t%d" % (rule_key(i), t)] = int(rule.body_holds(truth))
    for u in derived:
        cls = classify_rules(nlp, graph, u)
        if cls.internal:
            for a in graph.scc(u):
                values["z_u%s_t%d" % (atom_key(a), t)] = rank[a]
        for i in cls.internal:
            support = cls.support[i]
            for b in support:
                values["gt_u%s_b%s_t%d" % (atom_key(u), atom_key(b), t)] = int(rank[u] > rank[b])
            ok = nlp.rules[i].body_holds(truth)
            values["s_r%s_t%d" % (rule_key(i), t)] = int(ok and all(rank[b] < rank[u] for b in support))
    return values


# ---------------------------------------------------------------------------
# Planning model

def y_name(o, t):
    return "y_o%d_t%d" % (o, t)


def sc_name(kind, f, t):
    return "%s_f%d_t%d" % (kind, f, t)


def sat_name(f, t):
    return "sat_f%d_t%d" % (f, t)


STATE_CHANGE = ("xadd", "xpre", "xpredel", "xdel", "xm")


def build_state_change_model(task: SasTask, T: int, semantics: str = SEQ,
                             objective: bool = False) -> MilpModel:
    if T < 1:
        raise ValueError("horizon must be at least 1")
    if semantics not in (SEQ, FORALL):
        raise ValueError("unknown semantics %r" % semantics)
    if semantics == FORALL and task.has_axioms:
        raise ForallWithAxioms()
    index = build_fluent_index(task)
    nprimary = len(index.fluents)
    derived_ids = {v.id: nprimary + j for j, v in enumerate(task.derived_vars)}
    fluent_of_atom = {task.atom(f): i for f, i in index.ids.items()}
    fluent_of_atom.update({v.name: derived_ids[v.id] for v in task.derived_vars})

    def fid(fluent: Assignment) -> int:
        if task.variables[fluent.var].is_derived:
            return derived_ids[fluent.var]
        return index.ids[fluent]

    m = MilpModel(horizon=T)
    m.info.update(task=task, index=index, semantics=semantics, derived_ids=derived_ids,
                  fluent_of_atom=fluent_of_atom)
    F = range(nprimary)
    steps = range(1, T + 1)
    layers = range(0, T + 1)

    for t in steps:
        for op in task.operators:
            m.add_var(y_name(op.id, t), prefer_high=True)
    for t in layers:
        for f in F:
            for kind in STATE_CHANGE:
                m.add_var(sc_name(kind, f, t))
            m.add_var(sat_name(f, t), prefer_high=True)

    init = set(task.init)
    for f in F:
        if index.fluents[f] in init:
            m.add([(1, sc_name("xadd", f, 0))], EQ, 1, "initial")
        else:
            for kind in ("xadd", "xm", "xpre"):
                m.add([(1, sc_name(kind, f, 0))], EQ, 0, "initial")

    for t in steps:
        for f in F:
            add_only, del_only, pre_only, pre_del = index.classes(f)
            for kind, ops, tag in (("xadd", add_only, "add_link"), ("xdel", del_only, "del_link"),
                                   ("xpre", pre_only, "preadd_link")):
                x = sc_name(kind, f, t)
                m.add([(1, y_name(o, t)) for o in ops] + [(-1, x)], GE, 0, tag)
                for o in ops:
                    m.add([(1, y_name(o, t)), (-1, x)], LE, 0, tag)
            m.add([(1, y_name(o, t)) for o in pre_del] + [(-1, sc_name("xpredel", f, t))], EQ, 0,
                  "predel_link")
            xa, xp, xpd, xd, xm = (sc_name(k, f, t) for k in STATE_CHANGE)
            m.add([(1, xa), (1, xm), (1, xd), (1, xpd)], LE, 1, "parallel")
            m.add([(1, xp), (1, xm), (1, xd), (1, xpd)], LE, 1, "parallel")
            m.add([(1, xp), (1, xm), (1, xpd), (-1, sc_name("xpre", f, t - 1)),
                   (-1, sc_name("xadd", f, t - 1)), (-1, sc_name("xm", f, t - 1))], LE, 0, "backward")

    for t in layers:
        for f in F:
            s = sat_name(f, t)
            xa, xp, xm = sc_name("xadd", f, t), sc_name("xpre", f, t), sc_name("xm", f, t)
            m.add([(1, s), (-1, xa), (-1, xp), (-1, xm)], LE, 0, "sat")
            m.add([(1, s), (-1, xa)], GE, 0, "sat")
            m.add([(1, s), (-1, xp)], GE, 0, "sat")
            m.add([(1, s), (-1, xm)], GE, 0, "sat")

    if task.has_axioms:
        # fluents may not silently vanish once negation can observe them
        for t in layers:
            for var in task.primary_vars:
                m.add([(1, sat_name(index.ids[Assignment(var.id, x)], t))
                       for x in range(var.domain_size)], GE, 1, "domain")

    for t in layers:
        for group in task.mutex_groups:
            m.add([(1, sat_name(fid(f), t)) for f in group.fluents], LE, 1, "mutex")

    if task.has_axioms:
        nlp = task.axiom_program
        graph = dependency_graph(nlp)
        derived = [v.name for v in task.derived_vars]
        for t in layers:
            variables, constraints = translate_axioms(
                nlp, graph, t, derived,
                sat=lambda a, t=t: sat_name(fluent_of_atom[a], t),
                atom_key=lambda a: str(fluent_of_atom[a]),
                rule_key=str)
            m.extend(variables, constraints)
        m.info.update(nlp=nlp, graph=graph)

    for t in steps:
        for op in task.operators:
            for d in op.precondition:
                if task.variables[d.var].is_derived:
                    s = sat_name(derived_ids[d.var], t - 1)
                    if d.value == 1:
                        m.add([(1, y_name(op.id, t)), (-1, s)], LE, 0, "link")
                    else:
                        m.add([(1, y_name(op.id, t)), (1, s)], LE, 1, "link")

    if semantics == SEQ or task.has_axioms:
        for t in steps:
            m.add([(1, y_name(op.id, t)) for op in task.operators], LE, 1, "seq")

    for g in task.goal:
        if g.value == 0 and task.variables[g.var].is_derived:
            m.add([(-1, sat_name(fid(Assignment(g.var, 1)), T))], GE, 0, "goal")
        else:
            m.add([(1, sat_name(fid(g), T))], GE, 1, "goal")

    if objective:
        m.objective = [(op.cost, y_name(op.id, t)) for t in steps for op in task.operators if op.cost]
    return m


def axiom_layer_model(task: SasTask, primary: Mapping[int, int], t: int = 0) -> MilpModel:
    """The translated axioms of one layer with primary fluents fixed to
    ``primary`` (variable id to value)."""
    # same fluent numbering as the planning model
    fluents = tuple(Assignment(v.id, x) for v in task.primary_vars for x in range(v.domain_size))
    nprimary = len(fluents)
    fluent_of_atom = {task.atom(f): i for i, f in enumerate(fluents)}
    fluent_of_atom.update({v.name: nprimary + j for j, v in enumerate(task.derived_vars)})
    m = MilpModel(horizon=t)
    for i, f in enumerate(fluents):
        m.add_var(sat_name(i, t))
        m.add([(1, sat_name(i, t))], EQ, int(primary[f.var] == f.value), "state")
    nlp = task.axiom_program
    m.extend(*translate_axioms(nlp, dependency_graph(nlp), t, [v.name for v in task.derived_vars],
                               sat=lambda a: sat_name(fluent_of_atom[a], t),
                               atom_key=lambda a: str(fluent_of_atom[a]), rule_key=str))
    m.info.update(task=task, fluent_of_atom=fluent_of_atom)
    return m


_Y = re.compile(r"^y_o(\d+)_t(\d+)$")


def decode_assignment(model: MilpModel, assignment: Mapping[str, int]) -> Plan:
    steps: Dict[int, List[int]] = {}
    for name in model.variables:
        match = _Y.match(name)
        if not match:
            continue
        if name not in assignment:
            raise MalformedAssignment("no value for %s" % name)
        value = assignment[name]
        if value not in (0, 1):
            raise MalformedAssignment("%s = %r is not binary" % (name, value))
        if value:
            steps.setdefault(int(match.group(2)), []).append(int(match.group(1)))
    return Plan(tuple(tuple(steps[t]) for t in sorted(steps)))


def plan_to_assignment(task: SasTask, model: MilpModel, plan: Plan) -> Dict[str, int]:
    """The intended assignment for ``plan``, padded with idle steps."""
    T = model.horizon
    semantics = model.info["semantics"]
    if plan.makespan > T:
        raise InvalidPlan("plan makespan %d exceeds horizon %d" % (plan.makespan, T))
    states = simulate(task, plan, semantics)
    states += [states[-1]] * (T - plan.makespan)
    steps = list(plan.steps) + [()] * (T - plan.makespan)
    index: FluentIndex = model.info["index"]
    values = {name: 0 for name in model.variables}
    for t, step in enumerate(steps, 1):
        for o in step:
            values[y_name(o, t)] = 1
    for f, fluent in enumerate(index.fluents):
        values[sc_name("xadd", f, 0)] = int(states[0].holds(fluent))
        values[sat_name(f, 0)] = int(states[0].holds(fluent))
        for t in range(1, T + 1):
            executed = set(steps[t - 1])
            add_only, del_only, pre_only, pre_del = index.classes(f)
            xa = int(bool(executed & set(add_only)))
            xd = int(bool(executed & set(del_only)))
            xp = int(bool(executed & set(pre_only)))
            xpd = len(executed & set(pre_del))
            before, after = states[t - 1].holds(fluent), states[t].holds(fluent)
            xm = int(before and after and not (xa or xd or xp or xpd))
            for kind, x in zip(STATE_CHANGE, (xa, xp, xpd, xd, xm)):
                values[sc_name(kind, f, t)] = x
            values[sat_name(f, t)] = int(after)
    if task.has_axioms:
        nlp, graph = model.info["nlp"], model.info["graph"]
        fluent_of_atom = model.info["fluent_of_atom"]
        derived = [v.name for v in task.derived_vars]
        inputs = [task.atom(f) for f in index.fluents]
        for t, s in enumerate(states):
            true_inputs = [a for a, f in zip(inputs, index.fluents) if s.holds(f)]
            values.update(translation_witness(
                nlp, graph, t, true_inputs, derived,
                sat=lambda a, t=t: sat_name(fluent_of_atom[a], t),
                atom_key=lambda a: str(fluent_of_atom[a]), rule_key=str))
    return values


# ---------------------------------------------------------------------------
# LP files

def _constraint_order(model: MilpModel):
    counters: Dict[str, int] = {}
    named = []
    for c in model.constraints:
        n = counters.get(c.tag, 0)
        counters[c.tag] = n + 1
        named.append((c.tag, n, c))
    named.sort(key=lambda item: (item[0], item[1]))
    return [("%s_%d" % (tag, n), c) for tag, n, c in named]


def write_lp(model: MilpModel) -> str:
    lines = ["Minimize"]
    if model.objective:
        lines.append(" obj: %s" % format_terms(sorted(model.objective, key=lambda cv: cv[1])))
    lines.append("Subject To")
    for name, c in _constraint_order(model):
        lines.append(" %s: %s" % (name, c.text()))
    names = sorted(model.variables)
    bounded = [n for n in names if model.variables[n].kind == INTEGER]
    if bounded:
        lines.append("Bounds")
        for n in bounded:
            v = model.variables[n]
            lines.append(" %d <= %s <= %d" % (v.lower, n, v.upper))
    binaries = [n for n in names if model.variables[n].kind == BINARY]
    if binaries:
        lines.append("Binaries")
        lines.extend(" " + n for n in binaries)
    if bounded:
        lines.append("Generals")
        lines.extend(" " + n for n in bounded)
    lines.append("End")
    return "\n".join(lines) + "\n"


_SECTIONS = {"minimize": "objective", "subject to": "constraints", "bounds": "bounds",
             "binaries": "binaries", "generals": "generals", "end": "end"}
_TERM = re.compile(r"([+-])?\s*(\d+)?\s*([A-Za-z_][\w.]*)")


def _parse_terms(text: str):
    text = text.strip()
    if text == "0":
        return []
    terms = []
    pos = 0
    while pos < len(text):
        match = _TERM.match(text, pos)
        if not match or match.start() != pos:
            raise ValueError("cannot parse linear expression %r" % text)
        sign = -1 if match.group(1) == "-" else 1
        coef = int(match.group(2)) if match.group(2) else 1
        terms.append((sign * coef, match.group(3)))
        pos = match.end()
        while pos < len(text) and text[pos] == " ":
            pos += 1
    return terms


def read_lp(text: str) -> MilpModel:
    """Parse the subset of the LP format that ``write_lp`` produces."""
    section = None
    model = MilpModel()
    cons = []
    kinds: Dict[str, str] = {}
    bounds: Dict[str, Tuple[int, int]] = {}
    order = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        key = line.lower()
        if key in _SECTIONS:
            section = _SECTIONS[key]
            if section == "end":
                break
            continue
        if section == "objective":
            _, expr = line.split(":", 1)
            model.objective = _parse_terms(expr)
        elif section == "constraints":
            name, body = line.split(":", 1)
            match = re.match(r"^(.*?)\s*(<=|>=|=)\s*(-?\d+)$", body.strip())
            if not match:
                raise ValueError("cannot parse constraint %r" % line)
            tag = name.strip().rsplit("_", 1)[0]
            cons.append((_parse_terms(match.group(1)), match.group(2), int(match.group(3)), tag))
        elif section == "bounds":
            match = re.match(r"^(-?\d+)\s*<=\s*(\S+)\s*<=\s*(-?\d+)$", line)
            if not match:
                raise ValueError("cannot parse bound %r" % line)
            bounds[match.group(2)] = (int(match.group(1)), int(match.group(3)))
        elif section == "binaries":
            kinds[line] = BINARY
            order.append(line)
        elif section == "generals":
            kinds[line] = INTEGER
            order.append(line)
        else:
            raise ValueError("content outside any section: %r" % line)
    else:
        raise ValueError("missing End")
    for name in sorted(set(order)):
        lo, hi = bounds.get(name, (0, 1))
        model.add_var(name, kinds[name], lo, hi)
    for terms, sense, rhs, tag in cons:
        model.add(terms, sense, rhs, tag)
    return model
