"""Ground normal logic programs.

Atoms are plain strings; an atom's id is its position in
``NormalLogicProgram.atoms``.  Everything here is pure and works on
immutable programs, so the functions double as oracles for the encoders.
"""

from __future__ import annotations

import itertools
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import InvalidRule, NotStratified, NotSupported, TooLarge

ENUMERATION_CAP = 20
RANKING_CAP = 15


@dataclass(frozen=True)
class Rule:
    head: str
    pos: FrozenSet[str] = frozenset()
    neg: FrozenSet[str] = frozenset()
    name: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "pos", frozenset(self.pos))
        object.__setattr__(self, "neg", frozenset(self.neg))
        if self.pos & self.neg:
            raise InvalidRule("atoms %s occur both positively and negatively in the body of %s"
                              % (sorted(self.pos & self.neg), self.head))

    def body_holds(self, model) -> bool:
        return self.pos <= model and not (self.neg & model)

    def __str__(self):
        body = sorted(self.pos) + ["not " + c for c in sorted(self.neg)]
        if not body:
            return "%s." % self.head
        return "%s :- %s." % (self.head, ", ".join(body))


@dataclass(frozen=True)
class NormalLogicProgram:
    rules: Tuple[Rule, ...] = ()
    atoms: Tuple[str, ...] = ()

    def __post_init__(self):
        rules = tuple(self.rules)
        declared = list(dict.fromkeys(self.atoms))
        seen = set(declared)
        for rule in rules:
            for atom in itertools.chain([rule.head], sorted(rule.pos), sorted(rule.neg)):
                if atom not in seen:
                    seen.add(atom)
                    declared.append(atom)
        object.__setattr__(self, "rules", rules)
        object.__setattr__(self, "atoms", tuple(declared))

    @property
    def atom_ids(self) -> Dict[str, int]:
        return {atom: i for i, atom in enumerate(self.atoms)}

    def is_positive(self) -> bool:
        return all(not r.neg for r in self.rules)

    def __str__(self):
        return format_program(self)


def format_program(p: NormalLogicProgram) -> str:
    """Render ``p`` in the debug text form, one rule per line."""
    return "".join(str(rule) + "\n" for rule in p.rules)


_RULE_RE = re.compile(r"^\s*(?:(?P<name>\w+)\s*:\s+)?(?P<head>[^\s:.,]+)\s*(?::-\s*(?P<body>.*?))?\s*\.\s*$")


def parse_program(text: str) -> NormalLogicProgram:
    """Parse the debug text form.

    One rule per line: ``a :- b, not c.`` or a fact ``a.``.  An optional
    ``name: `` prefix labels the rule.  ``%`` starts a comment.
    """
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        match = _RULE_RE.match(line)
        if not match:
            raise ValueError("cannot parse rule on line %d: %r" % (lineno, raw))
        pos, neg = [], []
        body = match.group("body")
        if body:
            for lit in body.split(","):
                lit = lit.strip()
                if lit.startswith("not "):
                    neg.append(lit[4:].strip())
                else:
                    pos.append(lit)
        rules.append(Rule(match.group("head"), frozenset(pos), frozenset(neg), match.group("name")))
    return NormalLogicProgram(tuple(rules))


# ---------------------------------------------------------------------------
# Models, reduct, answer sets

def is_model(p: NormalLogicProgram, m) -> bool:
    return all(rule.head in m for rule in p.rules if rule.body_holds(m))


def reduct(p: NormalLogicProgram, m) -> NormalLogicProgram:
    m = frozenset(m)
    rules = tuple(Rule(r.head, r.pos, frozenset(), r.name) for r in p.rules if not (r.neg & m))
    return NormalLogicProgram(rules, p.atoms)


def least_model(p: NormalLogicProgram) -> FrozenSet[str]:
    """Least model of a positive program by counter-based forward chaining."""
    if not p.is_positive():
        raise ValueError("least_model needs a positive program")
    missing = []
    watchers = defaultdict(list)
    agenda = []
    for i, rule in enumerate(p.rules):
        missing.append(len(rule.pos))
        for b in rule.pos:
            watchers[b].append(i)
        if not rule.pos:
            agenda.append(rule.head)
    model = set()
    while agenda:
        atom = agenda.pop()
        if atom in model:
            continue
        model.add(atom)
        for i in watchers[atom]:
            missing[i] -= 1
            if missing[i] == 0:
                agenda.append(p.rules[i].head)
    return frozenset(model)


def derivation_rounds(p: NormalLogicProgram, facts: Iterable[str] = ()) -> Dict[str, int]:
    """Round in which each atom of the least model is first derived.

    Atoms in ``facts`` (and heads of bodiless rules) get round 0; an atom
    derived from atoms of rounds < k gets round k.
    """
    if not p.is_positive():
        raise ValueError("derivation_rounds needs a positive program")
    rounds = {a: 0 for a in facts}
    for rule in p.rules:
        if not rule.pos:
            rounds.setdefault(rule.head, 0)
    pending = [r for r in p.rules if r.pos]
    k = 0
    while True:
        k += 1
        new = {}
        rest = []
        for rule in pending:
            if rule.head in rounds:
                continue
            if rule.pos <= rounds.keys():
                new.setdefault(rule.head, k)
            else:
                rest.append(rule)
        if not new:
            return rounds
        rounds.update(new)
        pending = rest


def is_answer_set(p: NormalLogicProgram, m) -> bool:
    m = frozenset(m)
    return least_model(reduct(p, m)) == m


def enumerate_answer_sets(p: NormalLogicProgram) -> List[FrozenSet[str]]:
    """All answer sets by brute force over every subset of At(p).

    Results are ordered lexicographically by their sorted atom ids.
    """
    n = len(p.atoms)
    if n > ENUMERATION_CAP:
        raise TooLarge("%d atoms exceed the enumeration cap of %d" % (n, ENUMERATION_CAP))
    found = []
    for size in range(n + 1):
        for ids in itertools.combinations(range(n), size):
            candidate = frozenset(p.atoms[i] for i in ids)
            if is_answer_set(p, candidate):
                found.append(ids)
    found.sort()
    return [frozenset(p.atoms[i] for i in ids) for ids in found]


def support_rules(p: NormalLogicProgram, m) -> Tuple[Rule, ...]:
    m = frozenset(m)
    return tuple(r for r in p.rules if r.body_holds(m))


def is_supported(p: NormalLogicProgram, m) -> bool:
    m = frozenset(m)
    if not is_model(p, m):
        return False
    heads = {r.head for r in support_rules(p, m)}
    return m <= heads


# ---------------------------------------------------------------------------
# Dependency graph and SCCs

def strongly_connected_components(vertices: Sequence, successors: Mapping) -> List[List]:
    """Tarjan's algorithm, iterative.

    Components come out sinks first: every edge points into the same
    component or into one emitted earlier.
    """
    index = {}
    lowlink = {}
    on_stack = set()
    stack = []
    components = []
    counter = itertools.count()

    for root in vertices:
        if root in index:
            continue
        work = [(root, iter(successors.get(root, ())))]
        index[root] = lowlink[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = next(counter)
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(successors.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                components.append(comp)
    return components


@dataclass(frozen=True)
class DependencyGraph:
    """Positive dependency graph: an edge head -> b for every b in B+."""

    vertices: Tuple[str, ...]
    edges: FrozenSet[Tuple[str, str]]
    scc_of: Mapping[str, int]
    components: Tuple[FrozenSet[str], ...]

    def scc(self, atom: str) -> FrozenSet[str]:
        return self.components[self.scc_of[atom]]


def dependency_graph(p: NormalLogicProgram) -> DependencyGraph:
    succ = defaultdict(list)
    edges = set()
    for rule in p.rules:
        for b in sorted(rule.pos):
            if (rule.head, b) not in edges:
                edges.add((rule.head, b))
                succ[rule.head].append(b)
    comps = strongly_connected_components(p.atoms, succ)
    components = tuple(frozenset(c) for c in comps)
    scc_of = {a: i for i, comp in enumerate(components) for a in comp}
    return DependencyGraph(p.atoms, frozenset(edges), scc_of, components)


@dataclass(frozen=True)
class RuleClassification:
    """Defining rules of one atom, as indices into ``p.rules``."""

    defining: Tuple[int, ...]
    external: Tuple[int, ...]
    internal: Tuple[int, ...]
    support: Mapping[int, FrozenSet[str]] = field(default_factory=dict)


def classify_rules(p: NormalLogicProgram, g: DependencyGraph, atom: str) -> RuleClassification:
    scc = g.scc(atom)
    defining, external, internal = [], [], []
    support = {}
    for i, rule in enumerate(p.rules):
        if rule.head != atom:
            continue
        defining.append(i)
        inside = rule.pos & scc
        if inside:
            internal.append(i)
            support[i] = frozenset(inside)
        else:
            external.append(i)
    return RuleClassification(tuple(defining), tuple(external), tuple(internal), support)


# ---------------------------------------------------------------------------
# Stratification and perfect models

@dataclass(frozen=True)
class Stratification:
    level: Mapping[str, int]

    def check(self, p: NormalLogicProgram) -> bool:
        lv = self.level
        for rule in p.rules:
            if any(lv[b] > lv[rule.head] for b in rule.pos):
                return False
            if any(lv[c] >= lv[rule.head] for c in rule.neg):
                return False
        return all(lv.get(a, 0) >= 1 for a in p.atoms)


def find_stratification(p: NormalLogicProgram) -> Optional[Stratification]:
    """Constructive local-stratification check.

    Positive and negative body edges are condensed together; a negative
    edge inside a component means negation through recursion.  Otherwise
    each component's level is the longest path counting negative edges,
    plus one.
    """
    succ = defaultdict(list)
    for rule in p.rules:
        succ[rule.head].extend(sorted(rule.pos))
        succ[rule.head].extend(sorted(rule.neg))
    comps = strongly_connected_components(p.atoms, succ)
    comp_of = {a: i for i, comp in enumerate(comps) for a in comp}
    for rule in p.rules:
        if any(comp_of[c] == comp_of[rule.head] for c in rule.neg):
            return None
    out_edges = defaultdict(list)
    for rule in p.rules:
        h = comp_of[rule.head]
        for b in rule.pos:
            if comp_of[b] != h:
                out_edges[h].append((comp_of[b], 0))
        for c in rule.neg:
            out_edges[h].append((comp_of[c], 1))
    comp_level = []
    for i in range(len(comps)):
        # sinks first, so every target level is already known
        comp_level.append(max([comp_level[j] + w for j, w in out_edges[i]], default=1))
    return Stratification({a: comp_level[comp_of[a]] for a in p.atoms})


def _stratified_rounds(p: NormalLogicProgram, strat: Stratification) -> Dict[str, int]:
    by_level = defaultdict(list)
    for rule in p.rules:
        by_level[strat.level[rule.head]].append(rule)
    rounds: Dict[str, int] = {}
    k = 0
    for lvl in sorted(by_level):
        pending = by_level[lvl]
        while True:
            new = {}
            rest = []
            for rule in pending:
                if rule.head in rounds:
                    continue
                if rule.pos <= rounds.keys() and not any(c in rounds for c in rule.neg):
                    new.setdefault(rule.head, k)
                else:
                    rest.append(rule)
            if not new:
                break
            rounds.update(new)
            pending = rest
            k += 1
    return rounds


def perfect_model(p: NormalLogicProgram, strat: Optional[Stratification] = None) -> FrozenSet[str]:
    """Perfect model by evaluating strata bottom-up, each to fixpoint."""
    return frozenset(perfect_model_rounds(p, strat))


def perfect_model_rounds(p: NormalLogicProgram,
                         strat: Optional[Stratification] = None) -> Dict[str, int]:
    """Perfect model together with the global round each atom was derived in."""
    if strat is None:
        strat = find_stratification(p)
        if strat is None:
            raise NotStratified("program is not locally stratified")
    return _stratified_rounds(p, strat)


# ---------------------------------------------------------------------------
# Level rankings

def is_level_ranking(p: NormalLogicProgram, m, rank: Mapping[str, int]) -> bool:
    m = frozenset(m)
    if set(rank) != set(m) or any(v < 0 for v in rank.values()):
        return False
    supp = support_rules(p, m)
    for a in m:
        if not any(r.head == a and all(rank[a] - 1 >= rank[b] for b in r.pos) for r in supp):
            return False
    return True


def find_level_ranking(p: NormalLogicProgram, m) -> Optional[Dict[str, int]]:
    """A level ranking of ``m`` for ``p``, or None.

    Ranks are the derivation rounds of the support rules' positive parts.
    This is complete: for any ranking ``lr``, induction on ``lr(a)`` shows
    that ``a`` is derived by round ``lr(a)``, so a failed derivation means
    no ranking exists.
    """
    m = frozenset(m)
    positive = NormalLogicProgram(tuple(Rule(r.head, r.pos) for r in support_rules(p, m)))
    rounds = derivation_rounds(positive)
    if not m <= rounds.keys():
        return None
    rank = {a: rounds[a] for a in m}
    assert is_level_ranking(p, m, rank)
    return rank


def level_ranking_exists(p: NormalLogicProgram, m) -> bool:
    m = frozenset(m)
    if len(m) > RANKING_CAP:
        raise TooLarge("%d atoms exceed the ranking search cap of %d" % (len(m), RANKING_CAP))
    if not is_supported(p, m):
        raise NotSupported("%s is not a supported model" % sorted(m))
    return find_level_ranking(p, m) is not None
