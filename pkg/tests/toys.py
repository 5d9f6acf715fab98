"""Hand-built toy tasks shared by the test suite."""

from axplan.sas import (PRIMARY, SECONDARY, Assignment, Axiom, Effect, MutexGroup, Operator,
                        SasTask, SasVariable)


class TaskBuilder:
    def __init__(self):
        self.variables = []
        self.index = {}
        self.axioms = []
        self.operators = []
        self.groups = []
        self.init = {}
        self.goal = []

    def var(self, name, values=("0", "1"), init=0):
        vid = len(self.variables)
        self.variables.append(SasVariable(vid, name, PRIMARY, len(values), tuple(values)))
        self.index[name] = vid
        self.init[vid] = init
        return vid

    def derived(self, name, layer=0):
        vid = len(self.variables)
        self.variables.append(SasVariable(vid, name, SECONDARY, 2, ("false", "true"), layer))
        self.index[name] = vid
        return vid

    def f(self, name, value=1):
        return Assignment(self.index[name], value)

    def fl(self, pairs):
        if isinstance(pairs, dict):
            pairs = pairs.items()
        return tuple(sorted(self.f(n, v) for n, v in pairs))

    def axiom(self, head, pos=(), neg=()):
        self.axioms.append(Axiom(self.f(head), self.fl(pos), tuple(self.f(n) for n in neg)))

    def op(self, name, pre=(), eff=(), cond_eff=(), cost=1):
        effects = [Effect((), a) for a in self.fl(eff)]
        for cond, (n, v) in cond_eff:
            effects.append(Effect(self.fl(cond), self.f(n, v)))
        self.operators.append(Operator(len(self.operators), name, self.fl(pre), tuple(effects), cost))

    def mutex(self, pairs):
        self.groups.append(MutexGroup(tuple(self.f(n, v) for n, v in pairs)))

    def goals(self, pairs):
        self.goal = list(self.fl(pairs))

    def build(self, metric=True):
        init = tuple(Assignment(v.id, self.init[v.id]) for v in self.variables if not v.is_derived)
        task = SasTask(tuple(self.variables), tuple(self.axioms), tuple(self.operators),
                       tuple(self.groups), init, tuple(self.goal), metric)
        task.validate()
        return task


def toy1():
    b = TaskBuilder()
    b.var("v")
    b.derived("u")
    b.axiom("u", pos=[("v", 1)])
    b.op("set_v", eff=[("v", 1)])
    b.goals([("u", 1)])
    return b.build()


def corridor(n, player, box, goal, axioms):
    """Sokoban on a 1-d corridor of ``n`` cells (numbered from 1).

    With ``axioms`` there are no move operators: pushes require the
    derived ``reach_c`` of the cell behind the box.
    """
    b = TaskBuilder()
    cells = range(1, n + 1)
    names = tuple("c%d" % c for c in cells)
    b.var("player", names, init=player - 1)
    b.var("box", names, init=box - 1)
    for c in cells:
        b.var("clear%d" % c, init=0 if c == box else 1)
        b.mutex([("box", c - 1), ("clear%d" % c, 1)])
    if axioms:
        for c in cells:
            b.derived("reach%d" % c)
        for c in cells:
            b.axiom("reach%d" % c, pos=[("player", c - 1)])
            for d in (c - 1, c + 1):
                if d in cells:
                    b.axiom("reach%d" % c, pos=[("reach%d" % d, 1), ("clear%d" % c, 1)])
    else:
        for c in cells:
            for d in (c - 1, c + 1):
                if d in cells:
                    b.op("move_%d_%d" % (c, d), pre=[("player", c - 1), ("clear%d" % d, 1)],
                         eff=[("player", d - 1)])
    for c in cells:
        for d in (c - 1, c + 1):
            e = d + (d - c)
            if d in cells and e in cells:
                pre = [("box", d - 1), ("clear%d" % e, 1)]
                pre.append(("reach%d" % c, 1) if axioms else ("player", c - 1))
                b.op("push_%d_%d" % (d, e), pre=pre,
                     eff=[("box", e - 1), ("player", d - 1), ("clear%d" % d, 1), ("clear%d" % e, 0)])
    b.goals([("box", goal - 1)])
    return b.build()


def soko4(axioms):
    return corridor(4, player=1, box=3, goal=4, axioms=axioms)


def soko6(axioms):
    return corridor(6, player=1, box=5, goal=6, axioms=axioms)


def p2_task():
    """Axioms shaped like a <- not b; b <- c; c <- b, plus an entry into the loop."""
    b = TaskBuilder()
    b.var("p")
    b.var("q")
    b.derived("b")
    b.derived("c")
    b.derived("a", layer=1)
    b.axiom("a", neg=["b"])
    b.axiom("b", pos=[("c", 1)])
    b.axiom("c", pos=[("b", 1)])
    b.axiom("b", pos=[("p", 1)])
    b.op("set_p", eff=[("p", 1)])
    b.op("set_q", pre=[("a", 1)], eff=[("q", 1)])
    b.op("clear_p", pre=[("p", 1)], eff=[("p", 0)])
    b.goals([("q", 1), ("c", 1)])
    return b.build()


def conditional():
    """A switch that toggles a lamp only while power is on."""
    b = TaskBuilder()
    b.var("power")
    b.var("lamp")
    b.var("done")
    b.op("power_on", pre=[("power", 0)], eff=[("power", 1)])
    b.op("flip", eff=[("done", 1)], cond_eff=[([("power", 1), ("lamp", 0)], ("lamp", 1)),
                                               ([("power", 1), ("lamp", 1)], ("lamp", 0))])
    b.goals([("lamp", 1), ("done", 1)])
    return b.build()


def conditional_axioms():
    """Conditional effect whose condition reads a derived variable."""
    b = TaskBuilder()
    b.var("x")
    b.var("y")
    b.derived("ready")
    b.axiom("ready", pos=[("x", 1)])
    b.op("prepare", eff=[("x", 1)])
    b.op("go", cond_eff=[([("ready", 1)], ("y", 1))])
    b.goals([("y", 1)])
    return b.build()


def derived_goal():
    """Goal on a derived variable defined through negation."""
    b = TaskBuilder()
    b.var("door", ("closed", "open", "locked"), init=2)
    b.var("key")
    b.derived("blocked")
    b.derived("free", layer=1)
    b.axiom("blocked", pos=[("door", 2)])
    b.axiom("blocked", pos=[("door", 0)])
    b.axiom("free", neg=["blocked"])
    b.op("take_key", pre=[("key", 0)], eff=[("key", 1)])
    b.op("unlock", pre=[("door", 2), ("key", 1)], eff=[("door", 0)])
    b.op("open", pre=[("door", 0)], eff=[("door", 1)])
    b.mutex([("door", 0), ("door", 1), ("door", 2)])
    b.goals([("free", 1)])
    return b.build()


def negative_precondition():
    """An operator that demands a derived variable to be false."""
    b = TaskBuilder()
    b.var("alarm")
    b.var("safe")
    b.var("out")
    b.derived("danger")
    b.axiom("danger", pos=[("alarm", 1)])
    b.op("disarm", pre=[("alarm", 1)], eff=[("alarm", 0), ("safe", 1)])
    b.op("leave", pre=[("danger", 0), ("safe", 1)], eff=[("out", 1)])
    b.init[b.index["alarm"]] = 1
    b.goals([("out", 1)])
    return b.build()


def counter():
    """Axiom-free multi-valued task; forall plans can be shorter."""
    b = TaskBuilder()
    b.var("n", ("0", "1", "2"))
    b.var("m", ("0", "1", "2"))
    b.op("inc_n0", pre=[("n", 0)], eff=[("n", 1)])
    b.op("inc_n1", pre=[("n", 1)], eff=[("n", 2)])
    b.op("inc_m0", pre=[("m", 0)], eff=[("m", 1)], cost=2)
    b.op("reset_n", eff=[("n", 0)])
    b.goals([("n", 2), ("m", 1)])
    return b.build()


def trivial():
    """Goal already true, no operators."""
    b = TaskBuilder()
    b.var("v", init=1)
    b.goals([("v", 1)])
    return b.build()


def unsolvable():
    b = TaskBuilder()
    b.var("v")
    b.var("w")
    b.derived("u")
    b.axiom("u", pos=[("v", 1), ("w", 1)])
    b.op("set_v", pre=[("w", 0)], eff=[("v", 1)])
    b.op("set_w", pre=[("v", 0)], eff=[("w", 1)])
    b.goals([("u", 1)])
    return b.build()


SUITE = {
    "toy1": toy1,
    "soko4_axioms": lambda: soko4(True),
    "soko4_moves": lambda: soko4(False),
    "soko6_axioms": lambda: soko6(True),
    "soko6_moves": lambda: soko6(False),
    "p2_task": p2_task,
    "conditional": conditional,
    "conditional_axioms": conditional_axioms,
    "derived_goal": derived_goal,
    "negative_precondition": negative_precondition,
    "counter": counter,
    "trivial": trivial,
    "unsolvable": unsolvable,
}


def suite(conditional_effects=True):
    tasks = {name: make() for name, make in SUITE.items()}
    if not conditional_effects:
        tasks = {n: t for n, t in tasks.items() if not t.has_conditional_effects}
    return tasks
