import itertools

import pytest

from axplan.errors import (ConflictingEffects, ForallWithAxioms, GoalUnsatisfied, InvalidPlan,
                           NotApplicable, StateSpaceTooLarge, StepConflict)
from axplan.semantics import (FORALL, SEQ, Plan, PlanReport, apply_operator, evaluate_axioms, format_plan,
                              initial_state, oracle_plan, parse_plan, reachable_states, simulate,
                              successors, validate_plan)

import toys


def test_toy1_initial_and_step():
    task = toys.toy1()
    s0 = initial_state(task)
    assert s0.values == (0, 0)
    s1 = apply_operator(task, s0, task.operators[0])
    assert s1.values == (1, 1)
    assert validate_plan(task, Plan.sequential([0])) == PlanReport(1, 1, 1)


def test_empty_plan_goal_unsatisfied():
    with pytest.raises(GoalUnsatisfied):
        validate_plan(toys.toy1(), Plan())


def test_empty_plan_on_trivial_task():
    assert validate_plan(toys.trivial(), Plan()).makespan == 0


def test_not_applicable_names_step():
    task = toys.negative_precondition()
    leave = task.operator_by_name("leave").id
    with pytest.raises(NotApplicable) as info:
        validate_plan(task, Plan.sequential([leave]))
    assert info.value.step == 1


def test_negative_derived_precondition():
    task = toys.negative_precondition()
    names = ["disarm", "leave"]
    plan = Plan.sequential([task.operator_by_name(n).id for n in names])
    assert validate_plan(task, plan).makespan == 2


def test_conditional_effects_read_pre_state():
    task = toys.conditional()
    on, flip = task.operator_by_name("power_on").id, task.operator_by_name("flip").id
    states = simulate(task, Plan.sequential([on, flip]))
    lamp = 1
    assert states[-1].values[lamp] == 1
    # flipping twice turns it off again: only one conditional effect fires each time
    states = simulate(task, Plan.sequential([on, flip, flip]))
    assert states[-1].values[lamp] == 0


def test_conflicting_effects_detected():
    b = toys.TaskBuilder()
    b.var("x")
    b.var("y")
    b.op("bad", cond_eff=[([("y", 0)], ("x", 1)), ([], ("x", 0))])
    b.goals([("x", 1)])
    task = b.build()
    with pytest.raises(ConflictingEffects):
        apply_operator(task, initial_state(task), task.operators[0])


def test_forall_step_conflict_and_parallel_step():
    task = toys.counter()
    ids = {op.name: op.id for op in task.operators}
    with pytest.raises(StepConflict) as info:
        simulate(task, Plan(((ids["inc_n0"], ids["reset_n"]),)), FORALL)
    assert (info.value.op1, info.value.op2) == ("inc_n0", "reset_n")
    plan = Plan(((ids["inc_n0"], ids["inc_m0"]), (ids["inc_n1"],)))
    assert validate_plan(task, plan, FORALL) == PlanReport(2, 4, 3)


def test_forall_rejected_with_axioms():
    with pytest.raises(ForallWithAxioms):
        simulate(toys.toy1(), Plan.sequential([0]), FORALL)


def test_seq_rejects_parallel_steps():
    with pytest.raises(InvalidPlan):
        simulate(toys.counter(), Plan(((0, 2),)), SEQ)


def test_plan_rejects_empty_steps():
    with pytest.raises(InvalidPlan):
        Plan(((),))


def test_axioms_close_every_state():
    task = toys.p2_task()
    for s in reachable_states(task):
        assert evaluate_axioms(task, s.primary(task)) == s


def test_p2_task_derivations():
    task = toys.p2_task()
    names = {v.name: v.id for v in task.variables}
    s0 = initial_state(task)
    assert (s0.values[names["a"]], s0.values[names["b"]], s0.values[names["c"]]) == (1, 0, 0)
    s1 = apply_operator(task, s0, task.operator_by_name("set_p"))
    assert (s1.values[names["a"]], s1.values[names["b"]], s1.values[names["c"]]) == (0, 1, 1)


@pytest.mark.parametrize("name,makespan", [
    ("toy1", 1), ("soko4_axioms", 1), ("soko4_moves", 2), ("soko6_axioms", 1), ("soko6_moves", 4),
    ("p2_task", 2), ("conditional", 2), ("conditional_axioms", 2), ("derived_goal", 3),
    ("negative_precondition", 2), ("counter", 3), ("trivial", 0)])
def test_oracle_makespans(name, makespan):
    task = toys.SUITE[name]()
    plan = oracle_plan(task, 6)
    assert plan.makespan == makespan
    validate_plan(task, plan)


def test_oracle_respects_cap_and_unsolvable():
    assert oracle_plan(toys.soko6(False), 3) is None
    assert oracle_plan(toys.unsolvable(), 10) is None


def test_oracle_state_cap():
    with pytest.raises(StateSpaceTooLarge):
        oracle_plan(toys.soko6(False), 10, state_cap=3)


def _all_seq_plans(task, k):
    """Brute force: all applicable operator sequences of length k."""
    found = []
    for seq in itertools.product(range(len(task.operators)), repeat=k):
        try:
            validate_plan(task, Plan.sequential(seq))
        except (NotApplicable, GoalUnsatisfied):
            continue
        found.append(seq)
    return found


def test_oracle_is_minimal_against_brute_force():
    for name in ("toy1", "p2_task", "derived_goal", "negative_precondition", "unsolvable"):
        task = toys.SUITE[name]()
        plan = oracle_plan(task, 3)
        shortest = next((k for k in range(4) if _all_seq_plans(task, k)), None)
        assert (plan.makespan if plan else None) == shortest


def test_successors_are_applicable():
    task = toys.derived_goal()
    for s in reachable_states(task):
        for op, t in successors(task, s):
            assert s.satisfies(op.precondition)
            assert apply_operator(task, s, op) == t


def test_plan_text_roundtrip():
    task = toys.counter()
    plan = Plan(((0, 2), (1,)))
    text = format_plan(task, plan)
    assert text == "inc_n0 inc_m0\ninc_n1\n"
    assert parse_plan(task, "; comment\n" + text) == plan
    with pytest.raises(InvalidPlan):
        parse_plan(task, "nope\n")
