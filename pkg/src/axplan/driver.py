"""Iterative horizon search over the encoders and solvers."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from .asp import encode_asp
from .errors import ForallWithAxioms, PlanError, ValidationFailure
from .ip import build_state_change_model, decode_assignment, write_lp
from .mip import FEASIBLE, LIMIT, SolverConfig, solve
from .sas import SasTask
from .semantics import FORALL, SEQ, Plan, PlanReport, goal_holds, initial_state, oracle_plan, validate_plan

AUTO = "auto"
BACKENDS = ("ip", "asp-emit", "ip-emit", "oracle")


@dataclass
class RunConfig:
    backend: str = "ip"
    semantics: str = AUTO
    max_steps: int = 10
    start_steps: int = 0
    limits: SolverConfig = field(default_factory=SolverConfig)
    output_dir: Optional[str] = None

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ValueError("unknown backend %r" % self.backend)
        if self.semantics not in (SEQ, FORALL, AUTO):
            raise ValueError("unknown semantics %r" % self.semantics)
        if not 0 <= self.start_steps <= self.max_steps:
            raise ValueError("need 0 <= start_steps <= max_steps")


def resolve_semantics(task: SasTask, semantics: str) -> str:
    if semantics == AUTO:
        return SEQ if task.has_axioms else FORALL
    if semantics == FORALL and task.has_axioms:
        raise ForallWithAxioms()
    return semantics


@dataclass
class Iteration:
    horizon: int
    status: str
    variables: int = 0
    constraints: int = 0
    nodes: int = 0

    def stats_line(self) -> str:
        return "k=%d status=%s variables=%d constraints=%d nodes=%d" % (
            self.horizon, self.status, self.variables, self.constraints, self.nodes)


@dataclass
class RunResult:
    plan: Optional[Plan]
    semantics: str
    iterations: List[Iteration] = field(default_factory=list)
    report: Optional[PlanReport] = None
    status: str = "none"
    files: List[str] = field(default_factory=list)


def _check(task, plan, semantics) -> PlanReport:
    try:
        return validate_plan(task, plan, semantics)
    except PlanError as exc:
        raise ValidationFailure("decoded plan rejected: %s" % exc) from exc


def _wall_cap() -> Optional[float]:
    env = os.environ.get("AXPLAN_WALL_SECS")
    return float(env) if env else None


def iterative_solve(task: SasTask, config: RunConfig) -> RunResult:
    semantics = resolve_semantics(task, config.semantics)
    result = RunResult(None, semantics)
    if config.backend == "oracle":
        plan = oracle_plan(task, config.max_steps)
        if plan is not None:
            result.plan, result.report, result.status = plan, _check(task, plan, SEQ), "found"
        return result
    if config.backend in ("asp-emit", "ip-emit"):
        return _emit(task, config, semantics, result)

    wall = _wall_cap()
    started = time.monotonic()
    for k in range(config.start_steps, config.max_steps + 1):
        if k == 0:
            # the empty plan needs no model
            ok = goal_holds(task, initial_state(task))
            result.iterations.append(Iteration(0, FEASIBLE if ok else "infeasible"))
            if ok:
                result.plan = Plan()
                result.report = _check(task, result.plan, semantics)
                result.status = "found"
                return result
            continue
        limits = config.limits
        if wall is not None:
            remaining = wall - (time.monotonic() - started)
            if remaining <= 0:
                result.status = LIMIT
                return result
            cap = min(remaining, limits.time_limit) if limits.time_limit else remaining
            limits = SolverConfig(limits.node_limit, cap, limits.branch_order, limits.optimize)
        model = build_state_change_model(task, k, semantics)
        solved = solve(model, limits)
        result.iterations.append(Iteration(k, solved.status, len(model.variables),
                                           len(model.constraints), solved.nodes))
        if solved.status == FEASIBLE:
            plan = decode_assignment(model, solved.assignment)
            result.plan, result.report = plan, _check(task, plan, semantics)
            result.status = "found"
            return result
        if solved.status == LIMIT:
            result.status = LIMIT
            return result
    return result


def _emit(task, config, semantics, result) -> RunResult:
    out = Path(config.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    for k in range(max(config.start_steps, 1 if config.backend == "ip-emit" else 0),
                   config.max_steps + 1):
        if config.backend == "asp-emit":
            text = encode_asp(task, k, semantics).to_text()
            path = out / ("model_k%d.lp" % k)
        else:
            text = write_lp(build_state_change_model(task, k, semantics))
            path = out / ("model_t%d.lp" % k)
        path.write_text(text, encoding="utf-8")
        result.files.append(str(path))
        result.iterations.append(Iteration(k, "written"))
    result.status = "written"
    return result
