"""Command-line interface: validate, plan, encode, oracle and stats."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .asp import encode_asp, templated_text
from .driver import AUTO, RunConfig, iterative_solve, resolve_semantics
from .errors import (AxplanError, ConditionalEffectsUnsupported, ForallWithAxioms, GoalUnsatisfied,
                     PlanError, ValidationFailure)
from .ip import build_state_change_model, write_lp
from .logic import dependency_graph
from .mip import INDEX, MOST_CONSTRAINED, SolverConfig
from .sas import read_sas
from .semantics import FORALL, SEQ, format_plan, oracle_plan, parse_plan, validate_plan

EXIT_OK, EXIT_NO_PLAN, EXIT_INPUT = 0, 1, 2


class _InputError(Exception):
    pass


def _load(path):
    try:
        return read_sas(path)
    except OSError as exc:
        raise _InputError("cannot read %s: %s" % (path, exc.strerror or exc)) from exc


def _write(text, path, out):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        out.write(text)


def _report_lines(report):
    return ["; makespan=%d" % report.makespan, "; length=%d" % report.length,
            "; cost=%d" % report.cost]


def cmd_validate(args, out):
    task = _load(args.task)
    try:
        text = Path(args.plan).read_text(encoding="utf-8")
    except OSError as exc:
        raise _InputError("cannot read %s: %s" % (args.plan, exc.strerror or exc)) from exc
    semantics = resolve_semantics(task, args.semantics)
    plan = parse_plan(task, text)
    try:
        report = validate_plan(task, plan, semantics)
    except PlanError as exc:
        out.write("invalid: %s: %s\n" % (type(exc).__name__, exc))
        return EXIT_NO_PLAN
    out.write("valid makespan=%d length=%d cost=%d\n" % (report.makespan, report.length, report.cost))
    return EXIT_OK


def cmd_plan(args, out):
    task = _load(args.task)
    limits = SolverConfig(node_limit=args.node_limit, time_limit=args.time_limit,
                          branch_order=args.branch_order)
    config = RunConfig(backend=args.backend, semantics=args.semantics, max_steps=args.max_steps,
                       start_steps=args.start_steps, limits=limits)
    result = iterative_solve(task, config)
    if result.plan is not None:
        _write(format_plan(task, result.plan), args.output, out)
    if args.stats:
        lines = ["; backend=%s" % args.backend, "; semantics=%s" % result.semantics]
        lines += ["; " + it.stats_line() for it in result.iterations]
        lines.append("; result=%s" % result.status)
        if result.report is not None:
            lines += _report_lines(result.report)
        out.write("".join(line + "\n" for line in lines))
    if result.plan is None:
        sys.stderr.write("no plan found within %d steps (%s)\n" % (args.max_steps, result.status))
        return EXIT_NO_PLAN
    return EXIT_OK


def cmd_encode(args, out):
    task = _load(args.task)
    semantics = resolve_semantics(task, args.semantics)
    if args.backend == "asp":
        if args.template:
            text = templated_text(task, args.steps, semantics, args.literal_conditions)
        else:
            program = encode_asp(task, args.steps, semantics, args.literal_conditions)
            text = program.to_text()
            if args.name_map:
                Path(args.name_map).write_text(program.name_map_text(), encoding="utf-8")
    else:
        if args.steps < 1:
            raise _InputError("the IP model needs --steps >= 1")
        model = build_state_change_model(task, args.steps, semantics,
                                         objective=args.objective == "cost")
        text = write_lp(model)
    _write(text, args.output, out)
    return EXIT_OK


def cmd_oracle(args, out):
    task = _load(args.task)
    plan = oracle_plan(task, args.max_steps)
    if plan is None:
        sys.stderr.write("no plan within %d steps\n" % args.max_steps)
        return EXIT_NO_PLAN
    out.write(format_plan(task, plan))
    if args.stats:
        out.write("".join(line + "\n" for line in _report_lines(validate_plan(task, plan))))
    return EXIT_OK


def cmd_stats(args, out):
    task = _load(args.task)
    lines = [
        ("variables", len(task.variables)),
        ("primary", len(task.primary_vars)),
        ("derived", len(task.derived_vars)),
        ("fluents", sum(v.domain_size for v in task.primary_vars)),
        ("operators", len(task.operators)),
        ("axioms", len(task.axioms)),
        ("mutex_groups", len(task.mutex_groups)),
        ("conditional_effects", int(task.has_conditional_effects)),
        ("goal", len(task.goal)),
    ]
    if task.has_axioms:
        graph = dependency_graph(task.axiom_program)
        lines.append(("strata", len(set(task.axiom_stratification.level.values()))))
        lines.append(("largest_scc", max(len(c) for c in graph.components)))
    out.write("".join("%s=%s\n" % kv for kv in lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="axplan", description="Planning with axioms via ASP and IP encodings.")
    sub = parser.add_subparsers(dest="command", required=True)
    semantics = dict(choices=(SEQ, FORALL, AUTO), default=AUTO,
                     help="step semantics; auto picks seq when axioms are present")

    p = sub.add_parser("validate", help="check a plan against a task")
    p.add_argument("task")
    p.add_argument("plan")
    p.add_argument("--semantics", **semantics)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("plan", help="iterative horizon search")
    p.add_argument("task")
    p.add_argument("--backend", choices=("ip", "oracle"), default="ip")
    p.add_argument("--max-steps", type=int, default=10)
    p.add_argument("--start-steps", type=int, default=0)
    p.add_argument("--semantics", **semantics)
    p.add_argument("--node-limit", type=int)
    p.add_argument("--time-limit", type=float, help="seconds per iteration")
    p.add_argument("--branch-order", choices=(INDEX, MOST_CONSTRAINED), default=INDEX)
    p.add_argument("--stats", action="store_true", help="print per-iteration key=value lines")
    p.add_argument("-o", "--output", help="write the plan here instead of stdout")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("encode", help="write the ASP program or LP model for one horizon")
    p.add_argument("task")
    p.add_argument("--backend", choices=("asp", "ip"), required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--semantics", **semantics)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--template", action="store_true", help="first-order ASP text for a grounder")
    mode.add_argument("--ground", action="store_true", help="fully ground ASP text (default)")
    p.add_argument("--literal-conditions", action="store_true",
                   help="read effect conditions in the same layer as the effect")
    p.add_argument("--objective", choices=("none", "cost"), default="none")
    p.add_argument("--name-map", help="write the ground atom name map here")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("oracle", help="breadth-first reference planner")
    p.add_argument("task")
    p.add_argument("--max-steps", type=int, default=10)
    p.add_argument("--stats", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("stats", help="task summary")
    p.add_argument("task")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("max_steps", "start_steps", "steps", "node_limit"):
        value = getattr(args, name, None)
        if value is not None and value < 0:
            parser.error("--%s must not be negative" % name.replace("_", "-"))
    try:
        return args.func(args, out)
    except ValidationFailure:
        raise
    except GoalUnsatisfied as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_NO_PLAN
    except (_InputError, ForallWithAxioms, ConditionalEffectsUnsupported, AxplanError, ValueError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
