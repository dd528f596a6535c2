"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 input or parse error, 3 no plan or
validation failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .goals import goal_from_text
from .household import TASK_TYPES, generate_dataset, household_domain, load_samples, save_samples
from .metrics import evaluate
from .pddl import PDDLError, parse_domain, parse_plan_text, parse_problem, render_goal, validate_plan
from .permissive import PermissiveMap
from .pipeline import PipelineConfig, batch_solve
from .planner import SearchConfig, available_backends, solve
from .templates import (
    augment_domain,
    compile_template,
    expected_fact_count,
    parse_template,
    restrict_problem,
    strip_plan,
)
from .translator import (
    NoisyTranslator,
    OracleTranslator,
    RemoteTranslator,
    load_predictions,
)

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NO_PLAN = 0, 1, 2, 3
REMOTE_URL_ENV = "PLANLINGUA_REMOTE_URL"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise PDDLError(f"{path}: {exc.strerror or exc}") from exc


def _load_domain(path: str | None):
    if path is None:
        return household_domain()
    try:
        return parse_domain(_read(path))
    except PDDLError as exc:
        raise PDDLError(f"{path}: {exc}") from exc


def _load_problem(path: str, domain):
    try:
        return parse_problem(_read(path), domain)
    except PDDLError as exc:
        raise PDDLError(f"{path}: {exc}") from exc


def _emit(args, record: dict, text: str) -> None:
    if getattr(args, "format", "text") == "records":
        print(json.dumps(record, sort_keys=True))
    else:
        print(text)


def cmd_parse(args) -> int:
    domain = None
    status = EXIT_OK
    for path in args.files:
        text = _read(path)
        head = text.lower()
        try:
            if "(:domain" in head or "(problem" in head:
                if domain is None:
                    domain = _load_domain(args.domain)
                problem = parse_problem(text, domain)
                print(f"{path}: ok (problem {problem.name}: {len(problem.objects)} objects, "
                      f"{len(problem.init)} init facts)")
            else:
                d = parse_domain(text)
                domain = d
                print(f"{path}: ok (domain {d.name}: {len(d.actions)} actions, {len(d.predicates)} predicates)")
        except PDDLError as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            status = EXIT_INPUT
    return status


def cmd_plan(args) -> int:
    domain = _load_domain(args.domain)
    problem = _load_problem(args.problem, domain)
    if args.template is not None and args.unconstrained:
        raise UsageError("--template and --unconstrained are mutually exclusive")
    config = SearchConfig("unconstrained" if args.template is None else "constrained", args.budget, args.backend)
    if args.template is not None:
        augmented = augment_domain(domain)
        restricted = restrict_problem(problem, compile_template(parse_template(args.template), domain), augmented,
                                      PermissiveMap() if args.permissive else None)
        result = solve(augmented.domain, restricted, config)
        steps = strip_plan(result.plan, augmented) if result.plan is not None else None
    else:
        result = solve(domain, problem, config)
        steps = result.plan
    record = result.stats.as_record()
    record["plan"] = [str(s) for s in steps] if steps is not None else None
    lines = [s.pddl() for s in steps] if steps is not None else [f"no plan ({result.stats.status})"]
    lines += [f"; {k}={v}" for k, v in result.stats.as_record().items()]
    _emit(args, record, "\n".join(lines))
    return EXIT_OK if steps is not None else EXIT_NO_PLAN


def cmd_compile(args) -> int:
    template = parse_template(args.template)
    constraints = compile_template(template, household_domain() if args.check_domain else None)
    total = len(constraints.init) + len(constraints.goal)
    if args.length_check and total != expected_fact_count(template):
        print(f"fact count {total} != expected {expected_fact_count(template)}", file=sys.stderr)
        return EXIT_INPUT
    record = {"init": constraints.lines(), "goal": constraints.goal_lines(), "length": constraints.length}
    text = "\n".join(constraints.lines() + ["; goal"] + constraints.goal_lines())
    if args.length_check:
        text += f"\n; T={constraints.length} facts={total}"
    _emit(args, record, text)
    return EXIT_OK


def cmd_goal(args) -> int:
    rendered = render_goal(goal_from_text(args.goal))
    _emit(args, {"goal": args.goal, "pddl": rendered}, rendered)
    return EXIT_OK


def cmd_validate(args) -> int:
    domain = _load_domain(args.domain)
    problem = _load_problem(args.problem, domain)
    try:
        plan = parse_plan_text(_read(args.plan))
    except PDDLError as exc:
        raise PDDLError(f"{args.plan}: {exc}") from exc
    result = validate_plan(domain, problem, plan)
    record = {"verdict": result.verdict, "step": result.step,
              "failed": str(result.failed) if result.failed else None, "message": result.message}
    _emit(args, record, f"{result.verdict}: {result.message}")
    return EXIT_OK if result.valid else EXIT_NO_PLAN


def cmd_gen(args) -> int:
    lo, hi = args.min_objects, args.max_objects
    samples = generate_dataset(args.seed, args.n, args.mix, size=(lo, hi))
    if args.out:
        save_samples(args.out, samples)
        print(f"wrote {len(samples)} samples to {args.out}", file=sys.stderr)
    else:
        for s in samples:
            print(json.dumps(s.to_record()))
    return EXIT_OK


def _translator(args, samples):
    if args.translator == "oracle":
        return OracleTranslator(samples)
    if args.translator == "noisy":
        return NoisyTranslator(OracleTranslator(samples), samples, corrupt=args.corrupt, seed=args.seed,
                               beam_width=max(args.B, args.corrupt + 1), targets=("template",))
    url = args.url or os.environ.get(REMOTE_URL_ENV)
    if not url and not args.replay:
        raise UsageError(f"--translator remote needs --url, ${REMOTE_URL_ENV} or --replay")
    return RemoteTranslator(url, timeout=args.timeout, replay=args.replay, record=args.record)


def cmd_solve(args) -> int:
    samples = load_samples(args.samples)
    translator = _translator(args, samples)
    cfg = PipelineConfig(B=args.B, goal_source="original" if args.goal_source == "orig" else "predicted",
                         permissive=args.permissive, search=SearchConfig(budget=args.budget), mode=args.mode)
    run = batch_solve(samples, translator, cfg, jobs=args.jobs)
    pairs = sorted(zip(samples, run.outcomes), key=lambda p: p[0].id)
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for sample, outcome in pairs:
            out.write(json.dumps(outcome.to_record(sample)) + "\n")
    finally:
        if args.out:
            out.close()
    counts = run.counts
    print(f"{run.metric_name}={run.valid_ratio:.4f} " + " ".join(f"{k}={v}" for k, v in counts.items()),
          file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    samples = load_samples(args.samples)
    predictions = load_predictions(args.predictions)
    pmap = PermissiveMap.load(args.permissive_map) if args.permissive_map else PermissiveMap()
    cfg = PipelineConfig(B=args.B, permissive=args.permissive, permissive_map=pmap,
                         search=SearchConfig(budget=args.budget))
    report = evaluate(samples, predictions, pmap, plans=not args.no_plans, pipeline_cfg=cfg, jobs=args.jobs)
    _emit(args, report.values(), report.table())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="planlingua", description="Language directives to validated household plans.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def fmt(sp):
        sp.add_argument("--format", choices=("text", "records"), default="text",
                        help="records = one JSON object per line")

    sp = sub.add_parser("parse", help="parse PDDL files and report diagnostics")
    sp.add_argument("files", nargs="+")
    sp.add_argument("--domain", help="domain for problem files (default: household)")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("plan", help="plan for a problem, optionally under a template")
    sp.add_argument("--domain", help="domain file (default: household)")
    sp.add_argument("--problem", required=True)
    sp.add_argument("--template")
    sp.add_argument("--unconstrained", action="store_true")
    sp.add_argument("--permissive", action="store_true")
    sp.add_argument("--budget", type=int, default=SearchConfig().budget)
    sp.add_argument("--backend", choices=available_backends())
    fmt(sp)
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("compile", help="print the constraint facts for a template")
    sp.add_argument("--template", required=True)
    sp.add_argument("--length-check", action="store_true", help="also check and print the fact count")
    sp.add_argument("--check-domain", action="store_true", help="validate actions against the household domain")
    fmt(sp)
    sp.set_defaults(func=cmd_compile)

    sp = sub.add_parser("goal", help="print the existential PDDL goal for a goal list")
    sp.add_argument("--goal", required=True)
    fmt(sp)
    sp.set_defaults(func=cmd_goal)

    sp = sub.add_parser("validate", help="check a plan against a problem")
    sp.add_argument("--domain", help="domain file (default: household)")
    sp.add_argument("--problem", required=True)
    sp.add_argument("--plan", required=True)
    fmt(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("gen", help="generate a synthetic sample file")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--n", type=int, default=200)
    sp.add_argument("--mix", help=f"task types with optional weights, e.g. 'pick_and_place:2,heat_and_place'; "
                                  f"types: {', '.join(TASK_TYPES)}")
    sp.add_argument("--min-objects", type=int, default=6)
    sp.add_argument("--max-objects", type=int, default=12)
    sp.add_argument("--out", help="output file (default: stdout)")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("solve", help="run the candidate loop over a sample file")
    sp.add_argument("--samples", required=True)
    sp.add_argument("--translator", choices=("oracle", "noisy", "remote"), default="oracle")
    sp.add_argument("--B", type=int, default=5)
    sp.add_argument("--goal-source", choices=("pred", "orig"), default="pred")
    sp.add_argument("--mode", choices=("task", "relations", "task+relations"), default="task+relations")
    sp.add_argument("--permissive", action="store_true")
    sp.add_argument("--corrupt", type=int, default=1, help="noisy: corrupted leading ranks")
    sp.add_argument("--seed", type=int, default=0, help="noisy: corruption seed")
    sp.add_argument("--url", help=f"remote: service URL (or ${REMOTE_URL_ENV})")
    sp.add_argument("--replay", help="remote: replay file")
    sp.add_argument("--record", action="store_true", help="remote: store live replies in the replay file")
    sp.add_argument("--timeout", type=float, default=10.0)
    sp.add_argument("--budget", type=int, default=SearchConfig().budget)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out", help="outcome report file (default: stdout)")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("eval", help="score a predictions file")
    sp.add_argument("--samples", required=True)
    sp.add_argument("--predictions", required=True)
    sp.add_argument("--permissive-map", help='JSON file {"classes": [["knife", "butter_knife"], ...]}')
    sp.add_argument("--permissive", action="store_true", help="also use the map when planning")
    sp.add_argument("--no-plans", action="store_true", help="skip the valid-plan columns")
    sp.add_argument("--B", type=int, default=5)
    sp.add_argument("--budget", type=int, default=SearchConfig().budget)
    sp.add_argument("--jobs", type=int, default=1)
    fmt(sp)
    sp.set_defaults(func=cmd_eval)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (PDDLError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
