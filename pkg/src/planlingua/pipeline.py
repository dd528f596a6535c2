"""Consistency-checking loop: try template candidates in rank order until one
yields a plan, up to a bound B."""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .goals import goal_from_text
from .household import Sample, Scene, build_problem, household_domain
from .pddl import Domain, GoalFormula, PDDLError, format_plan, validate_plan
from .permissive import PermissiveMap
from .planner import SearchConfig, SearchStats, solve
from .templates import AugmentedDomain, augment_domain, compile_template, parse_template, restrict_problem, strip_plan
from .translator import Directive, Translator, TranslatorError

GOAL_SOURCES = ("predicted", "original")
STATUSES = ("solved", "exhausted", "no-candidates", "error")


@dataclass(frozen=True)
class PipelineConfig:
    B: int = 5
    goal_source: str = "predicted"
    permissive: bool = False
    permissive_map: PermissiveMap | None = None
    search: SearchConfig = field(default_factory=SearchConfig)
    mode: str = "task+relations"

    def __post_init__(self):
        if self.B < 1:
            raise ValueError("B must be at least 1")
        if self.goal_source not in GOAL_SOURCES:
            raise ValueError(f"goal_source must be one of {GOAL_SOURCES}")

    def pmap(self) -> PermissiveMap | None:
        if not self.permissive:
            return None
        return self.permissive_map or PermissiveMap()


@dataclass
class Attempt:
    rank: int
    template: str
    status: str  # solved | no-plan | budget | malformed
    message: str = ""
    stats: SearchStats | None = None


@dataclass
class PipelineOutcome:
    status: str
    rank: int | None = None
    plan: tuple | None = None
    attempts: list[Attempt] = field(default_factory=list)
    goal: str | None = None
    goal_source: str = "predicted"
    message: str = ""

    @property
    def solved(self) -> bool:
        return self.status == "solved"

    @property
    def n_attempts(self) -> int:
        return len(self.attempts)

    @property
    def nodes_expanded(self) -> int:
        return sum(a.stats.expanded for a in self.attempts if a.stats is not None)

    def to_record(self, sample: Sample | None = None) -> dict:
        rec = sample.to_record() if sample is not None else {}
        rec.update({
            "status": self.status,
            "rank": self.rank,
            "attempts": self.n_attempts,
            "plan": format_plan(self.plan) if self.plan is not None else None,
            "nodes_expanded": self.nodes_expanded,
            "goal_source": self.goal_source,
            "goal_used": self.goal,
        })
        if self.message:
            rec["message"] = self.message
        return rec


@lru_cache(maxsize=4)
def _augment(domain: Domain) -> AugmentedDomain:
    return augment_domain(domain)


def solve_directive(d: Directive, scene: Scene, translator: Translator, cfg: PipelineConfig = PipelineConfig(),
                    original_goal: GoalFormula | str | None = None, domain: Domain | None = None) -> PipelineOutcome:
    domain = domain or household_domain()
    augmented = _augment(domain)
    try:
        templates = translator.translate_template(d, cfg.B)
    except TranslatorError as exc:
        return PipelineOutcome("no-candidates", goal_source=cfg.goal_source, message=str(exc))

    if cfg.goal_source == "original":
        if original_goal is None:
            raise ValueError("goal_source='original' needs the original goal")
        goal_text = original_goal if isinstance(original_goal, str) else None
    else:
        try:
            goals = translator.translate_goal(d, cfg.B)
        except TranslatorError as exc:
            return PipelineOutcome("no-candidates", goal_source=cfg.goal_source, message=str(exc))
        if not goals:
            return PipelineOutcome("no-candidates", goal_source=cfg.goal_source, message="no goal candidate")
        goal_text = goals[0]
    try:
        goal = goal_from_text(goal_text) if goal_text is not None else original_goal
    except PDDLError as exc:
        return PipelineOutcome("no-candidates", goal=goal_text, goal_source=cfg.goal_source,
                               message=f"unusable goal: {exc}")
    if not templates:
        return PipelineOutcome("no-candidates", goal=goal_text, goal_source=cfg.goal_source,
                               message="no template candidates")

    problem = build_problem(scene, goal, name=d.sample_id or "task", domain=domain)
    pmap = cfg.pmap()
    attempts: list[Attempt] = []
    for rank, text in enumerate(templates[:cfg.B]):
        try:
            template = parse_template(text)
            constraints = compile_template(template, domain)
            restricted = restrict_problem(problem, constraints, augmented, pmap)
        except PDDLError as exc:
            attempts.append(Attempt(rank, text, "malformed", str(exc)))
            continue
        result = solve(augmented.domain, restricted, cfg.search)
        if result.plan is None:
            status = "budget" if result.stats.status == "budget" else "no-plan"
            attempts.append(Attempt(rank, text, status, stats=result.stats))
            continue
        plan = strip_plan(result.plan, augmented)
        check = validate_plan(domain, problem, plan)
        if not check.valid:  # would mean the constrained encoding is unsound
            raise AssertionError(f"planner returned an invalid plan: {check.message}")
        attempts.append(Attempt(rank, text, "solved", stats=result.stats))
        return PipelineOutcome("solved", rank, plan, attempts, goal_text, cfg.goal_source)
    return PipelineOutcome("exhausted", None, None, attempts, goal_text, cfg.goal_source)


def solve_sample(sample: Sample, translator: Translator, cfg: PipelineConfig = PipelineConfig()) -> PipelineOutcome:
    """One sample with per-sample fault isolation."""
    try:
        return solve_directive(Directive.from_sample(sample, cfg.mode), sample.scene, translator, cfg,
                               original_goal=sample.gold_goal)
    except Exception as exc:  # noqa: BLE001 - one bad sample must not abort a batch
        return PipelineOutcome("error", goal_source=cfg.goal_source, message=f"{type(exc).__name__}: {exc}")


@dataclass
class BatchResult:
    outcomes: list[PipelineOutcome]
    goal_source: str

    @property
    def counts(self) -> dict[str, int]:
        out = {s: 0 for s in STATUSES}
        for o in self.outcomes:
            out[o.status] += 1
        return out

    @property
    def valid_ratio(self) -> float:
        return self.counts["solved"] / len(self.outcomes) if self.outcomes else 0.0

    @property
    def metric_name(self) -> str:
        return "valid_plans_orig_goal" if self.goal_source == "original" else "valid_plans_pred_goal"


def _solve_job(args):
    sample, translator, cfg = args
    return solve_sample(sample, translator, cfg)


def batch_solve(samples: Sequence[Sample], translator: Translator, cfg: PipelineConfig = PipelineConfig(),
                jobs: int = 1) -> BatchResult:
    """Outcomes in input order; ``jobs > 1`` spreads samples over processes."""
    if jobs <= 1 or len(samples) <= 1:
        outcomes = [solve_sample(s, translator, cfg) for s in samples]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_solve_job, [(s, translator, cfg) for s in samples], chunksize=4))
    return BatchResult(outcomes, cfg.goal_source)


def plan_ratios(samples: Sequence[Sample], translator: Translator, cfg: PipelineConfig = PipelineConfig(),
                jobs: int = 1) -> dict[str, BatchResult]:
    """Run once per goal source; keys are the metric names."""
    out = {}
    for source in GOAL_SOURCES:
        run = batch_solve(samples, translator, _with_source(cfg, source), jobs)
        out[run.metric_name] = run
    return out


def _with_source(cfg: PipelineConfig, source: str) -> PipelineConfig:
    return PipelineConfig(cfg.B, source, cfg.permissive, cfg.permissive_map, cfg.search, cfg.mode)
