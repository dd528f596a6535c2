"""Search front end: backend selection, configuration and statistics."""

from __future__ import annotations

import os
import time
from dataclasses import asdict, dataclass, field

from ..pddl import ActionCall, satisfies_goal
from . import _kernel_py
from .grounding import GroundTask, ground

try:  # compiled kernel is optional; the pure-Python one has the same API
    from . import _kernel as _kernel_cy
except ImportError:  # pragma: no cover - depends on the build
    _kernel_cy = None

PURE_PYTHON_ENV = "PLANLINGUA_PURE_PYTHON"
DEFAULT_BUDGET = 1_000_000
MODES = ("constrained", "unconstrained")


def available_backends() -> list[str]:
    return ["cython", "python"] if _kernel_cy is not None else ["python"]


def default_backend() -> str:
    if _kernel_cy is None or os.environ.get(PURE_PYTHON_ENV, "") not in ("", "0"):
        return "python"
    return "cython"


def kernel(name: str | None = None):
    name = name or default_backend()
    if name == "python":
        return _kernel_py
    if name == "cython":
        if _kernel_cy is None:
            raise RuntimeError("compiled kernel not built; reinstall with Cython available")
        return _kernel_cy
    raise ValueError(f"unknown backend {name!r}")


@dataclass(frozen=True)
class SearchConfig:
    mode: str = "constrained"
    budget: int = DEFAULT_BUDGET
    backend: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.budget <= 0:
            raise ValueError("node budget must be positive")


@dataclass
class SearchStats:
    mode: str
    status: str  # solved | unsolvable | budget
    expanded: int = 0
    generated: int = 0
    wall_time: float = 0.0
    backend: str = ""
    plan_length: int | None = None
    ground_actions: int = 0
    facts: int = 0

    @property
    def found(self) -> bool:
        return self.status == "solved"

    def as_record(self) -> dict:
        rec = asdict(self)
        rec["found"] = self.found
        return rec

    def to_text(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in self.as_record().items())


@dataclass
class SearchResult:
    plan: tuple[ActionCall, ...] | None
    stats: SearchStats = field(default=None)

    @property
    def found(self) -> bool:
        return self.plan is not None


def plan(task: GroundTask, config: SearchConfig = SearchConfig()) -> SearchResult:
    """Constrained: depth-first, successors in (name, args) order, first plan found.
    Unconstrained: breadth-first to the first goal state.
    """
    backend = config.backend or default_backend()
    k = kernel(backend)
    ct = task.compiled
    start = time.perf_counter()
    stats = SearchStats(config.mode, "unsolvable", backend=backend,
                        ground_actions=len(task.actions), facts=task.n_facts)
    if satisfies_goal(frozenset(task.problem.init), task.problem.goal, task.index):
        stats.status, stats.generated, stats.plan_length = "solved", 1, 0
        steps: tuple[ActionCall, ...] | None = ()
    elif ct.unsatisfiable_goal:
        stats.generated = 1
        steps = None
    else:
        mode = _kernel_py.CONSTRAINED if config.mode == "constrained" else _kernel_py.UNCONSTRAINED
        status, path, stats.expanded, stats.generated = k.search(ct, mode, config.budget)
        stats.status = status
        steps = None
        if path is not None:
            steps = tuple(task.actions[ct.action_map[i]].call for i in path)
            stats.plan_length = len(steps)
    stats.wall_time = time.perf_counter() - start
    return SearchResult(steps, stats)


def solve(domain, problem, config: SearchConfig = SearchConfig(), *, prune_static: bool = True) -> SearchResult:
    return plan(ground(domain, problem, prune_static=prune_static), config)


def compare_search(domain, problem, template, *, budget: int = DEFAULT_BUDGET, backend: str | None = None,
                   augmented=None, permissive=None) -> tuple[SearchStats, SearchStats]:
    """Constrained search on the template-restricted problem vs. unconstrained on the original."""
    from ..templates import augment_domain, constrain

    augmented = augmented or augment_domain(domain)
    restricted = constrain(problem, template, augmented, permissive)
    con = solve(augmented.domain, restricted, SearchConfig("constrained", budget, backend))
    unc = solve(domain, problem, SearchConfig("unconstrained", budget, backend))
    return con.stats, unc.stats
