"""Natural-language household directives to validated symbolic plans."""

__version__ = "0.1.0"

from .goals import GoalEntry, GoalPredicateList, compile_goal, goal_from_text, parse_goal_text, render_goal
from .permissive import PermissiveMap
from .templates import (
    PlanTemplate,
    TemplateStep,
    augment_domain,
    compile_template,
    parse_template,
    restrict_problem,
    strip_plan,
)

__all__ = [
    "GoalEntry",
    "GoalPredicateList",
    "PermissiveMap",
    "PlanTemplate",
    "TemplateStep",
    "__version__",
    "augment_domain",
    "compile_goal",
    "compile_template",
    "goal_from_text",
    "parse_goal_text",
    "parse_template",
    "render_goal",
    "restrict_problem",
    "strip_plan",
]
