"""Typed STRIPS: data model, PDDL reader/writer and execution semantics."""

from .errors import (
    ArityError,
    InapplicableActionError,
    PDDLError,
    PDDLSyntaxError,
    UndeclaredPredicateError,
    UndeclaredTypeError,
    UnknownObjectError,
)
from .model import (
    ROOT_TYPE,
    ActionCall,
    ActionSchema,
    And,
    ConditionalEffect,
    Domain,
    Exists,
    GoalFormula,
    GroundAction,
    Literal,
    ObjectIndex,
    Problem,
    TypeHierarchy,
    ValidationResult,
    format_plan,
    goal_literals,
    is_positive_goal,
    normalize_name,
    parse_action_call,
    parse_plan_text,
)
from .parser import parse_domain, parse_goal, parse_problem
from .semantics import (
    apply,
    failed_precondition,
    ground_call,
    ground_schema,
    instantiate,
    is_applicable,
    satisfies_goal,
    validate_plan,
)
from .writer import render_goal, serialize, serialize_domain, serialize_problem

__all__ = [name for name in dir() if not name.startswith("_")]
