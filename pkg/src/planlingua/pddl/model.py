"""Typed-STRIPS data model.

Everything here is immutable. Facts are plain tuples ``(predicate, arg, ...)``
so states are ``frozenset``s of tuples and can be hashed, compared and shared
freely between threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

from .errors import PDDLError, UndeclaredTypeError

ROOT_TYPE = "object"

Fact = tuple  # ("on", "apple_1", "table_1")
State = frozenset  # frozenset[Fact]

_IDENTIFIER = re.compile(r"[a-z][a-z0-9_-]*\Z")


def normalize_name(name: str) -> str:
    """Lowercase an identifier and check it is a legal PDDL name."""
    norm = name.strip().lower()
    if not _IDENTIFIER.match(norm):
        raise PDDLError(f"illegal identifier {name!r}")
    return norm


def is_variable(term: str) -> bool:
    return term.startswith("?")


@dataclass(frozen=True)
class Literal:
    predicate: str
    args: tuple[str, ...] = ()
    positive: bool = True

    @property
    def fact(self) -> Fact:
        return (self.predicate, *self.args)

    def variables(self) -> tuple[str, ...]:
        return tuple(a for a in self.args if is_variable(a))

    def ground(self, binding: Mapping[str, str]) -> "Literal":
        return Literal(self.predicate, tuple(binding.get(a, a) for a in self.args), self.positive)

    def negate(self) -> "Literal":
        return Literal(self.predicate, self.args, not self.positive)

    def __str__(self) -> str:
        atom = "(" + " ".join((self.predicate, *self.args)) + ")"
        return atom if self.positive else f"(not {atom})"


@dataclass(frozen=True)
class ConditionalEffect:
    """``(forall (?var - type) (when condition effect))`` with one literal each."""

    variable: str
    type: str
    condition: Literal
    effect: Literal


Effect = Union[Literal, ConditionalEffect]


@dataclass(frozen=True)
class ActionSchema:
    name: str
    parameters: tuple[tuple[str, str], ...] = ()
    precondition: tuple[Literal, ...] = ()
    effects: tuple[Effect, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.parameters)


class TypeHierarchy:
    """Parent map over type names, rooted at ``object``."""

    def __init__(self, declarations: Iterable[tuple[str, str]] = ()):
        self._parent: dict[str, str] = {}
        for child, parent in declarations:
            if child == ROOT_TYPE:
                continue
            self._parent[child] = parent
        for child in list(self._parent):
            seen = {child}
            node = child
            while node != ROOT_TYPE:
                parent = self._parent.get(node)
                if parent is None:
                    if node != child:
                        # parent mentioned but never declared itself: hang it off the root
                        self._parent[node] = ROOT_TYPE
                        break
                    raise UndeclaredTypeError(node)
                if parent in seen:
                    raise PDDLError(f"type hierarchy has a cycle through '{parent}'")
                seen.add(parent)
                node = parent

    def __contains__(self, type_name: str) -> bool:
        return type_name == ROOT_TYPE or type_name in self._parent

    def parent(self, type_name: str) -> str | None:
        return self._parent.get(type_name)

    def ancestors(self, type_name: str) -> list[str]:
        """``type_name`` followed by its ancestors up to ``object``."""
        chain = [type_name]
        while chain[-1] != ROOT_TYPE and chain[-1] in self._parent:
            chain.append(self._parent[chain[-1]])
        return chain

    def is_subtype(self, type_name: str, ancestor: str) -> bool:
        return ancestor in self.ancestors(type_name)

    def types(self) -> list[str]:
        return list(self._parent)

    def leaves(self) -> list[str]:
        parents = set(self._parent.values())
        return [t for t in self._parent if t not in parents]


@dataclass(frozen=True)
class Domain:
    name: str
    requirements: tuple[str, ...] = ()
    types: tuple[tuple[str, str], ...] = ()
    predicates: tuple[tuple[str, tuple[tuple[str, str], ...]], ...] = ()
    constants: tuple[tuple[str, str], ...] = ()
    actions: tuple[ActionSchema, ...] = ()

    def __post_init__(self) -> None:
        names = [a.name for a in self.actions]
        if len(set(names)) != len(names):
            raise PDDLError(f"duplicate action names in domain '{self.name}'")
        preds = [p for p, _ in self.predicates]
        if len(set(preds)) != len(preds):
            raise PDDLError(f"duplicate predicate names in domain '{self.name}'")

    @cached_property
    def hierarchy(self) -> TypeHierarchy:
        return TypeHierarchy(self.types)

    @cached_property
    def signatures(self) -> dict[str, tuple[tuple[str, str], ...]]:
        return dict(self.predicates)

    @cached_property
    def _actions_by_name(self) -> dict[str, ActionSchema]:
        return {a.name: a for a in self.actions}

    def action(self, name: str) -> ActionSchema:
        try:
            return self._actions_by_name[name]
        except KeyError:
            raise PDDLError(f"domain '{self.name}' has no action '{name}'") from None

    def has_action(self, name: str) -> bool:
        return name in self._actions_by_name

    def arity(self, predicate: str) -> int:
        return len(self.signatures[predicate])

    def static_predicates(self) -> set[str]:
        """Predicates that no action ever adds or deletes."""
        touched = set()
        for schema in self.actions:
            for eff in schema.effects:
                lit = eff if isinstance(eff, Literal) else eff.effect
                touched.add(lit.predicate)
        return {p for p, _ in self.predicates if p not in touched}


@dataclass(frozen=True)
class And:
    parts: tuple["GoalFormula", ...] = ()


@dataclass(frozen=True)
class Exists:
    variables: tuple[tuple[str, str], ...]
    body: tuple[Literal, ...]
    distinct: tuple[tuple[str, str], ...] = ()


GoalFormula = Union[And, Exists, Literal]


def goal_literals(goal: GoalFormula) -> list[Literal]:
    if isinstance(goal, Literal):
        return [goal]
    if isinstance(goal, And):
        return [lit for part in goal.parts for lit in goal_literals(part)]
    return list(goal.body)


def is_positive_goal(goal: GoalFormula) -> bool:
    return all(lit.positive for lit in goal_literals(goal))


class ObjectIndex:
    """Typed object inventory: who exists and which objects fit a type."""

    def __init__(self, objects: Iterable[tuple[str, str]], hierarchy: TypeHierarchy):
        self.hierarchy = hierarchy
        self._type_of: dict[str, str] = {}
        for name, type_name in objects:
            self._type_of[name] = type_name
        self._cache: dict[str, tuple[str, ...]] = {}

    def __contains__(self, name: str) -> bool:
        return name in self._type_of

    def __iter__(self):
        return iter(self._type_of)

    def type_of(self, name: str) -> str:
        return self._type_of[name]

    def of_type(self, type_name: str) -> tuple[str, ...]:
        """Objects whose type is ``type_name`` or a subtype, sorted by name."""
        hit = self._cache.get(type_name)
        if hit is None:
            hit = tuple(sorted(n for n, t in self._type_of.items()
                               if self.hierarchy.is_subtype(t, type_name)))
            self._cache[type_name] = hit
        return hit

    def items(self):
        return self._type_of.items()


@dataclass(frozen=True)
class Problem:
    name: str
    domain_name: str
    objects: tuple[tuple[str, str], ...] = ()
    init: frozenset = frozenset()
    goal: GoalFormula = And()

    def index(self, domain: Domain) -> ObjectIndex:
        return ObjectIndex((*domain.constants, *self.objects), domain.hierarchy)


class ActionCall(NamedTuple):
    """One plan step: an action name applied to object names."""

    name: str
    args: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.name}({','.join(self.args)})"

    def pddl(self) -> str:
        return "(" + " ".join((self.name, *self.args)) + ")"


Plan = tuple  # tuple[ActionCall, ...]


def format_plan(plan: Sequence[ActionCall]) -> str:
    return ";".join(str(step) for step in plan)


_CALL = re.compile(r"^\s*([A-Za-z][\w-]*)\s*\(([^()]*)\)\s*$")


def parse_action_call(text: str) -> ActionCall:
    """Accepts ``name(a,b)`` or ``(name a b)``."""
    text = text.strip()
    m = _CALL.match(text)
    if m:
        args = tuple(a.strip().lower() for a in m.group(2).split(",") if a.strip())
        return ActionCall(m.group(1).lower(), args)
    if text.startswith("(") and text.endswith(")"):
        tokens = text[1:-1].split()
        if tokens:
            return ActionCall(tokens[0].lower(), tuple(t.lower() for t in tokens[1:]))
    raise PDDLError(f"cannot read plan step {text!r}")


def parse_plan_text(text: str) -> tuple[ActionCall, ...]:
    """Plan text: one step per line or ``;``-separated; ``;;`` line comments allowed."""
    steps = []
    for line in text.splitlines():
        line = line.split(";;")[0].strip()
        if not line:
            continue
        if line.startswith("("):
            line = line.split(";")[0].strip()
            if line:
                steps.append(parse_action_call(line))
            continue
        for chunk in line.split(";"):
            if chunk.strip():
                steps.append(parse_action_call(chunk))
    return tuple(steps)


@dataclass(frozen=True)
class GroundAction:
    name: str
    args: tuple[str, ...]
    pre_pos: frozenset = frozenset()
    pre_neg: frozenset = frozenset()
    add: frozenset = frozenset()
    delete: frozenset = frozenset()
    # (condition fact, effect fact, effect is an add)
    conditional: tuple[tuple[Fact, Fact, bool], ...] = ()

    @property
    def call(self) -> ActionCall:
        return ActionCall(self.name, self.args)

    def __str__(self) -> str:
        return self.call.pddl()


@dataclass(frozen=True)
class ValidationResult:
    """Outcome of replaying a plan. ``step`` is 1-based, VAL style."""

    verdict: str  # valid | inapplicable | goal-unsatisfied | invalid-action
    final_state: frozenset
    step: int | None = None
    failed: Literal | None = None
    message: str = ""

    @property
    def valid(self) -> bool:
        return self.verdict == "valid"
