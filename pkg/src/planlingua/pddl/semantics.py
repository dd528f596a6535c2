"""Set-based reference semantics: apply, goal checks, plan validation.

These functions favour clarity over speed; the planner compiles tasks to
bitsets and is checked against the functions here.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import InapplicableActionError, PDDLError
from .model import (
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
    ValidationResult,
)


def instantiate(schema: ActionSchema, args: Sequence[str], index: ObjectIndex) -> GroundAction:
    """Ground ``schema`` with ``args``; argument types are checked against ``index``."""
    if len(args) != len(schema.parameters):
        raise PDDLError(f"{schema.name} takes {len(schema.parameters)} argument(s), got {len(args)}")
    binding = {}
    for (var, type_name), obj in zip(schema.parameters, args):
        if obj not in index:
            raise PDDLError(f"unknown object '{obj}' in {schema.name}")
        if not index.hierarchy.is_subtype(index.type_of(obj), type_name):
            raise PDDLError(f"'{obj}' is not a {type_name} (parameter {var} of {schema.name})")
        binding[var] = obj
    return _ground(schema, tuple(args), binding, index)


def _ground(schema: ActionSchema, args: tuple, binding: dict, index: ObjectIndex) -> GroundAction:
    pre_pos, pre_neg = set(), set()
    for lit in schema.precondition:
        fact = lit.ground(binding).fact
        (pre_pos if lit.positive else pre_neg).add(fact)
    add, delete, conditional = set(), set(), []
    for eff in schema.effects:
        if isinstance(eff, ConditionalEffect):
            for obj in index.of_type(eff.type):
                inner = {**binding, eff.variable: obj}
                cond = eff.condition.ground(inner).fact
                out = eff.effect.ground(inner)
                conditional.append((cond, out.fact, out.positive))
        else:
            lit = eff.ground(binding)
            (add if lit.positive else delete).add(lit.fact)
    return GroundAction(schema.name, args, frozenset(pre_pos), frozenset(pre_neg),
                        frozenset(add), frozenset(delete), tuple(conditional))


def ground_schema(schema: ActionSchema, args: Sequence[str], index: ObjectIndex) -> GroundAction:
    """Ground without type checks; callers guarantee ``args`` fit the parameters."""
    args = tuple(args)
    return _ground(schema, args, dict(zip((v for v, _ in schema.parameters), args)), index)


def ground_call(domain: Domain, problem: Problem, call: ActionCall) -> GroundAction:
    return instantiate(domain.action(call.name), call.args, problem.index(domain))


def failed_precondition(state: frozenset, action: GroundAction) -> Literal | None:
    for fact in sorted(action.pre_pos):
        if fact not in state:
            return Literal(fact[0], fact[1:], True)
    for fact in sorted(action.pre_neg):
        if fact in state:
            return Literal(fact[0], fact[1:], False)
    return None


def is_applicable(state: frozenset, action: GroundAction) -> bool:
    return action.pre_pos <= state and not (action.pre_neg & state)


def apply(state: frozenset, action: GroundAction) -> frozenset:
    """Successor state: deletes first, then adds.

    Conditional effects are tested against the input state and merged with the
    unconditional ones under the same delete-before-add rule.
    """
    missing = failed_precondition(state, action)
    if missing is not None:
        raise InapplicableActionError(str(action), str(missing))
    add, delete = set(action.add), set(action.delete)
    for cond, fact, positive in action.conditional:
        if cond in state:
            (add if positive else delete).add(fact)
    return frozenset((state - delete) | add)


def _holds(lit: Literal, state: frozenset, binding: dict) -> bool:
    fact = (lit.predicate, *(binding.get(a, a) for a in lit.args))
    return (fact in state) == lit.positive


def _exists(block: Exists, state: frozenset, index: ObjectIndex) -> bool:
    variables = [v for v, _ in block.variables]
    domains = [index.of_type(t) for _, t in block.variables]
    # check each literal / inequality as soon as all its variables are bound
    ready: list[list] = [[] for _ in variables]
    position = {v: i for i, v in enumerate(variables)}
    for lit in block.body:
        last = max((position[a] for a in lit.args if a in position), default=-1)
        if last < 0:
            if not _holds(lit, state, {}):
                return False
        else:
            ready[last].append(lit)
    for a, b in block.distinct:
        ready[max(position[a], position[b])].append((a, b))

    binding: dict[str, str] = {}

    def extend(i: int) -> bool:
        if i == len(variables):
            return True
        for obj in domains[i]:
            binding[variables[i]] = obj
            ok = True
            for check in ready[i]:
                if isinstance(check, tuple):
                    if binding[check[0]] == binding[check[1]]:
                        ok = False
                        break
                elif not _holds(check, state, binding):
                    ok = False
                    break
            if ok and extend(i + 1):
                return True
        binding.pop(variables[i], None)
        return False

    return extend(0)


def satisfies_goal(state: frozenset, goal: GoalFormula, index: ObjectIndex) -> bool:
    if isinstance(goal, Literal):
        if goal.variables():
            raise PDDLError(f"free variable in goal literal {goal}")
        return (goal.fact in state) == goal.positive
    if isinstance(goal, And):
        return all(satisfies_goal(state, part, index) for part in goal.parts)
    return _exists(goal, state, index)


def validate_plan(domain: Domain, problem: Problem, plan: Iterable[ActionCall]) -> ValidationResult:
    """Replay ``plan`` from the initial state, VAL style."""
    index = problem.index(domain)
    state = frozenset(problem.init)
    for step, call in enumerate(plan, start=1):
        try:
            action = instantiate(domain.action(call.name), call.args, index)
        except PDDLError as exc:
            return ValidationResult("invalid-action", state, step, None, str(exc))
        missing = failed_precondition(state, action)
        if missing is not None:
            return ValidationResult("inapplicable", state, step, missing,
                                    f"step {step} {action}: precondition {missing} does not hold")
        state = apply(state, action)
    if not satisfies_goal(state, problem.goal, index):
        return ValidationResult("goal-unsatisfied", state, None, None, "goal not satisfied")
    return ValidationResult("valid", state, None, None, "plan valid")
