"""Canonical PDDL text output. ``parse(serialize(x)) == x`` for every value."""

from __future__ import annotations

from .model import ActionSchema, And, ConditionalEffect, Domain, Exists, GoalFormula, Literal, Problem


def _typed(pairs) -> str:
    return " ".join(f"{name} - {type_name}" for name, type_name in pairs)


def render_goal(goal: GoalFormula) -> str:
    if isinstance(goal, Literal):
        return str(goal)
    if isinstance(goal, And):
        return "(and" + "".join(" " + render_goal(p) for p in goal.parts) + ")"
    items = [str(lit) for lit in goal.body]
    items += [f"(not (= {a} {b}))" for a, b in goal.distinct]
    return f"(exists ({_typed(goal.variables)}) (and {' '.join(items)}))" if items else \
        f"(exists ({_typed(goal.variables)}) (and))"


def _effect(eff) -> str:
    if isinstance(eff, ConditionalEffect):
        return f"(forall ({eff.variable} - {eff.type}) (when {eff.condition} {eff.effect}))"
    return str(eff)


def _action(schema: ActionSchema) -> str:
    pre = " ".join(str(lit) for lit in schema.precondition)
    eff = " ".join(_effect(e) for e in schema.effects)
    return (
        f"  (:action {schema.name}\n"
        f"    :parameters ({_typed(schema.parameters)})\n"
        f"    :precondition (and{' ' + pre if pre else ''})\n"
        f"    :effect (and{' ' + eff if eff else ''}))"
    )


def serialize_domain(domain: Domain) -> str:
    lines = [f"(define (domain {domain.name})"]
    if domain.requirements:
        lines.append(f"  (:requirements {' '.join(domain.requirements)})")
    if domain.types:
        lines.append("  (:types")
        lines += [f"    {child} - {parent}" for child, parent in domain.types]
        lines.append("  )")
    if domain.constants:
        lines.append("  (:constants")
        lines += [f"    {name} - {t}" for name, t in domain.constants]
        lines.append("  )")
    if domain.predicates:
        lines.append("  (:predicates")
        for name, params in domain.predicates:
            sig = f" {_typed(params)}" if params else ""
            lines.append(f"    ({name}{sig})")
        lines.append("  )")
    lines += [_action(a) for a in domain.actions]
    lines.append(")")
    return "\n".join(lines) + "\n"


def serialize_problem(problem: Problem) -> str:
    lines = [f"(define (problem {problem.name})", f"  (:domain {problem.domain_name})"]
    if problem.objects:
        lines.append("  (:objects")
        lines += [f"    {name} - {t}" for name, t in problem.objects]
        lines.append("  )")
    lines.append("  (:init")
    lines += ["    (" + " ".join(fact) + ")" for fact in sorted(problem.init)]
    lines.append("  )")
    lines.append(f"  (:goal {render_goal(problem.goal)})")
    lines.append(")")
    return "\n".join(lines) + "\n"


def serialize(value) -> str:
    if isinstance(value, Domain):
        return serialize_domain(value)
    if isinstance(value, Problem):
        return serialize_problem(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")
