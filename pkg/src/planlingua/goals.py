"""Goal predicate lists and their existential PDDL encoding.

A goal list such as ``"sliced tomato, on tomato countertop"`` talks about
object *types*. It compiles to one ``exists`` block with a variable per
mentioned type, so any instance of the right type can witness the goal.
"""

from __future__ import annotations

from dataclasses import dataclass

from .pddl import And, Exists, GoalFormula, Literal, PDDLError, render_goal
from .textutil import fit_arity, split_entries

GOAL_PREDICATES = {
    "robot_has_obj": 1,
    "on": 2,
    "sliced": 1,
    "hot": 1,
    "cold": 1,
    "cleaned": 1,
    "toggled": 1,
    "can_reach": 1,
}
TWO_TASK = "two_task"


class GoalSyntaxError(PDDLError):
    pass


@dataclass(frozen=True)
class GoalEntry:
    predicate: str
    arg1: str | None = None
    arg2: str | None = None

    @property
    def args(self) -> tuple[str, ...]:
        return tuple(a for a in (self.arg1, self.arg2) if a is not None)

    def __str__(self) -> str:
        return " ".join((self.predicate, *self.args))


@dataclass(frozen=True)
class GoalPredicateList:
    entries: tuple[GoalEntry, ...] = ()
    two_task: bool = False

    def text(self) -> str:
        parts = [str(e) for e in self.entries]
        if self.two_task:
            parts.append(TWO_TASK)
        return ", ".join(parts)

    def scoring_entries(self) -> list[GoalEntry]:
        """Entries with ``two_task`` kept as an entry of its own, for metrics."""
        out = list(self.entries)
        if self.two_task:
            out.append(GoalEntry(TWO_TASK))
        return out


def _read_entry(tokens: list[str], vocabulary) -> GoalEntry:
    head = tokens[0]
    rest = tokens[1:]
    # tolerate "robot has obj" / "can reach" spelled out
    for name in ("robot_has_obj", "can_reach", "two_task"):
        words = name.split("_")
        if tokens[:len(words)] == words:
            head, rest = name, tokens[len(words):]
            break
    if head == TWO_TASK:
        if rest:
            raise GoalSyntaxError(f"two_task takes no arguments: {' '.join(tokens)!r}")
        return GoalEntry(TWO_TASK)
    if head not in GOAL_PREDICATES:
        raise GoalSyntaxError(f"unknown goal predicate {head!r}")
    arity = GOAL_PREDICATES[head]
    args = fit_arity(rest, arity, vocabulary)
    if args is None:
        raise GoalSyntaxError(f"{head!r} takes {arity} argument(s): {' '.join(tokens)!r}")
    return GoalEntry(head, *args)


def parse_goal_text(text: str, vocabulary=None) -> GoalPredicateList:
    entries, two_task = [], False
    for tokens in split_entries(text):
        entry = _read_entry(tokens, vocabulary)
        if entry.predicate == TWO_TASK:
            two_task = True
        else:
            entries.append(entry)
    return GoalPredicateList(tuple(entries), two_task)


def parse_goal_entries(text: str, vocabulary=None) -> list[GoalEntry]:
    """Lenient reader for scoring: unknown predicates are kept as-is."""
    out = []
    for tokens in split_entries(text):
        try:
            out.append(_read_entry(tokens, vocabulary))
        except GoalSyntaxError:
            from .textutil import join_words

            words = join_words(tokens, vocabulary)
            out.append(GoalEntry(words[0], *(words[1:3])))
    return out


def compile_goal(goals: GoalPredicateList) -> GoalFormula:
    """Compile to ``(exists (...) (and ...))``; one variable per mentioned type.

    Repeated mentions of a type share its variable. With ``two_task`` the
    first ``on`` entry's object type gets a second, distinct variable and every
    entry mentioning that type is duplicated for it.
    """
    if not goals.entries:
        if goals.two_task:
            raise GoalSyntaxError("two_task needs an 'on' entry naming the object to place")
        return And(())
    primary = None
    if goals.two_task:
        primary = next((e.arg1 for e in goals.entries if e.predicate == "on"), None)
        if primary is None:
            raise GoalSyntaxError("two_task needs an 'on' entry naming the object to place")

    variables: list[tuple[str, str]] = []
    var_of: dict[str, str] = {}
    for entry in goals.entries:
        for type_name in entry.args:
            if type_name in var_of:
                continue
            var_of[type_name] = f"?{type_name}0"
            variables.append((var_of[type_name], type_name))
            if type_name == primary:
                variables.append((f"?{type_name}1", type_name))

    body: list[Literal] = []
    for entry in goals.entries:
        body.append(Literal(entry.predicate, tuple(var_of[a] for a in entry.args)))
        if primary is not None and primary in entry.args:
            twin = {primary: f"?{primary}1"}
            body.append(Literal(entry.predicate, tuple(twin.get(a, var_of[a]) for a in entry.args)))
    distinct = ((f"?{primary}0", f"?{primary}1"),) if primary is not None else ()
    return Exists(tuple(variables), tuple(body), distinct)


def goal_from_text(text: str, vocabulary=None) -> GoalFormula:
    return compile_goal(parse_goal_text(text, vocabulary))


__all__ = [
    "GOAL_PREDICATES",
    "GoalEntry",
    "GoalPredicateList",
    "GoalSyntaxError",
    "compile_goal",
    "goal_from_text",
    "parse_goal_entries",
    "parse_goal_text",
    "render_goal",
]
