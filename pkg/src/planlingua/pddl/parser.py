"""Reader for the supported PDDL subset.

Supported: ``:typing``, conjunctive preconditions with negative literals,
add/delete effects, ``(forall (?v - t) (when <lit> <lit>))`` effects, and
``exists`` (with optional ``(not (= ?a ?b))`` constraints) in goals.
Everything is case-insensitive and ``;`` starts a comment.
"""

from __future__ import annotations

from typing import Iterator

from .errors import (
    ArityError,
    PDDLError,
    PDDLSyntaxError,
    UndeclaredPredicateError,
    UndeclaredTypeError,
    UnknownObjectError,
)
from .model import (
    ROOT_TYPE,
    ActionSchema,
    And,
    ConditionalEffect,
    Domain,
    Exists,
    GoalFormula,
    Literal,
    Problem,
    TypeHierarchy,
    is_variable,
    normalize_name,
)


class Sym(str):
    line: int
    col: int

    def __new__(cls, text: str, line: int, col: int):
        obj = super().__new__(cls, text)
        obj.line = line
        obj.col = col
        return obj


class SList(list):
    def __init__(self, line: int, col: int):
        super().__init__()
        self.line = line
        self.col = col


def _tokens(text: str) -> Iterator[tuple[str, int, int]]:
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch.isspace():
            i += 1
            col += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, line, col
            i += 1
            col += 1
        else:
            start, start_col = i, col
            while i < n and not text[i].isspace() and text[i] not in "();":
                i += 1
                col += 1
            yield text[start:i], line, start_col


def read_sexpr(text: str) -> SList:
    """Parse exactly one top-level s-expression."""
    stack: list[SList] = []
    result = None
    for tok, line, col in _tokens(text):
        if tok == "(":
            if result is not None and not stack:
                raise PDDLSyntaxError("unexpected content after top-level expression", line, col)
            node = SList(line, col)
            if stack:
                stack[-1].append(node)
            stack.append(node)
        elif tok == ")":
            if not stack:
                raise PDDLSyntaxError("unbalanced ')'", line, col)
            done = stack.pop()
            if not stack:
                result = done
        else:
            if not stack:
                raise PDDLSyntaxError(f"unexpected token {tok!r} outside any expression", line, col)
            stack[-1].append(Sym(tok.lower(), line, col))
    if stack:
        raise PDDLSyntaxError("unexpected end of input: missing ')'", stack[-1].line, stack[-1].col)
    if result is None:
        raise PDDLSyntaxError("empty input", 1, 1)
    return result


def _pos(node) -> tuple[int | None, int | None]:
    return getattr(node, "line", None), getattr(node, "col", None)


def _expect_list(node, what: str) -> SList:
    if not isinstance(node, SList):
        raise PDDLSyntaxError(f"expected a list for {what}, got {node!r}", *_pos(node))
    return node


def _expect_sym(node, what: str) -> Sym:
    if not isinstance(node, Sym):
        raise PDDLSyntaxError(f"expected a name for {what}", *_pos(node))
    return node


def _name(node, what: str) -> str:
    sym = _expect_sym(node, what)
    try:
        return normalize_name(sym)
    except PDDLError:
        raise PDDLSyntaxError(f"illegal {what} {str(sym)!r}", sym.line, sym.col) from None


def _var(node, what: str) -> str:
    sym = _expect_sym(node, what)
    if not is_variable(sym) or len(sym) < 2:
        raise PDDLSyntaxError(f"expected a variable for {what}, got {str(sym)!r}", sym.line, sym.col)
    normalize_name(sym[1:])
    return str(sym)


def _typed_list(items, *, variables: bool, what: str) -> list[tuple[str, str]]:
    out: list[tuple[str, str]] = []
    pending: list[str] = []
    i = 0
    while i < len(items):
        item = items[i]
        if isinstance(item, Sym) and item == "-":
            if i + 1 >= len(items):
                raise PDDLSyntaxError(f"dangling '-' in {what}", item.line, item.col)
            if not pending:
                raise PDDLSyntaxError(f"'-' with nothing to type in {what}", item.line, item.col)
            type_node = items[i + 1]
            if isinstance(type_node, SList):
                raise PDDLSyntaxError(f"'either' types are not supported in {what}", *_pos(type_node))
            type_name = _name(type_node, "type name")
            out.extend((p, type_name) for p in pending)
            pending = []
            i += 2
            continue
        pending.append(_var(item, what) if variables else _name(item, what))
        i += 1
    out.extend((p, ROOT_TYPE) for p in pending)
    return out


def _sections(node: SList, kind: str) -> tuple[str, list[SList]]:
    if len(node) < 2 or not isinstance(node[0], Sym) or node[0] != "define":
        raise PDDLSyntaxError(f"expected (define ({kind} ...) ...)", node.line, node.col)
    header = _expect_list(node[1], f"{kind} header")
    if len(header) != 2 or not isinstance(header[0], Sym) or header[0] != kind:
        raise PDDLSyntaxError(f"expected ({kind} <name>)", header.line, header.col)
    name = _name(header[1], f"{kind} name")
    body = []
    for sec in node[2:]:
        sec = _expect_list(sec, "section")
        if not sec or not isinstance(sec[0], Sym) or not sec[0].startswith(":"):
            raise PDDLSyntaxError("expected a ':section'", sec.line, sec.col)
        body.append(sec)
    return name, body


class _Scope:
    """Name resolution for literals inside one action/goal/init."""

    def __init__(self, domain_preds: dict, variables: dict[str, str], objects, context: str):
        self.preds = domain_preds
        self.variables = variables
        self.objects = objects
        self.context = context

    def atom(self, node) -> Literal:
        node = _expect_list(node, "atom")
        if not node:
            raise PDDLSyntaxError("empty atom", node.line, node.col)
        pred = _name(node[0], "predicate")
        if pred not in self.preds:
            raise UndeclaredPredicateError(pred, self.context)
        args = []
        for a in node[1:]:
            sym = _expect_sym(a, "argument")
            if is_variable(sym):
                if str(sym) not in self.variables:
                    raise PDDLSyntaxError(f"unbound variable {str(sym)} in {self.context}", sym.line, sym.col)
                args.append(str(sym))
            else:
                obj = _name(sym, "object")
                if obj not in self.objects:
                    raise UnknownObjectError(obj, self.context)
                args.append(obj)
        expected = len(self.preds[pred])
        if expected != len(args):
            raise ArityError(pred, expected, len(args), self.context)
        return Literal(pred, tuple(args))

    def literal(self, node) -> Literal:
        node = _expect_list(node, "literal")
        if node and isinstance(node[0], Sym) and node[0] == "not":
            if len(node) != 2:
                raise PDDLSyntaxError("(not ...) takes one argument", node.line, node.col)
            return self.atom(node[1]).negate()
        return self.atom(node)

    def conjunction(self, node) -> tuple[Literal, ...]:
        node = _expect_list(node, "conjunction")
        if not node:
            return ()
        if isinstance(node[0], Sym) and node[0] == "and":
            return tuple(self.literal(x) for x in node[1:])
        return (self.literal(node),)

    def with_vars(self, extra: dict[str, str]) -> "_Scope":
        return _Scope(self.preds, {**self.variables, **extra}, self.objects, self.context)


def _check_type(hierarchy: TypeHierarchy, type_name: str, context: str) -> None:
    if type_name not in hierarchy:
        raise UndeclaredTypeError(type_name, context)


def _parse_effects(scope: _Scope, hierarchy: TypeHierarchy, node) -> tuple:
    node = _expect_list(node, "effect")
    if not node:
        return ()
    items = node[1:] if isinstance(node[0], Sym) and node[0] == "and" else [node]
    effects = []
    for item in items:
        item = _expect_list(item, "effect")
        if item and isinstance(item[0], Sym) and item[0] == "forall":
            if len(item) != 3:
                raise PDDLSyntaxError("forall effect must be (forall (vars) (when c e))", item.line, item.col)
            params = _typed_list(_expect_list(item[1], "forall variables"), variables=True, what="forall")
            if len(params) != 1:
                raise PDDLSyntaxError("forall effect must bind exactly one variable", item.line, item.col)
            var, type_name = params[0]
            _check_type(hierarchy, type_name, scope.context)
            when = _expect_list(item[2], "when")
            if len(when) != 3 or not isinstance(when[0], Sym) or when[0] != "when":
                raise PDDLSyntaxError("forall body must be (when <condition> <effect>)", when.line, when.col)
            inner = scope.with_vars({var: type_name})
            cond = inner.literal(when[1])
            if not cond.positive:
                raise PDDLSyntaxError("conditional effect condition must be a positive literal", when.line, when.col)
            eff = inner.literal(when[2])
            effects.append(ConditionalEffect(var, type_name, cond, eff))
        else:
            effects.append(scope.literal(item))
    return tuple(effects)


def parse_domain(text: str) -> Domain:
    root = read_sexpr(text)
    name, sections = _sections(root, "domain")
    requirements: tuple[str, ...] = ()
    types: list[tuple[str, str]] = []
    constants: list[tuple[str, str]] = []
    predicates: list[tuple[str, tuple[tuple[str, str], ...]]] = []
    action_nodes: list[SList] = []
    for sec in sections:
        key = sec[0]
        if key == ":requirements":
            requirements = tuple(str(_expect_sym(r, "requirement")) for r in sec[1:])
        elif key == ":types":
            types = _typed_list(sec[1:], variables=False, what=":types")
        elif key == ":constants":
            constants = _typed_list(sec[1:], variables=False, what=":constants")
        elif key == ":predicates":
            for p in sec[1:]:
                p = _expect_list(p, "predicate declaration")
                if not p:
                    raise PDDLSyntaxError("empty predicate declaration", p.line, p.col)
                pname = _name(p[0], "predicate")
                params = tuple(_typed_list(p[1:], variables=True, what=f"predicate {pname}"))
                predicates.append((pname, params))
        elif key == ":action":
            action_nodes.append(sec)
        else:
            raise PDDLSyntaxError(f"unsupported section {str(key)}", key.line, key.col)

    hierarchy = TypeHierarchy(types)
    for pname, params in predicates:
        for _, t in params:
            _check_type(hierarchy, t, f"predicate {pname}")
    for cname, t in constants:
        _check_type(hierarchy, t, f"constant {cname}")
    preds = dict(predicates)
    const_names = {c for c, _ in constants}

    actions = []
    for sec in action_nodes:
        if len(sec) < 2:
            raise PDDLSyntaxError("action without a name", sec.line, sec.col)
        aname = _name(sec[1], "action name")
        fields = {}
        rest = sec[2:]
        if len(rest) % 2:
            raise PDDLSyntaxError(f"malformed action {aname}", sec.line, sec.col)
        for k, v in zip(rest[::2], rest[1::2]):
            k = _expect_sym(k, "action field")
            if k not in (":parameters", ":precondition", ":effect"):
                raise PDDLSyntaxError(f"unsupported action field {str(k)}", k.line, k.col)
            fields[str(k)] = v
        params = _typed_list(_expect_list(fields.get(":parameters", SList(sec.line, sec.col)), "parameters"),
                             variables=True, what=f"action {aname}")
        seen = set()
        for var, t in params:
            if var in seen:
                raise PDDLError(f"duplicate parameter {var} in action {aname}")
            seen.add(var)
            _check_type(hierarchy, t, f"action {aname}")
        scope = _Scope(preds, dict(params), const_names, f"action {aname}")
        pre = scope.conjunction(fields[":precondition"]) if ":precondition" in fields else ()
        eff = _parse_effects(scope, hierarchy, fields[":effect"]) if ":effect" in fields else ()
        actions.append(ActionSchema(aname, tuple(params), pre, eff))

    return Domain(name, requirements, tuple(types), tuple(predicates), tuple(constants), tuple(actions))


def _parse_goal(scope: _Scope, hierarchy: TypeHierarchy, node) -> GoalFormula:
    node = _expect_list(node, "goal")
    if not node:
        return And(())
    head = node[0]
    if isinstance(head, Sym) and head == "and":
        return And(tuple(_parse_goal(scope, hierarchy, x) for x in node[1:]))
    if isinstance(head, Sym) and head == "exists":
        if len(node) != 3:
            raise PDDLSyntaxError("exists must be (exists (vars) body)", node.line, node.col)
        variables = _typed_list(_expect_list(node[1], "exists variables"), variables=True, what="exists")
        for _, t in variables:
            _check_type(hierarchy, t, scope.context)
        inner = scope.with_vars(dict(variables))
        body_node = _expect_list(node[2], "exists body")
        items = body_node[1:] if body_node and isinstance(body_node[0], Sym) and body_node[0] == "and" else [body_node]
        body, distinct = [], []
        for item in items:
            item = _expect_list(item, "exists body item")
            if (len(item) == 2 and isinstance(item[0], Sym) and item[0] == "not"
                    and isinstance(item[1], SList) and item[1] and item[1][0] == "="):
                eq = item[1]
                if len(eq) != 3:
                    raise PDDLSyntaxError("(= a b) takes two arguments", eq.line, eq.col)
                a, b = _var(eq[1], "inequality"), _var(eq[2], "inequality")
                for v, n in ((a, eq[1]), (b, eq[2])):
                    if v not in inner.variables:
                        raise PDDLSyntaxError(f"unbound variable {v} in inequality", n.line, n.col)
                distinct.append((a, b))
            else:
                body.append(inner.literal(item))
        return Exists(tuple(variables), tuple(body), tuple(distinct))
    return scope.literal(node)


def parse_problem(text: str, domain: Domain) -> Problem:
    root = read_sexpr(text)
    name, sections = _sections(root, "problem")
    domain_name = domain.name
    objects: list[tuple[str, str]] = []
    init_node = goal_node = None
    for sec in sections:
        key = sec[0]
        if key == ":domain":
            if len(sec) != 2:
                raise PDDLSyntaxError("(:domain <name>)", sec.line, sec.col)
            domain_name = _name(sec[1], "domain name")
            if domain_name != domain.name:
                raise PDDLError(f"problem '{name}' is for domain '{domain_name}', not '{domain.name}'")
        elif key == ":objects":
            objects = _typed_list(sec[1:], variables=False, what=":objects")
        elif key == ":init":
            init_node = sec
        elif key == ":goal":
            if len(sec) != 2:
                raise PDDLSyntaxError("(:goal <formula>)", sec.line, sec.col)
            goal_node = sec[1]
        else:
            raise PDDLSyntaxError(f"unsupported section {str(key)}", key.line, key.col)

    hierarchy = domain.hierarchy
    seen = set()
    for obj, t in objects:
        _check_type(hierarchy, t, f"object {obj}")
        if obj in seen:
            raise PDDLError(f"object '{obj}' declared twice")
        seen.add(obj)
    known = seen | {c for c, _ in domain.constants}
    preds = domain.signatures

    init = set()
    if init_node is not None:
        scope = _Scope(preds, {}, known, ":init")
        for fact in init_node[1:]:
            lit = scope.literal(fact)
            if not lit.positive:
                raise PDDLSyntaxError("negative facts are not allowed in :init", *_pos(fact))
            init.add(lit.fact)
    goal: GoalFormula = And(())
    if goal_node is not None:
        goal = _parse_goal(_Scope(preds, {}, known, ":goal"), hierarchy, goal_node)
    return Problem(name, domain_name, tuple(objects), frozenset(init), goal)


def parse_goal(text: str, domain: Domain, objects=()) -> GoalFormula:
    """Parse a standalone goal formula against a domain."""
    known = {o for o, _ in objects} | {c for c, _ in domain.constants}
    return _parse_goal(_Scope(domain.signatures, {}, known, "goal"), domain.hierarchy, read_sexpr(text))
