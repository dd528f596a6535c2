"""Accuracy measures for predicted templates and goals, plus valid-plan ratios.

Templates are compared position by position against the gold sequence.
Goals are compared as multisets, so their order never matters. Per-element
scores are micro-averaged over gold elements; full-sequence scores and
valid-plan ratios are averaged over samples.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .goals import GoalEntry, parse_goal_entries
from .household import Sample
from .permissive import PermissiveMap
from .templates import PlanTemplate, parse_template

TEMPLATE_KEYS = ("command", "arg1", "arg2", "p_arg1", "p_arg2", "f_action", "f_seq")
GOAL_KEYS = ("predicate", "arg1", "arg2", "p_arg1", "p_arg2", "f_predicate", "f_seq", "f_predicate_sim",
             "f_seq_sim")
PLAN_KEYS = ("valid_plans_orig_goal", "valid_plans_pred_goal")
TEMPLATE_COLUMNS = {"command": "Command", "arg1": "Arg1", "arg2": "Arg2", "p_arg1": "P_Arg1",
                    "p_arg2": "P_Arg2", "f_action": "F_Action", "f_seq": "F_Seq"}
GOAL_COLUMNS = {"predicate": "Predicate", "arg1": "Arg1", "arg2": "Arg2", "p_arg1": "P_Arg1",
                "p_arg2": "P_Arg2", "f_predicate": "F_Predicate", "f_seq": "F_Seq",
                "f_predicate_sim": "F_Predicate_Sim", "f_seq_sim": "F_Seq_Sim"}
PLAN_COLUMNS = {"valid_plans_orig_goal": "Valid_Plan_Orig_Goal", "valid_plans_pred_goal": "Valid_Plan_Pred_Goal"}


@dataclass
class Tally:
    """``hits`` out of ``total`` for every measure of one sample."""

    counts: dict[str, list[int]] = field(default_factory=dict)
    per_action: dict[str, list[int]] = field(default_factory=dict)

    def add(self, key: str, hit: int | bool, total: int = 1) -> None:
        cell = self.counts.setdefault(key, [0, 0])
        cell[0] += int(hit)
        cell[1] += total

    def ratio(self, key: str) -> float:
        hits, total = self.counts[key]
        return hits / total if total else 1.0


def _as_template(t) -> PlanTemplate:
    return t if isinstance(t, PlanTemplate) else parse_template(t or "", strict=False)


def score_templates(pred, gold, pmap: PermissiveMap | None = None) -> Tally:
    pmap = pmap or PermissiveMap()
    pred, gold = _as_template(pred), _as_template(gold)
    tally = Tally()
    for key in TEMPLATE_KEYS[:-1]:
        tally.counts[key] = [0, 0]
    all_match = len(pred) == len(gold)
    for i, g in enumerate(gold.steps):
        p = pred.steps[i] if i < len(pred) else None
        p_args = p.args if p is not None else ()
        g1 = g.args[0] if len(g.args) > 0 else None
        g2 = g.args[1] if len(g.args) > 1 else None
        p1 = p_args[0] if len(p_args) > 0 else None
        p2 = p_args[1] if len(p_args) > 1 else None
        command = p is not None and p.action == g.action
        tally.add("command", command)
        tally.add("arg1", p is not None and p1 == g1)
        tally.add("p_arg1", p is not None and pmap.equivalent(p1, g1))
        if g2 is not None:
            tally.add("arg2", p2 == g2)
            tally.add("p_arg2", p is not None and pmap.equivalent(p2, g2))
        full = command and p1 == g1 and p2 == g2
        tally.add("f_action", full)
        cell = tally.per_action.setdefault(g.action, [0, 0])
        cell[0] += int(full)
        cell[1] += 1
        all_match = all_match and full
    tally.add("f_seq", all_match)
    return tally


def _entries(goal) -> list[GoalEntry]:
    if isinstance(goal, str):
        return parse_goal_entries(goal)
    if hasattr(goal, "scoring_entries"):
        return goal.scoring_entries()
    return list(goal)


def _overlap(a: Iterable, b: Iterable) -> int:
    return sum((Counter(a) & Counter(b)).values())


def score_goals(pred, gold, pmap: PermissiveMap | None = None) -> Tally:
    """Order-insensitive: every column is a multiset intersection with the gold list.

    Matching identical items is a maximum bipartite matching whose size is the
    multiset intersection, so no permutation of either list changes a score.
    """
    pmap = pmap or PermissiveMap()
    p, g = _entries(pred), _entries(gold)
    canon = lambda e: (e.predicate, pmap.canonical(e.arg1), pmap.canonical(e.arg2))  # noqa: E731
    tally = Tally()
    g1 = [e.arg1 for e in g if e.arg1 is not None]
    g2 = [e.arg2 for e in g if e.arg2 is not None]
    p1 = [e.arg1 for e in p if e.arg1 is not None]
    p2 = [e.arg2 for e in p if e.arg2 is not None]
    tally.add("predicate", _overlap((e.predicate for e in p), (e.predicate for e in g)), len(g))
    tally.add("arg1", _overlap(p1, g1), len(g1))
    tally.add("arg2", _overlap(p2, g2), len(g2))
    tally.add("p_arg1", _overlap(map(pmap.canonical, p1), map(pmap.canonical, g1)), len(g1))
    tally.add("p_arg2", _overlap(map(pmap.canonical, p2), map(pmap.canonical, g2)), len(g2))
    tally.add("f_predicate", _overlap(p, g), len(g))
    tally.add("f_predicate_sim", _overlap(map(canon, p), map(canon, g)), len(g))
    tally.add("f_seq", Counter(p) == Counter(g))
    tally.add("f_seq_sim", Counter(map(canon, p)) == Counter(map(canon, g)))
    return tally


@dataclass
class MetricsReport:
    template: dict[str, tuple[int, int]]
    goal: dict[str, tuple[int, int]]
    plans: dict[str, tuple[int, int]]
    n: int
    per_action: dict[str, tuple[int, int]] = field(default_factory=dict)

    @staticmethod
    def _value(cell) -> float | None:
        hits, total = cell
        return float(Fraction(hits, total)) if total else None

    def values(self) -> dict[str, float | None]:
        """Flat record keyed ``template_*``, ``goal_*`` and plan measure names."""
        out: dict[str, float | None] = {"samples": self.n}
        out.update({f"template_{k}": self._value(v) for k, v in self.template.items()})
        out.update({f"goal_{k}": self._value(v) for k, v in self.goal.items()})
        out.update({k: self._value(v) for k, v in self.plans.items()})
        return out

    def fraction(self, section: str, key: str) -> Fraction:
        hits, total = getattr(self, section)[key]
        return Fraction(hits, total)

    def table(self) -> str:
        def block(title, columns, cells):
            names = [columns[k] for k in columns if k in cells]
            vals = [_fmt(self._value(cells[k])) for k in columns if k in cells]
            width = [max(len(a), len(b)) for a, b in zip(names, vals)]
            head = "  ".join(n.ljust(w) for n, w in zip(names, width)).rstrip()
            row = "  ".join(v.ljust(w) for v, w in zip(vals, width)).rstrip()
            return f"{title}\n{head}\n{row}"

        parts = [f"samples: {self.n}",
                 block("Plan template", TEMPLATE_COLUMNS, self.template),
                 block("Goal predicates", GOAL_COLUMNS, self.goal)]
        if self.plans:
            parts.append(block("Valid plans", PLAN_COLUMNS, self.plans))
        if self.per_action:
            lines = ["F_Action by action"] + [f"  {a}: {_fmt(self._value(c))} ({c[0]}/{c[1]})"
                                              for a, c in sorted(self.per_action.items())]
            parts.append("\n".join(lines))
        return "\n\n".join(parts)


def _fmt(v: float | None) -> str:
    return "n/a" if v is None else f"{v:.4f}"


def _sum_cells(tallies: Sequence[Tally], keys) -> dict[str, tuple[int, int]]:
    out = {}
    for key in keys:
        hits = sum(t.counts.get(key, [0, 0])[0] for t in tallies)
        total = sum(t.counts.get(key, [0, 0])[1] for t in tallies)
        out[key] = (hits, total)
    return out


def aggregate(template_tallies: Sequence[Tally], goal_tallies: Sequence[Tally],
              plan_flags: Mapping[str, Sequence[bool]] | None = None) -> MetricsReport:
    """Micro over elements for per-element columns; f_seq columns hold one 0/1
    per sample, so their micro sum is the macro mean."""
    n = max(len(template_tallies), len(goal_tallies))
    if n == 0:
        raise ValueError("nothing to aggregate")
    per_action: dict[str, list[int]] = {}
    for t in template_tallies:
        for action, (hits, total) in t.per_action.items():
            cell = per_action.setdefault(action, [0, 0])
            cell[0] += hits
            cell[1] += total
    plans = {k: (sum(map(int, flags)), len(flags)) for k, flags in (plan_flags or {}).items()}
    return MetricsReport(_sum_cells(template_tallies, TEMPLATE_KEYS), _sum_cells(goal_tallies, GOAL_KEYS),
                         plans, n, {a: tuple(c) for a, c in per_action.items()})


def evaluate(samples: Sequence[Sample], predictions: Mapping[str, dict], pmap: PermissiveMap | None = None, *,
             plans: bool = True, pipeline_cfg=None, jobs: int = 1) -> MetricsReport:
    """Score a predictions file (``{id, pred_goal, pred_templates}``) against samples.

    The template columns use the rank-0 template; the valid-plan columns run
    the candidate loop over all predicted templates, once with the sample's
    own goal and once with the predicted goal.
    """
    from .pipeline import PipelineConfig, plan_ratios
    from .translator import PredictionsTranslator

    pmap = pmap or PermissiveMap()
    missing = [s.id for s in samples if s.id not in predictions]
    if missing:
        raise KeyError(f"no prediction for sample(s) {missing[:5]}")
    t_tallies, g_tallies = [], []
    for s in samples:
        pred = predictions[s.id]
        first = pred["pred_templates"][0] if pred["pred_templates"] else ""
        t_tallies.append(score_templates(first, s.gold_template, pmap))
        g_tallies.append(score_goals(pred["pred_goal"], s.gold_goal, pmap))
    flags = None
    if plans:
        cfg = pipeline_cfg or PipelineConfig()
        runs = plan_ratios(samples, PredictionsTranslator(predictions), cfg, jobs)
        flags = {name: [o.solved for o in run.outcomes] for name, run in sorted(runs.items())}
        flags = {k: flags[k] for k in PLAN_KEYS}
    return aggregate(t_tallies, g_tallies, flags)
