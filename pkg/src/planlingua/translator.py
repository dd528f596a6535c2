"""Language-to-symbol translators producing ranked goal and template candidates.

Implementations: ``OracleTranslator`` (gold outputs), ``NoisyTranslator``
(corrupts the first k ranks of another translator), ``PredictionsTranslator``
(replays a predictions file) and ``RemoteTranslator`` (HTTP service client
with an offline replay file).
"""

from __future__ import annotations

import hashlib
import json
import random
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .goals import GoalEntry, GoalPredicateList, parse_goal_text
from .household import MOVABLES, RECEPTACLES, Sample, household_domain
from .household.dataset import read_records
from .pddl import PDDLError
from .permissive import PermissiveMap
from .planner import SearchConfig, solve
from .templates import PlanTemplate, TemplateStep, augment_domain, constrain, parse_template

MODES = ("task", "relations", "task+relations")
KINDS = ("goal", "template")
DEFAULT_BEAM = 5


class TranslatorError(RuntimeError):
    """The translator could not produce candidates (e.g. service unreachable)."""


@dataclass(frozen=True)
class Directive:
    task: str
    relations: str = ""
    mode: str = "task+relations"
    sample_id: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")

    def text(self) -> str:
        if self.mode == "task":
            return self.task.strip()
        if self.mode == "relations":
            return self.relations.strip()
        return " ".join(part for part in (self.task.strip(), self.relations.strip()) if part)

    @classmethod
    def from_sample(cls, sample: Sample, mode: str = "task+relations") -> "Directive":
        return cls(sample.task_text, sample.relations_text, mode, sample.id)


@dataclass(frozen=True)
class PromptSpec:
    decoder: str  # GPT-style, evaluation form
    prefix: str  # T5-style source

    def decoder_training(self, target: str) -> str:
        return f"{self.decoder} {target} <|endoftext|>"


_TASK_TYPE = {"goal": "Goal", "template": "Actions"}
_PREFIX = {"goal": "translate task to goal", "template": "translate plan to actions"}


def _kind(kind: str) -> str:
    kind = kind.lower()
    if kind in ("actions", "plan"):
        kind = "template"
    if kind not in KINDS:
        raise ValueError(f"kind must be 'goal' or 'template' (or 'actions'), got {kind!r}")
    return kind


def render_prompts(d: Directive, kind: str) -> PromptSpec:
    kind = _kind(kind)
    text = d.text()
    return PromptSpec(f"<|startoftext|> {text} {_TASK_TYPE[kind]}:", f"{_PREFIX[kind]}: {text}")


def candidate_list(items: Iterable[str], n: int | None = None) -> list[str]:
    """De-duplicate keeping first occurrences; cut to ``n``."""
    out, seen = [], set()
    for item in items:
        item = item.strip()
        if item in seen:
            continue
        seen.add(item)
        out.append(item)
        if n is not None and len(out) >= n:
            break
    return out


class Translator:
    name = "base"

    def translate_goal(self, d: Directive, n: int = DEFAULT_BEAM) -> list[str]:
        raise NotImplementedError

    def translate_template(self, d: Directive, n: int = DEFAULT_BEAM) -> list[str]:
        raise NotImplementedError

    def translate(self, d: Directive, kind: str, n: int = DEFAULT_BEAM) -> list[str]:
        if _kind(kind) == "goal":
            return self.translate_goal(d, n)
        return self.translate_template(d, n)


class _ById(Translator):
    def __init__(self, samples: Iterable[Sample] | Mapping[str, Sample]):
        self.samples = dict(samples) if isinstance(samples, Mapping) else {s.id: s for s in samples}

    def sample(self, d: Directive) -> Sample:
        if d.sample_id is None or d.sample_id not in self.samples:
            raise TranslatorError(f"no sample for directive id {d.sample_id!r}")
        return self.samples[d.sample_id]


class OracleTranslator(_ById):
    """Returns the gold goal and template as the single rank-0 candidate."""

    name = "oracle"

    def translate_goal(self, d, n=DEFAULT_BEAM):
        return [self.sample(d).gold_goal]

    def translate_template(self, d, n=DEFAULT_BEAM):
        return [self.sample(d).gold_template]


class PredictionsTranslator(Translator):
    """Candidates read from a predictions file: ``{id, pred_goal, pred_templates}``."""

    name = "predictions"

    def __init__(self, predictions: Mapping[str, dict]):
        self.predictions = dict(predictions)

    @classmethod
    def load(cls, path: str | Path) -> "PredictionsTranslator":
        return cls(load_predictions(path))

    def _get(self, d: Directive) -> dict:
        if d.sample_id not in self.predictions:
            raise TranslatorError(f"no prediction for id {d.sample_id!r}")
        return self.predictions[d.sample_id]

    def translate_goal(self, d, n=DEFAULT_BEAM):
        return [self._get(d)["pred_goal"]]

    def translate_template(self, d, n=DEFAULT_BEAM):
        return candidate_list(self._get(d)["pred_templates"], n)


def load_predictions(path: str | Path) -> dict[str, dict]:
    out = {}
    for lineno, record in read_records(path):
        for name, kind in (("id", str), ("pred_goal", str), ("pred_templates", list)):
            if not isinstance(record, dict) or name not in record:
                raise PDDLError(f"{path}:{lineno}: missing field '{name}'")
            if not isinstance(record[name], kind):
                raise PDDLError(f"{path}:{lineno}: field '{name}' must be a {kind.__name__}")
        if not all(isinstance(t, str) for t in record["pred_templates"]):
            raise PDDLError(f"{path}:{lineno}: 'pred_templates' must list strings")
        out[record["id"]] = record
    return out


# --- noise ------------------------------------------------------------------

_ALL_CLASSES = MOVABLES + RECEPTACLES
_PSEUDO_CLASSES = ("shelf", "vase", "mug", "plate")


def _absent_classes(sample: Sample, pmap: PermissiveMap | None) -> list[str]:
    present = {c for _, c in sample.scene.objects}
    blocked = set(present)
    if pmap is not None:
        for group in pmap.classes:
            if group & present:
                blocked |= group
    return [c for c in (*_ALL_CLASSES, *_PSEUDO_CLASSES) if c not in blocked]


class NoisyTranslator(_ById):
    """Corrupts ranks ``0..k-1`` of a base translator's rank-0 output.

    Rank ``k`` carries the base output; later ranks are extra corrupted
    fillers up to the beam width. Template corruptions rotate through swap
    two steps / retype one argument / drop the last step, and each is
    checked with the planner to admit no plan for the sample's gold goal.
    A corruption that turns out solvable is replaced by a retype to a class
    absent from the scene, which can never be satisfied.
    """

    name = "noisy"

    def __init__(self, base: Translator, samples, corrupt: int = 1, beam_width: int | None = None,
                 seed: int = 0, targets: Sequence[str] = KINDS, permissive: PermissiveMap | None = None,
                 budget: int = 200_000):
        super().__init__(samples)
        if corrupt < 0:
            raise ValueError("corrupt must be >= 0")
        self.base = base
        self.corrupt = corrupt
        self.beam_width = beam_width if beam_width is not None else max(DEFAULT_BEAM, corrupt + 1)
        if self.beam_width < corrupt + 1:
            raise ValueError("beam width must exceed the number of corrupted ranks")
        self.seed = seed
        self.targets = tuple(_kind(t) for t in targets)
        self.permissive = permissive
        self.budget = budget
        self._cache: dict = {}

    def _rng(self, d: Directive, kind: str) -> random.Random:
        return random.Random(f"{self.seed}:{d.sample_id}:{kind}")

    def translate_goal(self, d, n=DEFAULT_BEAM):
        gold = self.base.translate_goal(d, 1)
        if "goal" not in self.targets or not gold:
            return gold[:n]
        return self._noisy(d, "goal", gold[0])[:n]

    def translate_template(self, d, n=DEFAULT_BEAM):
        gold = self.base.translate_template(d, 1)
        if "template" not in self.targets or not gold:
            return gold[:n]
        return self._noisy(d, "template", gold[0])[:n]

    def _noisy(self, d: Directive, kind: str, gold: str) -> list[str]:
        key = (d.sample_id, kind, gold)
        if key not in self._cache:
            sample = self.sample(d)
            rng = self._rng(d, kind)
            make = self._goal_variants if kind == "goal" else self._template_variants
            n_bad = self.beam_width - 1
            bad = make(sample, gold, rng, n_bad)
            self._cache[key] = bad[:self.corrupt] + [gold] + bad[self.corrupt:n_bad]
        return list(self._cache[key])

    def _goal_variants(self, sample, gold: str, rng, count: int) -> list[str]:
        goals = parse_goal_text(gold)
        absent = _absent_classes(sample, self.permissive)
        rng.shuffle(absent)
        out = []
        for cls in absent:
            if len(out) == count:
                break
            if not goals.entries:
                variant = GoalPredicateList((GoalEntry("robot_has_obj", cls),), goals.two_task)
            else:
                first = goals.entries[0]
                old = first.arg1
                entries = tuple(GoalEntry(e.predicate, cls if e.arg1 == old else e.arg1,
                                          cls if e.arg2 == old else e.arg2) for e in goals.entries)
                variant = GoalPredicateList(entries, goals.two_task)
            text = variant.text()
            if text != gold and text not in out:
                out.append(text)
        return out

    def _template_variants(self, sample, gold: str, rng, count: int) -> list[str]:
        template = parse_template(gold)
        absent = _absent_classes(sample, self.permissive)
        out: list[str] = []
        kinds = ("swap", "retype", "drop")
        attempt = 0
        while len(out) < count and attempt < 50 * (count + 1):
            kind = kinds[attempt % 3]
            attempt += 1
            variant = _corrupt(template, kind, rng, absent)
            if variant is None:
                continue
            text = variant.text()
            if text == gold or text in out:
                continue
            if not self._infeasible(sample, variant):
                variant = _corrupt(template, "retype", rng, absent)
                if variant is None:
                    continue
                text = variant.text()
                if text == gold or text in out:
                    continue
            out.append(text)
        return out

    def _infeasible(self, sample: Sample, template: PlanTemplate) -> bool:
        augmented = _augmented()
        try:
            restricted = constrain(sample.problem(), template, augmented, self.permissive)
        except PDDLError:
            return True
        result = solve(augmented.domain, restricted, SearchConfig(budget=self.budget))
        return result.stats.status == "unsolvable"


_AUG = None


def _augmented():
    global _AUG
    if _AUG is None:
        _AUG = augment_domain(household_domain())
    return _AUG


def _corrupt(template: PlanTemplate, kind: str, rng: random.Random, absent: list[str]) -> PlanTemplate | None:
    steps = list(template.steps)
    if kind == "swap":
        pairs = [(i, j) for i in range(len(steps)) for j in range(i + 1, len(steps)) if steps[i] != steps[j]]
        if not pairs:
            return None
        i, j = rng.choice(pairs)
        steps[i], steps[j] = steps[j], steps[i]
        return PlanTemplate(tuple(steps))
    if kind == "drop":
        if not steps:
            return None
        return PlanTemplate(tuple(steps[:-1]))
    slots = [(i, k) for i, s in enumerate(steps) for k in range(len(s.args))]
    if not slots or not absent:
        return None
    i, k = rng.choice(slots)
    args = list(steps[i].args)
    args[k] = rng.choice(absent)
    steps[i] = TemplateStep(steps[i].action, tuple(args))
    return PlanTemplate(tuple(steps))


# --- remote service -----------------------------------------------------------

def request_key(request: Mapping) -> str:
    canonical = json.dumps(request, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class RemoteTranslator(Translator):
    """Client for a candidate-generation service.

    Wire format: POST ``{"prompt", "n", "kind"}`` as JSON, reply
    ``{"candidates": [...]}``. With a replay file, known requests are
    answered offline; ``record=True`` stores live replies into it.
    """

    name = "remote"

    def __init__(self, url: str | None = None, *, timeout: float = 10.0, replay: str | Path | None = None,
                 record: bool = False, style: str = "decoder"):
        if style not in ("decoder", "prefix"):
            raise ValueError("style must be 'decoder' or 'prefix'")
        self.url = url
        self.timeout = timeout
        self.replay_path = Path(replay) if replay else None
        self.record = record
        self.style = style
        self._replay = {}
        if self.replay_path is not None and self.replay_path.exists():
            self._replay = json.loads(self.replay_path.read_text(encoding="utf-8"))
        self._lock = threading.Lock()

    def __getstate__(self):
        state = dict(self.__dict__)
        state.pop("_lock", None)
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()

    def build_request(self, d: Directive, kind: str, n: int) -> dict:
        prompts = render_prompts(d, kind)
        prompt = prompts.decoder if self.style == "decoder" else prompts.prefix
        return {"prompt": prompt, "n": int(n), "kind": _kind(kind)}

    def _call(self, request: dict) -> list[str]:
        key = request_key(request)
        if key in self._replay:
            return _candidates(self._replay[key].get("response", self._replay[key]))
        if not self.url:
            raise TranslatorError("request not in replay file and no service URL configured")
        body = json.dumps(request).encode("utf-8")
        req = urllib.request.Request(self.url, data=body, method="POST",
                                     headers={"Content-Type": "application/json; charset=utf-8"})
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, OSError, ValueError) as exc:
            raise TranslatorError(f"translation service failed: {exc}") from exc
        out = _candidates(payload)
        if self.record and self.replay_path is not None:
            with self._lock:
                self._replay[key] = {"request": request, "response": {"candidates": out}}
                self.replay_path.write_text(json.dumps(self._replay, indent=2, sort_keys=True) + "\n",
                                            encoding="utf-8")
        return out

    def translate_goal(self, d, n=DEFAULT_BEAM):
        return candidate_list(self._call(self.build_request(d, "goal", n)), n)

    def translate_template(self, d, n=DEFAULT_BEAM):
        return candidate_list(self._call(self.build_request(d, "template", n)), n)


def _candidates(payload) -> list[str]:
    if not isinstance(payload, dict) or not isinstance(payload.get("candidates"), list):
        raise TranslatorError("service reply lacks a 'candidates' list")
    if not all(isinstance(c, str) for c in payload["candidates"]):
        raise TranslatorError("service reply candidates must be strings")
    return list(payload["candidates"])
