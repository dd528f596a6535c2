from __future__ import annotations

import json
import pickle
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from planlingua.household import parse_relations
from planlingua.pipeline import PipelineConfig, solve_directive, solve_sample
from planlingua.planner import SearchConfig, solve
from planlingua.templates import constrain, parse_template
from planlingua.translator import (
    Directive,
    NoisyTranslator,
    OracleTranslator,
    PredictionsTranslator,
    RemoteTranslator,
    TranslatorError,
    candidate_list,
    render_prompts,
    request_key,
)


def test_decoder_goal_prompt():
    p = render_prompts(Directive("Put a slice of tomato in the fridge.", "on tomato table"), "goal")
    assert p.decoder.startswith("<|startoftext|> ") and p.decoder.endswith("Goal:")
    assert "on tomato table" in p.decoder
    assert p.decoder_training("sliced tomato").endswith("sliced tomato <|endoftext|>")


def test_prefix_actions_prompt():
    p = render_prompts(Directive("Put a slice of tomato in the fridge."), "actions")
    assert p.prefix.startswith("translate plan to actions")
    assert render_prompts(Directive("x"), "goal").prefix.startswith("translate task to goal")


def test_empty_relations_degenerate_to_task():
    a = render_prompts(Directive("Cool an apple.", "", "task+relations"), "goal")
    b = render_prompts(Directive("Cool an apple.", "", "task"), "goal")
    assert a == b


def test_bad_mode_and_kind():
    with pytest.raises(ValueError):
        Directive("x", mode="vision")
    with pytest.raises(ValueError):
        render_prompts(Directive("x"), "poem")


def test_candidate_list_dedup():
    assert candidate_list(["a", " a", "b", "c"], 2) == ["a", "b"]


def test_oracle_returns_gold(dataset200):
    s = dataset200[0]
    t = OracleTranslator(dataset200)
    d = Directive.from_sample(s)
    assert t.translate_goal(d)[0] == s.gold_goal
    assert t.translate_template(d)[0] == s.gold_template
    with pytest.raises(TranslatorError):
        t.translate_goal(Directive("unknown", sample_id="nope"))


def test_noisy_corrupts_first_rank(dataset200):
    s = dataset200[1]
    t = NoisyTranslator(OracleTranslator(dataset200), dataset200, corrupt=1)
    d = Directive.from_sample(s)
    goals, templates = t.translate_goal(d), t.translate_template(d)
    assert goals[0] != s.gold_goal and goals[1] == s.gold_goal
    assert templates[0] != s.gold_template and templates[1] == s.gold_template
    assert t.translate_template(d) == templates  # deterministic


def test_noisy_corruptions_are_unsolvable(dataset200, augmented, domain):
    t = NoisyTranslator(OracleTranslator(dataset200), dataset200, corrupt=4, beam_width=5)
    for s in dataset200[:10]:
        cands = t.translate_template(Directive.from_sample(s))
        assert len(cands) == 5 and cands[4] == s.gold_template
        for text in cands[:4]:
            r = solve(augmented.domain, constrain(s.problem(), parse_template(text), augmented))
            assert r.plan is None


def test_swap_corruption_recovers_at_rank_one(dataset200):
    t = NoisyTranslator(OracleTranslator(dataset200), dataset200, corrupt=1)
    for s in dataset200[:10]:
        out = solve_sample(s, t, PipelineConfig(goal_source="original"))
        assert out.status == "solved" and out.rank == 1 and out.n_attempts == 2


def test_predictions_translator(dataset200):
    s = dataset200[0]
    t = PredictionsTranslator({s.id: {"pred_goal": s.gold_goal, "pred_templates": ["a", s.gold_template]}})
    d = Directive.from_sample(s)
    assert t.translate_template(d, 1) == ["a"] and t.translate_goal(d) == [s.gold_goal]


def test_replay_fixture(fixtures):
    t = RemoteTranslator(replay=fixtures / "remote_replay.json")
    d = Directive("Place two vegetables in the drawer.", mode="task")
    assert t.translate_goal(d)[0] == "on potato drawer, two_task"
    with pytest.raises(TranslatorError):
        t.translate_goal(Directive("Something else.", mode="task"))


def test_replay_fixture_drives_pipeline(fixtures, domain):
    t = RemoteTranslator(replay=fixtures / "remote_replay.json")
    scene = parse_relations("on potato countertop, on potato countertop, on apple drawer")
    d = Directive("Place two vegetables in the drawer.", mode="task")
    out = solve_directive(d, scene, t, PipelineConfig())
    assert out.status == "solved" and out.rank == 0 and len(out.plan) == 8


class _Handler(BaseHTTPRequestHandler):
    replies: dict = {}
    seen: list = []

    def do_POST(self):  # noqa: N802
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        self.seen.append(body)
        if body["kind"] == "goal" and "broken" in body["prompt"]:
            self.send_response(500)
            self.end_headers()
            return
        payload = json.dumps({"candidates": self.replies[body["kind"]][: body["n"]]}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture
def server():
    _Handler.replies = {"goal": ["robot_has_obj apple", "hot apple"],
                        "template": ["go to table, pick up apple table", "go to fridge"]}
    _Handler.seen = []
    httpd = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{httpd.server_address[1]}/"
    httpd.shutdown()
    httpd.server_close()


def test_remote_round_trip_and_record(server, tmp_path):
    replay = tmp_path / "replay.json"
    t = RemoteTranslator(server, replay=replay, record=True)
    d = Directive("Pick up the apple.", mode="task")
    assert t.translate_goal(d, 2) == ["robot_has_obj apple", "hot apple"]
    assert _Handler.seen[0] == {"prompt": "<|startoftext|> Pick up the apple. Goal:", "n": 2, "kind": "goal"}
    stored = json.loads(replay.read_text())
    assert request_key(_Handler.seen[0]) in stored
    offline = RemoteTranslator(None, replay=replay)
    assert offline.translate_goal(d, 2) == ["robot_has_obj apple", "hot apple"]
    assert pickle.loads(pickle.dumps(t)).url == server


def test_remote_pipeline_solves(server, domain):
    t = RemoteTranslator(server, style="prefix")
    out = solve_directive(Directive("Pick up the apple.", mode="task"), parse_relations("on apple table"), t)
    assert out.status == "solved" and out.rank == 0
    assert _Handler.seen[0]["prompt"].startswith("translate ")


def test_service_failure_gives_no_candidates(server):
    t = RemoteTranslator(server, timeout=5)
    out = solve_directive(Directive("A broken request.", mode="task"), parse_relations("on apple table"), t)
    assert out.status == "no-candidates" and "failed" in out.message


def test_unreachable_service():
    t = RemoteTranslator("http://127.0.0.1:9/", timeout=1)
    with pytest.raises(TranslatorError):
        t.translate_goal(Directive("x", mode="task"))
