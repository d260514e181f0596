from __future__ import annotations

import json

from nlcmd.session import EngineRuntime, Session, trace_to_json

from conftest import EN_CORPUS, GOLDEN_FRAME, GOLDEN_SENTENCE

PIPELINE_STAGES = [
    "extract_quotations", "segment", "index", "numformat",
    "rewrite_result", "tag", "frame", "resolve", "execute",
]


def test_golden_sentence_trace(session):
    trace = session.process_command(GOLDEN_SENTENCE)
    assert trace["ok"]
    assert trace["frame"] == GOLDEN_FRAME
    assert trace["result"]["affected"] >= 0


def test_empty_input(session):
    trace = session.process_command("   ")
    assert not trace["ok"]
    assert trace["stages"] == [
        {"stage": "empty_input",
         "error": {"kind": "EmptyInput", "detail": "no command text"}}
    ]


def test_unknown_verb_awaits_selection(session):
    trace = session.process_command('frobnicate "a" with "b"')
    assert trace["awaiting"] == "selection"
    names = [s["stage"] for s in trace["stages"]]
    assert "learner_suggestions" in names


def test_trace_completeness(session):
    trace = session.process_command(GOLDEN_SENTENCE)
    names = [s["stage"] for s in trace["stages"]]
    for stage in PIPELINE_STAGES:
        assert names.count(stage) == 1, stage
    # Rewrite firings appear once each, between numformat and rewrite_result.
    firing_names = [s["rule"] for s in trace["stages"] if s["stage"] == "rewrite"]
    assert len(firing_names) == len(set(
        (s["rule"], s["position"], json.dumps(s["before"]))
        for s in trace["stages"] if s["stage"] == "rewrite"
    ))


def test_failed_stage_is_last(session):
    trace = session.process_command("make an outline of the last 2 paragraphs")
    assert not trace["ok"]
    stages = trace["stages"]
    resolve_failures = [i for i, s in enumerate(stages)
                        if s["stage"] == "resolve" and "error" in s]
    assert resolve_failures, stages
    # Only learner stages may follow the failure.
    for stage in stages[resolve_failures[0] + 1 :]:
        assert stage["stage"].startswith("learner")


def test_replay_determinism(config):
    commands = [
        GOLDEN_SENTENCE,
        "delete carriage returns in each line",
        'frobnicate "a" with "b"',
        "transform numbers in lines 1 - 3 to subscript",
    ]

    def run() -> list[str]:
        runtime = EngineRuntime(config=config)
        session = Session(runtime)
        return [trace_to_json(session.process_command(c)) for c in commands]

    assert run() == run()


def test_quotation_retry_trace(session):
    trace = session.process_command("replace apple with peach")
    assert trace["ok"]
    retry = [s for s in trace["stages"] if s["stage"] == "learner_retry_quotation"]
    assert retry and retry[0]["text"] == 'replace "apple" with "peach"'


def test_cascade_order_in_trace(session):
    trace = session.process_command('replcae "a" with "b"')
    names = [s["stage"] for s in trace["stages"]]
    plan = next(s for s in trace["stages"] if s["stage"] == "learner_plan")
    assert plan["order"] == ["retry_as_quotation", "suggest_words", "ask_rephrase"]
    assert names.index("learner_retry_quotation") < names.index("learner_suggestions")
    assert trace["awaiting"] == "selection"


def test_selection_reject_then_rephrase_capture(make_session, tmp_path):
    session = make_session(store_path=str(tmp_path / "store.json"))
    original = 'zap "a" with "b"'
    trace = session.process_command(original)
    assert trace["awaiting"] == "selection"
    trace = session.select_suggestion("zap", -1)
    assert trace["awaiting"] == "rephrase"
    trace = session.process_command('replace "a" with "b"')
    assert trace["ok"]
    assert any(s["stage"] == "special_recorded" for s in trace["stages"])
    # Identical later input short-circuits the pipeline.
    trace = session.process_command(original)
    assert trace["ok"]
    assert trace["stages"][0]["stage"] == "special_expression"
    assert all(s["stage"] != "segment" for s in trace["stages"])


def test_synonym_persists_across_sessions(runtime, tmp_path):
    store = str(tmp_path / "profile.json")
    first = Session(runtime, store_path=store)
    trace = first.process_command('erase "a" with "b"')
    assert trace["awaiting"] == "selection"
    trace = first.select_suggestion("erase", 1001)
    # 1001 maps "erase" to delete; the command itself still fails to resolve
    # (delete has no text capability) but the word now indexes.
    assert first.lexicon.lookup("erase") == 1001

    second = Session(runtime, store_path=store)
    assert second.lexicon.lookup("erase") == 1001


def test_learned_synonym_does_not_change_existing_frames(make_session, tmp_path):
    # One fresh session per command so document mutations don't interfere;
    # the property under test is purely about the dictionary refresh.
    store = str(tmp_path / "s.json")

    def frames(store_path):
        return [
            make_session(store_path=store_path).process_command(c)["frame"]
            for c in EN_CORPUS
        ]

    before = frames(None)
    assert all(f is not None for f in before)
    learner = make_session(store_path=store)
    learner.process_command('replcae "a" with "b"')
    learner.select_suggestion("replcae", 1011)
    after = frames(store)
    assert before == after


def test_conflicting_selection_leaves_lexicon_unchanged(session):
    from nlcmd.learner import Suggestion

    # Force a pending pick whose surface already belongs to another entry.
    session.pending_suggestions = {
        "original": 'delete "x"',
        "by_surface": {"delete": [Suggestion(1011, "replace", 0.5)]},
    }
    before = session.lexicon
    trace = session.select_suggestion("delete", 1011)
    assert any(
        s.get("error", {}).get("kind") == "ConflictingSurface"
        for s in trace["stages"]
    )
    assert session.lexicon is before


def test_invalid_selection_is_reported(session):
    session.process_command('frobnicate "a" with "b"')
    trace = session.select_suggestion("frobnicate", 9999)
    assert any(
        s.get("error", {}).get("kind") == "InvalidSelection" for s in trace["stages"]
    )


def test_selection_without_pending(session):
    trace = session.select_suggestion("anything", 1001)
    assert any(
        s.get("error", {}).get("kind") == "NoPendingSuggestions"
        for s in trace["stages"]
    )


def test_sessions_are_isolated(runtime):
    a = Session(runtime)
    b = Session(runtime)
    a.process_command("delete carriage returns in each line")
    assert len(a.state_json()["lines"]) == 1
    assert len(b.state_json()["lines"]) == 12


def test_load_suit_switches_adapter(session):
    from nlcmd.config import data_path

    suit = session.load_suit_source(str(data_path("shapes.suit.json")))
    assert suit.meta.id == "shapes"
    assert session.adapter_id == "shapes"
    trace = session.process_command("create a sphere with a 5 radius")
    assert trace["ok"]
    assert session.state_json()["objects"][0]["params"]["radius"] == 5


def test_execution_starts_only_after_end(runtime, monkeypatch):
    # Recording adapter check: tagging must emit the full part list (End
    # included) before any handler runs.
    import nlcmd.session as session_module

    events: list[str] = []
    original_tag = session_module.tag

    def recording_tag(stream, formats, view):
        parts = original_tag(stream, formats, view)
        events.append("end-emitted")
        return parts

    monkeypatch.setattr(session_module, "tag", recording_tag)

    session = Session(runtime)
    handler = session.adapter.handlers["delete-returns"]

    def recording_handler(args, state):
        events.append("handler-ran")
        return handler(args, state)

    monkeypatch.setitem(session.adapter.handlers, "delete-returns", recording_handler)
    trace = session.process_command("delete carriage returns in each line")
    assert trace["ok"]
    assert events == ["end-emitted", "handler-ran"]


def test_cross_language_sessions_share_config(runtime):
    en = Session(runtime)
    zh = Session(runtime, language_id="zh-toy")
    t_en = en.process_command("delete carriage returns in each line")
    t_zh = zh.process_command("删除回车符在每行")
    assert t_en["frame"] == t_zh["frame"]
