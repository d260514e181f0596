"""Per-session pipeline orchestration and the engine runtime.

A session binds one adapter, one language and one config snapshot, and
processes commands strictly sequentially. Every command yields a trace:
the ordered list of stage records (quotation extraction through execution,
plus any learner stages), with a failed stage always last. Traces carry no
timestamps or ids, so replaying a command sequence against a fresh session
with the same seed state reproduces them byte for byte.
"""

from __future__ import annotations

import json
import threading
from typing import Any

from .adapters import build_editor_adapter, build_shapes_adapter
from .config import EngineConfig, data_path, default_config
from .errors import EngineError
from .executor import Adapter, execute, register_adapter, resolve
from .explainer import CommandFrame, build_frame, tag
from .learner import (
    LearnerStore,
    Thesaurus,
    plan_recovery,
    suggest,
    DEFAULT_SUGGESTIONS,
)
from .lexicon import (
    ElementKind,
    IndexStream,
    extract_quotations,
    index_tokens,
    segment,
)
from .numformat import parse_numbers
from .rewrite import apply_rules
from .suit import Suit, export_suit, load_suit

Trace = dict[str, Any]


def trace_to_json(trace: Trace) -> str:
    return json.dumps(trace, ensure_ascii=False)


class EngineRuntime:
    """Shared engine state: config snapshot, adapters, suit store."""

    def __init__(
        self,
        config: EngineConfig | None = None,
        registry: dict[str, Adapter] | None = None,
        thesaurus: Thesaurus | None = None,
        suggestion_count: int = DEFAULT_SUGGESTIONS,
        editor_lines: list[str] | None = None,
    ) -> None:
        self.config = config or default_config()
        if registry is None:
            registry = register_adapter({}, build_editor_adapter(editor_lines))
            registry = register_adapter(registry, build_shapes_adapter())
        self.registry = registry
        self.thesaurus = thesaurus or Thesaurus.load(data_path("thesaurus.json"))
        self.suggestion_count = suggestion_count
        self.suit_store: dict[str, Suit] = {}
        self.suit_files: dict[str, bytes] = {}
        self._lock = threading.Lock()

    def add_suit_file(self, source: bytes | str | dict) -> Suit:
        """Validate and store a suit file for sharing; does not merge it."""
        with self._lock:
            merged = {s.meta.id: s for s in self.config.suits}
            probe = _peek_suit_id(source)
            if probe is not None and probe in merged:
                suit = merged[probe]
            else:
                suit = load_suit(source, self.config, self.registry)
            self.suit_store[suit.meta.id] = suit
            self.suit_files[suit.meta.id] = export_suit(suit)
            return suit

    def stored_suits(self) -> list[Suit]:
        return list(self.suit_store.values())

    def merge_suit(self, suit: Suit) -> EngineConfig:
        """Publish a new config with the suit joined; returns the snapshot."""
        with self._lock:
            if all(s.meta.id != suit.meta.id for s in self.config.suits):
                self.config = self.config.merge_suit(suit)
            self.suit_store.setdefault(suit.meta.id, suit)
            self.suit_files.setdefault(suit.meta.id, export_suit(suit))
            return self.config


def _peek_suit_id(source: bytes | str | dict) -> str | None:
    try:
        if isinstance(source, dict):
            raw = source
        elif isinstance(source, bytes):
            raw = json.loads(source.decode("utf-8"))
        else:
            raw = json.loads(str(source))
        return raw["meta"]["id"]
    except Exception:
        return None


class Session:
    """One user's command loop against one adapter."""

    def __init__(
        self,
        runtime: EngineRuntime,
        language_id: str = "en",
        adapter_id: str = "editor",
        store_path: str | None = None,
    ) -> None:
        if adapter_id not in runtime.registry:
            raise EngineError("UnknownAdapter", f"adapter {adapter_id!r} is not registered")
        self.runtime = runtime
        self.config = runtime.config
        self.language_id = language_id
        self.adapter_id = adapter_id
        self.store = LearnerStore.load(store_path)
        self.lexicon = self._lexicon_with_synonyms()
        self.states: dict[str, Any] = {}
        self.pending_suggestions: dict[str, Any] | None = None
        self.pending_rephrase: str | None = None
        self.trace_log: list[Trace] = []
        self._lock = threading.Lock()

    # --- state plumbing ---------------------------------------------------

    @property
    def adapter(self) -> Adapter:
        return self.runtime.registry[self.adapter_id]

    @property
    def state(self) -> Any:
        if self.adapter_id not in self.states:
            self.states[self.adapter_id] = self.adapter.make_state()
        return self.states[self.adapter_id]

    @state.setter
    def state(self, value: Any) -> None:
        self.states[self.adapter_id] = value

    def state_json(self) -> dict[str, Any]:
        return self.adapter.state_to_json(self.state)

    def switch_adapter(self, adapter_id: str) -> None:
        if adapter_id not in self.runtime.registry:
            raise EngineError("UnknownAdapter", f"adapter {adapter_id!r} is not registered")
        self.adapter_id = adapter_id

    def _lexicon_with_synonyms(self):
        lexicon = self.config.lexicon_for(self.language_id)
        for surface, index in self.store.synonyms:
            try:
                lexicon = lexicon.add_synonym(index, surface)
            except EngineError:
                continue  # stale entry in the store; harmless
        return lexicon

    def adopt_config(self, config: EngineConfig) -> None:
        self.config = config
        self.lexicon = self._lexicon_with_synonyms()

    def load_suit_source(self, source: bytes | str | dict) -> Suit:
        """Merge a suit into the shared config and bind to its adapter."""
        merged = {s.meta.id: s for s in self.runtime.config.suits}
        probe = _peek_suit_id(source)
        if probe is not None and probe in merged:
            suit = merged[probe]
        else:
            suit = load_suit(source, self.runtime.config, self.runtime.registry)
        self.adopt_config(self.runtime.merge_suit(suit))
        self.switch_adapter(suit.adapter_id)
        return suit

    # --- command processing -------------------------------------------------

    def process_command(self, text: str) -> Trace:
        with self._lock:
            trace = self._process(text)
            self.trace_log.append(trace)
            return trace

    def select_suggestion(self, surface: str, index: int) -> Trace:
        """Apply a suggestion pick (index -1 rejects them all)."""
        with self._lock:
            trace = self._select(surface, index)
            self.trace_log.append(trace)
            return trace

    def _new_trace(self, text: str) -> Trace:
        return {
            "input": text,
            "language": self.language_id,
            "adapter": self.adapter_id,
            "ok": False,
            "awaiting": None,
            "frame": None,
            "result": None,
            "stages": [],
        }

    def _process(self, text: str) -> Trace:
        trace = self._new_trace(text)
        stages: list[dict[str, Any]] = trace["stages"]
        stripped = text.strip()
        if not stripped:
            stages.append(
                {"stage": "empty_input",
                 "error": {"kind": "EmptyInput", "detail": "no command text"}}
            )
            return trace

        special = self.store.find_special(stripped)
        if special is not None:
            stages.append(
                {"stage": "special_expression",
                 "original": special.original, "rephrase": special.rephrase}
            )
            try:
                result = self._resolve_and_execute(special.frame, stages)
            except EngineError:
                return trace
            self._finish(trace, special.frame, result, stripped)
            return trace

        ctx: dict[str, Any] = {}
        try:
            frame, result = self._run_pipeline(stripped, stages, ctx)
            self._finish(trace, frame, result, stripped)
            return trace
        except EngineError:
            if ctx.get("frame") is not None:
                trace["frame"] = ctx["frame"].to_json_dict()
            return self._recover(trace, stripped, ctx)

    def _recover(self, trace: Trace, text: str, ctx: dict[str, Any]) -> Trace:
        stages: list[dict[str, Any]] = trace["stages"]
        stream: IndexStream | None = ctx.get("stream")
        runs = _unknown_runs(stream) if stream is not None else []
        quoted = self._rebuild_quoted(stream, ctx.get("joiner", " ")) if runs else None
        plan = plan_recovery(text, runs, quoted)
        stages.append(
            {"stage": "learner_plan",
             "order": list(plan.stages),
             "unknown": plan.unknown_surfaces}
        )
        if plan.quoted_retry is not None:
            stages.append(
                {"stage": "learner_retry_quotation", "text": plan.quoted_retry}
            )
            retry_ctx: dict[str, Any] = {}
            try:
                frame, result = self._run_pipeline(plan.quoted_retry, stages, retry_ctx)
                self._finish(trace, frame, result, text)
                return trace
            except EngineError:
                if trace["frame"] is None and retry_ctx.get("frame") is not None:
                    trace["frame"] = retry_ctx["frame"].to_json_dict()
        if plan.unknown_surfaces:
            suggestions = {
                surface: suggest(
                    surface, self.lexicon, self.runtime.thesaurus,
                    self.runtime.suggestion_count,
                )
                for surface in plan.unknown_surfaces
            }
            stages.append(
                {"stage": "learner_suggestions",
                 "suggestions": {
                     surface: [s.to_json_dict() for s in items]
                     for surface, items in suggestions.items()
                 }}
            )
            self.pending_suggestions = {"original": text, "by_surface": suggestions}
            trace["awaiting"] = "selection"
            return trace
        self._arm_rephrase(text, stages, trace)
        return trace

    def _arm_rephrase(self, original: str, stages: list, trace: Trace) -> None:
        stages.append({"stage": "learner_rephrase", "original": original})
        self.pending_rephrase = original
        trace["awaiting"] = "rephrase"

    def _select(self, surface: str, index: int) -> Trace:
        pending = self.pending_suggestions
        if pending is None:
            trace = self._new_trace(f"selection {surface!r}")
            trace["stages"].append(
                {"stage": "selection",
                 "error": {"kind": "NoPendingSuggestions",
                           "detail": "no suggestions awaiting selection"}}
            )
            return trace
        original = pending["original"]
        if index == -1:
            self.pending_suggestions = None
            trace = self._new_trace(original)
            self._arm_rephrase(original, trace["stages"], trace)
            return trace
        offered = pending["by_surface"].get(surface, [])
        if all(s.index != index for s in offered):
            trace = self._new_trace(original)
            trace["stages"].append(
                {"stage": "selection",
                 "error": {"kind": "InvalidSelection",
                           "detail": f"index {index} was not suggested for {surface!r}"}}
            )
            return trace
        try:
            self.lexicon = self.lexicon.add_synonym(index, surface)
        except EngineError as exc:
            trace = self._new_trace(original)
            trace["stages"].append({"stage": "selection", "error": exc.to_json_dict()})
            return trace
        self.store.add_synonym(surface, index)
        self.pending_suggestions = None
        trace = self._process(original)
        trace["stages"].insert(
            0, {"stage": "suggestion_accepted", "surface": surface, "index": index}
        )
        return trace

    # --- the pipeline ---------------------------------------------------------

    def _run_pipeline(
        self, text: str, stages: list[dict[str, Any]], ctx: dict[str, Any]
    ) -> tuple[CommandFrame, Any]:
        def staged(name: str, fn, payload):
            try:
                value = fn()
            except EngineError as exc:
                stages.append({"stage": name, "error": exc.to_json_dict()})
                raise
            stages.append({"stage": name, **payload(value)})
            return value

        masked, quotes = staged(
            "extract_quotations",
            lambda: extract_quotations(text),
            lambda v: {"masked": v[0], "quotations": v[1]},
        )
        ctx["joiner"] = " " if any(c.isspace() for c in masked) else ""
        tokens = staged(
            "segment",
            lambda: segment(masked, self.lexicon),
            lambda v: {"tokens": v},
        )
        stream = staged(
            "index",
            lambda: index_tokens(tokens, self.lexicon, quotes),
            lambda v: {"elements": [e.to_json_dict() for e in v.elements]},
        )
        stream, formats = staged(
            "numformat",
            lambda: parse_numbers(stream, self.lexicon),
            lambda v: {
                "indices": v[0].display(),
                "numbers": {str(k): nf.to_json_dict() for k, nf in v[1].items()},
            },
        )
        ctx["stream"] = stream
        try:
            stream, firings = apply_rules(self.config.ruleset, stream)
        except EngineError as exc:
            stages.append({"stage": "rewrite", "error": exc.to_json_dict()})
            raise
        for firing in firings:
            stages.append({"stage": "rewrite", **firing})
        stages.append({"stage": "rewrite_result", "indices": stream.display()})
        parts = staged(
            "tag",
            lambda: tag(stream, formats, self.config.entry_for),
            lambda v: {"parts": [p.to_json_dict() for p in v]},
        )
        frame = staged(
            "frame",
            lambda: build_frame(parts, self.language_id),
            lambda v: {"frame": v.to_json_dict()},
        )
        ctx["frame"] = frame
        result = self._resolve_and_execute(frame, stages)
        return frame, result

    def _resolve_and_execute(self, frame: CommandFrame, stages: list) -> Any:
        try:
            resolved = resolve(
                frame, self.adapter, self.state,
                self.config.entry_for, self.config.representative,
            )
        except EngineError as exc:
            stages.append({"stage": "resolve", "error": exc.to_json_dict()})
            raise
        stages.append({"stage": "resolve", **resolved.to_json_dict()})
        new_state, result = execute(resolved, self.adapter, self.state)
        if result.ok:
            self.state = new_state
        stages.append({"stage": "execute", "result": result.to_json_dict()})
        return result

    def _finish(self, trace: Trace, frame: CommandFrame, result: Any, text: str) -> None:
        trace["frame"] = frame.to_json_dict()
        trace["result"] = result.to_json_dict()
        trace["ok"] = bool(result.ok)
        if result.ok:
            self.pending_suggestions = None
            if self.pending_rephrase and self.pending_rephrase != text:
                special = self.store.record_special(self.pending_rephrase, text, frame)
                trace["stages"].append(
                    {"stage": "special_recorded",
                     "original": special.original, "count": special.count}
                )
                self.pending_rephrase = None

    def _rebuild_quoted(self, stream: IndexStream | None, joiner: str) -> str | None:
        """Re-quote each maximal unknown run and rebuild the sentence."""
        if stream is None:
            return None
        open_q, close_q = ('"', '"') if joiner == " " else ("“", "”")
        parts: list[str] = []
        run: list[str] = []

        def flush_run() -> None:
            if run:
                parts.append(open_q + joiner.join(run) + close_q)
                run.clear()

        for elem in stream.elements:
            if elem.kind is ElementKind.UNKNOWN:
                run.append(elem.surface)
                continue
            flush_run()
            if elem.kind is ElementKind.QUOTATION:
                parts.append(open_q + stream.quotations.get(elem.index, "") + close_q)
            else:
                parts.append(elem.surface)
        flush_run()
        return joiner.join(parts)


def _unknown_runs(stream: IndexStream) -> list[list[str]]:
    runs: list[list[str]] = []
    current: list[str] = []
    for elem in stream.elements:
        if elem.kind is ElementKind.UNKNOWN:
            current.append(elem.surface)
        elif current:
            runs.append(current)
            current = []
    if current:
        runs.append(current)
    return runs
