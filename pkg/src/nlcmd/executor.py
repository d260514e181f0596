"""Resolution and execution of command frames against adapters.

An adapter stands in for a target application: it declares which
(action, object-concept) pairs it can perform, how dictionary indices map
to its concepts, which condition prepositions it can verify, and the
handlers that mutate its state. Resolution maps a frame onto a handler
plus concrete arguments without touching state; execution runs the
handler all-or-nothing on a private copy, so a failing command leaves
state exactly as it was.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import EngineError
from .explainer import CommandFrame, Condition, EntryView
from .numformat import NumFormat, NumFrame, NumKind

# Handler: (args, state) -> (new state, items affected). State is a private
# copy; raising EngineError aborts the command without visible mutation.
Handler = Callable[[dict[str, Any], Any], tuple[Any, int]]

# Decoder: (condition, entry view, resolve helper) -> (key, value).
ConditionDecoder = Callable[[Condition, EntryView, "NumResolver"], tuple[str, Any]]

NumResolver = Callable[[NumFormat, str], "list[int] | None"]

QUOTATION_CONCEPT = "quotation"


@dataclass(frozen=True)
class ResolvedOperation:
    adapter_id: str
    handler: str
    args: dict[str, Any]

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "adapter": self.adapter_id,
            "handler": self.handler,
            "args": _jsonable(self.args),
        }


@dataclass(frozen=True)
class ExecutionResult:
    ok: bool
    handler: str
    affected: int
    error: EngineError | None = None

    def to_json_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "ok": self.ok,
            "handler": self.handler,
            "affected": self.affected,
        }
        if self.error is not None:
            out["error"] = self.error.to_json_dict()
        return out


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


@dataclass
class Adapter:
    """An in-process application stand-in."""

    id: str
    capabilities: dict[tuple[int, str], str]
    concept_map: dict[int | str, str]
    condition_preps: frozenset[int]
    handlers: dict[str, Handler]
    make_state: Callable[[], Any]
    state_to_json: Callable[[Any], dict[str, Any]]
    decode_condition: ConditionDecoder
    build_args: Callable[[str, CommandFrame, dict[str, Any]], dict[str, Any]]
    extent_for: Callable[[Any, str], int] = field(default=lambda state, domain: 0)


def register_adapter(registry: dict[str, Adapter], adapter: Adapter) -> dict[str, Adapter]:
    """Add an adapter; returns the new registry."""
    if adapter.id in registry:
        raise EngineError("DuplicateAdapterId", f"adapter {adapter.id!r} already registered")
    for key, handler_id in adapter.capabilities.items():
        if handler_id not in adapter.handlers:
            raise EngineError(
                "DanglingHandler",
                f"capability {key} names missing handler {handler_id!r}",
            )
    out = dict(registry)
    out[adapter.id] = adapter
    return out


def _resolve_items(nf: NumFormat, extent: int, domain: str) -> list[int] | None:
    """Concrete 1-based item numbers for a number record, or None for all.

    Relative offsets count from the end (-1 is the last item). Bounds are
    checked only against non-empty extents; empty state is the handlers'
    TargetStateError, not a range error.
    """
    if nf.is_all:
        return None
    if nf.frame is NumFrame.RELATIVE:
        if any(v > 0 for v in nf.values):
            raise EngineError(
                "TargetStateError", "forward-relative addressing needs a selection"
            )
        if nf.kind is NumKind.RANGE:
            items = list(range(extent + 1 + nf.values[0], extent + 2 + nf.values[1]))
        else:
            items = [extent + 1 + nf.values[0]]
    elif nf.kind is NumKind.RANGE:
        items = list(range(nf.values[0], nf.values[1] + 1))
    elif nf.kind is NumKind.ARRAY:
        items = sorted(set(nf.values))
    else:
        items = [nf.values[0]]
    if extent > 0 and any(i < 1 or i > extent for i in items):
        raise EngineError(
            "RangeOutOfBounds",
            f"{domain} selection {items} outside 1..{extent}",
        )
    return items


def resolve(
    frame: CommandFrame,
    adapter: Adapter,
    state: Any,
    entry_view: EntryView,
    vocabulary: Callable[[int], str],
) -> ResolvedOperation:
    """Map a frame onto a handler and concrete arguments.

    Pure with respect to state: the snapshot is only read (extents for
    all-items and relative number resolution).
    """
    concept = _concept_for(adapter, frame.primary.kind, frame.primary.index)
    if concept is None:
        raise EngineError(
            "UnmappedObject",
            vocabulary(frame.primary.index),
            index=frame.primary.index,
        )
    handler = adapter.capabilities.get((frame.action, concept))
    if handler is None:
        raise EngineError(
            "UnsupportedAction",
            f"{vocabulary(frame.action)} on {concept}",
            action=frame.action,
        )

    def resolve_nf(nf: NumFormat, domain: str) -> list[int] | None:
        return _resolve_items(nf, adapter.extent_for(state, domain), domain)

    decoded: dict[str, Any] = {}
    for condition in frame.conditions:
        if condition.prep not in adapter.condition_preps:
            raise EngineError(
                "UnverifiableCondition",
                f"cannot verify condition {vocabulary(condition.prep)}",
                prep=condition.prep,
            )
        key, value = adapter.decode_condition(condition, entry_view, resolve_nf)
        if key in decoded and isinstance(decoded[key], list) and isinstance(value, list):
            decoded[key] = decoded[key] + value
        else:
            decoded[key] = value
    args = adapter.build_args(handler, frame, decoded)
    return ResolvedOperation(adapter.id, handler, args)


def _concept_for(adapter: Adapter, kind: str, index: int) -> str | None:
    if kind == "quotation":
        return adapter.concept_map.get(QUOTATION_CONCEPT)
    return adapter.concept_map.get(index)


def execute(
    resolved: ResolvedOperation, adapter: Adapter, state: Any
) -> tuple[Any, ExecutionResult]:
    """Run the handler all-or-nothing; errors leave state untouched."""
    handler = adapter.handlers[resolved.handler]
    scratch = copy.deepcopy(state)
    try:
        new_state, affected = handler(resolved.args, scratch)
    except EngineError as exc:
        return state, ExecutionResult(False, resolved.handler, 0, exc)
    return new_state, ExecutionResult(True, resolved.handler, affected)
