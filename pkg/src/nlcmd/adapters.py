"""Demo adapters: a line-oriented text editor and a shape scene.

These stand in for real application control. The editor covers the
text-manipulation commands (conditional replace, carriage-return removal,
digit styling); the scene adapter backs the shapes suit. A real
integration would plug in at the same Adapter surface.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any

from .errors import EngineError
from .executor import Adapter, NumResolver, QUOTATION_CONCEPT
from .explainer import CommandFrame, Condition, EntryView

SUBSCRIPT = "subscript"

_DIGIT_RUN_RE = re.compile(r"\d+")

# Dictionary indices the editor understands.
IDX_REPLACE, IDX_DELETE, IDX_CREATE, IDX_TRANSFORM = 1011, 1001, 1020, 1030
IDX_LINE, IDX_PARAGRAPH = 2015, 2016
IDX_RETURNS, IDX_DIGITS, IDX_SUBSCRIPT = 2030, 2050, 2060
IDX_IN, IDX_HASAND, IDX_TO, IDX_OF = 3002, 3005, 3010, 3012
IDX_PARAM_RADIUS = 3020
IDX_SPHERE = 2040


@dataclass
class EditorState:
    lines: list[str] = field(default_factory=list)
    # Per line: (start, end, style) spans, end exclusive.
    styles: list[list[tuple[int, int, str]]] = field(default_factory=list)
    selection: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        while len(self.styles) < len(self.lines):
            self.styles.append([])

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "kind": "editor",
            "lines": list(self.lines),
            "styles": [
                [{"start": s, "end": e, "style": st} for s, e, st in spans]
                for spans in self.styles
            ],
            "selection": list(self.selection) if self.selection else None,
        }


@dataclass
class SceneObject:
    kind: str
    name: str
    params: dict[str, Any]


@dataclass
class SceneState:
    objects: list[SceneObject] = field(default_factory=list)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "kind": "scene",
            "objects": [
                {"kind": o.kind, "name": o.name, "params": dict(o.params)}
                for o in self.objects
            ],
        }


# Seed document for demo sessions: lines 2 and 7 contain apple, orange and
# bread together (so the conditional replace visibly does something) and
# lines 1-3 carry digits for the subscript-transform example.
DEMO_DOCUMENT = [
    "orchard tour notes, day 3",
    "apple pie with orange zest on fresh bread",
    "bread crumbs from 12 counters",
    "apple cider pressed in the barn",
    "orange juice bottled at stall 5",
    "a quiet filler line",
    "apple bread with orange marmalade",
    "just bread and butter here",
    "orange and apple baskets stacked",
    "tally 47 crates before lunch",
    "another filler line",
    "final line of the notes",
]


def _paragraph_spans(lines: list[str]) -> list[tuple[int, int]]:
    """Maximal runs of non-empty lines, 1-based inclusive."""
    spans: list[tuple[int, int]] = []
    start = None
    for i, line in enumerate(lines, start=1):
        if line and start is None:
            start = i
        elif not line and start is not None:
            spans.append((start, i - 1))
            start = None
    if start is not None:
        spans.append((start, len(lines)))
    return spans


def _editor_extent(state: EditorState, domain: str) -> int:
    if domain == "lines":
        return len(state.lines)
    if domain == "paragraphs":
        return len(_paragraph_spans(state.lines))
    return 0


def _decode_editor_condition(
    condition: Condition, entry_view: EntryView, resolve_nf: NumResolver
) -> tuple[str, Any]:
    if condition.prep in (IDX_IN, IDX_OF):
        unit = condition.indices[-1]
        domain = {IDX_LINE: "lines", IDX_PARAGRAPH: "paragraphs"}.get(unit)
        if domain is None or condition.numformat is None:
            raise EngineError("UnverifiableCondition", "unusable scope condition")
        items = resolve_nf(condition.numformat, domain)
        return "scopes", [(domain, items)]
    if condition.prep == IDX_HASAND:
        return "must_contain", list(condition.quotes or ())
    if condition.prep == IDX_TO:
        target = condition.indices[-1]
        if target != IDX_SUBSCRIPT:
            raise EngineError("UnverifiableCondition", "unknown style target")
        return "style", SUBSCRIPT
    raise EngineError("UnverifiableCondition", f"preposition {condition.prep}")


def _build_editor_args(
    handler: str, frame: CommandFrame, decoded: dict[str, Any]
) -> dict[str, Any]:
    args: dict[str, Any] = {"scopes": decoded.get("scopes", [])}
    if handler == "replace-text":
        if frame.primary.kind != "quotation" or frame.secondary is None or (
            frame.secondary.kind != "quotation"
        ):
            raise EngineError(
                "IncompleteFrame", "replace needs quoted find and replacement values"
            )
        args["find"] = frame.primary.text
        args["repl"] = frame.secondary.text
        args["must_contain"] = decoded.get("must_contain", [])
    elif handler == "transform-digits":
        style = decoded.get("style")
        if style is None:
            raise EngineError("IncompleteFrame", "transform needs a target style")
        args["style"] = style
    return args


def _selected_lines(state: EditorState, scopes: list[tuple[str, Any]]) -> list[int]:
    selected = set(range(1, len(state.lines) + 1))
    for domain, items in scopes:
        if domain == "lines":
            chosen = selected if items is None else set(items)
        else:
            spans = _paragraph_spans(state.lines)
            wanted = range(1, len(spans) + 1) if items is None else items
            chosen = set()
            for p in wanted:
                if 1 <= p <= len(spans):
                    lo, hi = spans[p - 1]
                    chosen.update(range(lo, hi + 1))
        selected &= chosen
    return sorted(selected)


def _require_document(state: EditorState) -> None:
    if not state.lines:
        raise EngineError("TargetStateError", "the document is empty")


def _clamp_styles(state: EditorState, line_no: int) -> None:
    limit = len(state.lines[line_no - 1])
    spans = state.styles[line_no - 1]
    state.styles[line_no - 1] = [
        (s, min(e, limit), st) for s, e, st in spans if s < limit
    ]


def _replace_text(args: dict[str, Any], state: EditorState) -> tuple[EditorState, int]:
    _require_document(state)
    must = args.get("must_contain", [])
    changed = 0
    for line_no in _selected_lines(state, args["scopes"]):
        line = state.lines[line_no - 1]
        if all(needle in line for needle in must):
            replaced = line.replace(args["find"], args["repl"])
            if replaced != line:
                state.lines[line_no - 1] = replaced
                _clamp_styles(state, line_no)
                changed += 1
    return state, changed


def _delete_returns(args: dict[str, Any], state: EditorState) -> tuple[EditorState, int]:
    _require_document(state)
    selected = _selected_lines(state, args["scopes"])
    removed = 0
    # Join bottom-up so line numbers stay valid; only adjacent selected
    # non-empty lines merge, which keeps paragraph breaks (empty lines).
    selected_set = set(selected)
    for line_no in sorted(selected, reverse=True):
        if line_no + 1 not in selected_set or line_no + 1 > len(state.lines):
            continue
        a, b = line_no - 1, line_no
        if state.lines[a] and state.lines[b]:
            offset = len(state.lines[a])
            state.lines[a] += state.lines[b]
            state.styles[a] += [
                (s + offset, e + offset, st) for s, e, st in state.styles[b]
            ]
            del state.lines[b]
            del state.styles[b]
            removed += 1
    return state, removed


def _transform_digits(args: dict[str, Any], state: EditorState) -> tuple[EditorState, int]:
    _require_document(state)
    style = args["style"]
    marked = 0
    for line_no in _selected_lines(state, args["scopes"]):
        line = state.lines[line_no - 1]
        for m in _DIGIT_RUN_RE.finditer(line):
            span = (m.start(), m.end(), style)
            if span not in state.styles[line_no - 1]:
                state.styles[line_no - 1].append(span)
                marked += 1
    return state, marked


def build_editor_adapter(initial_lines: list[str] | None = None) -> Adapter:
    seed = list(DEMO_DOCUMENT) if initial_lines is None else list(initial_lines)
    return Adapter(
        id="editor",
        capabilities={
            (IDX_REPLACE, "text"): "replace-text",
            (IDX_DELETE, "line-breaks"): "delete-returns",
            (IDX_TRANSFORM, "digits"): "transform-digits",
        },
        concept_map={
            QUOTATION_CONCEPT: "text",
            IDX_RETURNS: "line-breaks",
            IDX_DIGITS: "digits",
        },
        condition_preps=frozenset({IDX_IN, IDX_HASAND, IDX_TO, IDX_OF}),
        handlers={
            "replace-text": _replace_text,
            "delete-returns": _delete_returns,
            "transform-digits": _transform_digits,
        },
        make_state=lambda: EditorState(lines=list(seed)),
        state_to_json=lambda state: state.to_json_dict(),
        decode_condition=_decode_editor_condition,
        build_args=_build_editor_args,
        extent_for=_editor_extent,
    )


# --- shapes ------------------------------------------------------------------


def _decode_shape_condition(
    condition: Condition, entry_view: EntryView, resolve_nf: NumResolver
) -> tuple[str, Any]:
    if condition.prep == IDX_PARAM_RADIUS and condition.numformat is not None:
        values = condition.numformat.values
        if condition.numformat.is_all or len(values) != 1:
            raise EngineError("UnverifiableCondition", "radius needs a single number")
        return "radius", values[0]
    raise EngineError("UnverifiableCondition", f"preposition {condition.prep}")


def _build_shape_args(
    handler: str, frame: CommandFrame, decoded: dict[str, Any]
) -> dict[str, Any]:
    if "radius" not in decoded:
        raise EngineError("IncompleteFrame", "shape creation needs a radius")
    return {"kind": "sphere", "radius": decoded["radius"]}


def _create_shape(args: dict[str, Any], state: SceneState) -> tuple[SceneState, int]:
    radius = args["radius"]
    if radius <= 0:
        raise EngineError("TargetStateError", "shape parameters must be positive")
    count = sum(1 for o in state.objects if o.kind == args["kind"])
    state.objects.append(
        SceneObject(args["kind"], f"{args['kind']}{count + 1}", {"radius": radius})
    )
    return state, 1


def build_shapes_adapter() -> Adapter:
    return Adapter(
        id="shapes",
        capabilities={(IDX_CREATE, "sphere"): "create-shape"},
        concept_map={IDX_SPHERE: "sphere"},
        condition_preps=frozenset({IDX_PARAM_RADIUS}),
        handlers={"create-shape": _create_shape},
        make_state=SceneState,
        state_to_json=lambda state: state.to_json_dict(),
        decode_condition=_decode_shape_condition,
        build_args=_build_shape_args,
    )
