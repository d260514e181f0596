"""Tagging the canonical stream into functional parts.

Consumes a rewritten index stream and emits tagged parts in order: the
leading action, conditions opened by prepositions (each consuming the
elements its signature regulates), the first bare object as primary, and
the object after a switch preposition as secondary. The part list ends
with an End marker; execution must not begin before it.

Frames are language-free: apart from quotation payloads they contain only
integer indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable

from .errors import EngineError
from .lexicon import (
    ElementKind,
    IndexStream,
    IndexedElement,
    LexClass,
    SigElem,
    SigRole,
    WordEntry,
)
from .numformat import NumFormat

EntryView = Callable[[int], "WordEntry | None"]


class PartTag(str, Enum):
    ACTION = "action"
    PRIMARY = "primary"
    SECONDARY = "secondary"
    CONDITION = "condition"
    END = "end"


@dataclass(frozen=True)
class TaggedPart:
    tag: PartTag
    indices: tuple[int, ...] = ()
    ordinal: int | None = None  # condition number, 0-based
    numformat: NumFormat | None = None
    quotes: tuple[str, ...] | None = None
    text: str | None = None  # quotation payload for object parts

    def to_json_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"tag": self.tag.value, "indices": list(self.indices)}
        if self.ordinal is not None:
            out["ordinal"] = self.ordinal
        if self.numformat is not None:
            out["numformat"] = self.numformat.to_json_dict()
        if self.quotes is not None:
            out["quotes"] = list(self.quotes)
        if self.text is not None:
            out["text"] = self.text
        return out


@dataclass(frozen=True)
class ObjectRef:
    kind: str  # "word" | "quotation"
    index: int
    text: str | None = None

    def to_json_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "index": self.index}
        if self.kind == "quotation":
            out["text"] = self.text
        return out


@dataclass(frozen=True)
class Condition:
    prep: int
    indices: tuple[int, ...]
    numformat: NumFormat | None = None
    quotes: tuple[str, ...] | None = None

    def to_json_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"prep": self.prep, "indices": list(self.indices)}
        if self.numformat is not None:
            out["numformat"] = self.numformat.to_json_dict()
        if self.quotes is not None:
            out["quotes"] = list(self.quotes)
        return out


@dataclass(frozen=True)
class CommandFrame:
    action: int
    primary: ObjectRef
    secondary: ObjectRef | None
    conditions: tuple[Condition, ...]
    language_id: str

    def to_json_dict(self) -> dict[str, Any]:
        # language_id deliberately stays out: serialized frames are the
        # cross-language currency.
        return {
            "action": self.action,
            "primary": self.primary.to_json_dict(),
            "secondary": self.secondary.to_json_dict() if self.secondary else None,
            "conditions": [c.to_json_dict() for c in self.conditions],
        }


def _unknown_runs(elements: tuple[IndexedElement, ...]) -> list[list[str]]:
    runs: list[list[str]] = []
    current: list[str] = []
    for elem in elements:
        if elem.kind is ElementKind.UNKNOWN:
            current.append(elem.surface)
        elif current:
            runs.append(current)
            current = []
    if current:
        runs.append(current)
    return runs


def tag(
    stream: IndexStream,
    numformats: dict[int, NumFormat],
    entry_view: EntryView,
) -> list[TaggedPart]:
    """Tag a canonical-order stream into parts, ending with End.

    Conditions may precede or follow the object slots; the switch word's
    own index rides in the secondary part so that concatenating all part
    indices reproduces the stream exactly.
    """
    elements = stream.elements
    runs = _unknown_runs(elements)
    if runs:
        surfaces = [s for run in runs for s in run]
        raise EngineError(
            "UnknownWords",
            "unknown words: " + ", ".join(surfaces),
            runs=runs,
            surfaces=surfaces,
        )
    if not elements:
        raise EngineError("NoActionFound", "empty command")

    first = elements[0]
    first_entry = entry_view(first.index) if first.index is not None else None
    if (
        first.kind is not ElementKind.WORD
        or first_entry is None
        or first_entry.lex_class is not LexClass.ACTION
    ):
        raise EngineError("NoActionFound", "command does not start with an action")

    parts: list[TaggedPart] = [TaggedPart(PartTag.ACTION, (first.index,))]
    primary: IndexedElement | None = None
    secondary: IndexedElement | None = None
    pending_switch: int | None = None
    condition_count = 0

    def assign_object(elem: IndexedElement, text: str | None) -> None:
        nonlocal primary, secondary, pending_switch
        if pending_switch is not None:
            if secondary is not None:
                raise EngineError("MultipleObjects", f"extra object {elem.surface!r}")
            secondary = elem
            parts.append(
                TaggedPart(
                    PartTag.SECONDARY, (pending_switch, elem.index), text=text
                )
            )
            pending_switch = None
        elif primary is None:
            primary = elem
            parts.append(TaggedPart(PartTag.PRIMARY, (elem.index,), text=text))
        else:
            raise EngineError(
                "MultipleObjects",
                f"second bare object {elem.surface!r} with no switch",
            )

    i = 1
    n = len(elements)
    while i < n:
        elem = elements[i]
        if elem.kind is ElementKind.QUOTATION:
            assign_object(elem, stream.quotations.get(elem.index, ""))
            i += 1
            continue
        if elem.kind is ElementKind.NUMBER:
            raise EngineError(
                "UnexpectedElement", f"number {elem.surface!r} outside any condition"
            )
        entry = entry_view(elem.index)  # type: ignore[arg-type]
        if entry is None:
            raise EngineError("UnknownWords", f"unindexed word {elem.surface!r}")
        if entry.lex_class is LexClass.NOUN:
            assign_object(elem, None)
            i += 1
            continue
        if entry.lex_class is LexClass.SWITCH_PREPOSITION:
            if pending_switch is not None:
                raise EngineError("DanglingPreposition", f"{elem.surface!r} repeated")
            pending_switch = elem.index
            i += 1
            continue
        if entry.lex_class is LexClass.PREPOSITION:
            part, i = _consume_condition(
                elem, entry, elements, i, stream, numformats, entry_view,
                condition_count, primary is not None,
            )
            parts.append(part)
            condition_count += 1
            continue
        raise EngineError(
            "UnexpectedElement",
            f"{entry.lex_class.value} word {elem.surface!r} out of place",
        )

    if pending_switch is not None:
        raise EngineError("DanglingPreposition", "switch preposition with no object")
    parts.append(TaggedPart(PartTag.END))
    return parts


def _consume_condition(
    prep_elem: IndexedElement,
    prep_entry: WordEntry,
    elements: tuple[IndexedElement, ...],
    i: int,
    stream: IndexStream,
    numformats: dict[int, NumFormat],
    entry_view: EntryView,
    ordinal: int,
    have_primary: bool,
) -> tuple[TaggedPart, int]:
    signature = prep_entry.signature
    if signature is None or signature.role is not SigRole.CONDITION:
        raise EngineError(
            "DanglingPreposition", f"{prep_elem.surface!r} has no condition signature"
        )
    indices: list[int] = [prep_elem.index]  # type: ignore[list-item]
    numformat: NumFormat | None = None
    quotes: list[str] | None = None
    j = i + 1
    n = len(elements)
    for sig_elem in signature.elements:
        if sig_elem is SigElem.QUOTE_LIST:
            run: list[IndexedElement] = []
            while j < n and elements[j].kind is ElementKind.QUOTATION:
                run.append(elements[j])
                j += 1
            # The list consumes greedily, but never the quote the frame
            # still needs as its primary object: if nothing usable follows
            # (stream end or a switch), the last quote is given back.
            if not have_primary and run:
                nxt = elements[j] if j < n else None
                nxt_entry = (
                    entry_view(nxt.index)
                    if nxt is not None and nxt.index is not None
                    else None
                )
                next_is_object = nxt is not None and (
                    nxt.kind is ElementKind.QUOTATION
                    or (nxt_entry is not None and nxt_entry.lex_class is LexClass.NOUN)
                )
                if not next_is_object:
                    run.pop()
                    j -= 1
            if not run:
                raise EngineError(
                    "DanglingPreposition",
                    f"{prep_elem.surface!r} expected at least one quotation",
                )
            indices.extend(e.index for e in run)  # type: ignore[arg-type]
            quotes = [stream.quotations.get(e.index, "") for e in run]
            continue
        if j >= n:
            raise EngineError(
                "DanglingPreposition",
                f"{prep_elem.surface!r} missing a {sig_elem.value} argument",
            )
        arg = elements[j]
        arg_entry = entry_view(arg.index) if arg.index is not None else None
        if sig_elem is SigElem.NUMFORMAT:
            if arg.kind is not ElementKind.NUMBER:
                raise EngineError(
                    "DanglingPreposition",
                    f"{prep_elem.surface!r} expected a number expression",
                )
            numformat = numformats[arg.index]  # type: ignore[index]
        elif sig_elem is SigElem.UNIT_NOUN:
            if arg_entry is None or arg_entry.lex_class is not LexClass.UNIT:
                raise EngineError(
                    "DanglingPreposition",
                    f"{prep_elem.surface!r} expected a unit noun",
                )
        elif sig_elem is SigElem.NOUN:
            if arg_entry is None or arg_entry.lex_class is not LexClass.NOUN:
                raise EngineError(
                    "DanglingPreposition", f"{prep_elem.surface!r} expected a noun"
                )
        indices.append(arg.index)  # type: ignore[arg-type]
        j += 1
    part = TaggedPart(
        PartTag.CONDITION,
        tuple(indices),
        ordinal=ordinal,
        numformat=numformat,
        quotes=tuple(quotes) if quotes is not None else None,
    )
    return part, j


def build_frame(parts: list[TaggedPart], language_id: str = "") -> CommandFrame:
    """Assemble the streamed parts into a command frame."""
    if not parts or parts[-1].tag is not PartTag.END:
        raise EngineError("IncompleteFrame", "part stream not terminated by End")
    action: int | None = None
    primary: ObjectRef | None = None
    secondary: ObjectRef | None = None
    conditions: list[Condition] = []
    for part in parts[:-1]:
        if part.tag is PartTag.ACTION:
            if action is not None:
                raise EngineError("IncompleteFrame", "multiple actions")
            action = part.indices[0]
        elif part.tag is PartTag.PRIMARY:
            if primary is not None:
                raise EngineError("IncompleteFrame", "multiple primary objects")
            primary = _object_ref(part.indices[-1], part.text)
        elif part.tag is PartTag.SECONDARY:
            if secondary is not None:
                raise EngineError("IncompleteFrame", "multiple secondary objects")
            secondary = _object_ref(part.indices[-1], part.text)
        elif part.tag is PartTag.CONDITION:
            conditions.append(
                Condition(
                    prep=part.indices[0],
                    indices=part.indices,
                    numformat=part.numformat,
                    quotes=part.quotes,
                )
            )
        else:
            raise EngineError("IncompleteFrame", "End before the final part")
    if action is None:
        raise EngineError("IncompleteFrame", "no action part")
    if primary is None:
        raise EngineError("IncompleteFrame", "no primary object")
    return CommandFrame(
        action=action,
        primary=primary,
        secondary=secondary,
        conditions=tuple(conditions),
        language_id=language_id,
    )


def _object_ref(index: int, text: str | None) -> ObjectRef:
    from .lexicon import is_quote_temp

    if is_quote_temp(index):
        return ObjectRef("quotation", index, text if text is not None else "")
    return ObjectRef("word", index)


def frame_from_json(raw: dict[str, Any], language_id: str = "") -> CommandFrame:
    """Rebuild a frame from its serialized form (learner store files)."""
    from .numformat import NumFormat, NumFrame, NumKind

    def ref(obj: dict[str, Any] | None) -> ObjectRef | None:
        if obj is None:
            return None
        return ObjectRef(obj["kind"], obj["index"], obj.get("text"))

    conditions = []
    for cond in raw.get("conditions", []):
        nf = None
        if "numformat" in cond:
            nf_raw = cond["numformat"]
            is_all = nf_raw["values"] == "all"
            nf = NumFormat(
                NumKind(nf_raw["kind"]),
                () if is_all else tuple(nf_raw["values"]),
                NumFrame(nf_raw["frame"]),
                is_all=is_all,
            )
        conditions.append(
            Condition(
                prep=cond["prep"],
                indices=tuple(cond["indices"]),
                numformat=nf,
                quotes=tuple(cond["quotes"]) if "quotes" in cond else None,
            )
        )
    primary = ref(raw["primary"])
    assert primary is not None
    return CommandFrame(
        action=raw["action"],
        primary=primary,
        secondary=ref(raw.get("secondary")),
        conditions=tuple(conditions),
        language_id=language_id,
    )
