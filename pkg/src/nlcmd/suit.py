"""Loadable extension packs: dictionary entries, specific rules, adapter.

A suit file is a single JSON document. Loading fully validates it against
the current engine config (index bands and collisions, rule compilation,
adapter existence) without touching any engine state; merging happens
separately and produces a new immutable config. Export is canonical
(sorted keys, two-space indent), so re-exporting an unmodified suit is
byte-stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Any

from .errors import EngineError
from .executor import Adapter
from .lexicon import WordEntry, parse_entry
from .rewrite import BUILTIN_TEMP_CLASSES, compile_rule

if TYPE_CHECKING:
    from .config import EngineConfig

_META_FIELDS = {"id", "name", "version", "language_id"}
_SUIT_FIELDS = {"meta", "entries", "rules", "temp_classes", "adapter_id"}


@dataclass(frozen=True)
class SuitMeta:
    id: str
    name: str
    version: str
    language_id: str


@dataclass(frozen=True)
class Suit:
    meta: SuitMeta
    entries: tuple[WordEntry, ...]
    rules: tuple[str, ...]
    temp_classes: dict[str, frozenset[int]]
    adapter_id: str

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Suit):
            return NotImplemented
        return (
            self.meta == other.meta
            and self.entries == other.entries
            and self.rules == other.rules
            and self.temp_classes == other.temp_classes
            and self.adapter_id == other.adapter_id
        )


def load_suit(
    source: str | Path | bytes | dict,
    config: "EngineConfig",
    registry: dict[str, Adapter],
) -> Suit:
    """Parse and validate a suit file; engine state is not touched."""
    raw = _read_json(source)
    unknown = set(raw) - _SUIT_FIELDS
    if unknown:
        raise EngineError("ParseError", f"unknown field {sorted(unknown)[0]!r}")
    meta_raw = raw.get("meta")
    if not isinstance(meta_raw, dict):
        raise EngineError("ParseError", "meta: must be an object")
    unknown = set(meta_raw) - _META_FIELDS
    if unknown:
        raise EngineError("ParseError", f"meta: unknown field {sorted(unknown)[0]!r}")
    missing = _META_FIELDS - set(meta_raw)
    if missing:
        raise EngineError("ParseError", f"meta: missing field {sorted(missing)[0]!r}")
    meta = SuitMeta(**{k: str(meta_raw[k]) for k in _META_FIELDS})

    entries = tuple(
        parse_entry(e, f"entries[{i}]", scope=meta.id)
        for i, e in enumerate(raw.get("entries", []))
    )
    loaded = {e.index for lex in config.lexicons.values() for e in lex.entries}
    for suit in config.suits:
        loaded.update(e.index for e in suit.entries)
    for entry in entries:
        if entry.index in loaded:
            raise EngineError(
                "IndexCollision", f"index {entry.index} is already in use"
            )

    temp_classes_raw = raw.get("temp_classes", {})
    if not isinstance(temp_classes_raw, dict):
        raise EngineError("ParseError", "temp_classes: must be an object")
    temp_classes: dict[str, frozenset[int]] = {}
    for name, members in temp_classes_raw.items():
        if name in BUILTIN_TEMP_CLASSES:
            raise EngineError("ParseError", f"temp_classes: {name!r} is built in")
        if not isinstance(members, list) or not all(isinstance(m, int) for m in members):
            raise EngineError(
                "ParseError", f"temp_classes.{name}: must be a list of integers"
            )
        temp_classes[name] = frozenset(members)

    adapter_id = raw.get("adapter_id")
    if not isinstance(adapter_id, str) or adapter_id not in registry:
        raise EngineError("UnknownAdapter", f"adapter {adapter_id!r} is not registered")

    rules_raw = raw.get("rules", [])
    if not isinstance(rules_raw, list) or not all(isinstance(r, str) for r in rules_raw):
        raise EngineError("ParseError", "rules: must be a list of strings")
    # Throwaway compile against base lexicon + suit entries to validate.
    base = config.lexicons.get(meta.language_id)
    if base is None:
        raise EngineError(
            "ParseError", f"meta.language_id {meta.language_id!r} has no base lexicon"
        )
    trial = base.with_entries(entries)
    classes = dict(config.temp_classes)
    classes.update(temp_classes)
    for i, text in enumerate(rules_raw):
        try:
            compile_rule(text, trial, classes, scope=meta.id)
        except EngineError as exc:
            raise EngineError(
                "RuleCompileError", f"rules[{i}]: {exc.detail}"
            ) from exc

    return Suit(
        meta=meta,
        entries=entries,
        rules=tuple(rules_raw),
        temp_classes=temp_classes,
        adapter_id=adapter_id,
    )


def _read_json(source: str | Path | bytes | dict) -> dict[str, Any]:
    if isinstance(source, dict):
        return source
    try:
        if isinstance(source, bytes):
            raw = json.loads(source.decode("utf-8"))
        else:
            path = Path(source)
            if path.exists():
                raw = json.loads(path.read_text(encoding="utf-8"))
            else:
                raw = json.loads(str(source))
    except (json.JSONDecodeError, UnicodeDecodeError, OSError) as exc:
        raise EngineError("ParseError", f"invalid suit file: {exc}")
    if not isinstance(raw, dict):
        raise EngineError("ParseError", "top level must be an object")
    return raw


def export_suit(suit: Suit) -> bytes:
    """Canonical serialization; load(export(s)) is identity."""
    payload = {
        "meta": {
            "id": suit.meta.id,
            "name": suit.meta.name,
            "version": suit.meta.version,
            "language_id": suit.meta.language_id,
        },
        "entries": [_entry_to_json(e) for e in suit.entries],
        "rules": list(suit.rules),
        "temp_classes": {k: sorted(v) for k, v in sorted(suit.temp_classes.items())},
        "adapter_id": suit.adapter_id,
    }
    return (
        json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
    ).encode("utf-8")


def _entry_to_json(entry: WordEntry) -> dict[str, Any]:
    out: dict[str, Any] = {
        "index": entry.index,
        "class": entry.lex_class.value,
        "forms": list(entry.forms),
        "pos": entry.pos_tag,
    }
    if entry.signature is not None and entry.signature.elements:
        out["signature"] = {
            "elements": [e.value for e in entry.signature.elements],
            "role": entry.signature.role.value,
        }
    return out
