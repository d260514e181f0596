"""Keyword dictionary, quotation masking, segmentation and indexing.

The lexicon maps surface forms (synonym groups) to integer indices grouped
in bands by lexical class:

    1000-1999  actions
    2000-2999  nouns and unit nouns
    3000-3999  prepositions (including the object switch)
    4000-4999  quantifiers, number words and other function words
    5000-5499  quotation temporaries (assigned at masking time, never stored)
    6000-6499  number temporaries (assigned by number normalization)

Raw input is masked for quotations, segmented (whitespace split with
multi-word merging, or forward maximum matching for unsegmented scripts)
and turned into an :class:`IndexStream`, the integer-indexed sentence that
every later stage operates on. Lexicon snapshots are immutable; mutation
returns a new snapshot so concurrent sessions never observe partial state.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable

from .errors import EngineError

QUOTE_TEMP_BASE = 5000
NUMBER_TEMP_BASE = 6000
_TEMP_BAND = 500

GLOBAL_SCOPE = "global"


class LexClass(str, Enum):
    ACTION = "Action"
    NOUN = "Noun"
    UNIT = "Unit"
    PREPOSITION = "Preposition"
    SWITCH_PREPOSITION = "SwitchPreposition"
    QUANTIFIER = "Quantifier"
    NUMBER_WORD = "NumberWord"
    FUNCTION = "Function"


# Inclusive index bands per lexical class.
_BANDS: dict[LexClass, tuple[int, int]] = {
    LexClass.ACTION: (1000, 1999),
    LexClass.NOUN: (2000, 2999),
    LexClass.UNIT: (2000, 2999),
    LexClass.PREPOSITION: (3000, 3999),
    LexClass.SWITCH_PREPOSITION: (3000, 3999),
    LexClass.QUANTIFIER: (4000, 4999),
    LexClass.NUMBER_WORD: (4000, 4999),
    LexClass.FUNCTION: (4000, 4999),
}


class SigElem(str, Enum):
    NUMFORMAT = "NUMFORMAT"
    UNIT_NOUN = "UNIT_NOUN"
    QUOTE_LIST = "QUOTE_LIST"
    NOUN = "NOUN"


class SigRole(str, Enum):
    CONDITION = "Condition"
    SWITCH = "Switch"


@dataclass(frozen=True)
class PrepSignature:
    """Argument pattern a preposition consumes to form a condition.

    A switch preposition carries the empty Switch signature; a QUOTE_LIST
    element, if present, must be last because it consumes greedily.
    """

    elements: tuple[SigElem, ...]
    role: SigRole = SigRole.CONDITION

    def __post_init__(self) -> None:
        if self.role is SigRole.SWITCH and self.elements:
            raise ValueError("switch signature must have no elements")
        if SigElem.QUOTE_LIST in self.elements[:-1]:
            raise ValueError("QUOTE_LIST must be the final signature element")


SWITCH_SIGNATURE = PrepSignature(elements=(), role=SigRole.SWITCH)


@dataclass(frozen=True)
class WordEntry:
    """One synonym group: a shared index, lexical class and surface forms."""

    index: int
    lex_class: LexClass
    forms: tuple[str, ...]
    pos_tag: str
    signature: PrepSignature | None = None
    scope: str = GLOBAL_SCOPE

    def __post_init__(self) -> None:
        if not self.forms:
            raise ValueError(f"entry {self.index} has no surface forms")
        lo, hi = _BANDS[self.lex_class]
        if not lo <= self.index <= hi:
            raise ValueError(
                f"index {self.index} outside band {lo}-{hi} for {self.lex_class.value}"
            )
        if self.lex_class is LexClass.SWITCH_PREPOSITION and self.signature is None:
            object.__setattr__(self, "signature", SWITCH_SIGNATURE)


class ElementKind(str, Enum):
    WORD = "word"
    QUOTATION = "quotation"
    NUMBER = "number"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class IndexedElement:
    kind: ElementKind
    index: int | None
    surface: str

    def to_json_dict(self) -> dict[str, Any]:
        return {"kind": self.kind.value, "index": self.index, "surface": self.surface}


@dataclass(frozen=True)
class IndexStream:
    """The indexed sentence: elements plus the quotation payload table."""

    elements: tuple[IndexedElement, ...]
    quotations: dict[int, str]
    language_id: str

    def indices(self) -> list[int | None]:
        return [e.index for e in self.elements]

    def display(self) -> list[Any]:
        """Index per element, falling back to the surface for unknowns."""
        return [e.index if e.index is not None else e.surface for e in self.elements]


def is_quote_temp(index: int | None) -> bool:
    return index is not None and QUOTE_TEMP_BASE <= index < QUOTE_TEMP_BASE + _TEMP_BAND


def is_number_temp(index: int | None) -> bool:
    return index is not None and NUMBER_TEMP_BASE <= index < NUMBER_TEMP_BASE + _TEMP_BAND


class Lexicon:
    """Immutable dictionary snapshot. Lookups are case-insensitive."""

    def __init__(self, language_id: str, entries: Iterable[WordEntry]) -> None:
        self.language_id = language_id
        self.entries = tuple(entries)
        self._by_index: dict[int, WordEntry] = {}
        self._by_form: dict[str, int] = {}
        for entry in self.entries:
            if entry.index in self._by_index:
                raise EngineError(
                    "ParseError", f"duplicate entry index {entry.index}"
                )
            self._by_index[entry.index] = entry
            for form in entry.forms:
                key = form.casefold()
                owner = self._by_form.get(key)
                if owner is not None and owner != entry.index:
                    raise EngineError(
                        "ConflictingSurface",
                        f"form {form!r} maps to both {owner} and {entry.index}",
                    )
                self._by_form[key] = entry.index
        self._max_form_chars = max((len(f) for f in self._by_form), default=0)
        self._max_form_words = max(
            (len(f.split()) for f in self._by_form), default=1
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lexicon):
            return NotImplemented
        return (self.language_id, self.entries) == (other.language_id, other.entries)

    def __repr__(self) -> str:
        return f"Lexicon({self.language_id!r}, {len(self.entries)} entries)"

    def entry(self, index: int) -> WordEntry | None:
        return self._by_index.get(index)

    def lookup(self, surface: str) -> int | None:
        return self._by_form.get(surface.casefold())

    def representative(self, index: int) -> str:
        entry = self._by_index.get(index)
        return entry.forms[0] if entry else str(index)

    def add_synonym(self, index: int, surface: str) -> "Lexicon":
        """New snapshot in which ``surface`` is a form of entry ``index``."""
        entry = self._by_index.get(index)
        if entry is None:
            raise EngineError("UnknownIndex", f"no entry with index {index}")
        owner = self.lookup(surface)
        if owner == index:
            return self
        if owner is not None:
            raise EngineError(
                "ConflictingSurface",
                f"{surface!r} already maps to index {owner}",
            )
        updated = WordEntry(
            index=entry.index,
            lex_class=entry.lex_class,
            forms=entry.forms + (surface,),
            pos_tag=entry.pos_tag,
            signature=entry.signature,
            scope=entry.scope,
        )
        entries = tuple(updated if e.index == index else e for e in self.entries)
        return Lexicon(self.language_id, entries)

    def with_entries(self, extra: Iterable[WordEntry]) -> "Lexicon":
        """New snapshot with additional entries (suit merge)."""
        return Lexicon(self.language_id, self.entries + tuple(extra))


# --- quotation extraction ---------------------------------------------------

# Symmetric delimiters pair by shape: an opener is preceded by start-of-text
# or whitespace. Curly quotes pair by distinct open/close characters.
_SYMMETRIC = {'"', "'"}
_CURLY_OPEN, _CURLY_CLOSE = "“", "”"

_PLACEHOLDER_RE = re.compile(r"⟨Q(\d+)⟩")


def _placeholder(ordinal: int) -> str:
    return f"⟨Q{ordinal}⟩"


def _opener_shaped(text: str, i: int) -> bool:
    return (i == 0 or text[i - 1].isspace()) and i + 1 < len(text) and not text[
        i + 1
    ].isspace()


def extract_quotations(text: str) -> tuple[str, list[str]]:
    """Mask quoted spans with ordinal placeholders.

    Returns the masked text and the quotation payloads in appearance order.
    Straight, curly and single quotes are accepted; nesting is not. A
    symmetric quote inside a word (``don't``) is literal text.
    """
    out: list[str] = []
    quotes: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == _CURLY_OPEN:
            j = text.find(_CURLY_CLOSE, i + 1)
            inner_open = text.find(_CURLY_OPEN, i + 1)
            if j < 0 or (0 <= inner_open < j):
                pos = inner_open if 0 <= inner_open < (j if j >= 0 else n) else i
                raise EngineError(
                    "UnbalancedQuote", f"unclosed quote at position {pos}", position=pos
                )
            out.append(_placeholder(len(quotes)))
            quotes.append(text[i + 1 : j])
            i = j + 1
            continue
        if ch in _SYMMETRIC and _opener_shaped(text, i):
            j = i + 1
            close = -1
            while j < n:
                if text[j] == ch:
                    if _opener_shaped(text, j):
                        # A fresh opener while one is pending: the new one
                        # has no closer of its own.
                        raise EngineError(
                            "UnbalancedQuote",
                            f"unclosed quote at position {j}",
                            position=j,
                        )
                    close = j
                    break
                j += 1
            if close < 0:
                raise EngineError(
                    "UnbalancedQuote", f"unclosed quote at position {i}", position=i
                )
            out.append(_placeholder(len(quotes)))
            quotes.append(text[i + 1 : close])
            i = close + 1
            continue
        out.append(ch)
        i += 1
    return "".join(out), quotes


# --- segmentation ------------------------------------------------------------


def _split_whitespace_chunk(chunk: str, lexicon: Lexicon) -> list[str]:
    words = chunk.split()
    tokens: list[str] = []
    i = 0
    while i < len(words):
        # Width-1 always "matches" (the bare word, known or not); wider
        # joins only when the joined form is in the dictionary.
        limit = min(lexicon._max_form_words, len(words) - i)
        for width in range(limit, 0, -1):
            candidate = " ".join(words[i : i + width])
            if width > 1 and lexicon.lookup(candidate) is None:
                continue
            tokens.append(candidate)
            i += width
            break
    return tokens


# A word-script unit inside unsegmented text: letters/digits optionally
# joined by hyphens, commas or apostrophes ("1-10", "don't"). Such runs are
# atomic; maximum matching applies to the surrounding script.
_ASCII_UNIT_RE = re.compile(r"[A-Za-z0-9]+(?:['\-,][A-Za-z0-9]+)*")


def _fmm_chunk(chunk: str, lexicon: Lexicon) -> list[str]:
    """Forward maximum matching; maximal unmatched runs stay single tokens."""
    tokens: list[str] = []
    run: list[str] = []

    def flush() -> None:
        if run:
            tokens.append("".join(run))
            run.clear()

    i = 0
    n = len(chunk)
    while i < n:
        unit = _ASCII_UNIT_RE.match(chunk, i)
        if unit:
            flush()
            tokens.append(unit.group(0))
            i = unit.end()
            continue
        matched = None
        limit = min(lexicon._max_form_chars, n - i)
        for width in range(limit, 0, -1):
            if lexicon.lookup(chunk[i : i + width]) is not None:
                matched = chunk[i : i + width]
                break
        if matched is None:
            run.append(chunk[i])
            i += 1
            continue
        flush()
        tokens.append(matched)
        i += len(matched)
    flush()
    return tokens


def segment(masked: str, lexicon: Lexicon) -> list[str]:
    """Split masked text into dictionary-aligned tokens.

    Quotation placeholders are always atomic. Chunks with internal
    whitespace are split on it and adjacent words re-merge when they
    jointly match a multi-word form (longest match wins); chunks without
    whitespace go through forward maximum matching.
    """
    tokens: list[str] = []
    pos = 0
    for match in _PLACEHOLDER_RE.finditer(masked):
        before = masked[pos : match.start()]
        tokens.extend(_segment_chunk(before, lexicon))
        tokens.append(match.group(0))
        pos = match.end()
    tokens.extend(_segment_chunk(masked[pos:], lexicon))
    return tokens


def _segment_chunk(chunk: str, lexicon: Lexicon) -> list[str]:
    chunk = chunk.strip()
    if not chunk:
        return []
    if any(c.isspace() for c in chunk):
        return _split_whitespace_chunk(chunk, lexicon)
    return _fmm_chunk(chunk, lexicon)


def index_tokens(
    tokens: list[str], lexicon: Lexicon, quotations: list[str] | None = None
) -> IndexStream:
    """Turn tokens into an IndexStream.

    Dictionary tokens become word elements, placeholders become quotation
    temporaries (5000+ by extraction ordinal), everything else is kept as
    an unknown span for number normalization or the learner to claim.
    """
    quotations = quotations or []
    elements: list[IndexedElement] = []
    quote_table: dict[int, str] = {}
    for token in tokens:
        m = _PLACEHOLDER_RE.fullmatch(token)
        if m:
            ordinal = int(m.group(1))
            temp = QUOTE_TEMP_BASE + ordinal
            text = quotations[ordinal] if ordinal < len(quotations) else ""
            elements.append(IndexedElement(ElementKind.QUOTATION, temp, token))
            quote_table[temp] = text
            continue
        index = lexicon.lookup(token)
        if index is not None:
            elements.append(IndexedElement(ElementKind.WORD, index, token))
        else:
            elements.append(IndexedElement(ElementKind.UNKNOWN, None, token))
    return IndexStream(tuple(elements), quote_table, lexicon.language_id)


# --- file loading ------------------------------------------------------------

_ENTRY_FIELDS = {"index", "class", "forms", "pos", "signature"}
_SIGNATURE_FIELDS = {"elements", "role"}


def parse_entry(raw: Any, where: str, scope: str = GLOBAL_SCOPE) -> WordEntry:
    if not isinstance(raw, dict):
        raise EngineError("ParseError", f"{where}: entry must be an object")
    unknown = set(raw) - _ENTRY_FIELDS
    if unknown:
        raise EngineError(
            "ParseError", f"{where}: unknown field {sorted(unknown)[0]!r}"
        )
    try:
        lex_class = LexClass(raw["class"])
    except (KeyError, ValueError):
        raise EngineError("ParseError", f"{where}: bad or missing class")
    signature = None
    if "signature" in raw and raw["signature"] is not None:
        sig = raw["signature"]
        if not isinstance(sig, dict):
            raise EngineError("ParseError", f"{where}.signature: must be an object")
        unknown = set(sig) - _SIGNATURE_FIELDS
        if unknown:
            raise EngineError(
                "ParseError",
                f"{where}.signature: unknown field {sorted(unknown)[0]!r}",
            )
        try:
            signature = PrepSignature(
                elements=tuple(SigElem(e) for e in sig.get("elements", [])),
                role=SigRole(sig.get("role", "Condition")),
            )
        except ValueError as exc:
            raise EngineError("ParseError", f"{where}.signature: {exc}")
    forms = raw.get("forms")
    if not isinstance(forms, list) or not all(isinstance(f, str) for f in forms):
        raise EngineError("ParseError", f"{where}: forms must be a list of strings")
    try:
        return WordEntry(
            index=raw["index"],
            lex_class=lex_class,
            forms=tuple(forms),
            pos_tag=raw.get("pos", ""),
            signature=signature,
            scope=scope,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise EngineError("ParseError", f"{where}: {exc}")


def load_lexicon(source: str | Path | dict) -> Lexicon:
    """Load a lexicon file, rejecting unknown fields with their JSON path."""
    if isinstance(source, (str, Path)):
        try:
            raw = json.loads(Path(source).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise EngineError("ParseError", f"invalid JSON: {exc}")
    else:
        raw = source
    if not isinstance(raw, dict):
        raise EngineError("ParseError", "top level must be an object")
    unknown = set(raw) - {"language_id", "entries"}
    if unknown:
        raise EngineError("ParseError", f"unknown field {sorted(unknown)[0]!r}")
    language_id = raw.get("language_id")
    if not isinstance(language_id, str) or not language_id:
        raise EngineError("ParseError", "language_id must be a non-empty string")
    entries_raw = raw.get("entries")
    if not isinstance(entries_raw, list):
        raise EngineError("ParseError", "entries must be a list")
    entries = [
        parse_entry(e, f"entries[{i}]") for i, e in enumerate(entries_raw)
    ]
    return Lexicon(language_id, entries)
