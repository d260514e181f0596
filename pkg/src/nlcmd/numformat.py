"""Number-expression normalization.

Detects maximal number expressions in an index stream (digit tokens,
number words, ordinal words, quantifiers, and the range/list connectives
``-``, ``–``, ``,`` and "and" between numerals) and replaces each with a
number temporary bound to a normalized :class:`NumFormat` record: cardinal,
ordinal, range or array, flagged absolute or relative.

Relative values are signed offsets: -1 is the last item, -2 the one before
it, +1 the next item from the current position. The quantifiers "each" and
"every" normalize to the distinguished all-items array; the adapter expands
it against the actual extent at resolve time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Any

from .errors import EngineError
from .lexicon import (
    NUMBER_TEMP_BASE,
    ElementKind,
    IndexStream,
    IndexedElement,
    LexClass,
    Lexicon,
)


class NumKind(str, Enum):
    CARDINAL = "cardinal"
    ORDINAL = "ordinal"
    RANGE = "range"
    ARRAY = "array"


class NumFrame(str, Enum):
    ABSOLUTE = "absolute"
    RELATIVE = "relative"


@dataclass(frozen=True)
class NumFormat:
    kind: NumKind
    values: tuple[int, ...]
    frame: NumFrame = NumFrame.ABSOLUTE
    is_all: bool = False

    def __post_init__(self) -> None:
        if self.is_all and self.kind is not NumKind.ARRAY:
            raise ValueError("the all-items marker requires kind=array")
        if (
            self.kind is NumKind.RANGE
            and self.frame is NumFrame.ABSOLUTE
            and self.values[0] > self.values[1]
        ):
            raise ValueError("absolute range must be ascending")

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "values": "all" if self.is_all else list(self.values),
            "frame": self.frame.value,
        }


ALL_ITEMS = NumFormat(NumKind.ARRAY, (), is_all=True)


# --- per-language numeral vocabulary -----------------------------------------

_EN_UNITS = {
    "zero": 0, "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10, "eleven": 11,
    "twelve": 12, "thirteen": 13, "fourteen": 14, "fifteen": 15,
    "sixteen": 16, "seventeen": 17, "eighteen": 18, "nineteen": 19,
}
_EN_TENS = {
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50,
    "sixty": 60, "seventy": 70, "eighty": 80, "ninety": 90,
}
_EN_ORDINAL_UNITS = {
    "first": 1, "second": 2, "third": 3, "fourth": 4, "fifth": 5,
    "sixth": 6, "seventh": 7, "eighth": 8, "ninth": 9, "tenth": 10,
    "eleventh": 11, "twelfth": 12, "thirteenth": 13, "fourteenth": 14,
    "fifteenth": 15, "sixteenth": 16, "seventeenth": 17, "eighteenth": 18,
    "nineteenth": 19,
}
_EN_ORDINAL_TENS = {
    "twentieth": 20, "thirtieth": 30, "fortieth": 40, "fiftieth": 50,
    "sixtieth": 60, "seventieth": 70, "eightieth": 80, "ninetieth": 90,
}

_DIGITS_RE = re.compile(r"\d+")
_ORDINAL_DIGITS_RE = re.compile(r"(\d+)(st|nd|rd|th)", re.IGNORECASE)

_CONNECTIVES = {"-", "–", ","}


@dataclass(frozen=True)
class NumeralTable:
    """Surface vocabulary for one language's number expressions."""

    units: dict[str, int]
    tens: dict[str, int]
    ordinal_units: dict[str, int]
    ordinal_tens: dict[str, int]
    relatives: dict[str, int]  # marker -> direction (-1 back, +1 forward)
    and_word: str | None

    def is_numeral_piece(self, piece: str) -> bool:
        p = piece.casefold()
        return (
            _DIGITS_RE.fullmatch(piece) is not None
            or _ORDINAL_DIGITS_RE.fullmatch(piece) is not None
            or p in self.units
            or p in self.tens
            or p in self.ordinal_units
            or p in self.ordinal_tens
            or p in self.relatives
            or piece in _CONNECTIVES
        )


_TABLES: dict[str, NumeralTable] = {
    "en": NumeralTable(
        units=_EN_UNITS,
        tens=_EN_TENS,
        ordinal_units=_EN_ORDINAL_UNITS,
        ordinal_tens=_EN_ORDINAL_TENS,
        relatives={"last": -1, "next": 1},
        and_word="and",
    ),
    "zh-toy": NumeralTable(
        units={},
        tens={},
        ordinal_units={},
        ordinal_tens={},
        relatives={"最后": -1},
        and_word=None,
    ),
}


def table_for(language_id: str) -> NumeralTable:
    return _TABLES.get(language_id, _TABLES["en"])


# --- numeral parsing ----------------------------------------------------------


def parse_numeral(tokens: list[str], table: NumeralTable | None = None) -> int:
    """Parse a numeral word/digit sequence to its integer value.

    Compositional number words combine (tens + units, optionally
    hyphenated). Ordinal forms yield their value too — whether the caller
    treats it as ordinal is the caller's flag. Raises NotANumeral for
    anything else.
    """
    table = table or _TABLES["en"]
    value, _ = _parse_value(tokens, table)
    return value


def _parse_value(tokens: list[str], table: NumeralTable) -> tuple[int, NumKind]:
    if not tokens:
        raise EngineError("NotANumeral", "empty numeral")
    if len(tokens) == 1:
        tok = tokens[0]
        if _DIGITS_RE.fullmatch(tok):
            return int(tok), NumKind.CARDINAL
        m = _ORDINAL_DIGITS_RE.fullmatch(tok)
        if m:
            return int(m.group(1)), NumKind.ORDINAL
        p = tok.casefold()
        if p in table.units:
            return table.units[p], NumKind.CARDINAL
        if p in table.tens:
            return table.tens[p], NumKind.CARDINAL
        if p in table.ordinal_units:
            return table.ordinal_units[p], NumKind.ORDINAL
        if p in table.ordinal_tens:
            return table.ordinal_tens[p], NumKind.ORDINAL
        if "-" in tok:
            return _parse_value(tok.split("-"), table)
        raise EngineError("NotANumeral", f"not a numeral: {tok}")
    if len(tokens) == 2:
        tens = tokens[0].casefold()
        unit = tokens[1].casefold()
        if tens in table.tens:
            if unit in table.units and 1 <= table.units[unit] <= 9:
                return table.tens[tens] + table.units[unit], NumKind.CARDINAL
            if unit in table.ordinal_units and 1 <= table.ordinal_units[unit] <= 9:
                return table.tens[tens] + table.ordinal_units[unit], NumKind.ORDINAL
    raise EngineError("NotANumeral", f"not a numeral: {' '.join(tokens)}")


# --- stream transformation ----------------------------------------------------

# Character-level sub-lexer: an unknown span like "1-10" or "1," carries its
# connectives attached; split digit runs (keeping ordinal suffixes),
# connective characters and word runs.
_SUBLEX_RE = re.compile(
    r"\d+(?:st|nd|rd|th)\b|\d+|[,\-–]|[^\s\d,\-–]+", re.IGNORECASE
)


def _sublex(surface: str) -> list[str]:
    return _SUBLEX_RE.findall(surface)


def _claimable_pieces(
    element: IndexedElement, lexicon: Lexicon, table: NumeralTable
) -> list[str] | None:
    """Pieces of a number expression this element contributes, or None."""
    if element.kind is ElementKind.WORD:
        entry = lexicon.entry(element.index)  # type: ignore[arg-type]
        if entry is None:
            return None
        if entry.lex_class is LexClass.QUANTIFIER:
            return ["<all>"]
        if entry.lex_class is LexClass.NUMBER_WORD:
            return [element.surface]
        if table.and_word and element.surface.casefold() == table.and_word:
            return ["<and>"]
        return None
    if element.kind is ElementKind.UNKNOWN:
        pieces = _sublex(element.surface)
        if pieces and all(table.is_numeral_piece(p) for p in pieces):
            return pieces
    return None


def _is_connective_only(pieces: list[str]) -> bool:
    return all(p in _CONNECTIVES or p == "<and>" for p in pieces)


def _parse_expression(pieces: list[str], table: NumeralTable) -> NumFormat:
    """Mini-grammar over flattened pieces: quantifier, relative, range, array."""
    if pieces == ["<all>"]:
        return ALL_ITEMS
    rel = table.relatives.get(pieces[0].casefold()) if pieces else None
    if rel is not None:
        rest = pieces[1:]
        if not rest:
            return NumFormat(NumKind.CARDINAL, (rel,), NumFrame.RELATIVE)
        count, kind = _parse_value(rest, table)
        if kind is not NumKind.CARDINAL or count < 1:
            raise EngineError("MalformedRange", f"bad relative count: {rest}")
        if count == 1:
            return NumFormat(NumKind.CARDINAL, (rel,), NumFrame.RELATIVE)
        lo, hi = (-count, -1) if rel < 0 else (1, count)
        return NumFormat(NumKind.RANGE, (lo, hi), NumFrame.RELATIVE)

    # Split on connectives into value groups.
    groups: list[list[str]] = [[]]
    seps: list[str] = []
    for p in pieces:
        if p in _CONNECTIVES or p == "<and>":
            seps.append(p)
            groups.append([])
        else:
            groups[-1].append(p)
    if any(not g for g in groups):
        raise EngineError("MalformedRange", f"dangling connective in {pieces}")
    values_kinds = [_parse_value(g, table) for g in groups]
    values = [v for v, _ in values_kinds]
    kinds = [k for _, k in values_kinds]

    if len(values) == 1:
        return NumFormat(kinds[0], (values[0],))
    if any(s in ("-", "–") for s in seps):
        if len(values) != 2 or len(seps) != 1:
            raise EngineError("MalformedRange", f"bad range shape: {pieces}")
        lo, hi = values
        if lo > hi:
            raise EngineError("MalformedRange", f"descending range {lo}-{hi}")
        return NumFormat(NumKind.RANGE, (lo, hi))
    return NumFormat(NumKind.ARRAY, tuple(values))


def parse_numbers(
    stream: IndexStream, lexicon: Lexicon
) -> tuple[IndexStream, dict[int, NumFormat]]:
    """Replace each maximal number expression with a number temporary.

    A run starts and ends on a value element; connectives are claimed only
    between values ("and" between two quotations stays a plain word).
    Idempotent: number temporaries already present are never re-claimed,
    and all other elements keep their relative order.
    """
    table = table_for(stream.language_id)
    joiner = "" if stream.language_id == "zh-toy" else " "
    elems = stream.elements
    pieces_of = [_claimable_pieces(e, lexicon, table) for e in elems]
    is_conn = [p is not None and _is_connective_only(p) for p in pieces_of]
    is_value = [
        p is not None and not c for p, c in zip(pieces_of, is_conn)
    ]

    out: list[IndexedElement] = []
    formats: dict[int, NumFormat] = {}
    n = len(elems)
    i = 0
    while i < n:
        if not is_value[i]:
            out.append(elems[i])
            i += 1
            continue
        end = i
        k = i + 1
        while k < n:
            if is_value[k]:
                end = k
                k += 1
            elif is_conn[k] and k + 1 < n and is_value[k + 1]:
                end = k + 1
                k += 2
            else:
                break
        flat = [p for idx in range(i, end + 1) for p in pieces_of[idx]]
        temp = NUMBER_TEMP_BASE + len(formats)
        formats[temp] = _parse_expression(flat, table)
        surface = joiner.join(e.surface for e in elems[i : end + 1])
        out.append(IndexedElement(ElementKind.NUMBER, temp, surface))
        i = end + 1

    result = IndexStream(tuple(out), dict(stream.quotations), stream.language_id)
    return result, formats
