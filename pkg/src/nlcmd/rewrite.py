"""Pattern-rewriting engine for the semantic layer.

Rules rewrite the index stream into the canonical order the explainer
expects: action first, then conditions, then the primary object and the
optional switch + secondary object. Patterns support four wildcard
classes:

    ?N        exactly one element, bound to slot N
    *N        zero or more elements, lazy (shortest match that lets the
              rest of the pattern succeed)
    #N:CLASS  one element of a temporary class (built-in QUOTE and NUM;
              suits may declare extra classes as index sets)
    !N:POS    one word element whose dictionary entry carries that
              part-of-speech tag

Rules are tried general-before-specific, then by priority, then by name;
each pass scans left to right and the first real change restarts the
pass. A match whose replacement equals the matched span does not count as
a change (so the identity rule ``?1 -> $1`` is legal and useless instead
of a loop). A ruleset that keeps changing past the pass cap is reported
as a fixpoint failure, never silently truncated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable

from .errors import EngineError
from .lexicon import ElementKind, IndexStream, IndexedElement, Lexicon

MAX_PASSES = 100

GENERAL_SCOPE = "general"


class PatKind(Enum):
    LITERAL = "literal"
    ANY_ONE = "any_one"
    STAR = "star"
    TEMP_CLASS = "temp_class"
    POS = "pos"


@dataclass(frozen=True)
class PatternElem:
    kind: PatKind
    index: int | None = None
    slot: int | None = None
    class_id: str | None = None
    pos_tag: str | None = None


@dataclass(frozen=True)
class RhsElem:
    # Either a literal word index or a reference to an lhs slot.
    index: int | None = None
    slot: int | None = None


@dataclass(frozen=True)
class RewriteRule:
    name: str
    lhs: tuple[PatternElem, ...]
    rhs: tuple[RhsElem, ...]
    scope: str = GENERAL_SCOPE
    priority: int = 0

    @property
    def is_general(self) -> bool:
        return self.scope == GENERAL_SCOPE


@dataclass(frozen=True)
class Ruleset:
    """Compiled rules plus the lookup tables matching needs at runtime."""

    rules: tuple[RewriteRule, ...]
    pos_tags: dict[int, str] = field(default_factory=dict)
    temp_classes: dict[int | str, frozenset[int]] = field(default_factory=dict)
    surfaces: dict[int, str] = field(default_factory=dict)

    def ordered(self) -> tuple[RewriteRule, ...]:
        return tuple(
            sorted(self.rules, key=lambda r: (not r.is_general, r.scope, r.priority, r.name))
        )


_WILDCARD_RE = re.compile(r"([?*])(\d+)")
_CLASSED_RE = re.compile(r"([#!])(\d+):(\S+)")
_SLOT_REF_RE = re.compile(r"\$(\d+)")
_INDEX_LIT_RE = re.compile(r"@(\d+)")

BUILTIN_TEMP_CLASSES = ("QUOTE", "NUM")


def compile_rule(
    text: str,
    lexicon: Lexicon,
    temp_classes: dict[str, frozenset[int]] | None = None,
    scope: str = GENERAL_SCOPE,
    priority: int = 0,
    name: str = "",
) -> RewriteRule:
    """Compile ``LHS -> RHS`` rule text against a lexicon.

    Literals are surface words (resolved through the lexicon) or ``@index``;
    the rhs may reference lhs slots as ``$N``.
    """
    temp_classes = temp_classes or {}
    if "->" not in text:
        raise EngineError("RuleSyntax", f"missing '->' in rule: {text!r}")
    lhs_text, rhs_text = text.split("->", 1)
    lhs: list[PatternElem] = []
    slots: set[int] = set()
    for token in lhs_text.split():
        m = _WILDCARD_RE.fullmatch(token)
        if m:
            slot = int(m.group(2))
            if slot in slots:
                raise EngineError("DuplicateSlot", f"slot {slot} bound twice")
            slots.add(slot)
            kind = PatKind.ANY_ONE if m.group(1) == "?" else PatKind.STAR
            lhs.append(PatternElem(kind, slot=slot))
            continue
        m = _CLASSED_RE.fullmatch(token)
        if m:
            slot = int(m.group(2))
            if slot in slots:
                raise EngineError("DuplicateSlot", f"slot {slot} bound twice")
            slots.add(slot)
            if m.group(1) == "#":
                class_id = m.group(3)
                if class_id not in BUILTIN_TEMP_CLASSES and class_id not in temp_classes:
                    raise EngineError(
                        "UnknownTempClass", f"temporary class {class_id!r} not declared"
                    )
                lhs.append(PatternElem(PatKind.TEMP_CLASS, slot=slot, class_id=class_id))
            else:
                lhs.append(PatternElem(PatKind.POS, slot=slot, pos_tag=m.group(3)))
            continue
        lhs.append(PatternElem(PatKind.LITERAL, index=_resolve_literal(token, lexicon)))
    rhs: list[RhsElem] = []
    for token in rhs_text.split():
        m = _SLOT_REF_RE.fullmatch(token)
        if m:
            slot = int(m.group(1))
            if slot not in slots:
                raise EngineError("UnboundSlotRef", f"$${slot} is not bound on the lhs")
            rhs.append(RhsElem(slot=slot))
            continue
        rhs.append(RhsElem(index=_resolve_literal(token, lexicon)))
    return RewriteRule(
        name=name or f"rule-{abs(hash(text)) % 10_000:04d}",
        lhs=tuple(lhs),
        rhs=tuple(rhs),
        scope=scope,
        priority=priority,
    )


def _resolve_literal(token: str, lexicon: Lexicon) -> int:
    m = _INDEX_LIT_RE.fullmatch(token)
    if m:
        return int(m.group(1))
    index = lexicon.lookup(token)
    if index is None:
        raise EngineError("UnknownWordInRule", f"word {token!r} is not in the lexicon")
    return index


def parse_rules(
    text: str,
    lexicon: Lexicon,
    temp_classes: dict[str, frozenset[int]] | None = None,
    scope: str = GENERAL_SCOPE,
    name_prefix: str = "g",
) -> list[RewriteRule]:
    """Parse a rule file: one rule per line, ``;`` starts a comment."""
    rules: list[RewriteRule] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        rules.append(
            compile_rule(
                line,
                lexicon,
                temp_classes,
                scope=scope,
                priority=len(rules),
                name=f"{name_prefix}{len(rules):02d}",
            )
        )
    return rules


# --- matching -----------------------------------------------------------------


def _elem_matches(
    pat: PatternElem, elem: IndexedElement, ruleset: Ruleset
) -> bool:
    if pat.kind is PatKind.LITERAL:
        return elem.kind is ElementKind.WORD and elem.index == pat.index
    if pat.kind is PatKind.ANY_ONE:
        return True
    if pat.kind is PatKind.POS:
        return (
            elem.kind is ElementKind.WORD
            and ruleset.pos_tags.get(elem.index) == pat.pos_tag  # type: ignore[arg-type]
        )
    if pat.kind is PatKind.TEMP_CLASS:
        if pat.class_id == "QUOTE":
            return elem.kind is ElementKind.QUOTATION
        if pat.class_id == "NUM":
            return elem.kind is ElementKind.NUMBER
        members = ruleset.temp_classes.get(pat.class_id, frozenset())
        return elem.index is not None and elem.index in members
    raise AssertionError(pat.kind)


def match_at(
    rule: RewriteRule,
    elements: tuple[IndexedElement, ...],
    position: int,
    ruleset: Ruleset,
) -> tuple[dict[int, list[IndexedElement]], int] | None:
    """Match the rule's lhs at ``position``.

    Returns (bindings, end) where ``end`` is the exclusive end of the
    matched span, or None. Stars are lazy: they take the shortest extent
    that allows the remainder of the pattern to match.
    """

    def walk(pi: int, ei: int, bindings: dict[int, list[IndexedElement]]):
        if pi == len(rule.lhs):
            return bindings, ei
        pat = rule.lhs[pi]
        if pat.kind is PatKind.STAR:
            for take in range(len(elements) - ei + 1):
                trial = dict(bindings)
                trial[pat.slot] = list(elements[ei : ei + take])  # type: ignore[index]
                result = walk(pi + 1, ei + take, trial)
                if result is not None:
                    return result
            return None
        if ei >= len(elements) or not _elem_matches(pat, elements[ei], ruleset):
            return None
        if pat.slot is not None:
            bindings = dict(bindings)
            bindings[pat.slot] = [elements[ei]]
        return walk(pi + 1, ei + 1, bindings)

    return walk(0, position, {})


def _instantiate(
    rule: RewriteRule,
    bindings: dict[int, list[IndexedElement]],
    ruleset: Ruleset,
) -> list[IndexedElement]:
    out: list[IndexedElement] = []
    for elem in rule.rhs:
        if elem.slot is not None:
            out.extend(bindings.get(elem.slot, []))
        else:
            surface = ruleset.surfaces.get(elem.index, f"@{elem.index}")  # type: ignore[arg-type]
            out.append(IndexedElement(ElementKind.WORD, elem.index, surface))
    return out


def _spans_equal(a: Iterable[IndexedElement], b: Iterable[IndexedElement]) -> bool:
    aa, bb = list(a), list(b)
    if len(aa) != len(bb):
        return False
    for x, y in zip(aa, bb):
        if x.kind is not y.kind or x.index != y.index:
            return False
        if x.kind is ElementKind.UNKNOWN and x.surface != y.surface:
            return False
    return True


def apply_rules(
    ruleset: Ruleset, stream: IndexStream
) -> tuple[IndexStream, list[dict[str, Any]]]:
    """Rewrite to fixpoint, recording every firing.

    Each pass scans left to right trying rules in total order at every
    position; the first change replaces the matched span and restarts the
    pass. Raises FixpointExceeded past the pass cap.
    """
    rules = ruleset.ordered()
    elements = list(stream.elements)
    trace: list[dict[str, Any]] = []
    for _ in range(MAX_PASSES):
        fired = False
        for position in range(len(elements) + 1):
            for rule in rules:
                found = match_at(rule, tuple(elements), position, ruleset)
                if found is None:
                    continue
                bindings, end = found
                replacement = _instantiate(rule, bindings, ruleset)
                if _spans_equal(elements[position:end], replacement):
                    continue  # no-op match; not a firing
                before = [
                    e.index if e.index is not None else e.surface for e in elements
                ]
                elements[position:end] = replacement
                trace.append(
                    {
                        "rule": rule.name,
                        "position": position,
                        "before": before,
                        "after": [
                            e.index if e.index is not None else e.surface
                            for e in elements
                        ],
                    }
                )
                fired = True
                break
            if fired:
                break
        if not fired:
            surviving = {e.index for e in elements if e.kind is ElementKind.QUOTATION}
            quotations = {
                k: v for k, v in stream.quotations.items() if k in surviving
            }
            return (
                IndexStream(tuple(elements), quotations, stream.language_id),
                trace,
            )
    raise EngineError(
        "FixpointExceeded",
        f"ruleset did not reach a fixpoint within {MAX_PASSES} passes",
    )
