"""Failure recovery: quotation retry, ranked suggestions, rephrase capture.

When the pipeline fails, recovery runs in a fixed order: (1) wrap each
maximal unknown run in quotes and retry, for users who skip quotation
marks; (2) if the retry fails, rank dictionary entries near each unknown
token and wait for a pick, which becomes a new synonym; (3) if every
suggestion is rejected, ask for a rephrase and remember the original as a
special expression once the rephrase succeeds. A later identical input
reuses the stored frame without parsing at all.

Word distance combines normalized edit distance over an entry's forms with
hop distance through a small thesaurus graph; both land in [0, 1].
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from .errors import EngineError
from .explainer import CommandFrame, frame_from_json
from .lexicon import Lexicon, WordEntry

DEFAULT_SUGGESTIONS = 5


def levenshtein(a: str, b: str) -> int:
    """Edit distance with unit costs."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb))
            )
        previous = current
    return previous[len(b)]


class Thesaurus:
    """Undirected weighted graph over dictionary indices.

    Weights are stored for future ranking refinements; the distance metric
    uses hop counts normalized by the graph diameter.
    """

    def __init__(self, edges: Iterable[tuple[int, int, float]] = ()) -> None:
        self._adjacent: dict[int, dict[int, float]] = {}
        for a, b, weight in edges:
            if weight <= 0:
                raise EngineError("ParseError", f"edge {a}-{b} has non-positive weight")
            self._adjacent.setdefault(a, {})[b] = weight
            self._adjacent.setdefault(b, {})[a] = weight
        self._diameter: int | None = None

    def hops(self, a: int, b: int) -> int | None:
        """Shortest hop count, or None when disconnected."""
        if a == b:
            return 0
        if a not in self._adjacent or b not in self._adjacent:
            return None
        seen = {a}
        queue = deque([(a, 0)])
        while queue:
            node, dist = queue.popleft()
            for nxt in self._adjacent[node]:
                if nxt == b:
                    return dist + 1
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append((nxt, dist + 1))
        return None

    @property
    def diameter(self) -> int:
        if self._diameter is None:
            best = 0
            nodes = list(self._adjacent)
            for i, a in enumerate(nodes):
                for b in nodes[i + 1 :]:
                    hops = self.hops(a, b)
                    if hops is not None:
                        best = max(best, hops)
            self._diameter = best
        return self._diameter

    @classmethod
    def load(cls, source: str | Path | dict) -> "Thesaurus":
        if isinstance(source, (str, Path)):
            raw = json.loads(Path(source).read_text(encoding="utf-8"))
        else:
            raw = source
        return cls(tuple(e) for e in raw.get("edges", []))


def word_distance(
    surface: str, entry: WordEntry, thesaurus: Thesaurus, lexicon: Lexicon
) -> float:
    """Distance in [0, 1] between a surface token and a dictionary entry."""
    needle = surface.casefold()
    forms = [f.casefold() for f in entry.forms]
    if needle in forms:
        return 0.0
    edit = min(
        levenshtein(needle, form) / max(len(needle), len(form)) for form in forms
    )
    resolved = lexicon.lookup(surface)
    if resolved is not None:
        hops = thesaurus.hops(resolved, entry.index)
        if hops is not None:
            return min(edit, hops / (thesaurus.diameter + 1))
    return edit


@dataclass(frozen=True)
class Suggestion:
    index: int
    form: str
    score: float

    def to_json_dict(self) -> dict[str, Any]:
        return {"index": self.index, "form": self.form, "score": self.score}


def suggest(
    surface: str,
    lexicon: Lexicon,
    thesaurus: Thesaurus,
    k: int = DEFAULT_SUGGESTIONS,
) -> list[Suggestion]:
    """Top-k nearest dictionary entries, ascending by score, ties by index."""
    scored = [
        Suggestion(entry.index, entry.forms[0], word_distance(surface, entry, thesaurus, lexicon))
        for entry in lexicon.entries
    ]
    scored.sort(key=lambda s: (s.score, s.index))
    return scored[:k]


# --- recovery plan -------------------------------------------------------------

STAGE_RETRY_QUOTATION = "retry_as_quotation"
STAGE_SUGGEST = "suggest_words"
STAGE_REPHRASE = "ask_rephrase"


@dataclass(frozen=True)
class RecoveryPlan:
    """The fixed-order cascade for one failure."""

    original: str
    unknown_runs: tuple[tuple[str, ...], ...]
    quoted_retry: str | None  # rebuilt text, None when nothing to quote

    @property
    def stages(self) -> tuple[str, ...]:
        return (STAGE_RETRY_QUOTATION, STAGE_SUGGEST, STAGE_REPHRASE)

    @property
    def unknown_surfaces(self) -> list[str]:
        return [s for run in self.unknown_runs for s in run]


def plan_recovery(
    original: str,
    unknown_runs: list[list[str]],
    rebuilt_with_quotes: str | None,
) -> RecoveryPlan:
    return RecoveryPlan(
        original=original,
        unknown_runs=tuple(tuple(run) for run in unknown_runs),
        quoted_retry=rebuilt_with_quotes,
    )


# --- persistent store ----------------------------------------------------------


@dataclass
class SpecialExpression:
    original: str
    rephrase: str
    frame: CommandFrame
    count: int = 1

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "original": self.original,
            "rephrase": self.rephrase,
            "frame": self.frame.to_json_dict(),
            "count": self.count,
        }


@dataclass
class LearnerStore:
    """Per-profile persistence: learned synonyms and special expressions."""

    path: Path | None = None
    synonyms: list[tuple[str, int]] = field(default_factory=list)
    specials: list[SpecialExpression] = field(default_factory=list)

    @classmethod
    def load(cls, path: str | Path | None) -> "LearnerStore":
        store = cls(path=Path(path) if path else None)
        if store.path and store.path.exists():
            raw = json.loads(store.path.read_text(encoding="utf-8"))
            store.synonyms = [
                (item["surface"], item["index"]) for item in raw.get("synonyms", [])
            ]
            store.specials = [
                SpecialExpression(
                    original=item["original"],
                    rephrase=item["rephrase"],
                    frame=frame_from_json(item["frame"]),
                    count=item.get("count", 1),
                )
                for item in raw.get("special", [])
            ]
        return store

    def save(self) -> None:
        if self.path is None:
            return
        payload = {
            "synonyms": [
                {"surface": surface, "index": index} for surface, index in self.synonyms
            ],
            "special": [s.to_json_dict() for s in self.specials],
        }
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(
            json.dumps(payload, ensure_ascii=False, indent=2), encoding="utf-8"
        )

    def add_synonym(self, surface: str, index: int) -> None:
        if (surface, index) not in self.synonyms:
            self.synonyms.append((surface, index))
        self.save()

    def find_special(self, original: str) -> SpecialExpression | None:
        for special in self.specials:
            if special.original == original:
                return special
        return None

    def record_special(
        self, original: str, rephrase: str, frame: CommandFrame
    ) -> SpecialExpression:
        if original == rephrase:
            raise EngineError(
                "ParseError", "special expression must differ from its rephrase"
            )
        existing = self.find_special(original)
        if existing is not None:
            existing.count += 1
            existing.rephrase = rephrase
            existing.frame = frame
            self.save()
            return existing
        special = SpecialExpression(original, rephrase, frame)
        self.specials.append(special)
        self.save()
        return special
