"""Engine configuration: lexicons, rulesets and merged suits.

A config is an immutable snapshot. Merging or unloading a suit produces a
new config; sessions hold the snapshot they started with (or explicitly
adopted), so concurrent sessions never see partial updates. Equality
ignores the derived caches, which makes merge-then-unload compare equal to
the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import EngineError
from .lexicon import Lexicon, WordEntry, load_lexicon
from .rewrite import RewriteRule, Ruleset, parse_rules
from .suit import Suit


@dataclass(frozen=True)
class EngineConfig:
    lexicons: dict[str, Lexicon]
    general_rules: tuple[RewriteRule, ...]
    temp_classes: dict[str, frozenset[int]] = field(default_factory=dict)
    suits: tuple[Suit, ...] = ()
    _merged: dict[str, Lexicon] = field(
        default_factory=dict, init=False, compare=False, repr=False
    )
    _ruleset: Ruleset | None = field(
        default=None, init=False, compare=False, repr=False
    )

    def __post_init__(self) -> None:
        merged = dict(self.lexicons)
        classes = dict(self.temp_classes)
        specific: list[RewriteRule] = []
        for suit in self.suits:
            base = merged.get(suit.meta.language_id)
            if base is None:
                raise EngineError(
                    "ParseError",
                    f"suit {suit.meta.id!r} targets unknown language "
                    f"{suit.meta.language_id!r}",
                )
            merged[suit.meta.language_id] = base.with_entries(suit.entries)
            classes.update(suit.temp_classes)
        for suit in self.suits:
            lexicon = merged[suit.meta.language_id]
            specific.extend(
                parse_rules(
                    "\n".join(suit.rules),
                    lexicon,
                    classes,
                    scope=suit.meta.id,
                    name_prefix=f"{suit.meta.id}-",
                )
            )
        pos_tags: dict[int, str] = {}
        surfaces: dict[int, str] = {}
        for lexicon in merged.values():
            for entry in lexicon.entries:
                pos_tags.setdefault(entry.index, entry.pos_tag)
                surfaces.setdefault(entry.index, entry.forms[0])
        ruleset = Ruleset(
            rules=self.general_rules + tuple(specific),
            pos_tags=pos_tags,
            temp_classes=dict(classes),
            surfaces=surfaces,
        )
        object.__setattr__(self, "_merged", merged)
        object.__setattr__(self, "_ruleset", ruleset)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EngineConfig):
            return NotImplemented
        return (
            self.lexicons == other.lexicons
            and self.general_rules == other.general_rules
            and self.temp_classes == other.temp_classes
            and self.suits == other.suits
        )

    # --- views ---------------------------------------------------------------

    def lexicon_for(self, language_id: str) -> Lexicon:
        lexicon = self._merged.get(language_id)
        if lexicon is None:
            raise EngineError("ParseError", f"no lexicon for language {language_id!r}")
        return lexicon

    @property
    def languages(self) -> list[str]:
        return sorted(self._merged)

    @property
    def ruleset(self) -> Ruleset:
        assert self._ruleset is not None
        return self._ruleset

    def entry_for(self, index: int) -> WordEntry | None:
        for lexicon in self._merged.values():
            entry = lexicon.entry(index)
            if entry is not None:
                return entry
        return None

    def representative(self, index: int) -> str:
        entry = self.entry_for(index)
        return entry.forms[0] if entry else str(index)

    # --- suit lifecycle --------------------------------------------------------

    def merge_suit(self, suit: Suit) -> "EngineConfig":
        """New config with the suit's entries and rules joined in."""
        if any(s.meta.id == suit.meta.id for s in self.suits):
            raise EngineError(
                "IndexCollision", f"suit {suit.meta.id!r} is already merged"
            )
        return EngineConfig(
            lexicons=self.lexicons,
            general_rules=self.general_rules,
            temp_classes=self.temp_classes,
            suits=self.suits + (suit,),
        )

    def unload_suit(self, suit_id: str) -> "EngineConfig":
        remaining = tuple(s for s in self.suits if s.meta.id != suit_id)
        if len(remaining) == len(self.suits):
            raise EngineError("UnknownAdapter", f"no merged suit {suit_id!r}")
        return EngineConfig(
            lexicons=self.lexicons,
            general_rules=self.general_rules,
            temp_classes=self.temp_classes,
            suits=remaining,
        )


def data_path(name: str) -> Path:
    return Path(str(resources.files("nlcmd").joinpath("data", name)))


def default_config(extra_lexicons: list[str | Path] | None = None) -> EngineConfig:
    """Base config: the two demo lexicons and the shipped general rules."""
    lexicons: dict[str, Lexicon] = {}
    for name in ("lexicon_en.json", "lexicon_zh_toy.json"):
        lexicon = load_lexicon(data_path(name))
        lexicons[lexicon.language_id] = lexicon
    for path in extra_lexicons or []:
        lexicon = load_lexicon(path)
        lexicons[lexicon.language_id] = lexicon
    rules_text = data_path("rules_general.rules").read_text(encoding="utf-8")
    general = parse_rules(rules_text, lexicons["en"], {}, name_prefix="g")
    return EngineConfig(lexicons=lexicons, general_rules=tuple(general))
