from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlcmd.errors import EngineError
from nlcmd.lexicon import ElementKind, index_tokens, segment
from nlcmd.numformat import (
    NumFormat,
    NumFrame,
    NumKind,
    parse_numbers,
    parse_numeral,
)


def _stream(text: str, lexicon):
    return index_tokens(segment(text, lexicon), lexicon)


def _single_format(text: str, lexicon) -> NumFormat:
    stream, formats = parse_numbers(_stream(text, lexicon), lexicon)
    numbers = [e for e in stream.elements if e.kind is ElementKind.NUMBER]
    assert len(numbers) == 1, stream.elements
    return formats[numbers[0].index]


# --- worked examples -----------------------------------------------------------


def test_spaced_range(en_lexicon):
    nf = _single_format("1 - 10", en_lexicon)
    assert nf == NumFormat(NumKind.RANGE, (1, 10), NumFrame.ABSOLUTE)


def test_attached_range(en_lexicon):
    nf = _single_format("1-10", en_lexicon)
    assert nf == NumFormat(NumKind.RANGE, (1, 10), NumFrame.ABSOLUTE)


def test_plain_cardinal(en_lexicon):
    assert _single_format("5", en_lexicon) == NumFormat(NumKind.CARDINAL, (5,))


def test_quantifier_becomes_all_items(en_lexicon):
    nf = _single_format("each", en_lexicon)
    assert nf.kind is NumKind.ARRAY and nf.is_all


def test_last_two_is_relative_range(en_lexicon):
    nf = _single_format("last two", en_lexicon)
    assert nf == NumFormat(NumKind.RANGE, (-2, -1), NumFrame.RELATIVE)


def test_bare_last_is_relative_cardinal(en_lexicon):
    nf = _single_format("last", en_lexicon)
    assert nf == NumFormat(NumKind.CARDINAL, (-1,), NumFrame.RELATIVE)


def test_ordinal_word(en_lexicon):
    assert _single_format("third", en_lexicon) == NumFormat(NumKind.ORDINAL, (3,))


def test_digit_ordinal(en_lexicon):
    assert _single_format("3rd", en_lexicon) == NumFormat(NumKind.ORDINAL, (3,))


def test_comma_and_list_is_array(en_lexicon):
    nf = _single_format("1, 3 and 5", en_lexicon)
    assert nf == NumFormat(NumKind.ARRAY, (1, 3, 5))


def test_descending_range_is_error(en_lexicon):
    with pytest.raises(EngineError) as err:
        _single_format("10 - 1", en_lexicon)
    assert err.value.kind == "MalformedRange"


def test_and_between_quotes_is_not_claimed(en_lexicon):
    stream, formats = parse_numbers(
        _stream("⟨Q0⟩ and ⟨Q1⟩", en_lexicon), en_lexicon
    )
    assert formats == {}
    assert [e.kind for e in stream.elements] == [
        ElementKind.QUOTATION, ElementKind.WORD, ElementKind.QUOTATION
    ]


# --- parse_numeral against a table-driven oracle ---------------------------------

_UNITS = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
    "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
    "sixteen", "seventeen", "eighteen", "nineteen",
]
_TENS = {2: "twenty", 3: "thirty", 4: "forty", 5: "fifty", 6: "sixty",
         7: "seventy", 8: "eighty", 9: "ninety"}


def _oracle_words(n: int) -> list[str]:
    if n < 20:
        return [_UNITS[n]]
    tens, unit = divmod(n, 10)
    return [_TENS[tens]] + ([_UNITS[unit]] if unit else [])


def test_every_word_form_up_to_99():
    for n in range(100):
        assert parse_numeral(_oracle_words(n)) == n
        assert parse_numeral([str(n)]) == n


def test_hyphenated_compound():
    assert parse_numeral(["forty-two"]) == 42
    assert parse_numeral(["forty", "two"]) == 42


def test_ordinal_value_with_kind_left_to_caller():
    assert parse_numeral(["third"]) == 3
    assert parse_numeral(["3rd"]) == 3


def test_not_a_numeral():
    with pytest.raises(EngineError) as err:
        parse_numeral(["banana"])
    assert err.value.kind == "NotANumeral"


# --- recursive-descent oracle over corpus expressions -----------------------------


def _oracle_parse(tokens: list[str]) -> tuple[str, list[int] | str, str]:
    """Independent mini-parser: (kind, values, frame)."""
    words_to_n = {w: i for i, w in enumerate(_UNITS)}
    words_to_n.update({w: t * 10 for t, w in _TENS.items()})
    ordinals = {"first": 1, "second": 2, "third": 3, "fourth": 4, "fifth": 5}

    def value(toks: list[str]) -> int:
        if len(toks) == 2:
            return words_to_n[toks[0]] + words_to_n[toks[1]]
        tok = toks[0]
        if tok.isdigit():
            return int(tok)
        return words_to_n[tok]

    flat: list[str] = []
    for tok in tokens:
        if tok in ("-", "–"):
            flat.append("-")
        elif tok.endswith(",") and tok[:-1].isdigit():
            flat.extend([tok[:-1], ","])
        elif "-" in tok and any(c.isdigit() for c in tok):
            a, b = tok.split("-")
            flat.extend([a, "-", b])
        else:
            flat.append(tok)
    if flat == ["each"] or flat == ["every"]:
        return ("array", "all", "absolute")
    if flat[0] == "last":
        if len(flat) == 1:
            return ("cardinal", [-1], "relative")
        count = value(flat[1:])
        if count == 1:
            return ("cardinal", [-1], "relative")
        return ("range", [-count, -1], "relative")
    if flat[0] in ordinals:
        return ("ordinal", [ordinals[flat[0]]], "absolute")
    if "-" in flat:
        i = flat.index("-")
        return ("range", [value(flat[:i]), value(flat[i + 1 :])], "absolute")
    groups: list[list[str]] = [[]]
    for tok in flat:
        if tok in (",", "and"):
            groups.append([])
        else:
            groups[-1].append(tok)
    if len(groups) > 1:
        return ("array", [value(g) for g in groups], "absolute")
    return ("cardinal", [value(flat)], "absolute")


@pytest.mark.parametrize(
    "expression",
    [
        "1 - 10", "1-10", "5", "each", "every", "last", "last two", "last 2",
        "third", "1, 3 and 5", "forty two", "2 - 4", "12",
    ],
)
def test_matches_recursive_descent_oracle(en_lexicon, expression):
    nf = _single_format(expression, en_lexicon)
    kind, values, frame = _oracle_parse(expression.split())
    assert nf.kind.value == kind
    assert nf.frame.value == frame
    if values == "all":
        assert nf.is_all
    else:
        assert list(nf.values) == values


# --- properties -------------------------------------------------------------------


def test_number_temp_indices_follow_appearance_order(en_lexicon):
    stream, formats = parse_numbers(_stream("5 line 1 - 3", en_lexicon), en_lexicon)
    numbers = [e.index for e in stream.elements if e.kind is ElementKind.NUMBER]
    assert numbers == [6000, 6001]
    assert formats[6000] == NumFormat(NumKind.CARDINAL, (5,))
    assert formats[6001] == NumFormat(NumKind.RANGE, (1, 3))


def test_idempotent(en_lexicon):
    stream = _stream("replace ⟨Q0⟩ in lines 1 - 10", en_lexicon)
    once, formats = parse_numbers(stream, en_lexicon)
    twice, formats2 = parse_numbers(once, en_lexicon)
    assert twice == once
    assert formats2 == {}


def test_order_preserved_and_unique_binding(en_lexicon):
    stream = _stream("transform numbers in lines 1 - 3 to subscript", en_lexicon)
    out, formats = parse_numbers(stream, en_lexicon)
    kept = [e.index for e in out.elements if e.kind is ElementKind.WORD]
    original = [e.index for e in stream.elements if e.kind is ElementKind.WORD]
    assert kept == original  # non-number words keep their relative order
    numbers = [e.index for e in out.elements if e.kind is ElementKind.NUMBER]
    assert sorted(formats) == sorted(numbers)
    assert numbers == [6000]


@given(st.lists(st.sampled_from(["5", "each", "delete", "line", "1 - 3"]), max_size=4))
@settings(max_examples=40, deadline=None)
def test_idempotence_property(chunks):
    from nlcmd.config import default_config

    lexicon = default_config().lexicon_for("en")
    text = " ".join(chunks)
    try:
        once, _ = parse_numbers(_stream(text, lexicon), lexicon)
    except EngineError:
        return
    twice, formats = parse_numbers(once, lexicon)
    assert twice == once and formats == {}
