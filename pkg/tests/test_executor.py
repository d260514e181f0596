from __future__ import annotations

import copy
import random

import pytest

from nlcmd.adapters import (
    DEMO_DOCUMENT,
    EditorState,
    build_editor_adapter,
    build_shapes_adapter,
)
from nlcmd.errors import EngineError
from nlcmd.executor import execute, register_adapter, resolve
from nlcmd.explainer import CommandFrame, Condition, ObjectRef
from nlcmd.numformat import ALL_ITEMS, NumFormat, NumFrame, NumKind


@pytest.fixture()
def editor():
    return build_editor_adapter()


@pytest.fixture()
def shapes():
    return build_shapes_adapter()


def _conditional_replace_frame() -> CommandFrame:
    return CommandFrame(
        action=1011,
        primary=ObjectRef("quotation", 5000, "apple"),
        secondary=ObjectRef("quotation", 5001, "peach"),
        conditions=(
            Condition(3002, (3002, 6000, 2015), NumFormat(NumKind.RANGE, (1, 10))),
            Condition(3005, (3005, 5002, 5003), quotes=("orange", "bread")),
        ),
        language_id="en",
    )


def _delete_frame(nf=ALL_ITEMS) -> CommandFrame:
    return CommandFrame(
        action=1001,
        primary=ObjectRef("word", 2030),
        secondary=None,
        conditions=(Condition(3002, (3002, 6000, 2015), nf),),
        language_id="en",
    )


def _vocab(config):
    return config.representative


# --- resolve -----------------------------------------------------------------------


def test_resolve_conditional_replace(config, editor):
    state = EditorState(lines=list(DEMO_DOCUMENT))
    op = resolve(_conditional_replace_frame(), editor, state, config.entry_for, _vocab(config))
    assert op.handler == "replace-text"
    assert op.args["find"] == "apple" and op.args["repl"] == "peach"
    assert op.args["must_contain"] == ["orange", "bread"]
    assert op.args["scopes"] == [("lines", list(range(1, 11)))]


def test_resolve_unmapped_outline(config, editor):
    frame = CommandFrame(
        action=1020,
        primary=ObjectRef("word", 2070),
        secondary=None,
        conditions=(
            Condition(
                3012, (3012, 6000, 2016),
                NumFormat(NumKind.RANGE, (-2, -1), NumFrame.RELATIVE),
            ),
        ),
        language_id="en",
    )
    state = EditorState(lines=list(DEMO_DOCUMENT))
    with pytest.raises(EngineError) as err:
        resolve(frame, editor, state, config.entry_for, _vocab(config))
    assert err.value.kind == "UnmappedObject"
    assert err.value.detail == "outline"


def test_resolve_sphere(config, shapes):
    frame = CommandFrame(
        action=1020,
        primary=ObjectRef("word", 2040),
        secondary=None,
        conditions=(Condition(3020, (3020, 6000), NumFormat(NumKind.CARDINAL, (5,))),),
        language_id="en",
    )
    op = resolve(frame, shapes, shapes.make_state(), config.entry_for, _vocab(config))
    assert op.handler == "create-shape"
    assert op.args == {"kind": "sphere", "radius": 5}


def test_resolve_relative_range_against_extent(config, editor):
    state = EditorState(lines=["a", "b", "c", "d"])
    frame = _delete_frame(NumFormat(NumKind.RANGE, (-2, -1), NumFrame.RELATIVE))
    op = resolve(frame, editor, state, config.entry_for, _vocab(config))
    assert op.args["scopes"] == [("lines", [3, 4])]


def test_resolve_range_out_of_bounds(config, editor):
    state = EditorState(lines=["only", "two"])
    frame = _delete_frame(NumFormat(NumKind.RANGE, (1, 10)))
    with pytest.raises(EngineError) as err:
        resolve(frame, editor, state, config.entry_for, _vocab(config))
    assert err.value.kind == "RangeOutOfBounds"


def test_resolve_unverifiable_condition(config, editor):
    frame = CommandFrame(
        action=1011,
        primary=ObjectRef("quotation", 5000, "a"),
        secondary=ObjectRef("quotation", 5001, "b"),
        conditions=(Condition(3020, (3020, 6000), NumFormat(NumKind.CARDINAL, (5,))),),
        language_id="en",
    )
    with pytest.raises(EngineError) as err:
        resolve(frame, editor, EditorState(lines=["x"]), config.entry_for, _vocab(config))
    assert err.value.kind == "UnverifiableCondition"


def test_resolve_is_pure(config, editor):
    state = EditorState(lines=list(DEMO_DOCUMENT))
    snapshot = copy.deepcopy(state)
    resolve(_conditional_replace_frame(), editor, state, config.entry_for, _vocab(config))
    assert state == snapshot


# --- execute -----------------------------------------------------------------------


def _run(frame, adapter, state, config):
    op = resolve(frame, adapter, state, config.entry_for, _vocab(config))
    return execute(op, adapter, state)


def test_conditional_replace_matches_per_line_oracle(config, editor):
    rng = random.Random(20260810)
    words = ["apple", "peach", "orange", "bread", "filler"]
    mismatches = 0
    for _ in range(100):
        lines = [
            " ".join(rng.choice(words) for _ in range(rng.randint(0, 8)))
            for _ in range(rng.randint(10, 50))
        ]
        state = EditorState(lines=list(lines))
        new_state, result = _run(_conditional_replace_frame(), editor, state, config)
        expected = []
        affected = 0
        for i, line in enumerate(lines, start=1):
            if i <= 10 and "orange" in line and "bread" in line:
                replaced = line.replace("apple", "peach")
                if replaced != line:
                    affected += 1
                expected.append(replaced)
            else:
                expected.append(line)
        if new_state.lines != expected or result.affected != affected:
            mismatches += 1
    assert mismatches == 0


def test_delete_returns_joins_single_paragraph(config, editor):
    state = EditorState(lines=["one ", "two ", "three ", "four ", "five ", "six"])
    new_state, result = _run(_delete_frame(), editor, state, config)
    assert len(new_state.lines) == 1
    assert new_state.lines[0] == "one two three four five six"
    assert result.affected == 5


def test_delete_returns_preserves_paragraph_breaks(config, editor):
    state = EditorState(lines=["a", "b", "", "c", "d"])
    new_state, _ = _run(_delete_frame(), editor, state, config)
    assert new_state.lines == ["ab", "", "cd"]


def test_delete_returns_conserves_characters(config, editor):
    lines = ["alpha", "beta", "", "gamma delta", "epsilon"]
    state = EditorState(lines=list(lines))
    new_state, _ = _run(_delete_frame(), editor, state, config)
    assert "".join(new_state.lines) == "".join(lines)


def test_transform_digits_marks_only_scoped_lines(config, editor):
    state = EditorState(lines=["a 12 b", "c 3", "d 45 e 6", "f 78"])
    frame = CommandFrame(
        action=1030,
        primary=ObjectRef("word", 2050),
        secondary=None,
        conditions=(
            Condition(3002, (3002, 6000, 2015), NumFormat(NumKind.RANGE, (1, 3))),
            Condition(3010, (3010, 2060)),
        ),
        language_id="en",
    )
    new_state, result = _run(frame, editor, state, config)
    assert result.affected == 4
    assert new_state.styles[0] == [(2, 4, "subscript")]
    assert new_state.styles[3] == []  # line 4 untouched


def test_execute_is_atomic_on_error(config, editor):
    state = EditorState(lines=[])
    snapshot = copy.deepcopy(state)
    op = resolve(_delete_frame(), editor, state, config.entry_for, _vocab(config))
    new_state, result = execute(op, editor, state)
    assert not result.ok
    assert result.error is not None and result.error.kind == "TargetStateError"
    assert new_state == snapshot == state


def test_sphere_rejects_nonpositive_radius(config, shapes):
    frame = CommandFrame(
        action=1020,
        primary=ObjectRef("word", 2040),
        secondary=None,
        conditions=(Condition(3020, (3020, 6000), NumFormat(NumKind.CARDINAL, (0,))),),
        language_id="en",
    )
    state = shapes.make_state()
    new_state, result = _run(frame, shapes, state, config)
    assert not result.ok and new_state.objects == []


def test_execution_result_serialization(config, editor):
    state = EditorState(lines=list(DEMO_DOCUMENT))
    _, result = _run(_conditional_replace_frame(), editor, state, config)
    assert result.to_json_dict() == {
        "ok": True, "handler": "replace-text", "affected": 2
    }


# --- registry ----------------------------------------------------------------------


def test_register_adapter(editor):
    registry = register_adapter({}, editor)
    assert "editor" in registry


def test_duplicate_adapter_id(editor):
    registry = register_adapter({}, editor)
    with pytest.raises(EngineError) as err:
        register_adapter(registry, editor)
    assert err.value.kind == "DuplicateAdapterId"


def test_dangling_handler(editor):
    broken = build_editor_adapter()
    broken.capabilities[(1099, "nothing")] = "missing-handler"
    with pytest.raises(EngineError) as err:
        register_adapter({}, broken)
    assert err.value.kind == "DanglingHandler"
