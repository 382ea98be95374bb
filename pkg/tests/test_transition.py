"""Edit machine semantics: action validity, application, replay."""

import pytest

from imitrans.transition import (
    COPY,
    DELETE,
    END,
    INSERT,
    apply_action,
    format_action,
    format_actions,
    initial_state,
    parse_action,
    parse_actions,
    run_actions,
    valid_actions,
)


def test_initial_state_fields():
    s = initial_state("walk")
    assert (s.x, s.i, s.out, s.history, s.cost, s.terminal) == ("walk", 1, "", (), 0, False)
    assert not s.at_sentinel
    assert s.default_cap() == 4 + 50


def test_initial_state_rejects_empty_input():
    with pytest.raises(ValueError):
        initial_state("")


def test_copy_consumes_and_emits():
    s = apply_action(initial_state("ab"), COPY)
    assert (s.i, s.out, s.cost) == (2, "a", 1)
    assert s.history == (COPY,)


def test_delete_consumes_silently():
    s = apply_action(initial_state("ab"), DELETE)
    assert (s.i, s.out, s.cost) == (2, "", 1)


def test_insert_emits_without_consuming():
    s = apply_action(initial_state("ab"), INSERT("z"))
    assert (s.i, s.out, s.cost) == (1, "z", 1)


def test_end_is_free_and_terminal():
    s = initial_state("a")
    s = apply_action(s, DELETE)
    assert s.at_sentinel
    s = apply_action(s, END)
    assert s.terminal and s.cost == 1 and s.out == ""


def test_end_rejected_mid_buffer():
    with pytest.raises(ValueError):
        apply_action(initial_state("ab"), END)


def test_copy_delete_rejected_at_sentinel():
    s = apply_action(initial_state("a"), COPY)
    for a in (COPY, DELETE):
        with pytest.raises(ValueError):
            apply_action(s, a)


def test_terminal_state_rejects_everything():
    s = apply_action(apply_action(initial_state("a"), COPY), END)
    with pytest.raises(ValueError):
        apply_action(s, INSERT("a"))
    with pytest.raises(ValueError):
        valid_actions(s)


def test_valid_actions_mid_buffer():
    acts = valid_actions(initial_state("ab"), alphabet="ab")
    assert acts == [COPY, DELETE, INSERT("a"), INSERT("b")]


def test_valid_actions_at_sentinel():
    s = apply_action(initial_state("a"), DELETE)
    assert valid_actions(s, alphabet="ab") == [END, INSERT("a"), INSERT("b")]


def test_valid_actions_without_alphabet_omits_inserts():
    assert valid_actions(initial_state("ab")) == [COPY, DELETE]


def test_cap_blocks_inserts_mid_buffer():
    s = apply_action(initial_state("ab"), COPY, cap=1)
    assert valid_actions(s, alphabet="ab", cap=1) == [COPY, DELETE]


def test_cap_blocks_inserts_at_sentinel():
    s = initial_state("a")
    s = apply_action(s, DELETE, cap=1)
    assert valid_actions(s, alphabet="ab", cap=1) == [END]


def test_insert_raises_at_cap():
    s = apply_action(initial_state("ab"), COPY, cap=1)
    with pytest.raises(ValueError):
        apply_action(s, INSERT("a"), cap=1)


def test_capped_machine_always_terminates():
    # drain: the cap leaves only buffer-consuming actions, then END
    s = initial_state("abc")
    cap = 2
    while not s.terminal:
        a = valid_actions(s, alphabet="abc", cap=cap)[0]
        s = apply_action(s, a, cap=cap)
    assert s.terminal and len(s.history) <= cap + len("abc") + 1


def test_run_actions_replays_full_sequence():
    actions = [COPY, DELETE, INSERT("z"), COPY, END]
    assert run_actions("abc", actions) == "azc"


def test_run_actions_requires_end():
    with pytest.raises(ValueError):
        run_actions("ab", [COPY, COPY])


def test_format_and_parse_round_trip():
    actions = [COPY, DELETE, INSERT("q"), END]
    text = format_actions(actions)
    assert text == "COPY DELETE INS(q) END"
    assert parse_actions(text) == actions


def test_format_action_tokens():
    assert format_action(INSERT("e")) == "INS(e)"
    assert parse_action("INS(e)") == INSERT("e")
    with pytest.raises(ValueError):
        parse_action("SWAP")
    with pytest.raises(ValueError):
        parse_action("INS(ab)")
