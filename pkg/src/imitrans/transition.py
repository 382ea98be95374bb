"""Deterministic edit state machine over an input buffer.

A configuration points into x·SENTINEL with a 1-based index i; i = n+1
means only the sentinel is left. COPY and DELETE consume one buffer
position, INSERT writes without consuming, END is permitted only once the
buffer holds just the sentinel. All edits cost one unit, END is free, so
the accumulated cost of a trajectory is its edit count.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

# Extra actions allowed beyond one pass over the buffer before the machine
# forces draining; bounds insertion loops from untrained policies.
DEFAULT_ACTION_SLACK = 50


@dataclass(frozen=True)
class Action:
    kind: str  # "copy" | "delete" | "insert" | "end"
    char: str | None = None

    def __repr__(self):
        return format_action(self)


COPY = Action("copy")
DELETE = Action("delete")
END = Action("end")


def INSERT(c: str) -> Action:
    return Action("insert", c)


def format_action(a: Action) -> str:
    if a.kind == "copy":
        return "COPY"
    if a.kind == "delete":
        return "DELETE"
    if a.kind == "end":
        return "END"
    return f"INS({a.char})"


_INS_RE = re.compile(r"^INS\((.)\)$")


def parse_action(token: str) -> Action:
    if token == "COPY":
        return COPY
    if token == "DELETE":
        return DELETE
    if token == "END":
        return END
    m = _INS_RE.match(token)
    if m:
        return INSERT(m.group(1))
    raise ValueError(f"unparseable action token {token!r}")


def format_actions(actions) -> str:
    return " ".join(format_action(a) for a in actions)


def parse_actions(text: str) -> list[Action]:
    return [parse_action(tok) for tok in text.split()]


@dataclass(frozen=True)
class EditState:
    """Immutable transition-system configuration.

    i is the 1-based buffer position into x·SENTINEL; out is the emitted
    prefix; cost counts non-END actions taken so far.
    """

    x: str
    i: int
    out: str
    history: tuple[Action, ...]
    cost: int
    terminal: bool = False

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def at_sentinel(self) -> bool:
        return self.i == len(self.x) + 1

    def default_cap(self) -> int:
        return len(self.x) + DEFAULT_ACTION_SLACK


def initial_state(x: str) -> EditState:
    if not x:
        raise ValueError("input string must be non-empty")
    return EditState(x=x, i=1, out="", history=(), cost=0)


def valid_actions(state: EditState, alphabet=None, cap: int | None = None) -> list[Action]:
    """Valid actions at a non-terminal configuration.

    `alphabet` supplies the insertable characters (an `Alphabet` or any
    iterable of characters); without it INSERTs are omitted, which is only
    useful for callers that handle insertions separately. Once `cap`
    actions have been taken, only buffer-consuming actions (and END at the
    sentinel) remain, so every policy terminates.
    """
    if state.terminal:
        raise ValueError("terminal state has no valid actions")
    if cap is None:
        cap = state.default_cap()
    at_cap = len(state.history) >= cap
    actions: list[Action] = []
    if state.at_sentinel:
        actions.append(END)
    else:
        actions.append(COPY)
        actions.append(DELETE)
    if not at_cap and alphabet is not None:
        chars = alphabet.surface_chars if hasattr(alphabet, "surface_chars") else alphabet
        actions.extend(INSERT(c) for c in chars)
    return actions


def apply_action(state: EditState, a: Action, cap: int | None = None) -> EditState:
    """Apply one action, returning the successor configuration."""
    if state.terminal:
        raise ValueError("cannot act on a terminal state")
    if cap is None:
        cap = state.default_cap()
    at_cap = len(state.history) >= cap
    kind = a.kind
    if kind == "copy":
        if state.at_sentinel:
            raise ValueError("COPY with an empty buffer")
        return replace(
            state,
            i=state.i + 1,
            out=state.out + state.x[state.i - 1],
            history=state.history + (a,),
            cost=state.cost + 1,
        )
    if kind == "delete":
        if state.at_sentinel:
            raise ValueError("DELETE with an empty buffer")
        return replace(state, i=state.i + 1, history=state.history + (a,), cost=state.cost + 1)
    if kind == "insert":
        if at_cap:
            raise ValueError("INSERT past the action cap")
        return replace(
            state, out=state.out + a.char, history=state.history + (a,), cost=state.cost + 1
        )
    if kind == "end":
        if not state.at_sentinel:
            raise ValueError("END before the buffer is consumed")
        return replace(state, history=state.history + (a,), terminal=True)
    raise ValueError(f"unknown action kind {kind!r}")


def run_actions(x: str, actions, cap: int | None = None) -> str:
    """Replay a complete action sequence and return the produced string.

    The sequence must be valid step by step and finish with END.
    """
    state = initial_state(x)
    for a in actions:
        state = apply_action(state, a, cap=cap)
    if not state.terminal:
        raise ValueError("action sequence does not end with END")
    return state.out
