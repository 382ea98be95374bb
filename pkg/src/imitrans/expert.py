"""Edit-distance dynamic programs and the expert policy.

The expert tracks how much of the target has been matched as a prefix of
the emitted output and always steers toward completing the remaining
target suffix with as few edits as possible. Completion costs come from a
two-dimensional DP over (buffer position, matched prefix length), so the
expert is exact and O(1) per queried action once the table is built.
"""

from __future__ import annotations

from dataclasses import dataclass

from .transition import (
    Action,
    COPY,
    DELETE,
    END,
    INSERT,
    EditState,
    apply_action,
    initial_state,
    run_actions,
)


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance (insert = delete = substitute = 1)."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


class CompletionTable:
    """Minimal edit cost C[i][j] of consuming x[i:] while emitting y*[j:].

    Indices are absolute: i in i0..n+1 (1-based buffer position), j in
    j0..len(y_star) (matched prefix length). C[n+1][len(y_star)] = 0, and
    every entry is finite because deleting the rest of the buffer and
    inserting the rest of the target is always available.
    """

    __slots__ = ("x", "y_star", "i0", "j0", "rows")

    def __init__(self, x: str, i0: int, y_star: str, j0: int, rows: list[list[int]]):
        self.x = x
        self.y_star = y_star
        self.i0 = i0
        self.j0 = j0
        self.rows = rows

    def cost(self, i: int, j: int) -> int:
        return self.rows[i - self.i0][j - self.j0]


def completion_costs(x: str, i0: int, y_star: str, j0: int) -> CompletionTable:
    """Build the completion-cost table from (i0, j0) to the terminal cell.

    Recurrence per cell: COPY when the buffer head matches the next target
    character, DELETE while the buffer is non-empty, INSERT of the next
    target character while target remains, END only at (n+1, |y*|).
    """
    n = len(x)
    p = len(y_star)
    if not 1 <= i0 <= n + 1:
        raise ValueError(f"buffer position i0={i0} out of range 1..{n + 1}")
    if not 0 <= j0 <= p:
        raise ValueError(f"target position j0={j0} out of range 0..{p}")
    width = p - j0 + 1
    rows = [[0] * width for _ in range(n - i0 + 2)]
    # bottom row: only the sentinel remains, insert the rest of the target
    rows[n + 1 - i0] = list(range(p - j0, -1, -1))
    for i in range(n, i0 - 1, -1):
        row = rows[i - i0]
        below = rows[i + 1 - i0]
        xc = x[i - 1]
        row[p - j0] = below[p - j0] + 1  # target done: delete out the buffer
        for j in range(p - 1, j0 - 1, -1):
            c = below[j - j0] + 1  # DELETE
            ins = row[j + 1 - j0] + 1  # INSERT(y*[j+1])
            if ins < c:
                c = ins
            if xc == y_star[j]:
                cpy = below[j + 1 - j0] + 1  # COPY
                if cpy < c:
                    c = cpy
            row[j - j0] = c
    return CompletionTable(x, i0, y_star, j0, rows)


@dataclass(frozen=True)
class ExpertState:
    """Matched-prefix pointer into the target plus the cached cost table."""

    j: int
    table: CompletionTable

    @property
    def y_star(self) -> str:
        return self.table.y_star

    def errors_so_far(self, out: str) -> int:
        """Emitted characters that did not extend the matched prefix."""
        return len(out) - self.j


def start_expert(x: str, y_star: str) -> ExpertState:
    return ExpertState(j=0, table=completion_costs(x, 1, y_star, 0))


def expert_actions(state: EditState, es: ExpertState, y_star: str | None = None) -> list[Action]:
    """All actions on a minimum-cost completion of the target suffix.

    Returned in the fixed order COPY, DELETE, INSERT, END so deterministic
    consumers can tie-break by position. INSERT is only ever proposed for
    the next unmatched target character.
    """
    if state.terminal:
        raise ValueError("terminal state has no expert actions")
    if y_star is None:
        y_star = es.y_star
    table = es.table
    i, j = state.i, es.j
    n, p = len(state.x), len(y_star)
    here = table.cost(i, j)
    best: list[Action] = []
    if i <= n:
        if j < p and state.x[i - 1] == y_star[j] and table.cost(i + 1, j + 1) + 1 == here:
            best.append(COPY)
        if table.cost(i + 1, j) + 1 == here:
            best.append(DELETE)
    if j < p and table.cost(i, j + 1) + 1 == here:
        best.append(INSERT(y_star[j]))
    if i == n + 1 and j == p:
        best.append(END)  # here == 0, the only zero-cost completion
    return best


def advance_pointer(es: ExpertState, emitted: str, y_star: str | None = None) -> ExpertState:
    """Move the matched-prefix pointer past an emission.

    The pointer advances only when the emission equals the next unmatched
    target character; anything else is a committed error and leaves the
    pointer in place.
    """
    if y_star is None:
        y_star = es.y_star
    if es.j < len(y_star) and emitted == y_star[es.j]:
        return ExpertState(j=es.j + 1, table=es.table)
    return es


def sequence_loss(actions, x: str, y_star: str, beta: int) -> int:
    """Distance-plus-edit-cost loss of a complete action sequence."""
    out = run_actions(x, actions, cap=len(actions) + 1)
    edits = sum(1 for a in actions if a.kind != "end")
    return beta * levenshtein(out, y_star) + edits


def derive_static_actions(x: str, y_star: str) -> list[Action]:
    """One deterministic minimum-cost action sequence from x to y_star.

    Follows the expert, breaking ties by the fixed precedence COPY before
    DELETE before INSERT before END (the order expert_actions returns).
    """
    state = initial_state(x)
    es = start_expert(x, y_star)
    cap = len(x) + len(y_star) + 1  # a minimal derivation never hits this
    actions: list[Action] = []
    while True:
        a = expert_actions(state, es)[0]
        actions.append(a)
        state = apply_action(state, a, cap=cap)
        if state.terminal:
            return actions
        if a.kind in ("copy", "insert"):
            es = advance_pointer(es, state.out[-1])
