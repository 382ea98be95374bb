"""Greedy, beam, and ensemble decoding.

All decoders drive a session object with three methods: start() for the
first decoder state, advance(state, action_id, buffer_pos) for the next,
and distribution(state, at_sentinel, at_cap) for masked action
probabilities. Tests substitute hand-built scorers through the same
surface. Beam scores are raw cumulative log-probabilities with no length
normalization; the greedy chain is tracked so a wider beam can never
return a worse-scoring sequence than greedy.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import torch

from .transition import Action, EditState, apply_action, initial_state


class DecodeResult(NamedTuple):
    output: str
    actions: tuple[Action, ...]
    logprob: float
    truncated: bool


class _Hyp(NamedTuple):
    state: EditState
    dstep: object
    logp: float
    greedy: bool  # lies on the chain of per-step argmax choices
    truncated: bool


def _finish(hyp: _Hyp) -> DecodeResult:
    return DecodeResult(
        output=hyp.state.out,
        actions=hyp.state.history,
        logprob=hyp.logp,
        truncated=hyp.truncated,
    )


def beam_decode(x, feats, model, W: int, cap: int | None = None) -> DecodeResult:
    """Beam search over valid actions, returning the best finished sequence.

    Hypotheses move to the finished set on END; expansion stops once W
    have finished or none remain live. If the greedy chain is still live
    and outscores every finished hypothesis, it is run to completion so
    the returned score is never below greedy's.
    """
    if W < 1:
        raise ValueError("beam width must be >= 1")
    sess = model.session(x, feats)
    return _beam(sess, model.actions, x, W, cap)


def greedy_decode(x, feats, model, cap: int | None = None) -> DecodeResult:
    """Argmax decoding; identical to beam_decode with W=1."""
    sess = model.session(x, feats)
    return _beam(sess, model.actions, x, 1, cap)


def ensemble_decode(x, feats, models: list, W: int, cap: int | None = None) -> DecodeResult:
    """Beam decoding over the arithmetic mean of member distributions."""
    if not models:
        raise ValueError("ensemble needs at least one model")
    first = models[0]
    for m in models[1:]:
        if m.actions.actions != first.actions.actions:
            raise ValueError("ensemble members have mismatched action vocabularies")
        if m.alphabet.id_to_char != first.alphabet.id_to_char:
            raise ValueError("ensemble members have mismatched alphabets")
        if m.features.feature_to_id != first.features.feature_to_id:
            raise ValueError("ensemble members have mismatched feature vocabularies")
    sess = _EnsembleSession([m.session(x, feats) for m in models])
    return _beam(sess, first.actions, x, W, cap)


class _EnsembleSession:
    def __init__(self, sessions):
        self.sessions = sessions

    def start(self):
        return tuple(s.start() for s in self.sessions)

    def advance(self, steps, action_id, buffer_pos):
        return tuple(
            s.advance(d, action_id, buffer_pos) for s, d in zip(self.sessions, steps)
        )

    def distribution(self, steps, at_sentinel, at_cap):
        stacked = torch.stack(
            [s.distribution(d, at_sentinel, at_cap) for s, d in zip(self.sessions, steps)]
        )
        return stacked.mean(dim=0)


@torch.no_grad()
def _beam(sess, actions, x: str, W: int, cap: int | None) -> DecodeResult:
    state0 = initial_state(x)
    if cap is None:
        cap = state0.default_cap()
    live = [_Hyp(state0, sess.start(), 0.0, True, False)]
    finished: list[_Hyp] = []

    while live and len(finished) < W:
        live = _expand(live, sess, actions, cap, W, finished)

    # protect the greedy chain: never return a score below greedy's
    best = max(finished, key=lambda h: h.logp) if finished else None
    chain = next((h for h in live if h.greedy), None)
    if chain is not None and (best is None or chain.logp > best.logp):
        while not chain.state.terminal:
            chain = _greedy_step(chain, sess, actions, cap)
        if best is None or chain.logp > best.logp:
            best = chain
    assert best is not None
    return _finish(best)


def _expand(live, sess, actions, cap, W, finished) -> list:
    candidates = []
    for hyp in live:
        at_cap = len(hyp.state.history) >= cap
        probs = sess.distribution(hyp.dstep, hyp.state.at_sentinel, at_cap)
        ids = actions.valid_ids(hyp.state.at_sentinel, at_cap)
        top = max(ids, key=lambda a: float(probs[a]))
        for aid in ids:
            p = float(probs[aid])
            lp = hyp.logp + (math.log(p) if p > 0 else -math.inf)
            candidates.append(
                (lp, hyp.greedy and aid == top, hyp, aid, at_cap)
            )
    candidates.sort(key=lambda c: (-c[0], not c[1]))
    keep = candidates[:W]
    # the greedy child survives pruning so beam >= greedy holds structurally
    for c in candidates[W:]:
        if c[1]:
            keep.append(c)
            break
    out = []
    for lp, greedy, hyp, aid, was_cap in keep:
        a = actions.actions[aid]
        st = apply_action(hyp.state, a, cap=cap)
        trunc = hyp.truncated or was_cap
        if st.terminal:
            finished.append(_Hyp(st, hyp.dstep, lp, greedy, trunc))
        else:
            d = sess.advance(hyp.dstep, aid, st.i)
            out.append(_Hyp(st, d, lp, greedy, trunc))
    return out


def _greedy_step(hyp: _Hyp, sess, actions, cap) -> _Hyp:
    at_cap = len(hyp.state.history) >= cap
    probs = sess.distribution(hyp.dstep, hyp.state.at_sentinel, at_cap)
    ids = actions.valid_ids(hyp.state.at_sentinel, at_cap)
    aid = max(ids, key=lambda a: float(probs[a]))
    p = float(probs[aid])
    lp = hyp.logp + (math.log(p) if p > 0 else -math.inf)
    st = apply_action(hyp.state, actions.actions[aid], cap=cap)
    d = hyp.dstep if st.terminal else sess.advance(hyp.dstep, aid, st.i)
    return _Hyp(st, d, lp, True, hyp.truncated or at_cap)
