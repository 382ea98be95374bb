"""The differentiable scorer behind the transducer.

A bidirectional recurrent encoder reads the input characters plus a
sentinel; a single recurrent decoder cell consumes the previous action's
embedding, the encoding of the current buffer position, and the
morpho-syntactic feature block; a linear layer scores actions. Insertion
actions share their character's embedding, so INSERT(c) and c are one
row. Everything runs in float64 on CPU for bitwise-reproducible training.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import torch
from torch import nn

from .vocab import Alphabet, ActionVocab, FeatureVocab, MorphFeatures

# special action-embedding rows 0..2 match the COPY/DELETE/END action ids;
# row 3 embeds the begin-of-sequence pseudo-action, which is not a real
# action id, so sessions pass the BOS_ACTION marker instead
BOS_ROW = 3
BOS_ACTION = -1

NEG_INF = float("-inf")


class DecoderStep(NamedTuple):
    """One decoder state: output vector s and recurrent cell state c."""

    s: torch.Tensor  # (1, hidden_dim)
    c: torch.Tensor  # (1, hidden_dim)


class Transducer(nn.Module):
    def __init__(
        self,
        alphabet: Alphabet,
        actions: ActionVocab,
        features: FeatureVocab,
        char_dim: int,
        feat_dim: int,
        hidden_dim: int,
    ):
        super().__init__()
        self.alphabet = alphabet
        self.actions = actions
        self.features = features
        self.char_dim = char_dim
        self.feat_dim = feat_dim
        self.hidden_dim = hidden_dim
        self.n_actions = len(actions.actions)
        h = features.size

        self.char_emb = nn.Embedding(len(alphabet), char_dim)
        self.special_emb = nn.Embedding(4, char_dim)  # COPY, DELETE, END, BOS
        self.feat_emb = nn.Embedding(h + 1, feat_dim) if h > 0 else None
        self.encoder = nn.LSTM(char_dim, hidden_dim, num_layers=1, bidirectional=True)
        dec_in = char_dim + 2 * hidden_dim + h * feat_dim
        self.decoder = nn.LSTMCell(dec_in, hidden_dim)
        self.classifier = nn.Linear(hidden_dim, self.n_actions)

        self.double()
        init_params(self)
        self._masks = self._build_masks()

    # ---- validity masks ----------------------------------------------

    def _build_masks(self) -> dict[tuple[bool, bool], torch.Tensor]:
        """Additive logit masks keyed by (at_sentinel, at_cap)."""
        a = self.actions
        masks = {}
        for at_sentinel in (False, True):
            for at_cap in (False, True):
                m = torch.zeros(self.n_actions, dtype=torch.float64)
                if at_sentinel:
                    m[a.copy_id] = NEG_INF
                    m[a.delete_id] = NEG_INF
                else:
                    m[a.end_id] = NEG_INF
                if at_cap:
                    m[3:] = NEG_INF  # insertions barred once the cap is hit
                masks[(at_sentinel, at_cap)] = m
        return masks

    def mask(self, at_sentinel: bool, at_cap: bool) -> torch.Tensor:
        return self._masks[(at_sentinel, at_cap)]

    # ---- embeddings and encoding -------------------------------------

    def action_embedding(self, action_id: int) -> torch.Tensor:
        """Embedding row for a previous action; BOS_ACTION starts a sequence."""
        if action_id == BOS_ACTION or action_id < 3:
            row = BOS_ROW if action_id == BOS_ACTION else action_id
            return self.special_emb(torch.tensor([row]))
        # INSERT(c) is tied to c's character embedding
        char_id = action_id - 3 + 2
        return self.char_emb(torch.tensor([char_id]))

    def encode(self, x: str) -> torch.Tensor:
        """Encode x plus the sentinel; row i-1 serves buffer position i."""
        ids = self.alphabet.encode_string(x) + [self.alphabet.sentinel_id]
        emb = self.char_emb(torch.tensor(ids))  # (n+1, char_dim)
        out, _ = self.encoder(emb.unsqueeze(1))  # (n+1, 1, 2*hidden)
        return out.squeeze(1)

    def feature_block(self, feats: MorphFeatures | None) -> torch.Tensor:
        """Concatenated per-slot embeddings; inactive slots share row 0."""
        h = self.features.size
        if h == 0:
            return torch.zeros(0, dtype=torch.float64)
        if feats is None:
            rows = torch.zeros(h, dtype=torch.long)
        else:
            bits = feats.bits
            if len(bits) != h:
                raise ValueError(f"feature vector length {len(bits)} != {h} slots")
            rows = torch.tensor([slot if bit else 0 for slot, bit in enumerate(bits, 1)])
        return self.feat_emb(rows).reshape(-1)

    # ---- stepping -----------------------------------------------------

    def initial_step(self) -> DecoderStep:
        z = torch.zeros(1, self.hidden_dim, dtype=torch.float64)
        return DecoderStep(s=z, c=z)

    def decoder_step(
        self,
        prev: DecoderStep,
        prev_action_id: int,
        buffer_top: torch.Tensor,
        feat_block: torch.Tensor,
    ) -> DecoderStep:
        inp = torch.cat(
            [self.action_embedding(prev_action_id).squeeze(0), buffer_top, feat_block]
        ).unsqueeze(0)
        s, c = self.decoder(inp, (prev.s, prev.c))
        return DecoderStep(s=s, c=c)

    def logits(self, step: DecoderStep) -> torch.Tensor:
        return self.classifier(step.s).squeeze(0)

    def action_distribution(
        self, step: DecoderStep, mask: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """Masked probabilities plus raw logits.

        Invalid actions get probability exactly 0; the rest renormalize.
        """
        logits = self.logits(step)
        probs = torch.softmax(logits + mask, dim=0)
        return probs, logits

    def session(self, x: str, feats: MorphFeatures | None) -> "Session":
        return Session(self, x, feats)


class Session:
    """Cached per-input context for stepping the decoder.

    The encoder runs once; every decoder step then reuses the encoded
    buffer and feature block. Any object with the same start / advance /
    distribution surface can stand in for decoding (tests do).
    """

    def __init__(self, model: Transducer, x: str, feats: MorphFeatures | None):
        self.model = model
        self.x = x
        self.h = model.encode(x)  # (n+1, 2*hidden)
        self.fb = model.feature_block(feats)
        self.n_actions = model.n_actions

    def start(self) -> DecoderStep:
        """Decoder state scoring the first action (BOS context, buffer at 1)."""
        return self.model.decoder_step(
            self.model.initial_step(), BOS_ACTION, self.h[0], self.fb
        )

    def advance(self, step: DecoderStep, action_id: int, buffer_pos: int) -> DecoderStep:
        """State after taking action_id, with the buffer now at buffer_pos."""
        return self.model.decoder_step(step, action_id, self.h[buffer_pos - 1], self.fb)

    def distribution(self, step: DecoderStep, at_sentinel: bool, at_cap: bool) -> torch.Tensor:
        probs, _ = self.model.action_distribution(
            step, self.model.mask(at_sentinel, at_cap)
        )
        return probs

    def masked_logits(self, step: DecoderStep, at_sentinel: bool, at_cap: bool) -> torch.Tensor:
        return self.model.logits(step) + self.model.mask(at_sentinel, at_cap)


def init_params(model: Transducer) -> None:
    """Uniform fan-in init; zero biases except forget gates at +1."""
    hid = model.hidden_dim
    for name, p in model.named_parameters():
        if "bias" in name:
            with torch.no_grad():
                p.zero_()
                # torch gate order is input, forget, cell, output
                if ("encoder" in name or "decoder" in name) and "bias_ih" in name:
                    p[hid : 2 * hid].fill_(1.0)
        else:
            bound = math.sqrt(3.0 / p.shape[-1])
            with torch.no_grad():
                p.uniform_(-bound, bound)
