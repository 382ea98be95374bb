"""Vocabularies, sample representation and morpho-syntactic feature encoding.

Characters from source and target sides share a single alphabet so that
copying and the insert-action/character embedding tie are total. Feature
bundles are encoded as n-hot vectors over a fixed slot assignment.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field

from .transition import Action, COPY, DELETE, END, INSERT

logger = logging.getLogger(__name__)

# Placeholder display strings for ids that carry no surface character.
# Multi-char on purpose: they can never collide with a real character.
SENTINEL_MARK = "<#>"
UNK_MARK = "<unk>"


@dataclass(frozen=True)
class Alphabet:
    """Bijection between surface characters and dense ids.

    Two extra ids carry no surface character: SENTINEL marks the end of
    the input buffer, UNK stands in for characters unseen at training
    time. Neither may ever appear in an output string.
    """

    id_to_char: tuple[str, ...]
    char_to_id: dict[str, int] = field(compare=False)
    unk_id: int = 0
    sentinel_id: int = 1

    @classmethod
    def from_chars(cls, chars) -> "Alphabet":
        surface = sorted(set(chars))
        for c in surface:
            if len(c) != 1:
                raise ValueError(f"alphabet entries must be single characters, got {c!r}")
        id_to_char = (UNK_MARK, SENTINEL_MARK) + tuple(surface)
        char_to_id = {c: i + 2 for i, c in enumerate(surface)}
        return cls(id_to_char=id_to_char, char_to_id=char_to_id)

    def __len__(self) -> int:
        return len(self.id_to_char)

    @property
    def surface_chars(self) -> tuple[str, ...]:
        return self.id_to_char[2:]

    def encode_char(self, c: str) -> int:
        """Id for a character; unseen characters map to UNK."""
        return self.char_to_id.get(c, self.unk_id)

    def encode_string(self, s: str) -> list[int]:
        get = self.char_to_id.get
        unk = self.unk_id
        return [get(c, unk) for c in s]


@dataclass(frozen=True)
class ActionVocab:
    """Ordered edit-action inventory: COPY, DELETE, END, then one INSERT
    per surface character of the alphabet."""

    actions: tuple[Action, ...]
    action_to_id: dict[Action, int] = field(compare=False)
    copy_id: int = 0
    delete_id: int = 1
    end_id: int = 2

    @classmethod
    def from_alphabet(cls, alphabet: Alphabet) -> "ActionVocab":
        actions = (COPY, DELETE, END) + tuple(INSERT(c) for c in alphabet.surface_chars)
        return cls(actions=actions, action_to_id={a: i for i, a in enumerate(actions)})

    def __len__(self) -> int:
        return len(self.actions)

    @property
    def n_inserts(self) -> int:
        return len(self.actions) - 3

    def id_of(self, action: Action) -> int:
        try:
            return self.action_to_id[action]
        except KeyError:
            raise KeyError(f"action {action} not in vocabulary") from None

    def insert_id(self, c: str) -> int | None:
        """Id of INSERT(c), or None when c is not a surface character."""
        return self.action_to_id.get(INSERT(c))

    def valid_ids(self, at_sentinel: bool, at_cap: bool) -> list[int]:
        """Ids of actions valid at a configuration.

        Mirrors the transition rules: COPY/DELETE while buffer input
        remains, END only at the sentinel, INSERTs barred at the cap.
        """
        ids = [self.end_id] if at_sentinel else [self.copy_id, self.delete_id]
        if not at_cap:
            ids.extend(range(3, len(self.actions)))
        return ids


@dataclass(frozen=True)
class FeatureVocab:
    """Feature strings mapped to dense slots 1..H (slot 0 is reserved for
    the inactive-slot embedding)."""

    feature_to_id: dict[str, int]

    @classmethod
    def from_features(cls, features) -> "FeatureVocab":
        ordered = sorted(set(features))
        return cls(feature_to_id={f: h + 1 for h, f in enumerate(ordered)})

    def __len__(self) -> int:
        return len(self.feature_to_id)

    @property
    def size(self) -> int:
        return len(self.feature_to_id)


@dataclass(frozen=True)
class MorphFeatures:
    """n-hot encoding of a morpho-syntactic description, one bit per slot."""

    bits: tuple[int, ...]

    @property
    def active_slots(self) -> tuple[int, ...]:
        """1-based slots whose feature is present."""
        return tuple(h + 1 for h, b in enumerate(self.bits) if b)

    def __len__(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class Sample:
    """One transduction instance: input string, optional feature bundle,
    optional target (absent at prediction time)."""

    x: str
    feats: tuple[str, ...] | None = None
    y: str | None = None

    def __post_init__(self):
        if not self.x:
            raise ValueError("sample input must be non-empty")
        if self.y is not None and not self.y:
            raise ValueError("sample target, when present, must be non-empty")


def build_vocabs(samples: list[Sample]) -> tuple[Alphabet, ActionVocab, FeatureVocab]:
    """Collect character, action and feature inventories from training data.

    The alphabet is the union of input- and output-side characters, so
    every character that can be copied can also be inserted.
    """
    if not samples:
        raise ValueError("cannot build vocabularies from an empty sample list")
    chars: set[str] = set()
    feats: set[str] = set()
    for s in samples:
        chars.update(s.x)
        if s.y is not None:
            chars.update(s.y)
        if s.feats:
            feats.update(s.feats)
    alphabet = Alphabet.from_chars(chars)
    return alphabet, ActionVocab.from_alphabet(alphabet), FeatureVocab.from_features(feats)


def encode_features(
    raw, vocab: FeatureVocab, tally: Counter | None = None
) -> MorphFeatures:
    """Encode a feature-string bundle as an n-hot vector.

    Feature strings unknown to the vocabulary are dropped (test sets may
    carry unseen bundles); each drop is counted in `tally` when given and
    logged once per call.
    """
    bits = [0] * vocab.size
    unknown = 0
    for f in raw:
        h = vocab.feature_to_id.get(f)
        if h is None:
            unknown += 1
        else:
            bits[h - 1] = 1
    if unknown:
        if tally is not None:
            tally["unknown_features"] += unknown
        logger.warning("dropped %d unknown feature string(s)", unknown)
    return MorphFeatures(bits=tuple(bits))
