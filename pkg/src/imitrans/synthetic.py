"""Synthetic inflection grammar and toy tasks.

A 20-character alphabet, stems of length 3 to 8 (each containing at
least one vowel), and six feature bundles: five suffixing rules, one of
which mutates a stem-final consonant, and one infixing rule that writes
inside the stem. The infix rule is the interesting case for training
comparisons because no purely suffixing heuristic explains it.
"""

from __future__ import annotations

import numpy as np

from .vocab import Sample

ALPHABET = "abcdefghijklmnopqrst"
VOWELS = "aeio"

GRAMMAR_SEED = 20170905

# bundle name -> (feature strings, realization rule name)
BUNDLES: dict[str, tuple[tuple[str, ...], str]] = {
    "present": (("V", "PRS"), "suffix_an"),
    "past": (("V", "PST"), "suffix_ot_mutating"),
    "adjectival": (("ADJ", "DERIV"), "suffix_esk"),
    "plural": (("N", "PL"), "suffix_im"),
    "agentive": (("N", "AGT"), "suffix_ra"),
    "emphatic": (("V", "EMPH"), "infix_eg"),
}

INFIX_BUNDLE = "emphatic"


def apply_rule(stem: str, bundle: str) -> str:
    """Realize one bundle's transformation on a stem."""
    rule = BUNDLES[bundle][1]
    if rule == "suffix_an":
        return stem + "an"
    if rule == "suffix_ot_mutating":
        base = stem[:-1] + "d" if stem.endswith("t") else stem
        return base + "ot"
    if rule == "suffix_esk":
        return stem + "esk"
    if rule == "suffix_im":
        return stem + "im"
    if rule == "suffix_ra":
        return stem + "ra"
    if rule == "infix_eg":
        for pos, ch in enumerate(stem):
            if ch in VOWELS:
                return stem[: pos + 1] + "eg" + stem[pos + 1 :]
        raise ValueError(f"stem {stem!r} has no vowel to infix after")
    raise ValueError(f"unknown rule {rule!r}")


def _random_stem(rng: np.random.Generator, min_len: int = 3, max_len: int = 8) -> str:
    while True:
        length = int(rng.integers(min_len, max_len + 1))
        stem = "".join(ALPHABET[int(k)] for k in rng.integers(0, len(ALPHABET), length))
        if any(c in VOWELS for c in stem):
            return stem


def grammar_pairs(n: int = 1200, seed: int = GRAMMAR_SEED) -> list[Sample]:
    """n unique (stem, bundle) samples under the grammar, order shuffled."""
    rng = np.random.default_rng(seed)
    names = list(BUNDLES)
    seen: set[tuple[str, str]] = set()
    samples: list[Sample] = []
    while len(samples) < n:
        stem = _random_stem(rng)
        bundle = names[int(rng.integers(len(names)))]
        if (stem, bundle) in seen:
            continue
        seen.add((stem, bundle))
        feats = BUNDLES[bundle][0]
        samples.append(Sample(x=stem, feats=feats, y=apply_rule(stem, bundle)))
    return samples


def grammar_split(
    n_train: int = 1000, n_dev: int = 200, seed: int = GRAMMAR_SEED
) -> tuple[list[Sample], list[Sample]]:
    """The standard train/dev split of the synthetic grammar."""
    samples = grammar_pairs(n_train + n_dev, seed)
    return samples[:n_train], samples[n_train:]


def infixation_pairs(n: int, seed: int = GRAMMAR_SEED) -> list[Sample]:
    """Samples of the infixing bundle only (the hard transformation)."""
    rng = np.random.default_rng(seed)
    feats = BUNDLES[INFIX_BUNDLE][0]
    seen: set[str] = set()
    samples: list[Sample] = []
    while len(samples) < n:
        stem = _random_stem(rng)
        if stem in seen:
            continue
        seen.add(stem)
        samples.append(Sample(x=stem, feats=feats, y=apply_rule(stem, INFIX_BUNDLE)))
    return samples


def identity_pairs(
    n: int, seed: int, alphabet: str = ALPHABET, min_len: int = 3, max_len: int = 8
) -> list[Sample]:
    """Unique copy-through samples (y = x) with no features."""
    capacity = sum(len(alphabet) ** k for k in range(min_len, max_len + 1))
    if n > capacity:
        raise ValueError(f"only {capacity} unique strings exist, cannot draw {n}")
    rng = np.random.default_rng(seed)
    seen: set[str] = set()
    samples: list[Sample] = []
    while len(samples) < n:
        length = int(rng.integers(min_len, max_len + 1))
        s = "".join(alphabet[int(k)] for k in rng.integers(0, len(alphabet), length))
        if s in seen:
            continue
        seen.add(s)
        samples.append(Sample(x=s, y=s))
    return samples
