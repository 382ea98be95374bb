"""The synthetic grammar generators."""

import pytest

from imitrans.synthetic import (
    ALPHABET,
    BUNDLES,
    INFIX_BUNDLE,
    VOWELS,
    apply_rule,
    grammar_pairs,
    grammar_split,
    identity_pairs,
    infixation_pairs,
)


def test_rule_realizations():
    assert apply_rule("bam", "present") == "baman"
    assert apply_rule("bam", "past") == "bamot"
    assert apply_rule("bant", "past") == "bandot"  # stem-final t mutates
    assert apply_rule("bam", "adjectival") == "bamesk"
    assert apply_rule("bam", "plural") == "bamim"
    assert apply_rule("bam", "agentive") == "bamra"
    assert apply_rule("bam", "emphatic") == "baegm"  # infix after first vowel
    assert apply_rule("klost", "emphatic") == "kloegst"


def test_grammar_pairs_unique_and_deterministic():
    a = grammar_pairs(300, seed=1)
    b = grammar_pairs(300, seed=1)
    assert a == b
    assert len({(s.x, s.feats) for s in a}) == 300
    assert grammar_pairs(300, seed=2) != a


def test_grammar_pairs_obey_the_rules():
    bundle_of = {feats: name for name, (feats, _) in BUNDLES.items()}
    for s in grammar_pairs(400, seed=3):
        assert 3 <= len(s.x) <= 8
        assert any(c in VOWELS for c in s.x)
        assert set(s.x) <= set(ALPHABET)
        assert s.y == apply_rule(s.x, bundle_of[s.feats])


def test_grammar_split_sizes_and_disjointness():
    train, dev = grammar_split(1000, 200)
    assert len(train) == 1000 and len(dev) == 200
    keys = {(s.x, s.feats) for s in train} | {(s.x, s.feats) for s in dev}
    assert len(keys) == 1200


def test_infixation_pairs_are_the_hard_bundle_only():
    feats = BUNDLES[INFIX_BUNDLE][0]
    for s in infixation_pairs(100, seed=4):
        assert s.feats == feats
        first_vowel = next(i for i, c in enumerate(s.x) if c in VOWELS)
        assert s.y == s.x[: first_vowel + 1] + "eg" + s.x[first_vowel + 1 :]


def test_identity_pairs_copy_through():
    samples = identity_pairs(50, seed=5, alphabet="abc", min_len=2, max_len=4)
    assert len({s.x for s in samples}) == 50
    for s in samples:
        assert s.y == s.x and s.feats is None
        assert 2 <= len(s.x) <= 4
        assert set(s.x) <= set("abc")


def test_identity_pairs_reject_impossible_request():
    # only 12 unique strings of length 2..3 exist over a 2-char alphabet
    with pytest.raises(ValueError):
        identity_pairs(13, seed=1, alphabet="ab", min_len=2, max_len=3)
