"""Dataset readers and writers, evaluation metrics, and checkpoints.

Three tab-separated layouts are supported: lemma/inflected/features with
";"-separated features (sig2017), lemma/features/inflected with
","-separated features (sig2016), and bare source/target pairs (pairs).
Prediction-time files may omit the target column. Text is UTF-8
throughout and never Unicode-normalized.
"""

from __future__ import annotations

import logging
from typing import NamedTuple

import torch

from .config import TrainConfig
from .expert import levenshtein
from .model import Transducer
from .vocab import Alphabet, ActionVocab, FeatureVocab, Sample

log = logging.getLogger(__name__)

FORMATS = ("sig2017", "sig2016", "pairs")

CHECKPOINT_VERSION = 1


class ParseError(ValueError):
    """A data file line that does not fit the declared format."""


class CheckpointError(RuntimeError):
    """A checkpoint that cannot be loaded as saved."""


def _split_feats(field: str, sep: str) -> tuple[str, ...]:
    return tuple(tok.strip() for tok in field.split(sep) if tok.strip())


def read_dataset(path: str, fmt: str) -> list[Sample]:
    """Parse one sample per non-empty line; target column may be absent.

    Raises ParseError (with the line number) on a column-count mismatch
    or invalid UTF-8.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}, expected one of {FORMATS}")
    samples: list[Sample] = []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().split("\n")
    except UnicodeDecodeError as e:
        raise ParseError(f"{path}: not valid UTF-8 ({e})") from e
    for no, line in enumerate(lines, 1):
        if line.endswith("\r"):
            line = line[:-1]
        if not line.strip():
            continue
        cols = line.split("\t")
        try:
            samples.append(_parse_row(cols, fmt))
        except ParseError as e:
            raise ParseError(f"{path}:{no}: {e}") from None
        except ValueError as e:
            raise ParseError(f"{path}:{no}: {e}") from None
    if not samples:
        log.warning("no samples in %s", path)
    return samples


def _parse_row(cols: list[str], fmt: str) -> Sample:
    if fmt == "sig2017":
        if len(cols) == 3:
            return Sample(x=cols[0], feats=_split_feats(cols[2], ";"), y=cols[1])
        if len(cols) == 2:  # prediction time: lemma and features only
            return Sample(x=cols[0], feats=_split_feats(cols[1], ";"))
        raise ParseError(f"expected 2 or 3 columns for sig2017, got {len(cols)}")
    if fmt == "sig2016":
        if len(cols) == 3:
            return Sample(x=cols[0], feats=_split_feats(cols[1], ","), y=cols[2])
        if len(cols) == 2:
            return Sample(x=cols[0], feats=_split_feats(cols[1], ","))
        raise ParseError(f"expected 2 or 3 columns for sig2016, got {len(cols)}")
    if len(cols) == 2:
        return Sample(x=cols[0], y=cols[1])
    if len(cols) == 1:
        return Sample(x=cols[0])
    raise ParseError(f"expected 1 or 2 columns for pairs, got {len(cols)}")


def write_predictions(path: str, samples: list[Sample], predictions: list[str], fmt: str) -> None:
    """Mirror the input format with predictions in the target column."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}, expected one of {FORMATS}")
    if len(samples) != len(predictions):
        raise ValueError(
            f"{len(samples)} samples but {len(predictions)} predictions"
        )
    rows = []
    for s, pred in zip(samples, predictions):
        if "\t" in pred:
            raise ValueError(f"prediction contains a tab: {pred!r}")
        if fmt == "sig2017":
            rows.append(f"{s.x}\t{pred}\t{';'.join(s.feats or ())}")
        elif fmt == "sig2016":
            rows.append(f"{s.x}\t{','.join(s.feats or ())}\t{pred}")
        else:
            rows.append(f"{s.x}\t{pred}")
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(row + "\n")


def evaluate(gold: list[Sample], predictions: list[str]) -> tuple[float, float]:
    """Exact-match fraction and mean edit distance against gold targets."""
    if len(gold) != len(predictions):
        raise ValueError(f"{len(gold)} gold rows but {len(predictions)} predictions")
    if not gold:
        raise ValueError("cannot evaluate zero rows")
    hits = 0
    dist = 0
    for s, pred in zip(gold, predictions):
        if s.y is None:
            raise ValueError("gold sample lacks a target")
        hits += pred == s.y
        dist += levenshtein(pred, s.y)
    return hits / len(gold), dist / len(gold)


class ModelBundle(NamedTuple):
    model: Transducer
    config: TrainConfig


def save_checkpoint(path: str, model: Transducer, config: TrainConfig) -> None:
    """Persist config, vocabularies, and tensors in one container."""
    fv = model.features.feature_to_id
    payload = {
        "format_version": CHECKPOINT_VERSION,
        "config": config.to_dict(),
        "alphabet": list(model.alphabet.surface_chars),
        "features": [f for f, _ in sorted(fv.items(), key=lambda kv: kv[1])],
        "state": model.state_dict(),
    }
    torch.save(payload, path)


def load_checkpoint(path: str) -> ModelBundle:
    """Rebuild a model bit-exactly from save_checkpoint's container."""
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as e:
        raise CheckpointError(f"{path}: cannot read checkpoint ({e})") from e
    if not isinstance(payload, dict):
        raise CheckpointError(f"{path}: unexpected checkpoint payload")
    version = payload.get("format_version")
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"{path}: format version {version!r}, expected {CHECKPOINT_VERSION}"
        )
    missing = {"config", "alphabet", "features", "state"} - payload.keys()
    if missing:
        raise CheckpointError(f"{path}: missing checkpoint keys {sorted(missing)}")
    config = TrainConfig.from_dict(payload["config"])
    alphabet = Alphabet.from_chars(payload["alphabet"])
    actions = ActionVocab.from_alphabet(alphabet)
    features = FeatureVocab.from_features(payload["features"])
    model = Transducer(
        alphabet, actions, features, config.char_dim, config.feat_dim, config.hidden_dim
    )
    try:
        model.load_state_dict(payload["state"])
    except Exception as e:
        raise CheckpointError(f"{path}: tensors do not fit the config ({e})") from e
    model.eval()
    return ModelBundle(model=model, config=config)
