"""Neural transition-based string transduction.

A character-level transducer that copies, deletes, and inserts its way
from a source string to a target, trained by imitation of an edit
distance expert, with beam-search decoding and optional minimum-risk
fine-tuning.
"""

from .config import TrainConfig
from .data_io import (
    CheckpointError,
    ParseError,
    evaluate,
    load_checkpoint,
    read_dataset,
    save_checkpoint,
    write_predictions,
)
from .decoding import DecodeResult, beam_decode, ensemble_decode, greedy_decode
from .expert import (
    completion_costs,
    derive_static_actions,
    expert_actions,
    levenshtein,
    sequence_loss,
    start_expert,
)
from .model import Transducer
from .training import TrainResult, train
from .transition import (
    COPY,
    DELETE,
    END,
    INSERT,
    Action,
    EditState,
    apply_action,
    initial_state,
    run_actions,
    valid_actions,
)
from .vocab import (
    Alphabet,
    ActionVocab,
    FeatureVocab,
    MorphFeatures,
    Sample,
    build_vocabs,
    encode_features,
)

__version__ = "1.0.0"

__all__ = [
    "Action",
    "ActionVocab",
    "Alphabet",
    "CheckpointError",
    "COPY",
    "DecodeResult",
    "DELETE",
    "EditState",
    "END",
    "FeatureVocab",
    "INSERT",
    "MorphFeatures",
    "ParseError",
    "Sample",
    "TrainConfig",
    "TrainResult",
    "Transducer",
    "apply_action",
    "beam_decode",
    "build_vocabs",
    "completion_costs",
    "derive_static_actions",
    "encode_features",
    "ensemble_decode",
    "evaluate",
    "expert_actions",
    "greedy_decode",
    "initial_state",
    "levenshtein",
    "load_checkpoint",
    "read_dataset",
    "run_actions",
    "save_checkpoint",
    "sequence_loss",
    "start_expert",
    "train",
    "valid_actions",
    "write_predictions",
]
