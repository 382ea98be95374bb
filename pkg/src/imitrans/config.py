"""Run configuration shared by training, decoding, and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, asdict

OBJECTIVES = ("mle", "il-nll", "il-softmax-margin", "mrt")


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters and run settings.

    Defaults reproduce the reference configuration: unit-distance penalty
    beta=5, inverse-sigmoid roll-in decay k=12, half-and-half roll-out
    mixing, embedding sizes 100/20, hidden size 200, beam width 4.
    max_actions=None caps each sample at len(x)+50 actions; a positive
    integer applies one absolute cap to every sample.
    """

    beta: int = 5
    rollin_k: float = 12.0
    rollout_mix_p: float = 0.5
    objective: str = "il-nll"
    beam_width: int = 4
    char_dim: int = 100
    feat_dim: int = 20
    hidden_dim: int = 200
    max_actions: int | None = None
    patience: int = 5
    max_epochs: int = 30
    seed: int = 1
    mrt_lambda: float = 0.5
    mrt_max_samples: int = 20
    mrt_alpha: float = 1.0
    mrt_warm_start: bool = False

    def __post_init__(self):
        if self.beta < 1:
            raise ValueError("beta must be a positive integer penalty (>= 1)")
        if self.rollin_k <= 0:
            raise ValueError("rollin_k must be positive")
        if not 0.0 <= self.rollout_mix_p <= 1.0:
            raise ValueError("rollout_mix_p must lie in [0, 1]")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        for name in ("beam_width", "char_dim", "hidden_dim",
                     "patience", "max_epochs", "mrt_max_samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.feat_dim < 0:
            raise ValueError("feat_dim must be non-negative")
        if self.max_actions is not None and self.max_actions < 1:
            raise ValueError("max_actions must be positive when set")
        if not 0.0 <= self.mrt_lambda <= 1.0:
            raise ValueError("mrt_lambda must lie in [0, 1]")

    def action_cap(self, x: str) -> int:
        return self.max_actions if self.max_actions is not None else len(x) + 50

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in d.items() if k in known})
