"""Request and response bodies for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    model_loaded: bool


class ModelInfo(BaseModel):
    alphabet: list[str]
    features: list[str]
    n_actions: int
    config: dict


class TransduceItem(BaseModel):
    source: str = Field(min_length=1)
    features: list[str] | None = None


class TransduceRequest(BaseModel):
    inputs: list[TransduceItem] = Field(min_length=1)
    beam_width: int | None = Field(default=None, ge=1)


class Prediction(BaseModel):
    output: str
    logprob: float
    actions: list[str]


class TransduceResponse(BaseModel):
    predictions: list[Prediction]


class OracleRequest(BaseModel):
    source: str = Field(min_length=1)
    target: str = Field(min_length=1)


class OracleResponse(BaseModel):
    actions: list[str]
    cost: int
    output: str


class EvaluateRequest(BaseModel):
    gold: list[str] = Field(min_length=1)
    predictions: list[str]


class EvaluateResponse(BaseModel):
    exact_match: float
    mean_distance: float
