"""FastAPI application factory.

The service wraps a loaded checkpoint for decoding and exposes the
expert oracle and the evaluation metric, which need no model. All
model state is attached to the application instance, so several apps
can coexist in one process.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..data_io import ModelBundle, evaluate, load_checkpoint
from ..decoding import beam_decode
from ..expert import derive_static_actions
from ..transition import format_action, run_actions
from ..vocab import Sample, encode_features
from .schemas import (
    EvaluateRequest,
    EvaluateResponse,
    HealthResponse,
    ModelInfo,
    OracleRequest,
    OracleResponse,
    Prediction,
    TransduceRequest,
    TransduceResponse,
)


def create_app(model_path: str | None = None) -> FastAPI:
    app = FastAPI(title="imitrans", version="1.0")
    app.state.bundle = load_checkpoint(model_path) if model_path else None

    def bundle() -> ModelBundle:
        if app.state.bundle is None:
            raise HTTPException(status_code=503, detail="no model loaded")
        return app.state.bundle

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", model_loaded=app.state.bundle is not None)

    @app.get("/model", response_model=ModelInfo)
    def model_info() -> ModelInfo:
        b = bundle()
        return ModelInfo(
            alphabet=list(b.model.alphabet.surface_chars),
            features=sorted(b.model.features.feature_to_id),
            n_actions=len(b.model.actions.actions),
            config=b.config.to_dict(),
        )

    @app.post("/transduce", response_model=TransduceResponse)
    def transduce(req: TransduceRequest) -> TransduceResponse:
        b = bundle()
        width = req.beam_width or b.config.beam_width
        preds = []
        for item in req.inputs:
            mf = (
                encode_features(item.features, b.model.features)
                if item.features is not None
                else None
            )
            res = beam_decode(
                item.source, mf, b.model, width, cap=b.config.action_cap(item.source)
            )
            preds.append(
                Prediction(
                    output=res.output,
                    logprob=res.logprob,
                    actions=[format_action(a) for a in res.actions],
                )
            )
        return TransduceResponse(predictions=preds)

    @app.post("/oracle", response_model=OracleResponse)
    def oracle(req: OracleRequest) -> OracleResponse:
        actions = derive_static_actions(req.source, req.target)
        output = run_actions(req.source, actions, cap=len(actions) + 1)
        return OracleResponse(
            actions=[format_action(a) for a in actions],
            cost=len(actions) - 1,
            output=output,
        )

    @app.post("/evaluate", response_model=EvaluateResponse)
    def score(req: EvaluateRequest) -> EvaluateResponse:
        if len(req.gold) != len(req.predictions):
            raise HTTPException(
                status_code=400,
                detail=f"{len(req.gold)} gold rows but {len(req.predictions)} predictions",
            )
        if any(not g for g in req.gold):
            raise HTTPException(status_code=400, detail="gold strings must be non-empty")
        gold = [Sample(x=g, y=g) for g in req.gold]
        acc, dist = evaluate(gold, req.predictions)
        return EvaluateResponse(exact_match=acc, mean_distance=dist)

    return app
