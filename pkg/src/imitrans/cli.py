"""Command-line front end.

Thin client around the library: `train`, `predict`, `evaluate`,
`oracle-check`, and `serve`. Exit codes are 0 on success, 1 on a
runtime or data failure, 2 on a usage error. Logs go to standard
error, metrics to standard output.
"""

from __future__ import annotations

import argparse
import sys

from .config import OBJECTIVES, TrainConfig
from .data_io import (
    FORMATS,
    CheckpointError,
    ParseError,
    evaluate,
    load_checkpoint,
    read_dataset,
    save_checkpoint,
    write_predictions,
)
from .decoding import beam_decode, ensemble_decode
from .expert import derive_static_actions
from .training import train
from .transition import format_actions, run_actions
from .vocab import encode_features

_DEF = TrainConfig()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imitrans",
        description="Neural transition-based string transduction toolkit.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument(
        "--format", choices=FORMATS, default="sig2017", help="dataset file layout"
    )

    p = sub.add_parser("train", parents=[fmt], help="train a model")
    p.add_argument("--train", required=True, dest="train_path", metavar="PATH")
    p.add_argument("--dev", required=True, dest="dev_path", metavar="PATH")
    p.add_argument("--model", required=True, help="checkpoint output path")
    p.add_argument("--objective", choices=OBJECTIVES, default=_DEF.objective)
    p.add_argument("--beta", type=int, default=_DEF.beta)
    p.add_argument("--rollin-k", type=float, default=_DEF.rollin_k)
    p.add_argument(
        "--rollout-mix",
        type=float,
        default=_DEF.rollout_mix_p,
        help="probability of an expert (closed-form) roll-out per action",
    )
    p.add_argument("--beam-width", type=int, default=_DEF.beam_width)
    p.add_argument("--char-dim", type=int, default=_DEF.char_dim)
    p.add_argument("--feat-dim", type=int, default=_DEF.feat_dim)
    p.add_argument("--hidden-dim", type=int, default=_DEF.hidden_dim)
    p.add_argument("--patience", type=int, default=_DEF.patience)
    p.add_argument("--max-epochs", type=int, default=_DEF.max_epochs)
    p.add_argument("--max-actions", type=int, default=None)
    p.add_argument("--seed", type=int, default=_DEF.seed)
    p.add_argument("--mrt-lambda", type=float, default=_DEF.mrt_lambda)
    p.add_argument("--mrt-max-samples", type=int, default=_DEF.mrt_max_samples)
    p.add_argument("--mrt-alpha", type=float, default=_DEF.mrt_alpha)
    p.add_argument("--mrt-warm-start", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[fmt], help="decode a file")
    p.add_argument("--model", help="checkpoint path")
    p.add_argument("--ensemble", help="comma-separated checkpoint paths")
    p.add_argument("--input", required=True, metavar="PATH")
    p.add_argument("--output", required=True, metavar="PATH")
    p.add_argument(
        "--beam-width",
        type=int,
        default=None,
        help="override the checkpoint's beam width (1 = greedy)",
    )
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", parents=[fmt], help="score predictions")
    p.add_argument("--gold", required=True, metavar="PATH")
    p.add_argument("--predictions", required=True, metavar="PATH")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser(
        "oracle-check", parents=[fmt], help="print and verify expert derivations"
    )
    p.add_argument("--data", required=True, metavar="PATH")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--model", help="checkpoint to load at startup")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def cmd_train(args) -> int:
    train_samples = read_dataset(args.train_path, args.format)
    dev_samples = read_dataset(args.dev_path, args.format)
    cfg = TrainConfig(
        beta=args.beta,
        rollin_k=args.rollin_k,
        rollout_mix_p=args.rollout_mix,
        objective=args.objective,
        beam_width=args.beam_width,
        char_dim=args.char_dim,
        feat_dim=args.feat_dim,
        hidden_dim=args.hidden_dim,
        max_actions=args.max_actions,
        patience=args.patience,
        max_epochs=args.max_epochs,
        seed=args.seed,
        mrt_lambda=args.mrt_lambda,
        mrt_max_samples=args.mrt_max_samples,
        mrt_alpha=args.mrt_alpha,
        mrt_warm_start=args.mrt_warm_start,
    )
    result = train(train_samples, dev_samples, cfg)
    save_checkpoint(args.model, result.model, result.config)
    print(f"{result.best_acc:.4f}\t{result.best_dist:.4f}")
    return 0


def cmd_predict(args) -> int:
    if bool(args.model) == bool(args.ensemble):
        print("error: provide exactly one of --model and --ensemble", file=sys.stderr)
        return 2
    paths = args.ensemble.split(",") if args.ensemble else [args.model]
    bundles = [load_checkpoint(p.strip()) for p in paths]
    config = bundles[0].config
    models = [b.model for b in bundles]
    width = args.beam_width if args.beam_width is not None else config.beam_width
    samples = read_dataset(args.input, args.format)
    fv = models[0].features
    outputs = []
    for s in samples:
        mf = encode_features(s.feats, fv) if s.feats is not None else None
        cap = config.action_cap(s.x)
        if len(models) == 1:
            res = beam_decode(s.x, mf, models[0], width, cap=cap)
        else:
            res = ensemble_decode(s.x, mf, models, width, cap=cap)
        outputs.append(res.output)
    write_predictions(args.output, samples, outputs, args.format)
    return 0


def cmd_evaluate(args) -> int:
    gold = read_dataset(args.gold, args.format)
    pred_rows = read_dataset(args.predictions, args.format)
    predictions = []
    for row in pred_rows:
        if row.y is None:
            raise ParseError(f"{args.predictions}: row lacks a prediction column")
        predictions.append(row.y)
    acc, dist = evaluate(gold, predictions)
    print(f"{acc:.4f}\t{dist:.4f}")
    return 0


def cmd_oracle_check(args) -> int:
    samples = read_dataset(args.data, args.format)
    failures = 0
    for s in samples:
        if s.y is None:
            raise ParseError(f"{args.data}: oracle-check needs target strings")
        actions = derive_static_actions(s.x, s.y)
        print(f"{format_actions(actions)}\t{len(actions) - 1}")
        replay = run_actions(s.x, actions, cap=len(actions) + 1)
        if replay != s.y:
            failures += 1
            print(
                f"error: replay of {s.x!r} produced {replay!r}, expected {s.y!r}",
                file=sys.stderr,
            )
    return 1 if failures else 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    app = create_app(model_path=args.model)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (ParseError, CheckpointError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(run())
