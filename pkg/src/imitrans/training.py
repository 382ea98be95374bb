"""Training regimes and the epoch loop.

Three objectives share one loop: teacher-forced likelihood along a
static expert derivation, imitation learning from roll-in configurations
with regret-derived action losses, and minimum-risk training over
sampled sequences. Early stopping tracks dev exact match, ties broken by
mean edit distance.
"""

from __future__ import annotations

import copy
import math
import sys
from dataclasses import dataclass, field

import numpy as np
import torch

from .config import TrainConfig
from .decoding import greedy_decode
from .expert import (
    ExpertState,
    advance_pointer,
    derive_static_actions,
    levenshtein,
    sequence_loss,
    start_expert,
)
from .model import DecoderStep, Transducer
from .optim import Adadelta
from .transition import Action, EditState, apply_action, initial_state
from .vocab import ActionVocab, MorphFeatures, Sample, build_vocabs, encode_features


def expert_prob(epoch: int, k: float) -> float:
    """Inverse-sigmoid decay of the expert roll-in probability."""
    return k / (k + math.exp(epoch / k))


# ---------------------------------------------------------------- regrets


def _emission(a: Action, state: EditState) -> str | None:
    if a.kind == "copy":
        return state.x[state.i - 1]
    if a.kind == "insert":
        return a.char
    return None


def increases_distance(a: Action, state: EditState, es: ExpertState) -> bool:
    """Whether the action commits an error no continuation can repair.

    Any emission other than the next unmatched target character (or any
    emission once the target is fully matched) adds one to the reachable
    final distance; END before the target is matched leaves it short;
    DELETE never hurts the reachable distance.
    """
    y = es.y_star
    if a.kind == "end":
        return es.j < len(y)
    em = _emission(a, state)
    if em is None:
        return False
    return es.j >= len(y) or em != y[es.j]


def _closed_form_loss(a: Action, state: EditState, es: ExpertState) -> int:
    """Edits so far, plus this action, plus the cheapest completion."""
    t, i, j = es.table, state.i, es.j
    if a.kind == "end":
        return state.cost
    if a.kind == "copy":
        after = t.cost(i + 1, j + 1)
    elif a.kind == "delete":
        after = t.cost(i + 1, j)
    else:
        after = t.cost(i, j + 1)
    return state.cost + 1 + after


def _model_rollout_loss(a, state, es, sess, dstep, av, cap, beta) -> int:
    """Apply a, continue greedily with the model, score the whole sequence."""
    with torch.no_grad():
        st = apply_action(state, a, cap=cap)
        d = dstep
        aid = av.id_of(a)
        while not st.terminal:
            d = sess.advance(d, aid, st.i)
            at_cap = len(st.history) >= cap
            probs = sess.distribution(d, st.at_sentinel, at_cap)
            ids = av.valid_ids(st.at_sentinel, at_cap)
            aid = max(ids, key=lambda q: float(probs[q]))
            st = apply_action(st, av.actions[aid], cap=cap)
    return sequence_loss(st.history, st.x, es.y_star, beta)


def action_regrets(
    state: EditState,
    es: ExpertState,
    sess,
    dstep: DecoderStep,
    av: ActionVocab,
    cfg: TrainConfig,
    rng: np.random.Generator,
    cap: int,
    mode: str | None = None,
) -> dict[int, float]:
    """Regret per valid action id; zero exactly on the optimal set.

    Distance-increasing actions get regret beta with no roll-out. The
    rest are scored by loss-to-go: in EXPERT mode the closed form from
    the completion table; in MIXED mode one coin per action picks the
    closed form (probability rollout_mix_p) or a greedy model roll-out
    scored by the sequence loss. Regrets subtract the best computed loss,
    and in forced-drain corners where every action is distance-increasing
    the common beta is subtracted so the optimal set stays non-empty.
    """
    if mode is None:
        mode = "EXPERT" if cfg.rollout_mix_p >= 1.0 else "MIXED"
    at_cap = len(state.history) >= cap
    beta = float(cfg.beta)
    losses: dict[int, float] = {}
    increasing: list[int] = []
    for aid in av.valid_ids(state.at_sentinel, at_cap):
        a = av.actions[aid]
        if increases_distance(a, state, es):
            increasing.append(aid)
        elif mode == "EXPERT" or rng.random() < cfg.rollout_mix_p:
            losses[aid] = float(_closed_form_loss(a, state, es))
        else:
            losses[aid] = float(
                _model_rollout_loss(a, state, es, sess, dstep, av, cap, cfg.beta)
            )
    if losses:
        floor = min(losses.values())
        regrets = {aid: l - floor for aid, l in losses.items()}
        for aid in increasing:
            regrets[aid] = beta
    else:
        # forced drain: only distance-increasing actions remain
        regrets = {aid: 0.0 for aid in increasing}
    return regrets


def regret_for_action(state, es, a, sess, dstep, av, cfg, rng, cap, mode=None) -> float:
    """Regret of one action (computes the whole configuration's vector)."""
    return action_regrets(state, es, sess, dstep, av, cfg, rng, cap, mode)[av.id_of(a)]


# ---------------------------------------------------------------- losses


def nll_marginal_loss(probs: torch.Tensor, optimal_ids) -> torch.Tensor:
    """Negative log of the total probability on the optimal action set."""
    if len(optimal_ids) == 0:
        raise ValueError("optimal action set must be non-empty")
    return -torch.log(probs[list(optimal_ids)].sum())


def softmax_margin_loss(logits: torch.Tensor, regrets: torch.Tensor, optimal_ids) -> torch.Tensor:
    """Cost-augmented negative marginal log-likelihood.

    `logits` must already carry the validity mask (invalid = -inf);
    `regrets` is a dense vector, zero outside the valid actions. Each
    regret raises its action's share of the normalizer, demanding a
    margin proportional to how bad the action is.
    """
    if len(optimal_ids) == 0:
        raise ValueError("optimal action set must be non-empty")
    denom = torch.logsumexp(logits + regrets, dim=0)
    num = torch.logsumexp(logits[list(optimal_ids)], dim=0)
    return denom - num


# ---------------------------------------------------------------- steps


@dataclass
class RollInStep:
    """One roll-in configuration with everything its loss term needs."""

    state: EditState
    es: ExpertState
    dstep: DecoderStep
    at_cap: bool
    regrets: dict[int, float]
    optimal: list[int]
    action_id: int


def roll_in(
    sample: Sample,
    mfeats: MorphFeatures | None,
    model: Transducer,
    cfg: TrainConfig,
    epoch: int,
    rng: np.random.Generator,
) -> list[RollInStep]:
    """Generate training configurations by mixing expert and model moves.

    At every step the regret vector and optimal set are recorded, then
    the next action is drawn uniformly from the optimal set with the
    schedule's probability, otherwise sampled from the model's masked
    distribution. The trajectory runs until END (the cap forces drain).
    """
    av = model.actions
    cap = cfg.action_cap(sample.x)
    p_e = expert_prob(epoch, cfg.rollin_k)
    sess = model.session(sample.x, mfeats)
    state = initial_state(sample.x)
    es = start_expert(sample.x, sample.y)
    dstep = sess.start()
    steps: list[RollInStep] = []
    while True:
        at_cap = len(state.history) >= cap
        regrets = action_regrets(state, es, sess, dstep, av, cfg, rng, cap)
        optimal = sorted(aid for aid, r in regrets.items() if r == 0.0)
        if rng.random() < p_e:
            aid = int(optimal[rng.integers(len(optimal))])
        else:
            probs = sess.distribution(dstep, state.at_sentinel, at_cap).detach().numpy()
            ids = av.valid_ids(state.at_sentinel, at_cap)
            p = probs[ids]
            p = p / p.sum()
            aid = int(ids[rng.choice(len(ids), p=p)])
        steps.append(RollInStep(state, es, dstep, at_cap, regrets, optimal, aid))
        a = av.actions[aid]
        state = apply_action(state, a, cap=cap)
        if state.terminal:
            return steps
        if a.kind in ("copy", "insert"):
            es = advance_pointer(es, state.out[-1])
        dstep = sess.advance(dstep, aid, state.i)


def il_train_step(sample, mfeats, model, opt, cfg, epoch, rng) -> float:
    """One imitation-learning update on a single sample."""
    steps = roll_in(sample, mfeats, model, cfg, epoch, rng)
    terms = []
    for st in steps:
        mask = model.mask(st.state.at_sentinel, st.at_cap)
        if cfg.objective == "il-softmax-margin":
            logits = model.logits(st.dstep) + mask
            rvec = torch.zeros(model.n_actions, dtype=torch.float64)
            for aid, r in st.regrets.items():
                rvec[aid] = r
            terms.append(softmax_margin_loss(logits, rvec, st.optimal))
        else:
            probs, _ = model.action_distribution(st.dstep, mask)
            terms.append(nll_marginal_loss(probs, st.optimal))
    loss = torch.stack(terms).sum()
    opt.zero_grad()
    loss.backward()
    opt.step()
    return float(loss.detach())


def mle_train_step(sample, mfeats, model, opt, cfg, static_actions=None) -> float:
    """One teacher-forced update along the static expert derivation."""
    if static_actions is None:
        static_actions = derive_static_actions(sample.x, sample.y)
    av = model.actions
    cap = max(cfg.action_cap(sample.x), len(static_actions))
    sess = model.session(sample.x, mfeats)
    state = initial_state(sample.x)
    dstep = sess.start()
    terms = []
    for a in static_actions:
        at_cap = len(state.history) >= cap
        logp = torch.log_softmax(
            model.logits(dstep) + model.mask(state.at_sentinel, at_cap), dim=0
        )
        aid = av.id_of(a)
        terms.append(-logp[aid])
        state = apply_action(state, a, cap=cap)
        if state.terminal:
            break
        dstep = sess.advance(dstep, aid, state.i)
    loss = torch.stack(terms).sum()
    opt.zero_grad()
    loss.backward()
    opt.step()
    return float(loss.detach())


def mrt_train_step(sample, mfeats, model, opt, cfg, rng) -> float:
    """One minimum-risk update over sampled unique action sequences.

    Sequences are drawn ancestrally from the masked distribution without
    gradients, deduplicated, then rescored with gradients. Risk mixes
    length-normalized distance with the min-max scaled edit cost of the
    batch (zero when all costs agree); sequence weights are the
    renormalized model probabilities raised to mrt_alpha.
    """
    av = model.actions
    cap = cfg.action_cap(sample.x)
    sess = model.session(sample.x, mfeats)
    sampled: dict[tuple[int, ...], str] = {}
    with torch.no_grad():
        for _ in range(cfg.mrt_max_samples):
            state = initial_state(sample.x)
            dstep = sess.start()
            acts: list[int] = []
            while not state.terminal:
                at_cap = len(state.history) >= cap
                probs = sess.distribution(dstep, state.at_sentinel, at_cap).numpy()
                ids = av.valid_ids(state.at_sentinel, at_cap)
                p = probs[ids]
                p = p / p.sum()
                aid = int(ids[rng.choice(len(ids), p=p)])
                acts.append(aid)
                state = apply_action(state, av.actions[aid], cap=cap)
                if not state.terminal:
                    dstep = sess.advance(dstep, aid, state.i)
            sampled[tuple(acts)] = state.out

    logps = []
    risks = []
    costs = [len(acts) - 1 for acts in sampled]  # every action but END edits
    cmin, cmax = min(costs), max(costs)
    for (acts, out), cost in zip(sampled.items(), costs):
        state = initial_state(sample.x)
        dstep = sess.start()
        lp = torch.zeros((), dtype=torch.float64)
        for aid in acts:
            at_cap = len(state.history) >= cap
            logp = torch.log_softmax(
                model.logits(dstep) + model.mask(state.at_sentinel, at_cap), dim=0
            )
            lp = lp + logp[aid]
            state = apply_action(state, av.actions[aid], cap=cap)
            if not state.terminal:
                dstep = sess.advance(dstep, aid, state.i)
        logps.append(lp)
        lev_norm = levenshtein(out, sample.y) / max(len(out), len(sample.y))
        cost_scaled = 0.0 if cmax == cmin else (cost - cmin) / (cmax - cmin)
        risks.append(cfg.mrt_lambda * lev_norm + (1 - cfg.mrt_lambda) * cost_scaled)

    weights = torch.softmax(cfg.mrt_alpha * torch.stack(logps), dim=0)
    loss = (weights * torch.tensor(risks, dtype=torch.float64)).sum()
    opt.zero_grad()
    loss.backward()
    opt.step()
    return float(loss.detach())


# ------------------------------------------------------------ epoch loop


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    dev_acc: float
    dev_dist: float
    p_e: float


@dataclass
class TrainResult:
    model: Transducer
    config: TrainConfig
    best_acc: float
    best_dist: float
    best_epoch: int
    epoch0_acc: float
    epoch0_dist: float
    history: list[EpochStats] = field(default_factory=list)


def evaluate_model(model, samples, mfeats_list, cfg) -> tuple[float, float]:
    """Greedy-decode exact match and mean edit distance over samples."""
    if not samples:
        raise ValueError("cannot evaluate on an empty sample list")
    hits = 0
    dist = 0
    with torch.no_grad():
        for s, mf in zip(samples, mfeats_list):
            out = greedy_decode(s.x, mf, model, cap=cfg.action_cap(s.x)).output
            hits += out == s.y
            dist += levenshtein(out, s.y)
    return hits / len(samples), dist / len(samples)


def train(
    train_samples: list[Sample],
    dev_samples: list[Sample],
    cfg: TrainConfig,
    log_stream=None,
) -> TrainResult:
    """Full training run; returns the best-on-dev model.

    Epochs shuffle the data and update per sample (batch size one). One
    tab-separated line per epoch goes to log_stream (default standard
    error): epoch, mean train loss, dev exact match, dev mean distance,
    expert roll-in probability. The dev set is scored before the first
    epoch as well (stored on the result, not logged). With the MRT
    objective and mrt_warm_start, a likelihood phase runs to its own
    early stop before risk training begins.
    """
    if not train_samples or not dev_samples:
        raise ValueError("training needs non-empty train and dev sets")
    if log_stream is None:
        log_stream = sys.stderr
    torch.manual_seed(cfg.seed)
    torch.set_num_threads(1)
    rng = np.random.default_rng(cfg.seed)

    alphabet, av, fv = build_vocabs(train_samples)
    model = Transducer(alphabet, av, fv, cfg.char_dim, cfg.feat_dim, cfg.hidden_dim)
    opt = Adadelta(model.parameters())

    def feats_of(samples):
        return [
            encode_features(s.feats, fv) if s.feats is not None else None
            for s in samples
        ]

    train_feats = feats_of(train_samples)
    dev_feats = feats_of(dev_samples)
    static_cache: dict[int, list[Action]] = {}

    epoch0_acc, epoch0_dist = evaluate_model(model, dev_samples, dev_feats, cfg)

    phases = ["mle", cfg.objective] if (
        cfg.objective == "mrt" and cfg.mrt_warm_start
    ) else [cfg.objective]

    best_acc, best_dist, best_epoch = -1.0, math.inf, 0
    best_state = None
    history: list[EpochStats] = []
    epoch = 0
    for objective in phases:
        bad = 0
        for _ in range(cfg.max_epochs):
            epoch += 1
            p_e = expert_prob(epoch - 1, cfg.rollin_k)
            order = rng.permutation(len(train_samples))
            total = 0.0
            for idx in order:
                s, mf = train_samples[idx], train_feats[idx]
                if objective == "mle":
                    if idx not in static_cache:
                        static_cache[idx] = derive_static_actions(s.x, s.y)
                    total += mle_train_step(s, mf, model, opt, cfg, static_cache[idx])
                elif objective == "mrt":
                    total += mrt_train_step(s, mf, model, opt, cfg, rng)
                else:
                    total += il_train_step(s, mf, model, opt, cfg, epoch - 1, rng)
            acc, dist = evaluate_model(model, dev_samples, dev_feats, cfg)
            stats = EpochStats(epoch, total / len(train_samples), acc, dist, p_e)
            history.append(stats)
            print(
                f"{stats.epoch}\t{stats.train_loss:.4f}\t{stats.dev_acc:.4f}"
                f"\t{stats.dev_dist:.4f}\t{stats.p_e:.4f}",
                file=log_stream,
                flush=True,
            )
            if acc > best_acc or (acc == best_acc and dist < best_dist):
                best_acc, best_dist, best_epoch = acc, dist, epoch
                best_state = copy.deepcopy(model.state_dict())
                bad = 0
            else:
                bad += 1
                if bad >= cfg.patience:
                    break

    if best_state is not None:
        model.load_state_dict(best_state)
    return TrainResult(
        model=model,
        config=cfg,
        best_acc=best_acc,
        best_dist=best_dist,
        best_epoch=best_epoch,
        epoch0_acc=epoch0_acc,
        epoch0_dist=epoch0_dist,
        history=history,
    )
