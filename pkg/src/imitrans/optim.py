"""Per-coordinate ADADELTA updates over a model's parameters."""

from __future__ import annotations

import logging

import torch

log = logging.getLogger(__name__)


class Adadelta:
    """The ratio-form adaptive update with decay rho and stabilizer eps.

    Keeps two accumulators per parameter: a decayed mean of squared
    gradients and a decayed mean of squared updates. A non-finite
    gradient anywhere skips the whole step (with a warning) so the
    accumulators never absorb inf or NaN.
    """

    def __init__(self, params, rho: float = 0.95, eps: float = 1e-6):
        self.params = list(params)
        self.rho = rho
        self.eps = eps
        self.acc_grad = [torch.zeros_like(p) for p in self.params]
        self.acc_delta = [torch.zeros_like(p) for p in self.params]

    def zero_grad(self) -> None:
        for p in self.params:
            if p.grad is not None:
                p.grad.detach_()
                p.grad.zero_()

    @torch.no_grad()
    def step(self) -> bool:
        """Apply one update; returns False when skipped on bad gradients."""
        grads = [p.grad for p in self.params]
        for g in grads:
            if g is not None and not torch.isfinite(g).all():
                log.warning("non-finite gradient, skipping update")
                return False
        rho, eps = self.rho, self.eps
        for p, g, ag, ad in zip(self.params, grads, self.acc_grad, self.acc_delta):
            if g is None:
                continue
            ag.mul_(rho).addcmul_(g, g, value=1 - rho)
            delta = -torch.sqrt(ad + eps) / torch.sqrt(ag + eps) * g
            p.add_(delta)
            ad.mul_(rho).addcmul_(delta, delta, value=1 - rho)
        return True
