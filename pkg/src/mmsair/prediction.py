"""Dual classification heads and the weighted joint loss."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .errors import ContractError, DimensionError
from .tensor import Tensor

NUM_SENTIMENT_CLASSES = 3
NUM_INTENT_CLASSES = 20

LOG_CLAMP = 1e-12

# confident-wrong predictions hit the log clamp; counted, never NaN
_clamp_counter = {"count": 0}


def clamp_warning_count():
    return _clamp_counter["count"]


def reset_clamp_warning_count():
    _clamp_counter["count"] = 0


@dataclass
class HeadParams:
    w_s: Tensor  # [3, d_comb]
    b_s: Tensor
    w_i: Tensor  # [20, d_comb]
    b_i: Tensor

    def named(self):
        return {"head.w_s": self.w_s, "head.b_s": self.b_s,
                "head.w_i": self.w_i, "head.b_i": self.b_i}


@dataclass
class LossWeights:
    alpha: float = 1.0
    beta: float = 1.0

    def validate(self):
        if self.alpha < 0 or self.beta < 0:
            raise ContractError("loss weights must be nonnegative")
        if self.alpha == 0 and self.beta == 0:
            raise ContractError("loss weights must not both be zero")


@dataclass
class PredictionOutput:
    p_sentiment: Tensor  # [B, 3]
    p_intent: Tensor     # [B, 20]
    l1: Tensor           # scalar sentiment loss
    l2: Tensor           # scalar intent loss
    l: Tensor            # scalar weighted joint loss


def init_head_params(rng, d_comb):
    scale = 1.0 / np.sqrt(d_comb)
    return HeadParams(
        w_s=Tensor(rng.normal(0.0, scale, (NUM_SENTIMENT_CLASSES, d_comb)), requires_grad=True),
        b_s=Tensor(np.zeros(NUM_SENTIMENT_CLASSES), requires_grad=True),
        w_i=Tensor(rng.normal(0.0, scale, (NUM_INTENT_CLASSES, d_comb)), requires_grad=True),
        b_i=Tensor(np.zeros(NUM_INTENT_CLASSES), requires_grad=True),
    )


def predict(e_combined, heads):
    """Softmax class distributions for both heads from the combined vector."""
    if e_combined.shape[-1] != heads.w_s.shape[1]:
        raise DimensionError(
            f"combined width {e_combined.shape} does not match head width {heads.w_s.shape}"
        )
    p_sentiment = T.softmax(T.linear(e_combined, heads.w_s, heads.b_s), axis=-1)
    p_intent = T.softmax(T.linear(e_combined, heads.w_i, heads.b_i), axis=-1)
    return p_sentiment, p_intent


def cross_entropy(p, labels):
    """Mean negative log-probability of the gold class over the batch.

    Gold probabilities are clamped at 1e-12 (with a warning counter) so a
    confident wrong prediction never produces NaN.
    """
    labels = np.asarray(labels, dtype=np.intp)
    if p.ndim != 2 or labels.shape != (p.shape[0],):
        raise DimensionError(f"batch mismatch: probabilities {p.shape}, labels {labels.shape}")
    gold = T.pick(p, labels)
    n_clamped = int(np.count_nonzero(gold.data <= LOG_CLAMP))
    if n_clamped:
        _clamp_counter["count"] += n_clamped
    return -T.mean(T.log(T.clip_min(gold, LOG_CLAMP)))


def joint_loss(l1, l2, weights):
    """alpha * l1 + beta * l2."""
    weights.validate()
    return l1 * weights.alpha + l2 * weights.beta
