"""Representation fusion: cascaded multi-head attention and the differential vector.

The pooled context vector e_x and sticker-text vector e_s are treated as
1-token sequences wherever they act as attention queries or keys; the
image/sticker-text pair is stacked on a token axis to form a 2-token
sequence. The combined feature vector concatenates, on the feature axis,
the flattened 2-token pair (2d) with e_x, the differential vector, and the
two refinement outputs (d each), giving width 6d before the final affine map.

No dropout, layer normalization, or residual connections anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .errors import ConfigError, DimensionError
from .tensor import Tensor


@dataclass
class AttentionBlockParams:
    """Learned projections for one multi-head attention application."""

    w_q: Tensor
    b_q: Tensor
    w_k: Tensor
    b_k: Tensor
    w_v: Tensor
    b_v: Tensor
    w_o: Tensor
    b_o: Tensor

    def named(self, prefix):
        return {
            f"{prefix}.w_q": self.w_q, f"{prefix}.b_q": self.b_q,
            f"{prefix}.w_k": self.w_k, f"{prefix}.b_k": self.b_k,
            f"{prefix}.w_v": self.w_v, f"{prefix}.b_v": self.b_v,
            f"{prefix}.w_o": self.w_o, f"{prefix}.b_o": self.b_o,
        }


@dataclass
class FusionParams:
    attn_sticker: AttentionBlockParams   # context query over the image/text pair
    attn_s: AttentionBlockParams         # sticker-text self-key refinement
    attn_x: AttentionBlockParams         # context self-key refinement
    w_diff: Tensor
    b_diff: Tensor
    w_e: Tensor                          # [d_comb, 6*d_model]
    b_e: Tensor
    num_heads: int
    d_model: int
    d_comb: int

    def named(self):
        out = {}
        out.update(self.attn_sticker.named("fusion.attn_sticker"))
        out.update(self.attn_s.named("fusion.attn_s"))
        out.update(self.attn_x.named("fusion.attn_x"))
        out["fusion.w_diff"] = self.w_diff
        out["fusion.b_diff"] = self.b_diff
        out["fusion.w_e"] = self.w_e
        out["fusion.b_e"] = self.b_e
        return out


@dataclass
class FusionOutput:
    """All intermediate fusion results for a batch."""

    e_is: Tensor        # [B, 2, d]
    o_mha: Tensor       # [B, d]
    v_diff: Tensor      # [B, d]
    o_s: Tensor         # [B, d]
    o_x: Tensor         # [B, d]
    e_combined: Tensor  # [B, d_comb]


def _init_block(rng, d):
    scale = 1.0 / np.sqrt(d)

    def w():
        return Tensor(rng.normal(0.0, scale, (d, d)), requires_grad=True)

    def b():
        return Tensor(np.zeros(d), requires_grad=True)

    return AttentionBlockParams(w(), b(), w(), b(), w(), b(), w(), b())


def init_fusion_params(rng, d_model, num_heads, d_comb=None):
    if d_model % num_heads != 0:
        raise ConfigError(f"d_model={d_model} not divisible by num_heads={num_heads}")
    d_comb = d_comb or d_model
    return FusionParams(
        attn_sticker=_init_block(rng, d_model),
        attn_s=_init_block(rng, d_model),
        attn_x=_init_block(rng, d_model),
        w_diff=Tensor(rng.normal(0.0, 1.0 / np.sqrt(d_model), (d_model, d_model)), requires_grad=True),
        b_diff=Tensor(np.zeros(d_model), requires_grad=True),
        w_e=Tensor(rng.normal(0.0, 1.0 / np.sqrt(6 * d_model), (d_comb, 6 * d_model)), requires_grad=True),
        b_e=Tensor(np.zeros(d_comb), requires_grad=True),
        num_heads=num_heads,
        d_model=d_model,
        d_comb=d_comb,
    )


def concat_sticker(e_i, e_s):
    """Stack the image and sticker-text vectors into a 2-token sequence.

    Token 0 is the image, token 1 the sticker text; [B, d] inputs give [B, 2, d].
    """
    if e_i.shape != e_s.shape:
        raise DimensionError(f"width mismatch: image {e_i.shape} vs sticker-text {e_s.shape}")
    return T.stack([e_i, e_s], axis=-2)


def _split_heads(x, num_heads):
    b, t, d = x.shape
    x = T.reshape(x, (b, t, num_heads, d // num_heads))
    return T.transpose(x, (0, 2, 1, 3))  # [B, H, T, dh]


def _merge_heads(x):
    b, h, t, dh = x.shape
    x = T.transpose(x, (0, 2, 1, 3))
    return T.reshape(x, (b, t, h * dh))


def multi_head_attention(query, key, value, block, num_heads, return_weights=False):
    """Scaled dot-product attention with learned projections.

    query: [B, Tq, d]; key/value: [B, Tk, d]. Output has the query's length.
    """
    d = query.shape[-1]
    if key.shape[-2] != value.shape[-2]:
        raise DimensionError(f"key length {key.shape} != value length {value.shape}")
    if d % num_heads != 0:
        raise ConfigError(f"d_model={d} not divisible by num_heads={num_heads}")
    q = _split_heads(T.linear(query, block.w_q, block.b_q), num_heads)
    k = _split_heads(T.linear(key, block.w_k, block.b_k), num_heads)
    v = _split_heads(T.linear(value, block.w_v, block.b_v), num_heads)
    d_head = d // num_heads
    scores = T.matmul(q, T.transpose(k, (0, 1, 3, 2))) * (1.0 / np.sqrt(d_head))
    weights = T.softmax(scores, axis=-1)                    # [B, H, Tq, Tk]
    attended = _merge_heads(T.matmul(weights, v))
    out = T.linear(attended, block.w_o, block.b_o)
    if return_weights:
        return out, weights
    return out


def differential_vector(o_mha, e_x, w_diff, b_diff):
    """W_diff · (o_mha − e_x) + b_diff, capturing sticker/context contrast."""
    if o_mha.shape != e_x.shape:
        raise DimensionError(f"width mismatch: {o_mha.shape} vs {e_x.shape}")
    return T.linear(T.sub(o_mha, e_x), w_diff, b_diff)


def _as_one_token(x):
    b, d = x.shape
    return T.reshape(x, (b, 1, d))


def _from_one_token(x):
    b, t, d = x.shape
    return T.reshape(x, (b, d))


def fuse(e_x, e_s, e_i, params):
    """Full fusion cascade over a batch of pooled embedding triples [B, d]."""
    h = params.num_heads
    e_is = concat_sticker(e_i, e_s)                                        # [B, 2, d]
    o_mha = _from_one_token(
        multi_head_attention(_as_one_token(e_x), e_is, e_is, params.attn_sticker, h)
    )
    v_diff = differential_vector(o_mha, e_x, params.w_diff, params.b_diff)
    o_s = _from_one_token(
        multi_head_attention(
            _as_one_token(e_s), _as_one_token(e_s), _as_one_token(o_mha), params.attn_s, h
        )
    )
    o_x = _from_one_token(
        multi_head_attention(
            _as_one_token(e_x), _as_one_token(e_x), _as_one_token(o_mha), params.attn_x, h
        )
    )
    # feature-axis concat with the 2-token pair flattened: 2d + d + d + d + d = 6d
    features = T.concat([e_i, e_s, e_x, v_diff, o_s, o_x], axis=-1)
    e_combined = T.linear(features, params.w_e, params.b_e)
    return FusionOutput(e_is=e_is, o_mha=o_mha, v_diff=v_diff, o_s=o_s, o_x=o_x,
                        e_combined=e_combined)
