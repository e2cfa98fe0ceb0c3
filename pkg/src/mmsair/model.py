"""End-to-end model assembly: encoders -> fusion -> dual heads -> joint loss."""

from __future__ import annotations

import numpy as np

from . import encoders as enc
from . import fusion as fus
from . import prediction as pred
from .encoders import EmbeddingProviders
from .prediction import PredictionOutput
from .tensor import Tensor


class MMSAIRModel:
    """Holds all trainable parameters and runs batched forward passes.

    Ablated modalities are replaced by a frozen zero vector at the encoder
    output, so downstream shapes never change and no gradient can reach the
    dropped encoder's parameters.
    """

    def __init__(self, config, rng=None):
        config.validate()
        self.config = config
        rng = rng if rng is not None else np.random.default_rng(config.seed)
        ec = config.encoder
        self.params = {}
        if ec.context_provider == "toy":
            self.params.update(enc.init_text_encoder_params(rng, ec, "context"))
        if ec.sticker_text_provider == "toy":
            self.params.update(
                enc.init_text_encoder_params(rng, ec, "sticker_text", with_empty_vector=True)
            )
        self.params.update(enc.init_image_encoder_params(rng, ec))
        self.fusion_params = fus.init_fusion_params(
            rng, ec.d_model, config.num_heads, config.effective_d_comb
        )
        self.params.update(self.fusion_params.named())
        self.head_params = pred.init_head_params(rng, config.effective_d_comb)
        self.params.update(self.head_params.named())

    def parameters(self):
        return self.params

    def zero_grads(self):
        for p in self.params.values():
            p.zero_grad()

    def load_parameter_arrays(self, arrays):
        """Overwrite parameter data from a checkpoint dict (float32 -> float64)."""
        from .errors import CheckpointError

        missing = set(self.params) - set(arrays)
        extra = set(arrays) - set(self.params)
        if missing or extra:
            raise CheckpointError(
                f"checkpoint/config parameter mismatch; missing {sorted(missing)}, "
                f"unexpected {sorted(extra)}"
            )
        for name, p in self.params.items():
            arr = np.asarray(arrays[name], dtype=np.float64)
            if arr.shape != p.data.shape:
                raise CheckpointError(
                    f"checkpoint shape {arr.shape} for {name!r} does not match {p.data.shape}"
                )
            p.data = arr

    def parameter_arrays(self):
        return {name: p.data.copy() for name, p in self.params.items()}

    # -- forward --------------------------------------------------------------

    def embed_batch(self, records, providers=None):
        providers = providers or EmbeddingProviders()
        ec = self.config.encoder
        ab = self.config.ablation
        n = len(records)
        zero = lambda: Tensor(np.zeros((n, ec.d_model)))
        e_x = zero() if ab.drop_context else enc.encode_context_batch(
            records, ec, self.params, providers
        )
        e_s = zero() if ab.drop_sticker_text else enc.encode_sticker_text_batch_records(
            records, ec, self.params, providers
        )
        e_i = zero() if ab.drop_sticker_image else enc.encode_sticker_image_batch(
            records, ec, self.params, providers
        )
        return e_x, e_s, e_i

    def forward_batch(self, records, providers=None):
        """Embeddings -> fusion -> both probability heads, for a record batch."""
        e_x, e_s, e_i = self.embed_batch(records, providers)
        fusion_out = fus.fuse(e_x, e_s, e_i, self.fusion_params)
        p_sentiment, p_intent = pred.predict(fusion_out.e_combined, self.head_params)
        return fusion_out, p_sentiment, p_intent

    def loss_batch(self, records, providers=None, loss_weights=None):
        """Forward plus both cross-entropies and the weighted joint loss."""
        weights = loss_weights or self.config.effective_loss_weights()
        _, p_sentiment, p_intent = self.forward_batch(records, providers)
        y_s = [int(r.multimodal_sentiment) for r in records]
        y_i = [int(r.multimodal_intent) for r in records]
        l1 = pred.cross_entropy(p_sentiment, y_s)
        l2 = pred.cross_entropy(p_intent, y_i)
        loss = pred.joint_loss(l1, l2, weights)
        return PredictionOutput(p_sentiment=p_sentiment, p_intent=p_intent, l1=l1, l2=l2, l=loss)
