"""Training loop, evaluation, ablation grid, and the joint-vs-single-task grid."""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import metrics as M
from .encoders import EmbeddingProviders
from .errors import MissingEmbeddingError
from .model import MMSAIRModel
from .optim import adam_step, init_adam_state
from .prediction import NUM_INTENT_CLASSES, NUM_SENTIMENT_CLASSES
from .tensor import finite_difference_check

ABLATION_ROWS = [
    ("full", dict()),
    ("w/o C_F", dict(drop_context=True)),
    ("w/o S_F", dict(drop_sticker_image=True)),
    ("w/o ST_F", dict(drop_sticker_text=True)),
    ("w/o S_F&ST_F", dict(drop_sticker_image=True, drop_sticker_text=True)),
    ("w/o C_F&ST_F", dict(drop_context=True, drop_sticker_text=True)),
]

TASK_GRID_ROWS = [("SA", "sentiment_only"), ("IR", "intent_only"), ("MSAIRS", "joint")]


@dataclass
class TrainResult:
    model: MMSAIRModel
    final_params: dict            # name -> np.ndarray, last epoch
    best_params: dict             # name -> np.ndarray, lowest-loss epoch
    best_epoch: int
    epoch_logs: list              # one dict per epoch
    grad_max_abs: dict = field(default_factory=dict)  # per-parameter max |grad| over all steps


def _check_providers_resolvable(records, cfg, providers):
    """Fail fast before epoch 0 if any record cannot be embedded."""
    missing = []
    for r in records:
        try:
            if not cfg.ablation.drop_sticker_image:
                providers.raw_image_sequence(r, cfg.encoder)
            if cfg.encoder.context_provider == "precomputed" and not cfg.ablation.drop_context:
                providers.context_store.lookup(r.id)
            if (
                cfg.encoder.sticker_text_provider == "precomputed"
                and not cfg.ablation.drop_sticker_text
            ):
                providers.sticker_text_store.lookup(r.id)
        except (MissingEmbeddingError, AttributeError):
            missing.append(r.id)
    if missing:
        raise MissingEmbeddingError(f"unresolvable embeddings for record ids: {missing}")


def _batches(indices, batch_size):
    for start in range(0, len(indices), batch_size):
        yield indices[start : start + batch_size]


def train(config, train_set, providers=None, log_fh=None):
    """Train a fresh model; returns final and best-epoch parameter snapshots.

    Epoch shuffling is seeded by (seed, epoch) so runs are reproducible while
    epochs still differ. Per-epoch logs are appended to ``log_fh`` as JSON
    lines when given.
    """
    config.validate()
    providers = providers or EmbeddingProviders()
    if not train_set:
        raise MissingEmbeddingError("empty training set")
    _check_providers_resolvable(train_set, config, providers)

    model = MMSAIRModel(config, np.random.default_rng(config.seed))
    params = model.parameters()
    state = init_adam_state(params)
    weights = config.effective_loss_weights()

    logs = []
    grad_max_abs = {name: 0.0 for name in params}
    best_loss, best_epoch, best_params = np.inf, -1, None
    n = len(train_set)
    for epoch in range(config.epochs):
        order = np.random.default_rng([config.seed, epoch]).permutation(n)
        loss_sum = l1_sum = l2_sum = 0.0
        preds_s, preds_i, golds_s, golds_i = [], [], [], []
        for batch_idx in _batches(order, config.train_batch):
            batch = [train_set[i] for i in batch_idx]
            model.zero_grads()
            out = model.loss_batch(batch, providers, weights)
            out.l.backward()
            grads = {
                name: (p.grad if p.grad is not None else None) for name, p in params.items()
            }
            for name, g in grads.items():
                if g is not None:
                    gm = float(np.max(np.abs(g)))
                    if gm > grad_max_abs[name]:
                        grad_max_abs[name] = gm
            adam_step(params, grads, state, config.optimizer)
            b = len(batch)
            loss_sum += out.l.item() * b
            l1_sum += out.l1.item() * b
            l2_sum += out.l2.item() * b
            preds_s.extend(np.argmax(out.p_sentiment.data, axis=1).tolist())
            preds_i.extend(np.argmax(out.p_intent.data, axis=1).tolist())
            golds_s.extend(int(r.multimodal_sentiment) for r in batch)
            golds_i.extend(int(r.multimodal_intent) for r in batch)
        log = {
            "epoch": epoch,
            "loss": loss_sum / n,
            "l1": l1_sum / n,
            "l2": l2_sum / n,
            "train_acc_sentiment": M.accuracy(preds_s, golds_s),
            "train_acc_intent": M.accuracy(preds_i, golds_i),
        }
        logs.append(log)
        if log_fh is not None:
            log_fh.write(json.dumps(log, sort_keys=True) + "\n")
        if log["loss"] < best_loss:
            best_loss = log["loss"]
            best_epoch = epoch
            best_params = model.parameter_arrays()
    return TrainResult(
        model=model,
        final_params=model.parameter_arrays(),
        best_params=best_params,
        best_epoch=best_epoch,
        epoch_logs=logs,
        grad_max_abs=grad_max_abs,
    )


def predict_labels(model, dataset, providers=None, batch_size=2):
    """Argmax predictions for both heads over a dataset."""
    providers = providers or EmbeddingProviders()
    preds_s, preds_i = [], []
    for start in range(0, len(dataset), batch_size):
        batch = dataset[start : start + batch_size]
        _, p_s, p_i = model.forward_batch(batch, providers)
        preds_s.extend(np.argmax(p_s.data, axis=1).tolist())
        preds_i.extend(np.argmax(p_i.data, axis=1).tolist())
    return preds_s, preds_i


def evaluate(model, dataset, providers=None, label=""):
    """Accuracy, weighted F1 and per-class metrics for both heads."""
    start = time.perf_counter()
    preds_s, preds_i = predict_labels(
        model, dataset, providers, batch_size=model.config.eval_batch
    )
    golds_s = [int(r.multimodal_sentiment) for r in dataset]
    golds_i = [int(r.multimodal_intent) for r in dataset]
    return M.MetricsReport(
        sentiment=M.task_metrics(preds_s, golds_s, NUM_SENTIMENT_CLASSES),
        intent=M.task_metrics(preds_i, golds_i, NUM_INTENT_CLASSES),
        n_samples=len(dataset),
        config=model.config.to_flat(),
        runtime_seconds=time.perf_counter() - start,
        label=label,
    )


def evaluate_checkpoint(checkpoint_path, dataset, providers=None, label=""):
    from .checkpoint import load_checkpoint
    from .config import TrainConfig

    arrays, config_echo = load_checkpoint(checkpoint_path)
    config = TrainConfig.from_flat(config_echo)
    model = MMSAIRModel(config, np.random.default_rng(config.seed))
    model.load_parameter_arrays(arrays)
    return evaluate(model, dataset, providers, label=label)


def run_ablation(base_config, train_set, test_set, providers=None):
    """Train and evaluate the six modality-ablation rows with identical seeds."""
    base_config.validate()
    results = []
    for row_name, flags in ABLATION_ROWS:
        config = dataclasses.replace(
            base_config, ablation=dataclasses.replace(base_config.ablation, **flags)
        )
        config.ablation.validate()
        result = train(config, train_set, providers)
        report = evaluate(result.model, test_set, providers, label=row_name)
        results.append((row_name, report, result))
    return results


def run_task_grid(base_config, train_set, test_set, providers=None):
    """Joint vs single-task rows; single-task rows omit the other task's metrics."""
    base_config.validate()
    results = []
    for row_name, mode in TASK_GRID_ROWS:
        config = dataclasses.replace(base_config, task_mode=mode)
        result = train(config, train_set, providers)
        report = evaluate(result.model, test_set, providers, label=row_name)
        if mode == "sentiment_only":
            report.intent = None
        elif mode == "intent_only":
            report.sentiment = None
        results.append((row_name, report, result))
    return results


def gradcheck_pipeline(config, records, providers=None, eps=1e-5):
    """Finite-difference check of the full forward + joint loss over every parameter."""
    providers = providers or EmbeddingProviders()
    model = MMSAIRModel(config, np.random.default_rng(config.seed))
    weights = config.effective_loss_weights()

    def loss_fn():
        return model.loss_batch(records, providers, weights).l

    return finite_difference_check(loss_fn, model.parameters(), eps=eps)
