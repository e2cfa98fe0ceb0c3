"""Training configuration: one dataclass covering every tunable, plus a flat
key=value representation shared by config files and CLI flags."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .encoders import EncoderConfig
from .errors import ConfigError
from .optim import OptimConfig
from .prediction import LossWeights

TASK_MODES = ("joint", "sentiment_only", "intent_only")


@dataclass
class AblationFlags:
    drop_context: bool = False
    drop_sticker_image: bool = False
    drop_sticker_text: bool = False

    def validate(self):
        if self.drop_context and self.drop_sticker_image and self.drop_sticker_text:
            raise ConfigError("cannot drop all three modalities at once")

    def row_name(self):
        parts = []
        if self.drop_context:
            parts.append("C_F")
        if self.drop_sticker_image:
            parts.append("S_F")
        if self.drop_sticker_text:
            parts.append("ST_F")
        return "w/o " + "&".join(parts) if parts else "full"


@dataclass
class TrainConfig:
    epochs: int = 50
    train_batch: int = 16
    eval_batch: int = 2
    optimizer: OptimConfig = field(default_factory=OptimConfig)
    loss_weights: LossWeights = field(default_factory=LossWeights)
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    num_heads: int = 4
    d_comb: int | None = None  # defaults to d_model
    ablation: AblationFlags = field(default_factory=AblationFlags)
    task_mode: str = "joint"
    seed: int = 42
    train_fraction: float = 0.9

    @property
    def effective_d_comb(self):
        return self.d_comb if self.d_comb is not None else self.encoder.d_model

    def validate(self):
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.train_batch < 1 or self.eval_batch < 1:
            raise ConfigError("batch sizes must be >= 1")
        if self.task_mode not in TASK_MODES:
            raise ConfigError(f"task_mode must be one of {TASK_MODES}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must lie in (0, 1)")
        self.optimizer.validate()
        self.loss_weights.validate()
        self.encoder.validate(self.num_heads)
        self.ablation.validate()

    def effective_loss_weights(self):
        """Single-task modes zero the other head's loss weight."""
        if self.task_mode == "sentiment_only":
            return LossWeights(self.loss_weights.alpha, 0.0)
        if self.task_mode == "intent_only":
            return LossWeights(0.0, self.loss_weights.beta)
        return self.loss_weights

    # -- flat key=value form ---------------------------------------------------

    def to_flat(self):
        return {
            "epochs": self.epochs,
            "train_batch": self.train_batch,
            "eval_batch": self.eval_batch,
            "lr": self.optimizer.learning_rate,
            "beta1": self.optimizer.beta1,
            "beta2": self.optimizer.beta2,
            "epsilon": self.optimizer.epsilon,
            "alpha": self.loss_weights.alpha,
            "beta": self.loss_weights.beta,
            "d_model": self.encoder.d_model,
            "vocab_size": self.encoder.vocab_size,
            "image_input_dim": self.encoder.image_input_dim,
            "conv_kernel": self.encoder.conv_kernel,
            "thumbnail_size": self.encoder.thumbnail_size,
            "context_provider": self.encoder.context_provider,
            "sticker_text_provider": self.encoder.sticker_text_provider,
            "image_provider": self.encoder.image_provider,
            "num_heads": self.num_heads,
            "d_comb": self.d_comb,
            "drop_context": self.ablation.drop_context,
            "drop_sticker_image": self.ablation.drop_sticker_image,
            "drop_sticker_text": self.ablation.drop_sticker_text,
            "task_mode": self.task_mode,
            "seed": self.seed,
            "train_fraction": self.train_fraction,
        }

    @classmethod
    def from_flat(cls, flat):
        base = cls()
        defaults = base.to_flat()
        unknown = set(flat) - set(defaults)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        merged = {**defaults, **{k: v for k, v in flat.items() if v is not None}}
        return cls(
            epochs=int(merged["epochs"]),
            train_batch=int(merged["train_batch"]),
            eval_batch=int(merged["eval_batch"]),
            optimizer=OptimConfig(
                learning_rate=float(merged["lr"]),
                beta1=float(merged["beta1"]),
                beta2=float(merged["beta2"]),
                epsilon=float(merged["epsilon"]),
            ),
            loss_weights=LossWeights(float(merged["alpha"]), float(merged["beta"])),
            encoder=EncoderConfig(
                d_model=int(merged["d_model"]),
                vocab_size=int(merged["vocab_size"]),
                image_input_dim=int(merged["image_input_dim"]),
                conv_kernel=int(merged["conv_kernel"]),
                thumbnail_size=int(merged["thumbnail_size"]),
                context_provider=str(merged["context_provider"]),
                sticker_text_provider=str(merged["sticker_text_provider"]),
                image_provider=str(merged["image_provider"]),
            ),
            num_heads=int(merged["num_heads"]),
            d_comb=None if merged["d_comb"] in (None, "none") else int(merged["d_comb"]),
            ablation=AblationFlags(
                drop_context=_as_bool(merged["drop_context"]),
                drop_sticker_image=_as_bool(merged["drop_sticker_image"]),
                drop_sticker_text=_as_bool(merged["drop_sticker_text"]),
            ),
            task_mode=str(merged["task_mode"]),
            seed=int(merged["seed"]),
            train_fraction=float(merged["train_fraction"]),
        )


def _as_bool(v):
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("true", "1", "yes", "on"):
        return True
    if s in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"cannot interpret {v!r} as a boolean")


def read_config_file(path):
    """Parse a ``key = value`` configuration file into a flat dict."""
    flat = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        flat[key.strip()] = value.strip()
    return flat
