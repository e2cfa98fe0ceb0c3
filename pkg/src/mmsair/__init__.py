"""MMSAIR: joint multimodal sentiment analysis and intent recognition for
sticker chat records, with a self-contained autodiff and training stack."""

from .config import AblationFlags, TrainConfig
from .dataset import ChatRecord, IntentLabel, SentimentLabel, StickerClass
from .tensor import Tensor

__all__ = [
    "AblationFlags",
    "ChatRecord",
    "IntentLabel",
    "SentimentLabel",
    "StickerClass",
    "Tensor",
    "TrainConfig",
]

__version__ = "0.1.0"
