"""Offline embedding exporter for the chat-sticker engine.

Reads a dataset JSONL file, runs deterministic text and image encoders over
context, sticker text, and sticker images, and writes one binary embedding
store per modality plus a JSON manifest describing the export.
"""

from .export import ExportManifest, export_embeddings

__all__ = ["ExportManifest", "export_embeddings"]
__version__ = "0.1.0"
