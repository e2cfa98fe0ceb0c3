"""Exception hierarchy shared across the package."""


class MMSAIRError(Exception):
    """Base class for all package errors."""


class ContractError(MMSAIRError):
    """A documented precondition was violated by the caller."""


class DimensionError(ContractError):
    """Tensor shapes are incompatible for the requested operation."""


class NonFiniteError(MMSAIRError):
    """A NaN or Inf appeared where only finite values are allowed."""


class DatasetError(MMSAIRError):
    """Malformed dataset file or invalid record."""


class StoreFormatError(MMSAIRError):
    """Corrupt or truncated embedding-store file."""


class MissingEmbeddingError(MMSAIRError):
    """A record id has no vector in the relevant embedding store."""


class CheckpointError(MMSAIRError):
    """Checkpoint file is corrupt or incompatible with the config."""


class ConfigError(ContractError):
    """Invalid configuration value or combination."""


class OptimizerError(MMSAIRError):
    """Optimizer step aborted (e.g. non-finite gradient)."""
