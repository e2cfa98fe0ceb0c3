"""Adam optimizer with bias correction, operating on named parameter dicts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ContractError, OptimizerError


@dataclass
class OptimConfig:
    learning_rate: float = 1e-5
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def validate(self):
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ConfigError("betas must lie in [0, 1)")


@dataclass
class AdamState:
    m: dict = field(default_factory=dict)  # first moments, per parameter name
    v: dict = field(default_factory=dict)  # second moments
    t: int = 0


def init_adam_state(params):
    return AdamState(
        m={name: np.zeros_like(p.data) for name, p in params.items()},
        v={name: np.zeros_like(p.data) for name, p in params.items()},
        t=0,
    )


def adam_step(params, grads, state, config):
    """One bias-corrected Adam update, in place on the parameter tensors.

    ``grads`` maps parameter names to arrays; names absent from it are
    treated as zero gradient (the parameter stays put this step, modulo
    moment decay).
    """
    config.validate()
    bad = [name for name, g in grads.items() if g is not None and not np.all(np.isfinite(g))]
    if bad:
        raise OptimizerError(f"non-finite gradient, step aborted: {sorted(bad)}")
    state.t += 1
    bc1 = 1.0 - config.beta1 ** state.t
    bc2 = 1.0 - config.beta2 ** state.t
    for name, p in params.items():
        if name not in state.m:
            raise ContractError(f"optimizer state missing parameter {name!r}")
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(p.data)
        elif g.shape != p.data.shape:
            raise ContractError(
                f"gradient shape {g.shape} does not match parameter {name!r} shape {p.data.shape}"
            )
        state.m[name] = config.beta1 * state.m[name] + (1.0 - config.beta1) * g
        state.v[name] = config.beta2 * state.v[name] + (1.0 - config.beta2) * g * g
        m_hat = state.m[name] / bc1
        v_hat = state.v[name] / bc2
        p.data -= config.learning_rate * m_hat / (np.sqrt(v_hat) + config.epsilon)
    return state
