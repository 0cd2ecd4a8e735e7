"""Adam on flat parameter vectors (beta1 0.9, beta2 0.999, eps 1e-8) and step-size decay."""

from dataclasses import dataclass

import numpy as np

from large_deviation_prefactors.utils.errors import UsageError

BETA1 = 0.9
BETA2 = 0.999
EPS = 1e-8


@dataclass(frozen=True)
class AdamState:
    """Parameters, first and second moments, and the step count."""

    params: np.ndarray
    m: np.ndarray
    v: np.ndarray
    t: int = 0


def adam_init(params: np.ndarray) -> AdamState:
    flat = np.asarray(params, dtype=np.float64).copy()
    return AdamState(params=flat, m=np.zeros_like(flat), v=np.zeros_like(flat), t=0)


def adam_step(state: AdamState, gradient: np.ndarray, lr: float) -> AdamState:
    """One bias-corrected Adam update; returns a new state."""
    g = np.asarray(gradient, dtype=np.float64)
    if g.shape != state.params.shape:
        raise UsageError(f"gradient shape {g.shape} does not match parameters {state.params.shape}")
    t = state.t + 1
    m = BETA1 * state.m + (1.0 - BETA1) * g
    v = BETA2 * state.v + (1.0 - BETA2) * (g * g)
    m_hat = m / (1.0 - BETA1**t)
    v_hat = v / (1.0 - BETA2**t)
    params = state.params - lr * m_hat / (np.sqrt(v_hat) + EPS)
    return AdamState(params=params, m=m, v=v, t=t)


def decayed_learning_rate(lr: float, final_lr: float | None, step: int, total_steps: int) -> float:
    """
    Geometric decay lr * (final_lr / lr) ** (step / total_steps), step counted from 0.

    A None final_lr, or a run of at most one step, keeps lr.
    """
    if final_lr is None or total_steps <= 1:
        return lr
    fraction = min(max(step, 0), total_steps - 1) / (total_steps - 1)
    return lr * (final_lr / lr) ** fraction
