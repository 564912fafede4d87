"""Non-stationary demand transforms.

Levels run 0..6 with 0 a byte-for-byte identity. The gap transform shifts
each SKU's mean by a seeded constant offset (variance untouched unless the
floor at zero clips); the noise transform perturbs each step multiplicatively
around an unchanged mean. Magnitude constants are configurable knobs.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .types import ConfigError

GAP_STEP = 0.1    # relative mean shift per gap level
NOISE_STEP = 0.05  # relative noise std per noise level


def _check_level(level: int) -> None:
    if not 0 <= level <= 6:
        raise ConfigError(f"transform level must be in 0..6, got {level}")


def apply_gap(demand: np.ndarray, level: int, seed: int,
              gap_step: float = GAP_STEP) -> np.ndarray:
    """Shift each SKU by a constant offset drawn from
    U(-1, 1) * gap_step * level * mean, rounded; floored at zero."""
    _check_level(level)
    if level == 0:
        return demand.copy()
    rng = np.random.default_rng(seed)
    u = rng.uniform(-1.0, 1.0, size=demand.shape[1])
    mean = demand.mean(axis=0)
    delta = np.round(u * gap_step * level * mean).astype(np.int64)
    return np.maximum(demand + delta[None, :], 0)


def apply_noise(demand: np.ndarray, level: int, seed: int,
                noise_step: float = NOISE_STEP) -> np.ndarray:
    """Per-step multiplicative jitter: round(d * (1 + eps)),
    eps ~ N(0, noise_step * level), floored at zero."""
    _check_level(level)
    if level == 0:
        return demand.copy()
    rng = np.random.default_rng(seed)
    eps = rng.normal(0.0, noise_step * level, size=demand.shape)
    noisy = np.round(demand * (1.0 + eps)).astype(np.int64)
    return np.maximum(noisy, 0)


def apply_lead_jitter(lead: np.ndarray, seed: int) -> np.ndarray:
    """Per-(step, SKU) lead times: base value plus a seeded draw from
    {-1, 0, +1}, never below one step."""
    rng = np.random.default_rng(seed)
    jitter = rng.integers(-1, 2, size=lead.shape)
    return np.maximum(lead + jitter, 1)


def apply_demand_ramp(demand: np.ndarray, direction: str) -> np.ndarray:
    """Deterministic linear drift across the given range: demand scales from
    1x at the first step to 1.5x (increase) or 0.5x (decrease) at the last.
    Exact rational arithmetic keeps the result platform-independent."""
    if direction not in ("increase", "decrease"):
        raise ConfigError(f"unknown ramp direction {direction!r}")
    steps = demand.shape[0]
    if steps <= 1:
        return demand.copy()
    sign = 1 if direction == "increase" else -1
    out = np.empty_like(demand)
    for t in range(steps):
        factor = Fraction(1) + Fraction(sign, 2) * Fraction(t, steps - 1)
        num, den = factor.numerator, factor.denominator
        scaled = demand[t].astype(object) * num
        out[t] = np.maximum((scaled + den // 2) // den, 0).astype(np.int64)
    return out
