"""Baseline excitation and test signal generators: APRBS, multisine, ramp."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signals import Signal

__all__ = [
    "AprbsConfig",
    "MultisineConfig",
    "generate_aprbs",
    "generate_multisine",
    "generate_ramp",
]


@dataclass(frozen=True)
class AprbsConfig:
    """Random amplitude levels held for random durations.

    Hold lengths are drawn uniformly from {h, ..., max_hold_factor * h}
    samples with h = ceil(min_hold_time / sampling_time).
    """

    length: int
    min_hold_time: float = 5.0
    amplitude_range: tuple[float, float] = (0.0, 1.0)
    sampling_time: float = 1.0
    seed: int | None = None
    max_hold_factor: int = 3

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("length must be at least 1")
        if not self.sampling_time > 0:
            raise ValueError("sampling_time must be positive")
        if self.min_hold_time < self.sampling_time:
            raise ValueError("min_hold_time must be at least one sampling interval")
        lo, hi = self.amplitude_range
        if not lo < hi:
            raise ValueError(f"empty amplitude range [{lo}, {hi}]")
        if self.max_hold_factor < 1:
            raise ValueError("max_hold_factor must be at least 1")


def generate_aprbs(cfg: AprbsConfig) -> Signal:
    """Piecewise-constant signal whose holds all last at least the minimum.

    A final remainder shorter than the minimum hold extends the previous
    hold instead of opening a new level, so truncation at the target
    length never produces a short run.
    """
    rng = np.random.default_rng(cfg.seed)
    h_min = math.ceil(cfg.min_hold_time / cfg.sampling_time)
    lo, hi = cfg.amplitude_range
    samples: list[float] = []
    while len(samples) < cfg.length:
        hold = int(rng.integers(h_min, cfg.max_hold_factor * h_min + 1))
        level = float(rng.uniform(lo, hi))
        remaining = cfg.length - len(samples)
        if hold > remaining:
            if remaining >= h_min or not samples:
                samples.extend([level] * remaining)
            else:
                samples.extend([samples[-1]] * remaining)
            break
        samples.extend([level] * hold)
    return Signal(np.array(samples), cfg.sampling_time)


@dataclass(frozen=True)
class MultisineConfig:
    """Sum of cosines on the DFT bins inside a frequency band."""

    length: int
    band: tuple[float, float] = (0.0, 0.5)
    amplitude_range: tuple[float, float] = (0.0, 1.0)
    sampling_time: float = 1.0
    seed: int | None = None

    def __post_init__(self):
        if self.length < 2:
            raise ValueError("length must be at least 2")
        if not self.sampling_time > 0:
            raise ValueError("sampling_time must be positive")
        f_lo, f_hi = self.band
        nyquist = 0.5 / self.sampling_time
        if not (0.0 <= f_lo <= f_hi <= nyquist):
            raise ValueError(f"band [{f_lo}, {f_hi}] must lie within [0, {nyquist}]")
        lo, hi = self.amplitude_range
        if not lo < hi:
            raise ValueError(f"empty amplitude range [{lo}, {hi}]")


def band_bins(cfg: MultisineConfig) -> np.ndarray:
    """Indices k >= 1 whose frequency k / (N * T0) falls inside the band."""
    n = cfg.length
    freqs = np.arange(1, n // 2 + 1) / (n * cfg.sampling_time)
    mask = (freqs >= cfg.band[0]) & (freqs <= cfg.band[1])
    return np.flatnonzero(mask) + 1


def generate_multisine(cfg: MultisineConfig) -> Signal:
    """Random-phase multisine rescaled to span the amplitude range exactly."""
    bins = band_bins(cfg)
    if bins.size == 0:
        raise ValueError(f"no DFT bins inside band {cfg.band} at length {cfg.length}")
    rng = np.random.default_rng(cfg.seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, bins.size)
    t = np.arange(cfg.length)
    raw = np.cos(2.0 * np.pi * np.outer(t, bins) / cfg.length + phases).sum(axis=1)
    span = raw.max() - raw.min()
    if span <= 0:
        raise ValueError("degenerate multisine realization with zero span")
    lo, hi = cfg.amplitude_range
    samples = lo + (raw - raw.min()) * (hi - lo) / span
    return Signal(samples, cfg.sampling_time)


def generate_ramp(amplitude_range, length: int, sampling_time: float = 1.0) -> Signal:
    """Linear sweep from the range minimum to the maximum."""
    if length < 2:
        raise ValueError("length must be at least 2")
    lo, hi = (float(v) for v in amplitude_range)
    return Signal(np.linspace(lo, hi, length), sampling_time)
