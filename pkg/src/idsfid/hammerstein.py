"""Artificial benchmark process: static saturation into a first-order lag.

The steady-state map of the process equals its static nonlinearity, which
is normalized so f(0) = 0 and f(1) = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signals import Signal

__all__ = ["HammersteinProcess", "static_nonlinearity"]

_ATAN4 = math.atan(4.0)


def static_nonlinearity(x):
    """Normalized arctangent saturation mapping [0, 1] onto [0, 1]."""
    return (np.arctan(8.0 * np.asarray(x, dtype=float) - 4.0) + _ATAN4) / (2.0 * _ATAN4)


@dataclass(frozen=True)
class HammersteinProcess:
    pole: float = 0.8
    input_gain: float = 0.2
    noise_sigma: float = 0.0

    def __post_init__(self):
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")

    def steady_output(self, u_value: float) -> float:
        """Fixed point of the recursion under a constant input."""
        return float(self.input_gain * static_nonlinearity(u_value) / (1.0 - self.pole))

    def simulate(self, u: Signal, y0: float | None = None, seed=None) -> Signal:
        """Output after each input sample, starting from y0.

        y0 defaults to the steady state for the first input value. With a
        positive noise level, seeded Gaussian measurement noise is added
        to the returned samples while the recursion itself stays clean.
        """
        if y0 is None:
            y0 = self.steady_output(u.samples[0]) if len(u) else 0.0
        f_u = static_nonlinearity(u.samples)
        outputs = np.empty(len(u))
        y = float(y0)
        for k in range(len(u)):
            y = self.input_gain * f_u[k] + self.pole * y
            outputs[k] = y
        if self.noise_sigma > 0:
            rng = np.random.default_rng(seed)
            outputs = outputs + rng.normal(0.0, self.noise_sigma, outputs.size)
        return Signal(outputs, u.sampling_time)
