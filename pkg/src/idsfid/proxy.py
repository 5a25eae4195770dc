"""First-order linear proxy filters standing in for the unknown process.

One unit-gain first-order filter per input; the aggregate output is the
sum of the per-input filter states. Discretization assumes piecewise
constant inputs (zero-order hold), so the decay per step is exp(-T0/T).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signals import MultiSignal, RegressorConfig, RegressorMatrix, Signal, regressor_rows

__all__ = [
    "ProxyModel",
    "ProxyState",
    "default_time_constant",
    "proxy_regressors",
]


def default_time_constant(sampling_time: float = 1.0, decay: float = 0.8) -> float:
    """Time constant that yields the given per-step decay factor."""
    if not 0.0 < decay < 1.0:
        raise ValueError("decay must lie in (0, 1)")
    return -sampling_time / math.log(decay)


@dataclass(frozen=True)
class ProxyState:
    """Per-input filter states; the aggregate output is their sum."""

    components: tuple[float, ...]

    @property
    def output(self) -> float:
        return float(sum(self.components))


@dataclass(frozen=True, eq=False)
class ProxyModel:
    time_constants: tuple[float, ...]
    gains: tuple[float, ...] | None = None
    sampling_time: float = 1.0

    def __post_init__(self):
        tc = tuple(float(t) for t in self.time_constants)
        if not tc:
            raise ValueError("at least one time constant is required")
        if any(t <= 0 for t in tc):
            raise ValueError("time constants must be positive")
        if not self.sampling_time > 0:
            raise ValueError("sampling_time must be positive")
        gains = self.gains
        if gains is None:
            gains = (1.0,) * len(tc)
        gains = tuple(float(g) for g in gains)
        if len(gains) != len(tc):
            raise ValueError("one gain per time constant is required")
        if any(not math.isfinite(g) for g in gains):
            raise ValueError("gains must be finite")
        object.__setattr__(self, "time_constants", tc)
        object.__setattr__(self, "gains", gains)
        decay = np.exp(-self.sampling_time / np.array(tc))
        decay.flags.writeable = False
        gain_arr = np.array(gains)
        gain_arr.flags.writeable = False
        object.__setattr__(self, "_decay", decay)
        object.__setattr__(self, "_gain", gain_arr)

    @property
    def num_inputs(self) -> int:
        return len(self.time_constants)

    @property
    def decay(self) -> np.ndarray:
        """Per-step decay factors exp(-T0/T), each in (0, 1)."""
        return self._decay

    @property
    def gain(self) -> np.ndarray:
        return self._gain

    def steady_state(self, u) -> ProxyState:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.num_inputs,):
            raise ValueError(f"expected {self.num_inputs} input values")
        return ProxyState(tuple(self._gain * u))

    def step(self, state: ProxyState, u) -> ProxyState:
        """Advance one sample: each filter consumes its input with unit delay."""
        u = np.asarray(u, dtype=float)
        if u.shape != (self.num_inputs,):
            raise ValueError(f"expected {self.num_inputs} input values")
        comps = np.asarray(state.components)
        if comps.shape != (self.num_inputs,):
            raise ValueError("state dimension does not match the model")
        new = self._decay * comps + self._gain * (1.0 - self._decay) * u
        return ProxyState(tuple(new))

    def simulate(self, u: MultiSignal, init: ProxyState | None = None) -> Signal:
        """Aggregate output after each input sample is consumed."""
        if u.num_inputs != self.num_inputs:
            raise ValueError(f"expected {self.num_inputs} inputs, got {u.num_inputs}")
        lengths = set(u.lengths())
        if len(lengths) != 1:
            raise ValueError(f"unequal input lengths {u.lengths()}")
        n = lengths.pop()
        rows = np.column_stack([s.samples for s in u.inputs]) if n else np.empty((0, self.num_inputs))
        if init is None:
            first = rows[0] if n else np.zeros(self.num_inputs)
            init = self.steady_state(first)
        outputs, _ = self.run(rows, init)
        return Signal(outputs, u.sampling_time)

    def run(self, u_rows: np.ndarray, init: ProxyState) -> tuple[np.ndarray, ProxyState]:
        """Low-level recursion over raw (N, p) input rows.

        Returns the aggregate output after each consumed row plus the
        final filter state.
        """
        comps = np.array(init.components, dtype=float)
        if comps.shape != (self.num_inputs,):
            raise ValueError("state dimension does not match the model")
        u_rows = np.asarray(u_rows, dtype=float)
        outputs = np.empty(u_rows.shape[0])
        a = self._decay
        b = self._gain * (1.0 - a)
        for t in range(u_rows.shape[0]):
            comps = a * comps + b * u_rows[t]
            outputs[t] = comps.sum()
        return outputs, ProxyState(tuple(comps))


def proxy_regressors(
    u: MultiSignal,
    model: ProxyModel,
    order: int = 1,
    initial_inputs=None,
) -> RegressorMatrix:
    """Proxy regressor distribution of a finished signal.

    The proxy starts at its steady state for ``initial_inputs`` (default:
    the first sample of each input); row i pairs the samples at index i
    with the proxy output at the same instant.
    """
    lengths = set(u.lengths())
    if len(lengths) != 1:
        raise ValueError(f"unequal input lengths {u.lengths()}")
    n = lengths.pop()
    cfg = RegressorConfig(dynamic_order=order, num_inputs=u.num_inputs)
    if n == 0:
        return RegressorMatrix(np.empty((0, cfg.dimension)))
    if initial_inputs is None:
        initial_inputs = [s.samples[0] for s in u.inputs]
    init = model.steady_state(initial_inputs)
    rows = np.column_stack([s.samples for s in u.inputs])
    outputs, _ = model.run(rows, init)
    aligned = np.concatenate([[init.output], outputs[:-1]])
    values = regressor_rows(
        [s.samples for s in u.inputs], aligned, order, initial_inputs, init.output
    )
    return RegressorMatrix(values)
