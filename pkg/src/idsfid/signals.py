"""Sampled signal containers and delayed-coordinate regressor construction.

A regressor vector stacks delayed samples in a fixed order: all delays of
input 1, then input 2, ..., then the output delays, most recent first.
Row i of a regressor matrix pairs the samples at array index i with the
delays reaching back from it; history below index 0 is padded with the
initial operating point.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Signal",
    "MultiSignal",
    "RegressorConfig",
    "RegressorMatrix",
    "build_regressor",
    "build_regressor_matrix",
    "write_signal_csv",
    "read_signal_csv",
]


def _frozen_array(values, ndim: int = 1) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError("values must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Signal:
    """A uniformly sampled scalar trajectory."""

    samples: np.ndarray
    sampling_time: float = 1.0

    def __post_init__(self):
        if not self.sampling_time > 0:
            raise ValueError("sampling_time must be positive")
        object.__setattr__(self, "samples", _frozen_array(self.samples))

    def __len__(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True, eq=False)
class MultiSignal:
    """An ordered bundle of input signals sharing one sampling time.

    Input lengths may differ while a signal is being generated; completed
    signals are rectangular.
    """

    inputs: tuple[Signal, ...]

    def __post_init__(self):
        inputs = tuple(self.inputs)
        if not inputs:
            raise ValueError("at least one input is required")
        t0 = inputs[0].sampling_time
        if any(s.sampling_time != t0 for s in inputs):
            raise ValueError("all inputs must share the sampling time")
        object.__setattr__(self, "inputs", inputs)

    @classmethod
    def from_arrays(cls, arrays, sampling_time: float = 1.0) -> "MultiSignal":
        return cls(tuple(Signal(a, sampling_time) for a in arrays))

    @property
    def num_inputs(self) -> int:
        return len(self.inputs)

    @property
    def sampling_time(self) -> float:
        return self.inputs[0].sampling_time

    def lengths(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.inputs)


@dataclass(frozen=True)
class RegressorConfig:
    """Order and width of the delayed-coordinate embedding."""

    dynamic_order: int
    num_inputs: int

    def __post_init__(self):
        if self.dynamic_order < 1:
            raise ValueError("dynamic_order must be at least 1")
        if self.num_inputs < 1:
            raise ValueError("num_inputs must be at least 1")

    @property
    def dimension(self) -> int:
        return (self.num_inputs + 1) * self.dynamic_order


@dataclass(frozen=True, eq=False)
class RegressorMatrix:
    """Rows of regressor vectors in time order."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values, ndim=2))

    @property
    def row_count(self) -> int:
        return int(self.values.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.values.shape[1])


def build_regressor(
    u_history: MultiSignal,
    y_history: Signal,
    k: int,
    cfg: RegressorConfig,
) -> np.ndarray:
    """Regressor at time index k: samples k-1 down to k-m per channel.

    The histories must actually cover indices k-m .. k-1; no padding is
    applied here.
    """
    m = cfg.dynamic_order
    if u_history.num_inputs != cfg.num_inputs:
        raise ValueError(
            f"expected {cfg.num_inputs} inputs, got {u_history.num_inputs}"
        )
    if k < m:
        raise IndexError(f"k={k} needs history back to index {k - m}")
    channels = [s.samples for s in u_history.inputs] + [y_history.samples]
    for samples in channels:
        if samples.size < k:
            raise IndexError(f"history of length {samples.size} too short for k={k}")
    return np.concatenate([samples[k - m : k][::-1] for samples in channels])


def _delayed_block(samples: np.ndarray, init_value: float, order: int) -> np.ndarray:
    """One row per sample: [x(i), x(i-1), ..., x(i-order+1)], padded below 0."""
    padded = np.concatenate([np.full(order, init_value), samples])
    windows = np.lib.stride_tricks.sliding_window_view(padded, order)
    return windows[1:, ::-1]


def regressor_rows(
    input_columns,
    output_values: np.ndarray,
    order: int,
    initial_inputs,
    initial_output: float,
) -> np.ndarray:
    """Stack delayed blocks of raw arrays into an (N, dim) matrix."""
    blocks = [
        _delayed_block(np.asarray(col, dtype=float), float(init), order)
        for col, init in zip(input_columns, initial_inputs)
    ]
    blocks.append(
        _delayed_block(np.asarray(output_values, dtype=float), float(initial_output), order)
    )
    return np.hstack(blocks)


def build_regressor_matrix(
    u: MultiSignal,
    y: Signal,
    cfg: RegressorConfig,
    initial_inputs=None,
    initial_output: float | None = None,
) -> RegressorMatrix:
    """Regressor rows for every sample of a rectangular signal.

    Row i pairs the samples at index i with their delays; entries that
    would reach below index 0 take the initial operating point, which
    defaults to the first sample of each channel.
    """
    if u.num_inputs != cfg.num_inputs:
        raise ValueError(f"expected {cfg.num_inputs} inputs, got {u.num_inputs}")
    n = len(y)
    if any(length != n for length in u.lengths()):
        raise ValueError(f"input lengths {u.lengths()} do not match output length {n}")
    if n == 0:
        return RegressorMatrix(np.empty((0, cfg.dimension)))
    if initial_inputs is None:
        initial_inputs = [s.samples[0] for s in u.inputs]
    initial_inputs = [float(v) for v in initial_inputs]
    if len(initial_inputs) != cfg.num_inputs:
        raise ValueError("one initial value per input is required")
    if initial_output is None:
        initial_output = float(y.samples[0])
    rows = regressor_rows(
        [s.samples for s in u.inputs],
        y.samples,
        cfg.dynamic_order,
        initial_inputs,
        float(initial_output),
    )
    return RegressorMatrix(rows)


def write_signal_csv(path, u: MultiSignal, output: Signal | None = None) -> None:
    """Write one column per input (header u1..up) plus an optional y column.

    Values carry 12 significant digits.
    """
    lengths = set(u.lengths())
    if len(lengths) != 1:
        raise ValueError("all inputs must have equal length to serialize")
    n = lengths.pop()
    columns = [s.samples for s in u.inputs]
    header = [f"u{i + 1}" for i in range(u.num_inputs)]
    if output is not None:
        if len(output) != n:
            raise ValueError("output length does not match the inputs")
        columns.append(output.samples)
        header.append("y")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([f"{v:.12g}" for v in row])


def read_signal_csv(path, sampling_time: float = 1.0) -> tuple[MultiSignal, Signal | None]:
    """Read a signal CSV written by :func:`write_signal_csv`."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        has_output = bool(header) and header[-1] == "y"
        input_names = header[:-1] if has_output else header
        expected = [f"u{i + 1}" for i in range(len(input_names))]
        if not input_names or input_names != expected:
            raise ValueError(f"{path}: malformed header {header!r}")
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{line_no}: expected {len(header)} columns")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: {exc}") from None
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    inputs = MultiSignal.from_arrays(
        [data[:, i] for i in range(len(input_names))], sampling_time
    )
    output = Signal(data[:, -1], sampling_time) if has_output else None
    return inputs, output
