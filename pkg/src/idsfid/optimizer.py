"""Iterative concatenation of optimal piecewise-constant sequences.

Each iteration extends the currently shortest input by one constant
sequence: every available amplitude level is simulated forward through
the proxy for the maximum sequence length, scored over all lengths, and
the global best (level, length) pair is appended. Levels live on an
equidistant grid with Latin-hypercube style blocking: a used level stays
blocked until every level has been used, and no input ever repeats its
previous level back to back.

During a candidate simulation the other inputs hold their most recent
value; mid-generation the inputs may therefore have unequal lengths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .proxy import ProxyModel, default_time_constant
from .quality import CandidateEvaluation, QualityConfig, evaluate_candidate
from .signals import MultiSignal, RegressorConfig, RegressorMatrix, Signal, regressor_rows

__all__ = [
    "LevelLedger",
    "OptimizerConfig",
    "GenerationState",
    "SequenceRecord",
    "GenerationResult",
    "amplitude_levels",
    "select_input",
    "enumerate_candidates",
    "select_sequence",
    "append_sequence",
    "run_generation",
    "generate",
    "generate_continuation",
]


def amplitude_levels(amplitude_range, count: int) -> np.ndarray:
    """``count`` equidistant levels spanning the range inclusively."""
    lo, hi = (float(v) for v in amplitude_range)
    if count < 2:
        raise ValueError("at least two levels are required")
    if not lo < hi:
        raise ValueError(f"empty amplitude range [{lo}, {hi}]")
    return np.linspace(lo, hi, count)


class LevelLedger:
    """Equidistant amplitude levels with used/blocked bookkeeping.

    Marking the last free level as used resets every flag, making the
    whole grid available again for the next cycle.
    """

    def __init__(self, levels):
        levels = np.array(levels, dtype=float)
        if levels.ndim != 1 or levels.size < 2:
            raise ValueError("at least two levels are required")
        if not np.all(np.diff(levels) > 0):
            raise ValueError("levels must be strictly ascending")
        levels.flags.writeable = False
        self.levels = levels
        self.used = np.zeros(levels.size, dtype=bool)

    @classmethod
    def from_range(cls, amplitude_range, count: int) -> "LevelLedger":
        return cls(amplitude_levels(amplitude_range, count))

    @property
    def resolution(self) -> int:
        return int(self.levels.size)

    def available_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.used)

    def mark_used(self, index: int) -> None:
        self.used[index] = True
        if self.used.all():
            self.used[:] = False


@dataclass(frozen=True, eq=False)
class OptimizerConfig:
    """Generation settings; per-input tuples default from the time constants.

    The maximum sequence length defaults to three proxy time constants,
    the level count to the target length divided by one time constant,
    and the initial operating point to the range minimum.
    """

    target_length: int
    amplitude_ranges: tuple[tuple[float, float], ...] = ((0.0, 1.0),)
    time_constants: tuple[float, ...] | None = None
    sampling_time: float = 1.0
    dynamic_order: int = 1
    gains: tuple[float, ...] | None = None
    max_sequence_lengths: tuple[int, ...] | None = None
    level_counts: tuple[int, ...] | None = None
    quality: QualityConfig = field(default_factory=QualityConfig)
    seed: int = 0
    initial_levels: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.target_length < 1:
            raise ValueError("target_length must be at least 1")
        if not self.sampling_time > 0:
            raise ValueError("sampling_time must be positive")
        if self.dynamic_order < 1:
            raise ValueError("dynamic_order must be at least 1")
        ranges = tuple((float(lo), float(hi)) for lo, hi in self.amplitude_ranges)
        if not ranges:
            raise ValueError("at least one input range is required")
        for lo, hi in ranges:
            if not lo < hi:
                raise ValueError(f"empty amplitude range [{lo}, {hi}]")
        object.__setattr__(self, "amplitude_ranges", ranges)
        for name in ("time_constants", "gains", "max_sequence_lengths", "level_counts", "initial_levels"):
            value = getattr(self, name)
            if value is not None:
                value = tuple(value)
                if len(value) != len(ranges):
                    raise ValueError(f"{name} must provide one entry per input")
                object.__setattr__(self, name, value)
        # resolve eagerly so invalid settings fail at construction
        if any(l < 2 for l in self.resolved_max_sequence_lengths()):
            raise ValueError("max sequence lengths must be at least 2")
        if any(m < 2 for m in self.resolved_level_counts()):
            raise ValueError("level counts must be at least 2")
        for (lo, hi), u0 in zip(ranges, self.resolved_initial_levels()):
            if not lo <= u0 <= hi:
                raise ValueError(f"initial level {u0} outside range [{lo}, {hi}]")

    @property
    def num_inputs(self) -> int:
        return len(self.amplitude_ranges)

    def resolved_time_constants(self) -> tuple[float, ...]:
        if self.time_constants is not None:
            return tuple(float(t) for t in self.time_constants)
        default = default_time_constant(self.sampling_time)
        return (default,) * self.num_inputs

    def resolved_max_sequence_lengths(self) -> tuple[int, ...]:
        if self.max_sequence_lengths is not None:
            return tuple(int(v) for v in self.max_sequence_lengths)
        return tuple(
            max(2, round(3.0 * t / self.sampling_time))
            for t in self.resolved_time_constants()
        )

    def resolved_level_counts(self) -> tuple[int, ...]:
        if self.level_counts is not None:
            return tuple(int(v) for v in self.level_counts)
        return tuple(
            max(2, math.ceil(self.target_length / (t / self.sampling_time)))
            for t in self.resolved_time_constants()
        )

    def resolved_initial_levels(self) -> tuple[float, ...]:
        if self.initial_levels is not None:
            return tuple(float(v) for v in self.initial_levels)
        return tuple(lo for lo, _ in self.amplitude_ranges)

    def proxy_model(self) -> ProxyModel:
        return ProxyModel(
            time_constants=self.resolved_time_constants(),
            gains=self.gains,
            sampling_time=self.sampling_time,
        )

    def regressor_config(self) -> RegressorConfig:
        return RegressorConfig(dynamic_order=self.dynamic_order, num_inputs=self.num_inputs)


@dataclass(frozen=True)
class SequenceRecord:
    """One appended sequence: which input, which level, how many samples."""

    input_index: int
    level: float
    length: int
    score: float


class GenerationState:
    """Mutable working state of one generation run."""

    def __init__(self, cfg: OptimizerConfig, initial: MultiSignal | None = None):
        self.cfg = cfg
        self.model = cfg.proxy_model()
        self.rng = np.random.default_rng(cfg.seed)
        self.ledgers = [
            LevelLedger.from_range(rng_, count)
            for rng_, count in zip(cfg.amplitude_ranges, cfg.resolved_level_counts())
        ]
        self.records: list[SequenceRecord] = []
        self.last_levels: list[float | None] = [None] * cfg.num_inputs
        if initial is None:
            self.inputs: list[list[float]] = [[] for _ in range(cfg.num_inputs)]
            self.origin = cfg.resolved_initial_levels()
        else:
            if initial.num_inputs != cfg.num_inputs:
                raise ValueError("initial data must match the number of inputs")
            if any(n > cfg.target_length for n in initial.lengths()):
                raise ValueError("initial data longer than the target length")
            self.inputs = [list(s.samples) for s in initial.inputs]
            defaults = cfg.resolved_initial_levels()
            self.origin = tuple(
                samples[0] if samples else default
                for samples, default in zip(self.inputs, defaults)
            )
        init_state = self.model.steady_state(self.origin)
        self.origin_output = init_state.output
        m = cfg.dynamic_order
        origin_row = np.concatenate(
            [np.full(m, u0) for u0 in self.origin] + [np.full(m, self.origin_output)]
        )
        self._rows: list[np.ndarray] = [origin_row]
        self._stack: np.ndarray | None = None
        horizon = max(self.lengths())
        if horizon:
            u_eff, aligned, _ = self._trajectory(horizon)
            self._rows.extend(
                regressor_rows(u_eff.T, aligned[:horizon], m, self.origin, self.origin_output)
            )

    def lengths(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.inputs)

    def matrix(self) -> RegressorMatrix:
        return RegressorMatrix(self.matrix_rows())

    def matrix_rows(self) -> np.ndarray:
        if self._stack is None:
            self._stack = np.vstack(self._rows)
        return self._stack

    def signal(self) -> MultiSignal:
        return MultiSignal.from_arrays(self.inputs, self.cfg.sampling_time)

    def effective_value(self, input_index: int, t: int) -> float:
        """Sample of an input at index t, holding the last value beyond its end."""
        samples = self.inputs[input_index]
        if t < len(samples):
            return samples[t]
        if samples:
            return samples[-1]
        return self.origin[input_index]

    def _trajectory(self, upto: int):
        """Effective input rows 0..upto-1, proxy outputs at instants 0..upto,
        and the filter components after the last consumed row."""
        p = self.cfg.num_inputs
        u_eff = np.empty((upto, p))
        for i in range(p):
            samples = self.inputs[i]
            n_i = min(len(samples), upto)
            u_eff[:n_i, i] = samples[:n_i]
            if n_i < upto:
                u_eff[n_i:, i] = self.effective_value(i, upto - 1)
        comps = np.array(self.model.steady_state(self.origin).components)
        aligned = np.empty(upto + 1)
        aligned[0] = comps.sum()
        a = self.model.decay
        b = self.model.gain * (1.0 - a)
        for t in range(upto):
            comps = a * comps + b * u_eff[t]
            aligned[t + 1] = comps.sum()
        return u_eff, aligned, comps

    def candidate_points(self, input_index: int, level: float, steps: int) -> np.ndarray:
        """Regressor points a constant sequence would add to the matrix.

        The selected input takes ``level`` for ``steps`` samples while the
        other inputs hold their most recent value.
        """
        cfg = self.cfg
        m = cfg.dynamic_order
        p = cfg.num_inputs
        n = len(self.inputs[input_index])
        u_eff, aligned, comps = self._trajectory(n)
        future = np.empty((steps, p))
        for i in range(p):
            if i == input_index:
                future[:, i] = level
            else:
                for t in range(steps):
                    future[t, i] = self.effective_value(i, n + t)
        a = self.model.decay
        b = self.model.gain * (1.0 - a)
        future_aligned = np.empty(steps)
        c = comps.copy()
        for t in range(steps):
            c = a * c + b * future[t]
            future_aligned[t] = c.sum()
        u_full = np.vstack([u_eff, future])
        y_full = np.concatenate([aligned[: n + 1], future_aligned[: steps - 1]])
        rows = regressor_rows(u_full.T, y_full, m, self.origin, self.origin_output)
        return rows[n:]


@dataclass(frozen=True, eq=False)
class GenerationResult:
    signal: MultiSignal
    sequences: tuple[SequenceRecord, ...]

    def sequence_lengths(self, input_index: int = 0) -> np.ndarray:
        return np.array(
            [r.length for r in self.sequences if r.input_index == input_index], dtype=int
        )

    def sequence_levels(self, input_index: int = 0) -> np.ndarray:
        return np.array(
            [r.level for r in self.sequences if r.input_index == input_index], dtype=float
        )

    def mean_sequence_length(self, input_index: int = 0) -> float:
        return float(self.sequence_lengths(input_index).mean())


def select_input(state: GenerationState, rng: np.random.Generator | None = None) -> int:
    """Index of a shortest unfinished input; length ties break randomly."""
    lengths = state.lengths()
    shortest = min(lengths)
    if shortest >= state.cfg.target_length:
        raise RuntimeError("all inputs already have the target length")
    candidates = [i for i, n in enumerate(lengths) if n == shortest]
    if len(candidates) == 1:
        return candidates[0]
    if rng is None:
        rng = state.rng
    return int(candidates[rng.integers(len(candidates))])


def enumerate_candidates(state: GenerationState, input_index: int) -> list[CandidateEvaluation]:
    """Score every available level of one input over all sequence lengths.

    The level appended immediately before is excluded even right after a
    ledger reset, so an input never repeats a level back to back.
    """
    ledger = state.ledgers[input_index]
    l_max = state.cfg.resolved_max_sequence_lengths()[input_index]
    existing = state.matrix_rows()
    last = state.last_levels[input_index]
    evaluations = []
    for idx in ledger.available_indices():
        level = float(ledger.levels[idx])
        if last is not None and level == last:
            continue
        points = state.candidate_points(input_index, level, l_max)
        evaluations.append(evaluate_candidate(existing, points, state.cfg.quality, level))
    return evaluations


def select_sequence(candidates: list[CandidateEvaluation]) -> tuple[float, int]:
    """Globally best (level, length) pair.

    Ties on the score prefer the shorter length, then the lower level.
    """
    if not candidates:
        raise ValueError("no candidates to select from")
    best: tuple[float, int, float] | None = None
    for ev in candidates:
        for idx, score in enumerate(ev.j_profile):
            length = idx + 1
            key = (score, length, ev.level)
            if (
                best is None
                or key[0] > best[0]
                or (key[0] == best[0] and key[1] < best[1])
                or (key[0] == best[0] and key[1] == best[1] and key[2] < best[2])
            ):
                best = key
    return best[2], best[1]


def append_sequence(
    state: GenerationState,
    input_index: int,
    level: float,
    length: int,
    score: float = float("nan"),
) -> GenerationState:
    """Extend one input by a constant sequence and grow the matrix to match."""
    l_max = state.cfg.resolved_max_sequence_lengths()[input_index]
    if not 1 <= length <= l_max:
        raise ValueError(f"sequence length {length} out of range 1..{l_max}")
    points = state.candidate_points(input_index, level, length)
    state.inputs[input_index].extend([level] * length)
    state._rows.extend(points)
    state._stack = None
    ledger = state.ledgers[input_index]
    matches = np.flatnonzero(ledger.levels == level)
    if matches.size:
        ledger.mark_used(int(matches[0]))
    state.last_levels[input_index] = level
    state.records.append(SequenceRecord(input_index, level, length, score))
    return state


def run_generation(cfg: OptimizerConfig, initial: MultiSignal | None = None) -> GenerationResult:
    """Run the full loop until every input holds the target length."""
    state = GenerationState(cfg, initial)
    target = cfg.target_length
    while min(state.lengths()) < target:
        j = select_input(state)
        candidates = enumerate_candidates(state, j)
        level, length = select_sequence(candidates)
        remaining = target - len(state.inputs[j])
        applied = min(length, remaining)
        score = next(ev.best_score for ev in candidates if ev.level == level)
        append_sequence(state, j, level, applied, score)
    return GenerationResult(signal=state.signal(), sequences=tuple(state.records))


def generate(cfg: OptimizerConfig) -> MultiSignal:
    """Generate a fresh excitation signal from the steady-state start."""
    return run_generation(cfg).signal


def generate_continuation(initial: MultiSignal, cfg: OptimizerConfig) -> MultiSignal:
    """Complete existing data up to the target length.

    Data of target length is returned unchanged; empty initial data makes
    this identical to :func:`generate`.
    """
    if any(n > cfg.target_length for n in initial.lengths()):
        raise ValueError("initial data longer than the target length")
    if all(n == cfg.target_length for n in initial.lengths()):
        return initial
    return run_generation(cfg, initial).signal
