"""Quality scoring of candidate sequences in the proxy regressor space.

A candidate sequence of length L earns a space-filling reward (sum of
nearest-neighbor distances of its first L points to the existing point
set) minus a settling penalty: the inverse average consecutive spacing of
the full candidate trajectory, scaled by a normalized power of the length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .signals import RegressorMatrix

__all__ = [
    "QualityConfig",
    "CandidateEvaluation",
    "nearest_neighbor_distance",
    "j1",
    "activity_factor",
    "scaled_length",
    "j2",
    "j_total",
    "evaluate_candidate",
]


@dataclass(frozen=True)
class QualityConfig:
    """Trade-off and shape parameters of the sequence score.

    lam weighs the settling penalty against the space-filling reward;
    power controls how sharply the penalty grows with sequence length;
    epsilon floors the average consecutive distance inside the activity
    factor so fully settled candidates stay finite.
    """

    lam: float = 0.0
    power: float = 4.0
    metric: str = "euclidean"
    epsilon: float = 1e-12

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if not self.power > 0:
            raise ValueError("power must be positive")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True, eq=False)
class CandidateEvaluation:
    """Score profiles of one amplitude level over all lengths 1..L_max."""

    level: float
    j1_profile: np.ndarray
    j2_profile: np.ndarray
    j_profile: np.ndarray
    activity: float
    best_length: int
    best_score: float

    @property
    def max_length(self) -> int:
        return int(self.j_profile.size)


def _rows(existing) -> np.ndarray:
    if isinstance(existing, RegressorMatrix):
        return existing.values
    return np.asarray(existing, dtype=float)


def _distances(points_a: np.ndarray, points_b: np.ndarray, metric: str) -> np.ndarray:
    if metric == "euclidean":
        diff = points_a[:, None, :] - points_b[None, :, :]
        return np.sqrt(np.sum(diff * diff, axis=2))
    return cdist(points_a, points_b, metric=metric)


def nearest_neighbor_distance(existing, point, metric: str = "euclidean") -> float:
    """Distance from a point to its nearest row of the existing set."""
    rows = _rows(existing)
    if rows.shape[0] == 0:
        raise ValueError("existing point set is empty")
    point = np.asarray(point, dtype=float).reshape(1, -1)
    if point.shape[1] != rows.shape[1]:
        raise ValueError(f"point dimension {point.shape[1]} != rows dimension {rows.shape[1]}")
    return float(_distances(rows, point, metric).min())


def candidate_nn_distances(existing, candidate_points, metric: str = "euclidean") -> np.ndarray:
    """Nearest-neighbor distance of each candidate point to the existing set."""
    rows = _rows(existing)
    if rows.shape[0] == 0:
        raise ValueError("existing point set is empty")
    pts = np.asarray(candidate_points, dtype=float)
    if pts.shape[0] == 0:
        return np.empty(0)
    return _distances(pts, rows, metric).min(axis=1)


def j1(existing, candidate_points, length: int, metric: str = "euclidean") -> float:
    """Space-filling reward: summed nearest-neighbor distances of the
    first ``length`` candidate points against the existing set only.

    Points of the same candidate never serve as each other's neighbors.
    """
    pts = np.asarray(candidate_points, dtype=float)
    if not 0 <= length <= pts.shape[0]:
        raise ValueError(f"length {length} out of range 0..{pts.shape[0]}")
    if length == 0:
        return 0.0
    return float(candidate_nn_distances(existing, pts[:length], metric).sum())


def activity_factor(candidate_points, metric: str = "euclidean", epsilon: float = 1e-12) -> float:
    """Inverse average spacing of consecutive candidate points.

    Settled (steady) candidates have tiny spacings and hence a large
    factor; the average is floored by ``epsilon``.
    """
    pts = np.asarray(candidate_points, dtype=float)
    if pts.shape[0] < 2:
        raise ValueError("at least two candidate points are required")
    if metric == "euclidean":
        diffs = np.diff(pts, axis=0)
        spacings = np.sqrt(np.sum(diffs * diffs, axis=1))
    else:
        spacings = np.array(
            [cdist(pts[i : i + 1], pts[i + 1 : i + 2], metric=metric)[0, 0] for i in range(pts.shape[0] - 1)]
        )
    mean = float(spacings.sum()) / (pts.shape[0] - 1)
    return 1.0 / max(mean, epsilon)


def scaled_length(length: int, max_length: int, power: float = 4.0) -> float:
    """Monotone map of 1..max_length onto [0, 1] after raising to ``power``."""
    if not 1 <= length <= max_length:
        raise ValueError(f"length {length} out of range 1..{max_length}")
    if max_length == 1:
        return 0.0
    return (float(length) ** power - 1.0) / (float(max_length) ** power - 1.0)


def j2(length: int, max_length: int, activity: float, power: float = 4.0) -> float:
    """Settling penalty: activity factor times the scaled length term."""
    return activity * scaled_length(length, max_length, power)


def j_total(j1_value: float, j2_value: float, lam: float) -> float:
    return j1_value - lam * j2_value


def evaluate_candidate(
    existing,
    candidate_points,
    cfg: QualityConfig,
    level: float,
) -> CandidateEvaluation:
    """Score one level's candidate trajectory for every length 1..L_max.

    ``candidate_points`` must hold the full L_max-step simulation; the
    activity factor is computed once from all of them and reused across
    lengths. The best length is the smallest one attaining the maximum
    score.
    """
    pts = np.asarray(candidate_points, dtype=float)
    max_length = pts.shape[0]
    if max_length < 1:
        raise ValueError("candidate trajectory is empty")
    nn = candidate_nn_distances(existing, pts, cfg.metric)
    j1_profile = np.cumsum(nn)
    if max_length >= 2:
        activity = activity_factor(pts, cfg.metric, cfg.epsilon)
    else:
        activity = 1.0 / cfg.epsilon
    lengths = np.arange(1, max_length + 1, dtype=float)
    if max_length == 1:
        scaled = np.zeros(1)
    else:
        scaled = (lengths**cfg.power - 1.0) / (float(max_length) ** cfg.power - 1.0)
    j2_profile = activity * scaled
    j_profile = j1_profile - cfg.lam * j2_profile
    best_index = int(np.argmax(j_profile))
    return CandidateEvaluation(
        level=float(level),
        j1_profile=j1_profile,
        j2_profile=j2_profile,
        j_profile=j_profile,
        activity=float(activity),
        best_length=best_index + 1,
        best_score=float(j_profile[best_index]),
    )
