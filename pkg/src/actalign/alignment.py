"""Max-similarity DTW over a calibrated affinity matrix.

An alignment is a warping path: a monotone sequence of (sub-action, frame)
index pairs starting at (0, 0) with steps from {(+1,0), (0,+1), (+1,+1)}.
Its raw score is the sum of calibrated affinities along the path and its
normalized score is that sum divided by the path length, which keeps scores
comparable across videos and scripts of different lengths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .affinity import AffinityMatrix, CalibrationParams, build_affinity
from .corpus import EmbeddingSequence, SubActionScript
from .errors import ConfigError
from .kernels import dtw_backtrack_kernel, dtw_table_kernel
from .smoothing import SmoothingConfig, smooth

ENDPOINTS = ("anchored_end", "open_end")
MOVES = ("diagonal", "up", "left")
_MOVE_CODE = {"diagonal": 0, "up": 1, "left": 2}


@dataclass(frozen=True)
class DtwConfig:
    """Endpoint policy and predecessor tie-break order, fixed for a run.

    anchored_end forces the path to terminate at the last (sub-action,
    frame) cell; open_end scores the best table cell anywhere and
    backtracks from it.
    """

    endpoint: str = "anchored_end"
    tie_break: tuple[str, str, str] = ("diagonal", "up", "left")

    def __post_init__(self) -> None:
        if self.endpoint not in ENDPOINTS:
            raise ConfigError(f"endpoint must be one of {ENDPOINTS}, got {self.endpoint!r}")
        if sorted(self.tie_break) != sorted(MOVES):
            raise ConfigError(
                f"tie_break must be a permutation of {MOVES}, got {self.tie_break!r}"
            )

    def order_codes(self) -> np.ndarray:
        return np.array([_MOVE_CODE[m] for m in self.tie_break], dtype=np.int64)


@dataclass(frozen=True)
class AlignmentResult:
    """Optimal warping path with its raw and length-normalized scores."""

    path: np.ndarray
    raw_score: float
    normalized_score: float
    dp_max_cell: tuple[int, int]

    def __len__(self) -> int:
        return self.path.shape[0]

    def to_export_dict(self, video_id: str, class_id: str) -> dict:
        return {
            "video_id": video_id,
            "class_id": class_id,
            "path": self.path.tolist(),
            "gamma": self.raw_score,
            "gamma_hat": self.normalized_score,
        }


def dtw_table(calibrated: np.ndarray) -> np.ndarray:
    """Fill the cumulative-score table; each cell is touched exactly once."""
    calibrated = np.ascontiguousarray(calibrated, dtype=np.float64)
    if calibrated.ndim != 2 or calibrated.size == 0:
        raise ConfigError(f"affinity matrix must be 2-D and non-empty, got shape {calibrated.shape}")
    return dtw_table_kernel(calibrated)


def backtrack(D: np.ndarray, aff: AffinityMatrix, cfg: DtwConfig) -> AlignmentResult:
    """Recover the optimal path and scores from a filled table."""
    K, T = D.shape
    flat_max = int(np.argmax(D))
    max_cell = (flat_max // T, flat_max % T)
    if cfg.endpoint == "anchored_end":
        end_k, end_t = K - 1, T - 1
    else:
        end_k, end_t = max_cell
    path = dtw_backtrack_kernel(D, end_k, end_t, cfg.order_codes())
    raw = float(np.sum(aff.calibrated[path[:, 0], path[:, 1]]))
    return AlignmentResult(
        path=path,
        raw_score=raw,
        normalized_score=raw / path.shape[0],
        dp_max_cell=max_cell,
    )


def align_affinity(aff: AffinityMatrix, cfg: DtwConfig) -> AlignmentResult:
    return backtrack(dtw_table(aff.calibrated), aff, cfg)


def align_smoothed(
    script: SubActionScript,
    smoothed: EmbeddingSequence,
    cal: CalibrationParams,
    dtw_cfg: DtwConfig,
) -> AlignmentResult:
    """Alignment for an already-smoothed sequence (lets callers smooth once
    per video instead of once per candidate)."""
    return align_affinity(build_affinity(script, smoothed, cal), dtw_cfg)


def align(
    script: SubActionScript,
    seq: EmbeddingSequence,
    cal: CalibrationParams,
    smoothing_cfg: SmoothingConfig,
    dtw_cfg: DtwConfig,
) -> AlignmentResult:
    """Full pipeline for one (script, video) pair: smooth, calibrate, warp."""
    return align_smoothed(script, smooth(seq, smoothing_cfg), cal, dtw_cfg)
