"""Cosine similarity between sub-action and frame embeddings, calibrated to
affinities in (0, 1) with a scaled-shifted sigmoid."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import EmbeddingSequence, SubActionScript
from .errors import ConfigError

DEFAULT_ALPHA = 10.0
DEFAULT_BETA = 0.0

# The logistic saturates to exactly 0.0 or 1.0 in float64 once |x| > ~37,
# which realistic scale parameters reach; this margin keeps every affinity
# (and therefore every path-mean of affinities) strictly inside (0, 1).
_AFFINITY_EPS = 1e-12


@dataclass(frozen=True)
class CalibrationParams:
    """Sigmoid scale and bias applied to raw cosine similarities.

    The real values come from the frozen encoder's pretrained logit
    scale/bias; ``calibrated`` is False when running on the built-in
    defaults, which preserve per-row argmax but not absolute affinities.
    """

    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    source: str = "builtin-default"
    calibrated: bool = False

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ConfigError(f"calibration alpha must be finite and > 0, got {self.alpha!r}")
        if not math.isfinite(self.beta):
            raise ConfigError(f"calibration beta must be finite, got {self.beta!r}")


@dataclass(frozen=True)
class AffinityMatrix:
    """K x T similarities for one (class, video) pair.

    ``raw`` holds cosine values in [-1, 1]; ``calibrated`` holds
    sigmoid(alpha * raw + beta), strictly inside (0, 1).
    """

    class_id: str
    video_id: str
    raw: np.ndarray
    calibrated: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.raw.shape


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def build_affinity(
    script: SubActionScript,
    seq: EmbeddingSequence,
    cal: CalibrationParams,
) -> AffinityMatrix:
    """Inner products of unit-norm rows, clamped to [-1, 1], then calibrated."""
    if script.embeddings is None:
        raise ConfigError(f"script {script.class_id!r} has no embeddings")
    if script.dim != seq.dim:
        raise ConfigError(
            f"dimension mismatch: script {script.class_id!r} is d={script.dim}, "
            f"video {seq.video_id!r} is d={seq.dim}"
        )
    raw = script.embeddings @ seq.frames.T
    np.clip(raw, -1.0, 1.0, out=raw)
    calibrated = _sigmoid(cal.alpha * raw + cal.beta)
    np.clip(calibrated, _AFFINITY_EPS, 1.0 - _AFFINITY_EPS, out=calibrated)
    return AffinityMatrix(
        class_id=script.class_id,
        video_id=seq.video_id,
        raw=raw,
        calibrated=calibrated,
    )


def load_calibration(path: str | Path) -> CalibrationParams:
    """Read {"alpha", "beta", "source"} emitted by the extractor."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read calibration file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"calibration file {path} is not valid JSON: {exc}") from exc
    try:
        alpha = float(doc["alpha"])
        beta = float(doc["beta"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"calibration file {path} needs numeric alpha and beta") from exc
    return CalibrationParams(
        alpha=alpha,
        beta=beta,
        source=str(doc.get("source", str(path))),
        calibrated=True,
    )
