"""Temporal moving-average smoothing of frame-embedding sequences.

Each output row t is the mean of input rows t-h..t+h (h = window//2) with
out-of-range rows counted as zero vectors and the divisor fixed at the window
width, i.e. zero padding. Boundary rows therefore shrink in norm; by default
every nonzero row is rescaled back to unit norm afterwards so downstream
inner products stay in [-1, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import EmbeddingSequence, with_frames
from .errors import ConfigError


@dataclass(frozen=True)
class SmoothingConfig:
    """Window width in frames (odd, >= 1) and whether to renormalize rows."""

    window: int = 31
    renormalize: bool = True

    def __post_init__(self) -> None:
        if not isinstance(self.window, int) or self.window < 1:
            raise ConfigError(f"smoothing window must be a positive integer, got {self.window!r}")
        if self.window % 2 == 0:
            raise ConfigError(
                f"smoothing window must be odd for a symmetric span, got {self.window}"
            )


def effective_window(requested: int) -> int:
    """Map an even window request to the next odd width (CLI convenience)."""
    if requested < 1:
        raise ConfigError(f"smoothing window must be >= 1, got {requested}")
    return requested if requested % 2 == 1 else requested + 1


def smooth(seq: EmbeddingSequence, cfg: SmoothingConfig) -> EmbeddingSequence:
    """Apply the moving-average filter; shape is always preserved.

    window == 1 returns the input unchanged. Rows whose window sums to the
    zero vector are left as zeros and reported in ``zero_rows``.
    """
    if cfg.window == 1:
        return seq

    frames = seq.frames
    n, dim = frames.shape
    half = cfg.window // 2

    padded = np.zeros((n + 2 * half, dim), dtype=np.float64)
    padded[half:half + n] = frames
    csum = np.vstack([np.zeros((1, dim)), np.cumsum(padded, axis=0)])
    out = (csum[cfg.window:] - csum[:-cfg.window]) / cfg.window

    norms = np.linalg.norm(out, axis=1)
    zero_rows = tuple(int(i) for i in np.nonzero(norms == 0.0)[0])
    if cfg.renormalize:
        nonzero = norms > 0.0
        out[nonzero] /= norms[nonzero, None]
    return with_frames(seq, out, zero_rows=zero_rows)
