"""Per-video candidate scoring: the alignment method plus the flat baselines
it is compared against (mean-pool over class names, bag-of-words over
sub-actions, and order perturbations of the scripts)."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace

import numpy as np

from .affinity import CalibrationParams
from .alignment import AlignmentResult, DtwConfig, align_smoothed
from .corpus import ClassNameEmbedding, EmbeddingSequence, SubActionScript, VideoEntry
from .errors import ConfigError, ScriptError
from .smoothing import SmoothingConfig, smooth

METHODS = (
    "actalign",
    "mean_pool_name",
    "mean_pool_context",
    "bag_of_words",
    "reversed_order",
    "randomized_order",
)

PERTURB_MODES = ("reversed", "randomized")


@dataclass(frozen=True)
class VideoPrediction:
    """Candidates ranked by descending score; exact ties keep manifest order."""

    video_id: str
    method: str
    ranked: tuple[tuple[str, float], ...]
    predicted: str
    trial_seed: int | None = None


def rank_candidates(
    entry: VideoEntry,
    scores: dict[str, float],
    method: str,
    trial_seed: int | None = None,
) -> VideoPrediction:
    """Build a prediction from per-candidate scores.

    Scores must cover the candidate set exactly; a stable descending sort
    over manifest candidate order makes tie-breaking deterministic.
    """
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}")
    missing = [c for c in entry.candidates if c not in scores]
    if missing:
        raise ScriptError(f"video {entry.video_id!r}: no score for candidates {missing}")
    values = np.array([scores[c] for c in entry.candidates], dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise ConfigError(f"video {entry.video_id!r}: non-finite candidate score")
    order = np.argsort(-values, kind="stable")
    ranked = tuple((entry.candidates[i], float(values[i])) for i in order)
    return VideoPrediction(
        video_id=entry.video_id,
        method=method,
        ranked=ranked,
        predicted=ranked[0][0],
        trial_seed=trial_seed,
    )


def _script_for(entry: VideoEntry, scripts: dict[str, SubActionScript], class_id: str) -> SubActionScript:
    script = scripts.get(class_id)
    if script is None:
        raise ScriptError(f"video {entry.video_id!r}: no script for candidate {class_id!r}")
    return script


def classify_actalign(
    entry: VideoEntry,
    seq: EmbeddingSequence,
    scripts: dict[str, SubActionScript],
    cal: CalibrationParams,
    smoothing_cfg: SmoothingConfig,
    dtw_cfg: DtwConfig,
    method: str = "actalign",
    trial_seed: int | None = None,
    perturb: dict[str, SubActionScript] | None = None,
) -> VideoPrediction:
    """Score every candidate by its normalized alignment score.

    The video is smoothed once and reused across candidates. ``perturb``
    optionally substitutes (already perturbed) scripts per class.
    """
    smoothed = smooth(seq, smoothing_cfg)
    lookup = perturb if perturb is not None else scripts
    scores: dict[str, float] = {}
    for class_id in entry.candidates:
        script = _script_for(entry, lookup, class_id)
        scores[class_id] = align_smoothed(script, smoothed, cal, dtw_cfg).normalized_score
    return rank_candidates(entry, scores, method, trial_seed=trial_seed)


def alignments_for(
    entry: VideoEntry,
    seq: EmbeddingSequence,
    scripts: dict[str, SubActionScript],
    cal: CalibrationParams,
    smoothing_cfg: SmoothingConfig,
    dtw_cfg: DtwConfig,
) -> dict[str, AlignmentResult]:
    """Full alignment result per candidate, for path export."""
    smoothed = smooth(seq, smoothing_cfg)
    return {
        class_id: align_smoothed(_script_for(entry, scripts, class_id), smoothed, cal, dtw_cfg)
        for class_id in entry.candidates
    }


def _pool_unit(rows: np.ndarray) -> np.ndarray:
    pooled = rows.mean(axis=0)
    norm = float(np.linalg.norm(pooled))
    return pooled if norm == 0.0 else pooled / norm


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(a @ b) / (na * nb)


def classify_mean_pool(
    entry: VideoEntry,
    seq: EmbeddingSequence,
    names: dict[str, ClassNameEmbedding],
    method: str = "mean_pool_name",
) -> VideoPrediction:
    """Cosine between the renormalized temporal mean of the frames and each
    class-name embedding; no temporal structure at all."""
    pooled = _pool_unit(seq.frames)
    scores: dict[str, float] = {}
    for class_id in entry.candidates:
        name = names.get(class_id)
        if name is None:
            raise ScriptError(
                f"video {entry.video_id!r}: no name embedding for candidate {class_id!r}"
            )
        scores[class_id] = _cosine(pooled, name.embedding)
    return rank_candidates(entry, scores, method)


def classify_bag_of_words(
    entry: VideoEntry,
    seq: EmbeddingSequence,
    scripts: dict[str, SubActionScript],
) -> VideoPrediction:
    """Mean-pool the sub-action embeddings into one vector per class,
    discarding their order, and compare against the pooled frames."""
    pooled_frames = _pool_unit(seq.frames)
    scores: dict[str, float] = {}
    for class_id in entry.candidates:
        script = _script_for(entry, scripts, class_id)
        if script.embeddings is None:
            raise ScriptError(f"script {class_id!r} has no embeddings")
        scores[class_id] = _cosine(pooled_frames, _pool_unit(script.embeddings))
    return rank_candidates(entry, scores, "bag_of_words")


def perturb_script(script: SubActionScript, mode: str, seed: int | None = None) -> SubActionScript:
    """Reverse or (seeded) uniformly permute the sub-action order."""
    if mode not in PERTURB_MODES:
        raise ConfigError(f"unknown perturbation mode {mode!r}")
    if script.embeddings is None:
        raise ScriptError(f"script {script.class_id!r} has no embeddings")
    if mode == "reversed":
        perm = np.arange(script.steps - 1, -1, -1)
    else:
        if seed is None:
            raise ConfigError("randomized perturbation needs a seed")
        perm = np.random.default_rng(seed).permutation(script.steps)
    return replace(
        script,
        texts=tuple(script.texts[i] for i in perm),
        embeddings=script.embeddings[perm],
    )


def permutation_seed(run_seed: int, trial: int, video_id: str, class_id: str) -> int:
    """Stable per-(video, class, trial) seed so parallel execution order
    cannot change which permutation a pair receives."""
    digest = hashlib.sha256(f"{video_id}\x1f{class_id}".encode()).digest()
    pair = int.from_bytes(digest[:8], "little")
    mixed = np.random.SeedSequence([run_seed, trial, pair])
    return int(mixed.generate_state(1, np.uint64)[0])


def classify_perturbed(
    entry: VideoEntry,
    seq: EmbeddingSequence,
    scripts: dict[str, SubActionScript],
    cal: CalibrationParams,
    smoothing_cfg: SmoothingConfig,
    dtw_cfg: DtwConfig,
    mode: str,
    run_seed: int = 0,
    trial: int = 0,
) -> VideoPrediction:
    """Alignment classification with per-candidate order perturbation."""
    perturbed: dict[str, SubActionScript] = {}
    for class_id in entry.candidates:
        script = _script_for(entry, scripts, class_id)
        seed = None
        if mode == "randomized":
            seed = permutation_seed(run_seed, trial, entry.video_id, class_id)
        perturbed[class_id] = perturb_script(script, mode, seed=seed)
    method = "reversed_order" if mode == "reversed" else "randomized_order"
    trial_seed = run_seed + trial if mode == "randomized" else None
    return classify_actalign(
        entry, seq, scripts, cal, smoothing_cfg, dtw_cfg,
        method=method, trial_seed=trial_seed, perturb=perturbed,
    )
