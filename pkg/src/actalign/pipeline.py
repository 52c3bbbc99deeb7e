"""Corpus-level drivers: fan alignment jobs out over a thread pool, merge
deterministically, and aggregate into reports.

Alignment jobs are pure functions over immutable inputs, so threads share
the loaded scripts and manifest freely; the DTW kernels release the GIL
under numba. Results are merged in manifest order regardless of completion
order, which keeps reports byte-identical at any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

from .affinity import CalibrationParams
from .alignment import DtwConfig
from .classify import (
    VideoPrediction,
    classify_actalign,
    classify_bag_of_words,
    classify_mean_pool,
    classify_perturbed,
)
from .config import RunConfig
from .corpus import (
    ClassNameEmbedding,
    DatasetManifest,
    EmbeddingSequence,
    SubActionScript,
    VideoEntry,
    load_embeddings,
)
from .errors import ConfigError
from .reporting import EvaluationReport, build_report
from .smoothing import SmoothingConfig

WORKERS_ENV = "ACTALIGN_WORKERS"

SeqProvider = Callable[[VideoEntry], EmbeddingSequence]


def resolve_workers(requested: int | None = None) -> int:
    """ACTALIGN_WORKERS overrides the requested count; default is serial."""
    env = os.environ.get(WORKERS_ENV)
    if env is not None:
        count = int(env)
    elif requested is not None:
        count = requested
    else:
        count = 1
    if count < 1:
        raise ConfigError(f"worker count must be >= 1, got {count}")
    return count


def corpus_seq_provider(manifest: DatasetManifest) -> SeqProvider:
    """Loads each video's embedding file on demand (nothing is cached; one
    video's frames live only as long as its job)."""

    def provider(entry: VideoEntry) -> EmbeddingSequence:
        return load_embeddings(
            manifest.embedding_path(entry),
            entry.frame_count,
            video_id=entry.video_id,
        )

    return provider


def _map_videos(
    manifest: DatasetManifest,
    job: Callable[[VideoEntry], VideoPrediction],
    workers: int,
) -> list[VideoPrediction]:
    if workers == 1:
        return [job(entry) for entry in manifest.videos]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, manifest.videos))


def run_classification(
    manifest: DatasetManifest,
    seq_provider: SeqProvider,
    *,
    method: str = "actalign",
    scripts: dict[str, SubActionScript] | None = None,
    names: dict[str, ClassNameEmbedding] | None = None,
    cal: CalibrationParams | None = None,
    smoothing: SmoothingConfig | None = None,
    dtw: DtwConfig | None = None,
    seed: int = 0,
    trials: int = 1,
    workers: int | None = None,
    run_config: dict | None = None,
) -> EvaluationReport:
    """Classify every video with one method and aggregate the report.

    Only the randomized-order method uses more than one trial; the trial
    seeds are seed, seed+1, ... and are recorded in the report.
    """
    cal = cal or CalibrationParams()
    smoothing = smoothing or SmoothingConfig()
    dtw = dtw or DtwConfig()
    workers = resolve_workers(workers)
    if run_config is None:
        run_config = RunConfig(method=method).to_dict()

    def needs_scripts() -> dict[str, SubActionScript]:
        if scripts is None:
            raise ConfigError(f"method {method!r} requires sub-action scripts")
        return scripts

    if method in ("mean_pool_name", "mean_pool_context"):
        if names is None:
            raise ConfigError(f"method {method!r} requires class-name embeddings")

        def job(entry: VideoEntry) -> VideoPrediction:
            return classify_mean_pool(entry, seq_provider(entry), names, method=method)

        trial_jobs = [job]
    elif method == "bag_of_words":
        needs_scripts()

        def job(entry: VideoEntry) -> VideoPrediction:
            return classify_bag_of_words(entry, seq_provider(entry), scripts)

        trial_jobs = [job]
    elif method == "actalign":
        needs_scripts()

        def job(entry: VideoEntry) -> VideoPrediction:
            return classify_actalign(
                entry, seq_provider(entry), scripts, cal, smoothing, dtw
            )

        trial_jobs = [job]
    elif method == "reversed_order":
        needs_scripts()

        def job(entry: VideoEntry) -> VideoPrediction:
            return classify_perturbed(
                entry, seq_provider(entry), scripts, cal, smoothing, dtw,
                mode="reversed",
            )

        trial_jobs = [job]
    elif method == "randomized_order":
        needs_scripts()

        def make_job(trial: int) -> Callable[[VideoEntry], VideoPrediction]:
            def job(entry: VideoEntry) -> VideoPrediction:
                return classify_perturbed(
                    entry, seq_provider(entry), scripts, cal, smoothing, dtw,
                    mode="randomized", run_seed=seed, trial=trial,
                )

            return job

        trial_jobs = [make_job(i) for i in range(max(1, trials))]
    else:
        raise ConfigError(f"unknown method {method!r}")

    trial_predictions = [_map_videos(manifest, job, workers) for job in trial_jobs]
    trial_seeds = [seed + i for i in range(len(trial_jobs))]
    return build_report(run_config, manifest, trial_predictions, trial_seeds)


@dataclass(frozen=True)
class AblationVariant:
    """One rung of an ablation ladder: a label plus the knobs it changes."""

    label: str
    method: str
    scripts: dict[str, SubActionScript] | None = None
    names: dict[str, ClassNameEmbedding] | None = None
    smoothing: SmoothingConfig | None = None
    dtw: DtwConfig | None = None


def ablation_grid(
    manifest: DatasetManifest,
    seq_provider: SeqProvider,
    variants: list[AblationVariant],
    *,
    cal: CalibrationParams | None = None,
    base_config: RunConfig | None = None,
    seed: int = 0,
    workers: int | None = None,
) -> list[tuple[str, EvaluationReport]]:
    """Run one classification per variant; every report embeds its own
    fully-resolved config so rungs differ only where the variant says so."""
    base_config = base_config or RunConfig()
    results: list[tuple[str, EvaluationReport]] = []
    for variant in variants:
        smoothing = variant.smoothing or SmoothingConfig()
        dtw = variant.dtw or DtwConfig()
        cfg = replace(
            base_config,
            label=variant.label,
            method=variant.method,
            smoothing_window=smoothing.window,
            renormalize=smoothing.renormalize,
            dtw_endpoint=dtw.endpoint,
            tie_break=dtw.tie_break,
            seed=seed,
        )
        report = run_classification(
            manifest,
            seq_provider,
            method=variant.method,
            scripts=variant.scripts,
            names=variant.names,
            cal=cal,
            smoothing=smoothing,
            dtw=dtw,
            seed=seed,
            workers=workers,
            run_config=cfg.to_dict(),
        )
        results.append((variant.label, report))
    return results
