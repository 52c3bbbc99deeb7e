"""Top-k accuracy, per-domain breakdowns, and report serialization.

A report is deterministic: identical predictions and config produce
byte-identical JSON, so reports double as regression fixtures. Nothing
time- or host-dependent is ever written into one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .classify import VideoPrediction
from .corpus import DatasetManifest, VideoEntry
from .errors import ManifestError

TOP_K = (1, 2, 3)


@dataclass(frozen=True)
class DomainStats:
    samples: int
    topk: dict[int, float]


@dataclass(frozen=True)
class TrialStats:
    """Per-seed accuracies plus their mean and population std."""

    per_seed: tuple[tuple[int, dict[int, float]], ...]
    mean: dict[int, float]
    std: dict[int, float]


@dataclass(frozen=True)
class EvaluationReport:
    run_config: dict
    per_video: tuple[VideoPrediction, ...]
    topk: dict[int, float]
    per_domain: dict[str, DomainStats]
    trials: TrialStats | None = None
    ground_truth_ranks: dict[str, int] = field(default_factory=dict)


def ground_truth_rank(pred: VideoPrediction, entry: VideoEntry) -> int:
    """1-based position of the ground truth in the tie-broken ranking."""
    for i, (class_id, _score) in enumerate(pred.ranked):
        if class_id == entry.ground_truth:
            return i + 1
    raise ManifestError(
        f"video {entry.video_id!r}: ground truth {entry.ground_truth!r} "
        "missing from ranking"
    )


def _index_predictions(
    predictions: list[VideoPrediction] | tuple[VideoPrediction, ...],
    manifest: DatasetManifest,
) -> dict[str, VideoPrediction]:
    by_id = {p.video_id: p for p in predictions}
    missing = [v.video_id for v in manifest.videos if v.video_id not in by_id]
    if missing:
        raise ManifestError(f"no prediction for videos: {missing[:5]}" +
                            (" ..." if len(missing) > 5 else ""))
    return by_id


def topk_accuracy(predictions, manifest: DatasetManifest, k: int) -> float:
    """Fraction of videos whose ground truth ranks within the top k."""
    by_id = _index_predictions(predictions, manifest)
    hits = sum(
        1 for v in manifest.videos if ground_truth_rank(by_id[v.video_id], v) <= k
    )
    return hits / len(manifest.videos)


def _topk_map(predictions, manifest: DatasetManifest) -> dict[int, float]:
    by_id = _index_predictions(predictions, manifest)
    ranks = [ground_truth_rank(by_id[v.video_id], v) for v in manifest.videos]
    n = len(ranks)
    return {k: sum(1 for r in ranks if r <= k) / n for k in TOP_K}


def per_domain_breakdown(predictions, manifest: DatasetManifest) -> dict[str, DomainStats]:
    """Top-k per domain; sample counts always sum to the corpus size."""
    by_id = _index_predictions(predictions, manifest)
    grouped: dict[str, list[int]] = {}
    for v in manifest.videos:
        grouped.setdefault(v.domain, []).append(ground_truth_rank(by_id[v.video_id], v))
    out: dict[str, DomainStats] = {}
    for domain in sorted(grouped):
        ranks = grouped[domain]
        n = len(ranks)
        out[domain] = DomainStats(
            samples=n,
            topk={k: sum(1 for r in ranks if r <= k) / n for k in TOP_K},
        )
    return out


def build_report(
    run_config: dict,
    manifest: DatasetManifest,
    trial_predictions: list[list[VideoPrediction]],
    trial_seeds: list[int] | None = None,
) -> EvaluationReport:
    """Aggregate one or more trials into a report.

    A single trial yields exact accuracies. With several trials the headline
    numbers are the across-trial means and a ``trials`` section records each
    seed's accuracies.
    """
    if not trial_predictions:
        raise ManifestError("no predictions to report")
    if trial_seeds is None:
        trial_seeds = list(range(len(trial_predictions)))

    per_trial_topk = [_topk_map(preds, manifest) for preds in trial_predictions]
    per_trial_domain = [per_domain_breakdown(preds, manifest) for preds in trial_predictions]

    if len(trial_predictions) == 1:
        topk = per_trial_topk[0]
        per_domain = per_trial_domain[0]
        trials = None
    else:
        topk = {
            k: float(np.mean([t[k] for t in per_trial_topk])) for k in TOP_K
        }
        per_domain = {}
        for domain in per_trial_domain[0]:
            per_domain[domain] = DomainStats(
                samples=per_trial_domain[0][domain].samples,
                topk={
                    k: float(np.mean([d[domain].topk[k] for d in per_trial_domain]))
                    for k in TOP_K
                },
            )
        trials = TrialStats(
            per_seed=tuple(
                (seed, per_trial_topk[i]) for i, seed in enumerate(trial_seeds)
            ),
            mean=topk,
            std={
                k: float(np.std([t[k] for t in per_trial_topk])) for k in TOP_K
            },
        )

    flat: list[VideoPrediction] = []
    for preds in trial_predictions:
        flat.extend(preds)
    by_id = {v.video_id: v for v in manifest.videos}
    ranks = {}
    for pred in trial_predictions[0]:
        ranks[pred.video_id] = ground_truth_rank(pred, by_id[pred.video_id])

    return EvaluationReport(
        run_config=dict(run_config),
        per_video=tuple(flat),
        topk=topk,
        per_domain=per_domain,
        trials=trials,
        ground_truth_ranks=ranks,
    )


def _prediction_doc(pred: VideoPrediction, manifest: DatasetManifest) -> dict:
    entry = manifest.video(pred.video_id)
    doc = {
        "video_id": pred.video_id,
        "method": pred.method,
        "predicted": pred.predicted,
        "ground_truth": entry.ground_truth,
        "ground_truth_rank": ground_truth_rank(pred, entry),
        "ranked": [[class_id, score] for class_id, score in pred.ranked],
    }
    if pred.trial_seed is not None:
        doc["trial_seed"] = pred.trial_seed
    return doc


def report_to_doc(report: EvaluationReport, manifest: DatasetManifest) -> dict:
    doc: dict = {
        "run_config": report.run_config,
        "num_videos": len(manifest.videos),
        "topk": {str(k): report.topk[k] for k in TOP_K},
        "per_domain": {
            domain: {
                "samples": stats.samples,
                "topk": {str(k): stats.topk[k] for k in TOP_K},
            }
            for domain, stats in report.per_domain.items()
        },
    }
    if report.trials is not None:
        doc["trials"] = {
            "per_seed": [
                {"seed": seed, "topk": {str(k): t[k] for k in TOP_K}}
                for seed, t in report.trials.per_seed
            ],
            "mean": {str(k): report.trials.mean[k] for k in TOP_K},
            "std": {str(k): report.trials.std[k] for k in TOP_K},
        }
    doc["per_video"] = [_prediction_doc(p, manifest) for p in report.per_video]
    return doc


def report_to_json(report: EvaluationReport, manifest: DatasetManifest) -> str:
    return json.dumps(report_to_doc(report, manifest), indent=2) + "\n"


def _pct(x: float) -> str:
    return f"{100.0 * x:6.2f}"


def render_table(report: EvaluationReport, manifest: DatasetManifest) -> str:
    """Fixed-width summary with percentages to two decimals."""
    lines = []
    method = report.run_config.get("method", "?")
    lines.append(f"method={method}  N={len(manifest.videos)}")
    lines.append("        Top-1   Top-2   Top-3")
    lines.append(
        "overall "
        + "  ".join(_pct(report.topk[k]) for k in TOP_K)
    )
    if report.trials is not None:
        lines.append(
            "  std   "
            + "  ".join(_pct(report.trials.std[k]) for k in TOP_K)
        )
    if len(report.per_domain) > 1:
        lines.append("")
        width = max(len(d) for d in report.per_domain)
        width = max(width, len("domain"))
        lines.append(f"{'domain':<{width}}  samples   Top-1   Top-2   Top-3")
        for domain, stats in report.per_domain.items():
            name = manifest.domains.get(domain, domain)
            lines.append(
                f"{name:<{width}}  {stats.samples:7d} "
                + "  ".join(_pct(stats.topk[k]) for k in TOP_K)
            )
    return "\n".join(lines) + "\n"


def render_comparison(labeled_reports: list[tuple[str, EvaluationReport]]) -> str:
    """One row per configuration, for ablation ladders and sweeps."""
    width = max(len(label) for label, _ in labeled_reports)
    width = max(width, len("configuration"))
    lines = [f"{'configuration':<{width}}   Top-1   Top-2   Top-3"]
    for label, report in labeled_reports:
        lines.append(
            f"{label:<{width}} "
            + "  ".join(_pct(report.topk[k]) for k in TOP_K)
        )
    return "\n".join(lines) + "\n"
