"""Command-line entry point.

Subcommands: classify, ablate, sweep-smoothing, export-paths, validate,
report. A JSON config file can seed any run; explicit flags override it.
Exit codes: 0 success, 1 input validation failure, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import re
import sys
from dataclasses import replace
from pathlib import Path

from .affinity import CalibrationParams, load_calibration
from .alignment import DtwConfig
from .classify import METHODS, alignments_for
from .config import RunConfig
from .corpus import (
    DatasetManifest,
    load_manifest,
    load_name_embeddings,
    load_scripts,
)
from .errors import ActAlignError, ConfigError
from .kernels import active_backend
from .pipeline import (
    AblationVariant,
    ablation_grid,
    corpus_seq_provider,
    resolve_workers,
    run_classification,
)
from .reporting import (
    render_comparison,
    render_table,
    report_to_json,
)
from .smoothing import SmoothingConfig, effective_window

log = logging.getLogger("actalign")

_CLI_METHODS = {
    "actalign": "actalign",
    "mean-pool": "mean_pool_name",
    "bag-of-words": "bag_of_words",
    "reversed": "reversed_order",
    "randomized": "randomized_order",
}

_ENDPOINTS = {"anchored": "anchored_end", "open": "open_end"}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON file with RunConfig defaults")
    parser.add_argument("--manifest", help="dataset manifest JSON")
    parser.add_argument("--scripts", help="sub-action scripts JSON")
    parser.add_argument("--names", help="class-name embeddings JSON")
    parser.add_argument("--calibration", help="sigmoid calibration JSON")
    parser.add_argument("--prompt-style", choices=["short-fixed", "context-rich"])
    parser.add_argument("--context-augmented", action="store_true", default=None,
                        help="mark the scripts file as context-augmented")
    parser.add_argument("--smoothing-window", type=int,
                        help="moving-average width in frames (default 30; even widths map to the next odd)")
    parser.add_argument("--no-renormalize", action="store_true", default=None,
                        help="skip unit renormalization after smoothing")
    parser.add_argument("--dtw-endpoint", choices=sorted(_ENDPOINTS))
    parser.add_argument("--tie-break",
                        help="comma-separated predecessor preference, e.g. diagonal,up,left")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int,
                        help="thread-pool size (ACTALIGN_WORKERS env overrides)")


def _build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    if args.manifest is not None:
        cfg.manifest = args.manifest
    if args.scripts is not None:
        cfg.scripts = args.scripts
    if args.names is not None:
        cfg.names = args.names
    if args.calibration is not None:
        cfg.calibration = args.calibration
    if args.prompt_style is not None:
        cfg.prompt_style = args.prompt_style.replace("-", "_")
    if args.context_augmented is not None:
        cfg.context_augmented = args.context_augmented
    if args.smoothing_window is not None:
        cfg.smoothing_window = args.smoothing_window
    if args.no_renormalize is not None:
        cfg.renormalize = not args.no_renormalize
    if args.dtw_endpoint is not None:
        cfg.dtw_endpoint = _ENDPOINTS[args.dtw_endpoint]
    if args.tie_break is not None:
        cfg.tie_break = tuple(p.strip() for p in args.tie_break.split(","))
    if args.seed is not None:
        cfg.seed = args.seed
    if getattr(args, "trials", None) is not None:
        cfg.trials = args.trials
    if args.workers is not None:
        cfg.workers = args.workers
    cfg.workers = resolve_workers(cfg.workers)
    cfg.backend = active_backend()

    if cfg.smoothing_window % 2 == 0:
        mapped = effective_window(cfg.smoothing_window)
        log.warning(
            "smoothing window %d is even; using %d for a symmetric span",
            cfg.smoothing_window, mapped,
        )
        cfg.smoothing_window = mapped
    if not cfg.manifest:
        raise ConfigError("a manifest is required (--manifest or config file)")
    return cfg


def _check_exists(label: str, path: str | None) -> None:
    if path is not None and not Path(path).exists():
        raise ConfigError(f"{label} file does not exist: {path}")


def _load_inputs(cfg: RunConfig, method: str):
    for label, path in (
        ("manifest", cfg.manifest),
        ("scripts", cfg.scripts),
        ("names", cfg.names),
        ("calibration", cfg.calibration),
    ):
        _check_exists(label, path)
    manifest = load_manifest(cfg.manifest)
    scripts = None
    if cfg.scripts:
        scripts = load_scripts(
            cfg.scripts,
            prompt_style=cfg.prompt_style,
            context_augmented=cfg.context_augmented,
        )
    names = load_name_embeddings(cfg.names) if cfg.names else None
    if cfg.calibration:
        cal = load_calibration(cfg.calibration)
    else:
        cal = CalibrationParams()
        if method not in ("mean_pool_name", "mean_pool_context", "bag_of_words"):
            log.warning(
                "no calibration file given; using uncalibrated defaults "
                "alpha=%g beta=%g (rankings are unaffected)", cal.alpha, cal.beta,
            )
    return manifest, scripts, names, cal


def _smoothing_from(cfg: RunConfig) -> SmoothingConfig:
    return SmoothingConfig(window=cfg.smoothing_window, renormalize=cfg.renormalize)


def _dtw_from(cfg: RunConfig) -> DtwConfig:
    return DtwConfig(endpoint=cfg.dtw_endpoint, tie_break=tuple(cfg.tie_break))


def _write_report(report, manifest: DatasetManifest, out: str | None, table: bool) -> None:
    text = report_to_json(report, manifest)
    if out:
        Path(out).write_text(text)
        log.info("wrote %s", out)
    if table or not out:
        sys.stdout.write(render_table(report, manifest))


def cmd_classify(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    if args.method is not None:
        method = _CLI_METHODS[args.method]
        if method == "mean_pool_name" and args.context_names:
            method = "mean_pool_context"
    else:
        method = cfg.method
        if method not in METHODS:
            raise ConfigError(f"config file names unknown method {method!r}")
    cfg.method = method
    if method == "randomized_order" and args.trials is None and cfg.trials == 1:
        cfg.trials = 5
        log.info("randomized method defaults to 5 trials (seeds %d..%d)",
                 cfg.seed, cfg.seed + 4)
    manifest, scripts, names, cal = _load_inputs(cfg, method)
    report = run_classification(
        manifest,
        corpus_seq_provider(manifest),
        method=method,
        scripts=scripts,
        names=names,
        cal=cal,
        smoothing=_smoothing_from(cfg),
        dtw=_dtw_from(cfg),
        seed=cfg.seed,
        trials=cfg.trials,
        workers=cfg.workers,
        run_config=cfg.to_dict(),
    )
    _write_report(report, manifest, args.out, args.table)
    return 0


def cmd_ablate(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    if not (args.scripts_plain and args.scripts_context and cfg.names):
        raise ConfigError(
            "ablate needs --scripts-plain, --scripts-context, and --names"
        )
    _check_exists("scripts-plain", args.scripts_plain)
    _check_exists("scripts-context", args.scripts_context)
    cfg.scripts = args.scripts_context
    cfg.context_augmented = True
    manifest, scripts_context, names, cal = _load_inputs(cfg, "actalign")
    scripts_plain = load_scripts(
        args.scripts_plain, prompt_style=cfg.prompt_style, context_augmented=False
    )

    no_smooth = SmoothingConfig(window=1, renormalize=cfg.renormalize)
    smooth_cfg = _smoothing_from(cfg)
    dtw_cfg = _dtw_from(cfg)
    open_cfg = replace(dtw_cfg, endpoint="open_end")
    anchored_cfg = replace(dtw_cfg, endpoint="anchored_end")
    variants = [
        AblationVariant("mean-pool", "mean_pool_name", names=names),
        AblationVariant("+ dtw alignment", "actalign",
                        scripts=scripts_plain, smoothing=no_smooth, dtw=anchored_cfg),
        AblationVariant("+ context augmentation", "actalign",
                        scripts=scripts_context, smoothing=no_smooth, dtw=anchored_cfg),
        AblationVariant("+ signal smoothing", "actalign",
                        scripts=scripts_context, smoothing=smooth_cfg, dtw=anchored_cfg),
        AblationVariant("full, open-end dtw", "actalign",
                        scripts=scripts_context, smoothing=smooth_cfg, dtw=open_cfg),
    ]
    results = ablation_grid(
        manifest, corpus_seq_provider(manifest), variants,
        cal=cal, base_config=cfg, seed=cfg.seed, workers=cfg.workers,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, (label, report) in enumerate(results):
        slug = re.sub(r"[^a-z0-9]+", "-", label.lower()).strip("-")
        (out_dir / f"ablation_{i}_{slug}.json").write_text(
            report_to_json(report, manifest)
        )
    table = render_comparison(results)
    (out_dir / "ablation_table.txt").write_text(table)
    sys.stdout.write(table)
    return 0


def cmd_sweep_smoothing(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    cfg.method = "actalign"
    manifest, scripts, _names, cal = _load_inputs(cfg, "actalign")
    if scripts is None:
        raise ConfigError("sweep-smoothing needs --scripts")
    requested = [int(w.strip()) for w in args.windows.split(",") if w.strip()]
    if not requested:
        raise ConfigError("--windows must list at least one width")

    rows = []
    labeled = []
    for req in requested:
        eff = effective_window(req)
        if eff != req:
            log.warning("window %d is even; sweeping %d instead", req, eff)
        smoothing = SmoothingConfig(window=eff, renormalize=cfg.renormalize)
        run_cfg = replace(cfg, smoothing_window=eff)
        report = run_classification(
            manifest, corpus_seq_provider(manifest),
            method="actalign", scripts=scripts, cal=cal,
            smoothing=smoothing, dtw=_dtw_from(cfg),
            seed=cfg.seed, workers=cfg.workers,
            run_config=run_cfg.to_dict(),
        )
        rows.append((req, eff, report.topk[1], report.topk[2], report.topk[3]))
        labeled.append((f"w={eff} (requested {req})", report))

    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["requested_window", "effective_window", "top1", "top2", "top3"])
        for req, eff, t1, t2, t3 in rows:
            writer.writerow([req, eff, f"{100 * t1:.2f}", f"{100 * t2:.2f}", f"{100 * t3:.2f}"])
    log.info("wrote %s", args.out)
    sys.stdout.write(render_comparison(labeled))
    return 0


def _safe_filename(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name)


def cmd_export_paths(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    manifest, scripts, _names, cal = _load_inputs(cfg, "actalign")
    if scripts is None:
        raise ConfigError("export-paths needs --scripts")
    entry = manifest.video(args.video_id)
    seq = corpus_seq_provider(manifest)(entry)
    results = alignments_for(
        entry, seq, scripts, cal, _smoothing_from(cfg), _dtw_from(cfg)
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for class_id in entry.candidates:
        doc = results[class_id].to_export_dict(entry.video_id, class_id)
        name = f"{_safe_filename(entry.video_id)}__{_safe_filename(class_id)}.json"
        (out_dir / name).write_text(json.dumps(doc, indent=2) + "\n")
    log.info("wrote %d path files to %s", len(entry.candidates), out_dir)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    problems: list[str] = []
    manifest = None
    try:
        manifest = load_manifest(cfg.manifest)
        from .corpus import mean_candidates

        print(f"manifest ok: {len(manifest)} videos, {len(manifest.domains)} domains, "
              f"mean candidates/video {mean_candidates(manifest):.2f}")
    except ActAlignError as exc:
        problems.append(str(exc))

    dims: dict[int, str] = {}
    if manifest is not None:
        from .corpus import load_embeddings

        for entry in manifest.videos:
            path = manifest.embedding_path(entry)
            try:
                seq = load_embeddings(path, entry.frame_count, video_id=entry.video_id)
                dims.setdefault(seq.dim, str(path))
            except ActAlignError as exc:
                problems.append(str(exc))

    scripts = None
    if cfg.scripts:
        try:
            scripts = load_scripts(cfg.scripts, prompt_style=cfg.prompt_style,
                                   context_augmented=cfg.context_augmented)
            print(f"scripts ok: {len(scripts)} classes")
            for script in scripts.values():
                if script.embeddings is not None:
                    dims.setdefault(script.dim, f"script {script.class_id!r}")
        except ActAlignError as exc:
            problems.append(str(exc))
    if manifest is not None and scripts is not None:
        for entry in manifest.videos:
            missing = [c for c in entry.candidates if c not in scripts]
            if missing:
                problems.append(
                    f"video {entry.video_id!r}: candidates without scripts: {missing}"
                )
    if cfg.names:
        try:
            names = load_name_embeddings(cfg.names)
            print(f"names ok: {len(names)} classes")
        except ActAlignError as exc:
            problems.append(str(exc))
    if cfg.calibration:
        try:
            cal = load_calibration(cfg.calibration)
            print(f"calibration ok: alpha={cal.alpha:g} beta={cal.beta:g}")
        except ActAlignError as exc:
            problems.append(str(exc))

    if len(dims) > 1:
        listing = ", ".join(f"d={d} ({src})" for d, src in sorted(dims.items()))
        problems.append(f"inconsistent embedding widths across files: {listing}")

    for issue in problems:
        print(f"INVALID: {issue}", file=sys.stderr)
    return 1 if problems else 0


def cmd_report(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    try:
        doc = json.loads(Path(args.report).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read report {args.report}: {exc}") from exc
    have = {p.get("video_id") for p in doc.get("per_video", [])}
    missing = [v.video_id for v in manifest.videos if v.video_id not in have]
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
    if args.table:
        topk = doc.get("topk", {})
        print("        Top-1   Top-2   Top-3")
        print("overall " + "  ".join(f"{100 * float(topk.get(str(k), 0)):6.2f}" for k in (1, 2, 3)))
    if missing:
        print(f"INVALID: report lacks predictions for {len(missing)} videos, "
              f"e.g. {missing[:3]}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="actalign",
        description="Sequence-alignment video classification from precomputed embeddings",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify every video and write a report")
    _add_common(p)
    p.add_argument("--method", choices=sorted(_CLI_METHODS),
                   help="scoring method (default actalign, or the config file's)")
    p.add_argument("--context-names", action="store_true",
                   help="treat --names as context-augmented (mean-pool baseline variant)")
    p.add_argument("--trials", type=int,
                   help="trials for the randomized method (default 5, seeds seed..seed+4)")
    p.add_argument("--out", help="report JSON output path")
    p.add_argument("--table", action="store_true", help="print the summary table")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("ablate", help="run the design ablation ladder")
    _add_common(p)
    p.add_argument("--scripts-plain", help="scripts without context augmentation")
    p.add_argument("--scripts-context", help="context-augmented scripts")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("sweep-smoothing", help="classify across smoothing windows")
    _add_common(p)
    p.add_argument("--windows", default="10,20,30,50",
                   help="comma-separated widths (even widths map to next odd)")
    p.add_argument("--out", required=True, help="CSV output path")
    p.set_defaults(func=cmd_sweep_smoothing)

    p = sub.add_parser("export-paths", help="export per-candidate alignment paths")
    _add_common(p)
    p.add_argument("--video-id", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_export_paths)

    p = sub.add_parser("validate", help="check every referenced input file")
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("report", help="re-render a report and check completeness")
    p.add_argument("--report", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out")
    p.add_argument("--table", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ActAlignError as exc:
        print(f"INVALID: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure, distinct from bad inputs
        print(f"ERROR: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
