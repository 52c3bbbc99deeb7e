"""Extractor command line: frames, texts, names, prompts, calibration."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .encoders import CalibrationUnavailable, make_encoder
from .jobs import (
    embed_names,
    embed_scripts,
    emit_prompts,
    export_calibration,
    extract_frames,
    load_job,
    load_prompt_groups,
)

log = logging.getLogger("actalign-extract")


def _add_encoder_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--encoder", default="hash",
        help="'hash', 'hash-nocal', or an HF checkpoint id "
             "(e.g. google/siglip-so400m-patch14-384)",
    )
    parser.add_argument("--dim", type=int, default=64,
                        help="embedding width for the hash encoder")


def cmd_frames(args: argparse.Namespace) -> int:
    job = load_job(args.clips, args.out_dir, sampling_policy=args.policy)
    encoder = make_encoder(args.encoder, dim=args.dim)
    manifest = extract_frames(job, encoder)
    log.info("wrote %s (%d clips)", manifest, len(job.clips))
    return 0


def cmd_texts(args: argparse.Namespace) -> int:
    doc = json.loads(Path(args.texts).read_text())
    encoder = make_encoder(args.encoder, dim=args.dim)
    path = embed_scripts(
        doc, Path(args.out_dir), encoder,
        context_augmented=args.context_augmented,
        file_name=args.file_name,
    )
    log.info("wrote %s (%d classes)", path, len(doc))
    return 0


def cmd_names(args: argparse.Namespace) -> int:
    doc = json.loads(Path(args.names).read_text())
    encoder = make_encoder(args.encoder, dim=args.dim)
    path = embed_names(
        doc, Path(args.out_dir), encoder,
        context_augmented=args.context_augmented,
        file_name=args.file_name,
    )
    log.info("wrote %s (%d classes)", path, len(doc))
    return 0


def cmd_prompts(args: argparse.Namespace) -> int:
    groups = load_prompt_groups(args.groups)
    style = args.style.replace("-", "_")
    written = emit_prompts(groups, style, Path(args.out_dir))
    log.info("wrote %d prompt files to %s", len(written), args.out_dir)
    return 0


def cmd_calibration(args: argparse.Namespace) -> int:
    encoder = make_encoder(args.encoder, dim=args.dim)
    path = export_calibration(encoder, Path(args.out))
    log.info("wrote %s", path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="actalign-extract",
        description="Produce the tensors, manifests, scripts, prompts, and "
                    "calibration files the alignment engine consumes",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("frames", help="encode sampled video frames per clip")
    p.add_argument("--clips", required=True,
                   help="JSON clip list (video_id, source, domain, candidates, ground_truth)")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--policy", default="native", help="native | stride:N | fps:X")
    _add_encoder_args(p)
    p.set_defaults(func=cmd_frames)

    p = sub.add_parser("texts", help="embed sub-action scripts")
    p.add_argument("--texts", required=True,
                   help="JSON: {class_id: {domain, texts: [...]}}")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--context-augmented", action="store_true")
    p.add_argument("--file-name", default="scripts.json")
    _add_encoder_args(p)
    p.set_defaults(func=cmd_texts)

    p = sub.add_parser("names", help="embed bare class names")
    p.add_argument("--names", required=True,
                   help="JSON: {class_id: {domain, text?}}")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--context-augmented", action="store_true")
    p.add_argument("--file-name", default="names.json")
    _add_encoder_args(p)
    p.set_defaults(func=cmd_names)

    p = sub.add_parser("prompts", help="emit filled LLM prompt files")
    p.add_argument("--groups", required=True,
                   help="JSON: [{group_id, domain?, actions: [{name, description?}]}]")
    p.add_argument("--style", choices=["short-fixed", "context-rich"],
                   default="context-rich")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_prompts)

    p = sub.add_parser("calibration", help="export the encoder's sigmoid scale/bias")
    p.add_argument("--out", required=True)
    _add_encoder_args(p)
    p.set_defaults(func=cmd_calibration)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except CalibrationUnavailable as exc:
        print(f"INVALID: {exc} (the engine will fall back to its defaults "
              "with a warning)", file=sys.stderr)
        return 1
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"INVALID: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
