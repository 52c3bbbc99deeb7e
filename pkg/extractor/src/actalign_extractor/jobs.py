"""Extraction jobs: turn clips and texts into the tensor + JSON inputs the
alignment engine consumes.

Outputs land in one directory:

    tensors/video_<id>.aaln      frame embeddings, one unit row per frame
    tensors/script_<class>.aaln  sub-action embeddings, one row per step
    tensors/name_<class>.aaln    single-row class-name embedding
    manifest.json                video entries + domains + extraction metadata
    scripts.json / names.json    class maps pointing at the tensors
    calibration.json             encoder's sigmoid scale/bias

Tensor writes are atomic, and every emitted embedding row is unit norm, so
the engine can load results mid-extraction without ever seeing a partial or
denormalized file.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .encoders import Encoder
from .frames import load_clip, parse_policy
from .prompts import (
    PromptGroup,
    augment_name,
    augment_sub_action,
    build_prompt,
)
from .tensorfile import write_tensor


@dataclass(frozen=True)
class ClipSpec:
    video_id: str
    source: str
    domain: str
    candidates: tuple[str, ...]
    ground_truth: str
    start: float | None = None
    end: float | None = None


@dataclass(frozen=True)
class ExtractionJob:
    clips: tuple[ClipSpec, ...]
    out_dir: Path
    sampling_policy: str = "native"
    prompt_style: str = "context_rich"
    domains: dict[str, str] = field(default_factory=dict)


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name)


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2) + "\n")


def load_job(path: str | Path, out_dir: str | Path,
             sampling_policy: str = "native") -> ExtractionJob:
    """Read a clip list: [{"video_id", "source", "domain", "candidates",
    "ground_truth", "start"?, "end"?}, ...] with optional {"domains": {...}}
    wrapping."""
    path = Path(path)
    doc = json.loads(path.read_text())
    if isinstance(doc, dict):
        raw_clips = doc["clips"]
        domains = doc.get("domains", {})
    else:
        raw_clips = doc
        domains = {}
    clips = []
    for item in raw_clips:
        source = Path(item["source"])
        if not source.is_absolute():
            source = path.parent / source
        clips.append(ClipSpec(
            video_id=str(item["video_id"]),
            source=str(source),
            domain=str(item.get("domain", "")),
            candidates=tuple(str(c) for c in item["candidates"]),
            ground_truth=str(item["ground_truth"]),
            start=item.get("start"),
            end=item.get("end"),
        ))
    parse_policy(sampling_policy)
    return ExtractionJob(
        clips=tuple(clips),
        out_dir=Path(out_dir),
        sampling_policy=sampling_policy,
        domains={str(k): str(v) for k, v in domains.items()},
    )


def extract_frames(job: ExtractionJob, encoder: Encoder) -> Path:
    """Encode every clip's sampled frames and write the manifest.

    Returns the manifest path. Frame order follows decode order; rows are
    unit norm; the sampling policy and encoder id are recorded under the
    manifest's "extraction" key.
    """
    if not job.clips:
        raise ValueError("extraction job has no clips")
    tensors = job.out_dir / "tensors"
    tensors.mkdir(parents=True, exist_ok=True)

    videos = []
    domains = dict(job.domains)
    for clip in job.clips:
        images = load_clip(clip.source, job.sampling_policy, clip.start, clip.end)
        rows = encoder.encode_images(images)
        fname = f"video_{_slug(clip.video_id)}.aaln"
        write_tensor(tensors / fname, rows)
        domains.setdefault(clip.domain, clip.domain)
        videos.append({
            "video_id": clip.video_id,
            "domain": clip.domain,
            "frame_count": int(rows.shape[0]),
            "candidates": list(clip.candidates),
            "ground_truth": clip.ground_truth,
            "embedding_file": f"tensors/{fname}",
        })

    manifest_path = job.out_dir / "manifest.json"
    _write_json(manifest_path, {
        "videos": videos,
        "domains": domains,
        "extraction": {
            "encoder": encoder.name,
            "embedding_dim": encoder.dim,
            "sampling_policy": job.sampling_policy,
        },
    })
    return manifest_path


def embed_scripts(
    texts_doc: dict,
    out_dir: Path,
    encoder: Encoder,
    context_augmented: bool = False,
    file_name: str = "scripts.json",
) -> Path:
    """Embed sub-action texts: {class_id: {"domain", "texts": [...]}}.

    With context augmentation each step is wrapped in the domain-bearing
    sentence template before encoding; the emitted texts stay the original
    step descriptions (the augmentation affects the embedding input only).
    """
    if not texts_doc:
        raise ValueError("no classes to embed")
    tensors = out_dir / "tensors"
    tensors.mkdir(parents=True, exist_ok=True)

    scripts = {}
    for class_id, item in texts_doc.items():
        texts = [str(t) for t in item["texts"]]
        if not texts:
            raise ValueError(f"class {class_id!r} has an empty sub-action list")
        domain = str(item.get("domain", ""))
        inputs = texts
        if context_augmented:
            inputs = [augment_sub_action(class_id, domain, t) for t in texts]
        rows = encoder.encode_texts(inputs)
        fname = f"script_{_slug(class_id)}.aaln"
        write_tensor(tensors / fname, rows)
        scripts[class_id] = {
            "domain": domain,
            "texts": texts,
            "embedding_file": f"tensors/{fname}",
        }

    path = out_dir / file_name
    _write_json(path, scripts)
    return path


def embed_names(
    names_doc: dict,
    out_dir: Path,
    encoder: Encoder,
    context_augmented: bool = False,
    file_name: str = "names.json",
) -> Path:
    """Embed bare class names: {class_id: {"domain", "text"?}}. The text
    defaults to the class id; context augmentation appends the domain."""
    if not names_doc:
        raise ValueError("no class names to embed")
    tensors = out_dir / "tensors"
    tensors.mkdir(parents=True, exist_ok=True)

    names = {}
    for class_id, item in names_doc.items():
        domain = str(item.get("domain", ""))
        text = str(item.get("text", class_id))
        encode_input = augment_name(text, domain) if context_augmented else text
        rows = encoder.encode_texts([encode_input])
        fname = f"name_{_slug(class_id)}.aaln"
        write_tensor(tensors / fname, rows)
        names[class_id] = {
            "domain": domain,
            "texts": [text],
            "embedding_file": f"tensors/{fname}",
        }

    path = out_dir / file_name
    _write_json(path, names)
    return path


def export_calibration(encoder: Encoder, out_path: Path) -> Path:
    """Write the encoder's pretrained sigmoid scale/bias for the engine."""
    alpha, beta = encoder.calibration()
    _write_json(out_path, {"alpha": alpha, "beta": beta, "source": encoder.name})
    return out_path


def emit_prompts(groups: list[PromptGroup], style: str, out_dir: Path) -> list[Path]:
    """Write one filled prompt file per candidate group."""
    if not groups:
        raise ValueError("no candidate groups to prompt for")
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for group in groups:
        text = build_prompt(group.actions, style)
        path = out_dir / f"prompt_{_slug(group.group_id)}_{style}.txt"
        path.write_text(text)
        written.append(path)
    return written


def load_prompt_groups(path: str | Path) -> list[PromptGroup]:
    """Read [{"group_id", "domain"?, "actions": [{"name", "description"?,
    "domain"?}, ...]}, ...]."""
    from .prompts import CandidateAction

    doc = json.loads(Path(path).read_text())
    groups = []
    for item in doc:
        default_domain = str(item.get("domain", ""))
        actions = tuple(
            CandidateAction(
                name=str(a["name"]),
                domain=str(a.get("domain", default_domain)),
                description=str(a.get("description", "")),
            )
            for a in item.get("actions", [])
        )
        groups.append(PromptGroup(group_id=str(item["group_id"]), actions=actions))
    return groups
