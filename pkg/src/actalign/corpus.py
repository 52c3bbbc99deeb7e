"""Corpus loading: dataset manifest, sub-action scripts, and embedding tensors.

This module is the only place where files are read or written. Everything it
returns is validated and immutable, so loaded objects can be shared freely
across worker threads.

Tensor file layout (little-endian, the contract shared with the extractor):

    magic   4 bytes  b"AALN"
    version u32      1
    rows    u32
    cols    u32
    dtype   u8       0 = 32-bit float
    payload rows*cols little-endian float32, row-major

Manifest and script files are plain JSON; ``embedding_file`` entries are
resolved relative to the directory of the JSON document that names them.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ManifestError, ScriptError, TensorError

TENSOR_MAGIC = b"AALN"
TENSOR_VERSION = 1
DTYPE_FLOAT32 = 0

_HEADER = struct.Struct("<4sIIIB")

# Rows whose L2 norm is already this close to 1 are kept bit-for-bit, which
# makes load-after-write reproduce a loaded matrix exactly.
_NORM_SKIP_TOL = 4e-6

PROMPT_STYLES = ("short_fixed", "context_rich")


@dataclass(frozen=True)
class EmbeddingSequence:
    """T x d matrix of frame embeddings for one video, one row per frame.

    Rows are unit L2 norm after loading. ``zero_rows`` lists row indices that
    were zeroed out by later processing (smoothing can produce them); loaders
    never emit any.
    """

    video_id: str
    frames: np.ndarray
    zero_rows: tuple[int, ...] = ()

    @property
    def length(self) -> int:
        return self.frames.shape[0]

    @property
    def dim(self) -> int:
        return self.frames.shape[1]


@dataclass(frozen=True)
class SubActionScript:
    """Ordered sub-action texts for one class, plus their embeddings.

    ``embeddings`` is a K x d unit-norm matrix aligned with ``texts``; it is
    None for script files that carry texts only (not yet embedded).
    """

    class_id: str
    domain: str
    texts: tuple[str, ...]
    embeddings: np.ndarray | None
    prompt_style: str = "context_rich"
    context_augmented: bool = False

    @property
    def steps(self) -> int:
        return len(self.texts)

    @property
    def dim(self) -> int:
        if self.embeddings is None:
            raise ScriptError(f"script {self.class_id!r} has no embeddings")
        return self.embeddings.shape[1]


@dataclass(frozen=True)
class ClassNameEmbedding:
    """Unit-norm embedding of a bare class name, for the mean-pool baseline."""

    class_id: str
    domain: str
    text: str
    embedding: np.ndarray


@dataclass(frozen=True)
class VideoEntry:
    video_id: str
    domain: str
    frame_count: int
    candidates: tuple[str, ...]
    ground_truth: str
    embedding_file: str


@dataclass(frozen=True)
class DatasetManifest:
    videos: tuple[VideoEntry, ...]
    domains: dict[str, str] = field(default_factory=dict)
    base_dir: Path = Path(".")

    def __len__(self) -> int:
        return len(self.videos)

    def video(self, video_id: str) -> VideoEntry:
        for entry in self.videos:
            if entry.video_id == video_id:
                return entry
        raise ManifestError(f"unknown video id {video_id!r}")

    def embedding_path(self, entry: VideoEntry) -> Path:
        return self.base_dir / entry.embedding_file


def read_tensor(path: str | Path) -> np.ndarray:
    """Read a tensor file and return its raw float32 payload as rows x cols."""
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise TensorError(f"cannot read tensor file {path}: {exc}") from exc
    if len(blob) < _HEADER.size:
        raise TensorError(f"{path}: truncated header ({len(blob)} bytes)")
    magic, version, rows, cols, dtype = _HEADER.unpack_from(blob)
    if magic != TENSOR_MAGIC:
        raise TensorError(f"{path}: bad magic {magic!r}, expected {TENSOR_MAGIC!r}")
    if version != TENSOR_VERSION:
        raise TensorError(f"{path}: unsupported version {version}")
    if dtype != DTYPE_FLOAT32:
        raise TensorError(f"{path}: unsupported dtype code {dtype}")
    expected = _HEADER.size + rows * cols * 4
    if len(blob) != expected:
        raise TensorError(
            f"{path}: payload size mismatch, header says {rows}x{cols} "
            f"({expected} bytes total) but file has {len(blob)} bytes"
        )
    data = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size)
    return data.reshape(rows, cols)


def write_tensor(path: str | Path, matrix: np.ndarray) -> None:
    """Write a 2-D array as a float32 tensor file."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise TensorError(f"tensor must be 2-D, got shape {matrix.shape}")
    rows, cols = matrix.shape
    payload = np.ascontiguousarray(matrix, dtype="<f4")
    header = _HEADER.pack(TENSOR_MAGIC, TENSOR_VERSION, rows, cols, DTYPE_FLOAT32)
    Path(path).write_bytes(header + payload.tobytes())


def _normalize_rows(data: np.ndarray, *, context: str) -> np.ndarray:
    """Unit-normalize rows, quantized to the float32 grid.

    Rows already unit within ``_NORM_SKIP_TOL`` pass through untouched, so
    reloading a file this module wrote is bit-exact.
    """
    values = np.asarray(data, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        bad = int(np.argwhere(~np.isfinite(values).all(axis=1))[0][0])
        raise TensorError(f"{context}: non-finite values in row {bad}")
    norms = np.linalg.norm(values, axis=1)
    if np.any(norms == 0.0):
        bad = int(np.argmin(norms))
        raise TensorError(f"{context}: row {bad} has zero norm, cannot normalize")
    needs = np.abs(norms - 1.0) > _NORM_SKIP_TOL
    if np.any(needs):
        values = values.copy()
        values[needs] /= norms[needs, None]
        values[needs] = values[needs].astype(np.float32)
    return values


def load_embeddings(
    path: str | Path,
    expected_rows: int,
    expected_dim: int | None = None,
    video_id: str = "",
) -> EmbeddingSequence:
    """Load one video's frame embeddings; rows come back unit-normalized.

    ``expected_dim`` None trusts the file header's width (cross-file
    agreement is still enforced where embeddings meet, in build_affinity).
    """
    path = Path(path)
    raw = read_tensor(path)
    rows, cols = raw.shape
    if rows != expected_rows or (expected_dim is not None and cols != expected_dim):
        raise TensorError(
            f"{path}: shape mismatch, file is {rows}x{cols} but "
            f"{expected_rows}x{expected_dim or cols} was expected"
        )
    frames = _normalize_rows(raw, context=str(path))
    return EmbeddingSequence(video_id=video_id or path.stem, frames=frames)


def write_embeddings(path: str | Path, seq: EmbeddingSequence) -> None:
    write_tensor(path, seq.frames)


def _require(obj: dict, key: str, context: str):
    if key not in obj:
        raise ManifestError(f"{context}: missing field {key!r}")
    return obj[key]


def load_manifest(path: str | Path) -> DatasetManifest:
    """Load and validate the dataset manifest.

    Raises ManifestError for a parse failure, a duplicate video id, or a
    ground truth absent from its own candidate list, naming the offending
    video and field.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ManifestError(f"manifest {path}: top level must be an object")

    raw_videos = _require(doc, "videos", f"manifest {path}")
    domains = doc.get("domains", {})
    if not isinstance(raw_videos, list):
        raise ManifestError(f"manifest {path}: 'videos' must be a list")
    if not isinstance(domains, dict):
        raise ManifestError(f"manifest {path}: 'domains' must be an object")

    videos = []
    seen: set[str] = set()
    for i, item in enumerate(raw_videos):
        where = f"manifest {path}, videos[{i}]"
        if not isinstance(item, dict):
            raise ManifestError(f"{where}: entry must be an object")
        video_id = str(_require(item, "video_id", where))
        where = f"manifest {path}, video {video_id!r}"
        if video_id in seen:
            raise ManifestError(f"{where}: duplicate video_id")
        seen.add(video_id)

        frame_count = _require(item, "frame_count", where)
        if not isinstance(frame_count, int) or frame_count < 1:
            raise ManifestError(f"{where}: frame_count must be a positive integer")
        candidates = _require(item, "candidates", where)
        if not isinstance(candidates, list) or len(candidates) < 2:
            raise ManifestError(f"{where}: candidates must list at least 2 class ids")
        candidates = tuple(str(c) for c in candidates)
        if len(set(candidates)) != len(candidates):
            raise ManifestError(f"{where}: candidates contains duplicates")
        ground_truth = str(_require(item, "ground_truth", where))
        if ground_truth not in candidates:
            raise ManifestError(
                f"{where}: ground_truth {ground_truth!r} not in candidates"
            )
        videos.append(
            VideoEntry(
                video_id=video_id,
                domain=str(_require(item, "domain", where)),
                frame_count=frame_count,
                candidates=candidates,
                ground_truth=ground_truth,
                embedding_file=str(_require(item, "embedding_file", where)),
            )
        )
    return DatasetManifest(
        videos=tuple(videos),
        domains={str(k): str(v) for k, v in domains.items()},
        base_dir=path.parent,
    )


def _load_script_entry(
    item: dict,
    base_dir: Path,
    context: str,
    load_embedding_rows: bool,
) -> tuple[tuple[str, ...], str, np.ndarray | None]:
    if not isinstance(item, dict):
        raise ScriptError(f"{context}: entry must be an object")
    texts = _require_script(item, "texts", context)
    if not isinstance(texts, list) or len(texts) == 0:
        raise ScriptError(f"{context}: texts must be a non-empty list")
    texts = tuple(str(t) for t in texts)
    domain = str(item.get("domain", ""))
    embeddings = None
    if load_embedding_rows and item.get("embedding_file"):
        tensor_path = base_dir / str(item["embedding_file"])
        raw = read_tensor(tensor_path)
        if raw.shape[0] != len(texts):
            raise ScriptError(
                f"{context}: {len(texts)} texts but embedding file "
                f"{tensor_path} has {raw.shape[0]} rows"
            )
        embeddings = _normalize_rows(raw, context=str(tensor_path))
    return texts, domain, embeddings


def _require_script(obj: dict, key: str, context: str):
    if key not in obj:
        raise ScriptError(f"{context}: missing field {key!r}")
    return obj[key]


def load_scripts(
    path: str | Path,
    prompt_style: str = "context_rich",
    context_augmented: bool = False,
    load_embedding_rows: bool = True,
) -> dict[str, SubActionScript]:
    """Load a scripts file: a JSON map from class id to texts + embeddings.

    Text order is preserved exactly. ``prompt_style`` and
    ``context_augmented`` tag the whole file (one document per style).
    """
    path = Path(path)
    if prompt_style not in PROMPT_STYLES:
        raise ScriptError(f"unknown prompt style {prompt_style!r}")
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ScriptError(f"cannot read scripts file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScriptError(f"scripts file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScriptError(f"scripts file {path}: top level must be an object")

    scripts: dict[str, SubActionScript] = {}
    for class_id, item in doc.items():
        context = f"scripts file {path}, class {class_id!r}"
        texts, domain, embeddings = _load_script_entry(
            item, path.parent, context, load_embedding_rows
        )
        scripts[class_id] = SubActionScript(
            class_id=class_id,
            domain=domain,
            texts=texts,
            embeddings=embeddings,
            prompt_style=prompt_style,
            context_augmented=context_augmented,
        )
    return scripts


def load_name_embeddings(path: str | Path) -> dict[str, ClassNameEmbedding]:
    """Load class-name embeddings from a scripts-shaped file with one text
    per class."""
    scripts = load_scripts(path, load_embedding_rows=True)
    names: dict[str, ClassNameEmbedding] = {}
    for class_id, script in scripts.items():
        if script.steps != 1:
            raise ScriptError(
                f"name-embedding file {path}, class {class_id!r}: expected "
                f"exactly one text, found {script.steps}"
            )
        if script.embeddings is None:
            raise ScriptError(
                f"name-embedding file {path}, class {class_id!r}: missing "
                "embedding_file"
            )
        names[class_id] = ClassNameEmbedding(
            class_id=class_id,
            domain=script.domain,
            text=script.texts[0],
            embedding=script.embeddings[0],
        )
    return names


def with_frames(seq: EmbeddingSequence, frames: np.ndarray,
                zero_rows: tuple[int, ...] = ()) -> EmbeddingSequence:
    """Copy of ``seq`` with new frame data (same video id)."""
    return replace(seq, frames=frames, zero_rows=zero_rows)


def mean_candidates(manifest: DatasetManifest) -> float:
    if not manifest.videos:
        return math.nan
    return float(np.mean([len(v.candidates) for v in manifest.videos]))
