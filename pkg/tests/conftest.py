from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from actalign.corpus import EmbeddingSequence, write_tensor

DIM = 8


def unit_rows(rng: np.random.Generator, n: int, dim: int = DIM) -> np.ndarray:
    rows = rng.normal(size=(n, dim))
    rows /= np.linalg.norm(rows, axis=1, keepdims=True)
    return rows.astype(np.float32).astype(np.float64)


def make_sequence(rng: np.random.Generator, n: int, dim: int = DIM,
                  video_id: str = "vid") -> EmbeddingSequence:
    return EmbeddingSequence(video_id=video_id, frames=unit_rows(rng, n, dim))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)


def build_fixture_corpus(root: Path, dim: int = DIM) -> dict[str, Path]:
    """Write a tiny but complete corpus: 3 videos, 4 classes, 2 domains.

    video v1's frames repeat class_a's script vectors, so the alignment
    method should rank class_a first for it.
    """
    rng = np.random.default_rng(1234)
    root.mkdir(parents=True, exist_ok=True)
    tensors = root / "tensors"
    tensors.mkdir(exist_ok=True)

    script_rows = {
        "class_a": unit_rows(rng, 3, dim),
        "class_b": unit_rows(rng, 2, dim),
        "class_c": unit_rows(rng, 4, dim),
        "class_d": unit_rows(rng, 1, dim),
    }
    domains = {"class_a": "sport_a", "class_b": "sport_a",
               "class_c": "sport_b", "class_d": "sport_b"}
    scripts_doc = {}
    for class_id, rows in script_rows.items():
        fname = f"script_{class_id}.aaln"
        write_tensor(tensors / fname, rows)
        scripts_doc[class_id] = {
            "domain": domains[class_id],
            "texts": [f"{class_id} step {i}" for i in range(rows.shape[0])],
            "embedding_file": f"tensors/{fname}",
        }
    scripts_path = root / "scripts.json"
    scripts_path.write_text(json.dumps(scripts_doc, indent=2))

    names_doc = {}
    for class_id, rows in script_rows.items():
        fname = f"name_{class_id}.aaln"
        write_tensor(tensors / fname, unit_rows(rng, 1, dim))
        names_doc[class_id] = {
            "domain": domains[class_id],
            "texts": [class_id.replace("_", " ")],
            "embedding_file": f"tensors/{fname}",
        }
    names_path = root / "names.json"
    names_path.write_text(json.dumps(names_doc, indent=2))

    v1 = np.vstack([script_rows["class_a"][i % 3] for i in range(12)])
    videos_rows = {
        "v1": v1,
        "v2": unit_rows(rng, 9, dim),
        "v3": unit_rows(rng, 15, dim),
    }
    manifest_videos = []
    meta = {
        "v1": ("sport_a", ["class_a", "class_b"], "class_a"),
        "v2": ("sport_b", ["class_b", "class_c", "class_d"], "class_c"),
        "v3": ("sport_b", ["class_a", "class_d"], "class_d"),
    }
    for video_id, rows in videos_rows.items():
        fname = f"video_{video_id}.aaln"
        write_tensor(tensors / fname, rows)
        domain, candidates, gt = meta[video_id]
        manifest_videos.append({
            "video_id": video_id,
            "domain": domain,
            "frame_count": rows.shape[0],
            "candidates": candidates,
            "ground_truth": gt,
            "embedding_file": f"tensors/{fname}",
        })
    manifest_path = root / "manifest.json"
    manifest_path.write_text(json.dumps({
        "videos": manifest_videos,
        "domains": {"sport_a": "Sport A", "sport_b": "Sport B"},
    }, indent=2))

    calibration_path = root / "calibration.json"
    calibration_path.write_text(json.dumps(
        {"alpha": 10.0, "beta": -1.0, "source": "fixture"}
    ))
    return {
        "root": root,
        "manifest": manifest_path,
        "scripts": scripts_path,
        "names": names_path,
        "calibration": calibration_path,
    }


@pytest.fixture
def fixture_corpus(tmp_path: Path) -> dict[str, Path]:
    return build_fixture_corpus(tmp_path / "corpus")
