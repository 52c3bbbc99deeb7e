from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from PIL import Image


def write_image_clip(root: Path, name: str, n_frames: int, size=(24, 16),
                     seed: int = 0) -> Path:
    """A clip as a directory of PNG frames."""
    clip_dir = root / name
    clip_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    for i in range(n_frames):
        pixels = rng.integers(0, 256, size=(size[1], size[0], 3), dtype=np.uint8)
        Image.fromarray(pixels).save(clip_dir / f"frame_{i:04d}.png")
    return clip_dir


def write_video_clip(root: Path, name: str, n_frames: int, fps: float = 10.0,
                     size=(32, 24), seed: int = 0) -> Path:
    cv2 = pytest.importorskip("cv2")
    path = root / f"{name}.avi"
    writer = cv2.VideoWriter(str(path), cv2.VideoWriter_fourcc(*"MJPG"), fps, size)
    if not writer.isOpened():
        pytest.skip("cv2 video writer unavailable")
    rng = np.random.default_rng(seed)
    for _ in range(n_frames):
        writer.write(rng.integers(0, 256, size=(size[1], size[0], 3), dtype=np.uint8))
    writer.release()
    return path


@pytest.fixture
def clips_job(tmp_path: Path) -> dict:
    """Three image-dir clips plus the clip-list JSON describing them."""
    sources = {
        "v1": write_image_clip(tmp_path / "media", "v1", 3, seed=1),
        "v2": write_image_clip(tmp_path / "media", "v2", 5, seed=2),
        "v3": write_image_clip(tmp_path / "media", "v3", 4, seed=3),
    }
    clips = [
        {"video_id": "v1", "source": str(sources["v1"]), "domain": "sport_a",
         "candidates": ["hook_shot", "layup"], "ground_truth": "hook_shot"},
        {"video_id": "v2", "source": str(sources["v2"]), "domain": "sport_a",
         "candidates": ["layup", "dunk"], "ground_truth": "dunk"},
        {"video_id": "v3", "source": str(sources["v3"]), "domain": "sport_b",
         "candidates": ["hook_shot", "dunk"], "ground_truth": "hook_shot"},
    ]
    path = tmp_path / "clips.json"
    path.write_text(json.dumps({
        "clips": clips,
        "domains": {"sport_a": "Sport A", "sport_b": "Sport B"},
    }))
    return {"path": path, "out_dir": tmp_path / "out", "sources": sources}


@pytest.fixture
def script_texts() -> dict:
    return {
        "hook_shot": {
            "domain": "sport_a",
            "texts": [
                "player posts up near the key",
                "sweeps the ball overhead in an arc",
                "releases with one hand over the defender",
            ],
        },
        "layup": {
            "domain": "sport_a",
            "texts": [
                "player drives toward the rim",
                "gathers the ball off the dribble",
                "lays the ball off the backboard",
            ],
        },
        "dunk": {
            "domain": "sport_b",
            "texts": [
                "player leaps toward the rim",
                "slams the ball through the hoop",
            ],
        },
    }
