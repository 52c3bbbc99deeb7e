from __future__ import annotations

import pytest

from actalign_extractor.frames import (
    load_clip,
    load_frames_from_dir,
    parse_policy,
)

from conftest import write_image_clip, write_video_clip


def test_parse_policy():
    assert parse_policy("native") == ("native", 0.0)
    assert parse_policy("stride:3") == ("stride", 3.0)
    assert parse_policy("fps:7.5") == ("fps", 7.5)
    for bad in ("stride:0", "stride:1.5", "fps:-1", "every-other"):
        with pytest.raises(ValueError):
            parse_policy(bad)


def test_dir_clip_native(tmp_path):
    clip = write_image_clip(tmp_path, "c", 4)
    frames = load_clip(clip)
    assert len(frames) == 4
    assert frames[0].mode == "RGB"


def test_dir_clip_stride(tmp_path):
    clip = write_image_clip(tmp_path, "c", 7)
    assert len(load_frames_from_dir(clip, "stride:2")) == 4


def test_dir_clip_rejects_fps_policy(tmp_path):
    clip = write_image_clip(tmp_path, "c", 3)
    with pytest.raises(ValueError, match="no timing"):
        load_frames_from_dir(clip, "fps:10")


def test_empty_dir_rejected(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    with pytest.raises(ValueError, match="no image frames"):
        load_frames_from_dir(empty)


def test_video_clip_native(tmp_path):
    video = write_video_clip(tmp_path, "v", n_frames=6, fps=10.0)
    frames = load_clip(video)
    assert len(frames) == 6


def test_video_clip_fps_downsampling(tmp_path):
    video = write_video_clip(tmp_path, "v", n_frames=20, fps=10.0)
    frames = load_clip(video, policy="fps:5")
    assert len(frames) == 10


def test_video_clip_time_bounds(tmp_path):
    video = write_video_clip(tmp_path, "v", n_frames=20, fps=10.0)
    frames = load_clip(video, start=0.5, end=1.5)
    assert len(frames) == 10  # one second of a 10 fps clip
