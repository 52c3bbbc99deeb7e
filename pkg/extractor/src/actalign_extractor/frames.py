"""Frame loading and sampling from video files or image-sequence directories.

A clip source is either a directory of image files (sorted by name, one
frame each; handy for tests and pre-decoded corpora) or a video file decoded
with OpenCV. Sampling policies:

    native     every decoded frame (default)
    stride:N   every N-th frame
    fps:X      approximately X frames per second of source footage
"""

from __future__ import annotations

from pathlib import Path

from PIL import Image

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".webp"}


def parse_policy(policy: str) -> tuple[str, float]:
    if policy == "native":
        return "native", 0.0
    kind, _, value = policy.partition(":")
    if kind in ("stride", "fps") and value:
        number = float(value)
        if number <= 0:
            raise ValueError(f"sampling policy value must be positive: {policy!r}")
        if kind == "stride" and number != int(number):
            raise ValueError(f"stride must be an integer: {policy!r}")
        return kind, number
    raise ValueError(f"unknown sampling policy {policy!r}")


def _stride_for(policy: str, source_fps: float) -> int:
    kind, value = parse_policy(policy)
    if kind == "native":
        return 1
    if kind == "stride":
        return int(value)
    if source_fps <= 0:
        raise ValueError("source fps unknown; cannot apply an fps policy")
    return max(1, round(source_fps / value))


def load_frames_from_dir(path: Path, policy: str = "native") -> list[Image.Image]:
    files = sorted(
        p for p in path.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES
    )
    if not files:
        raise ValueError(f"no image frames found in {path}")
    kind, _ = parse_policy(policy)
    if kind == "fps":
        raise ValueError("image directories carry no timing; use native or stride:N")
    stride = _stride_for(policy, source_fps=0.0)
    return [Image.open(p).convert("RGB") for p in files[::stride]]


def load_frames_from_video(
    path: Path,
    policy: str = "native",
    start: float | None = None,
    end: float | None = None,
) -> list[Image.Image]:
    """Decode a clip (optionally time-bounded, seconds) into RGB frames."""
    import cv2

    cap = cv2.VideoCapture(str(path))
    if not cap.isOpened():
        raise ValueError(f"cannot decode video {path}")
    try:
        fps = cap.get(cv2.CAP_PROP_FPS) or 0.0
        stride = _stride_for(policy, fps)
        frames: list[Image.Image] = []
        index = 0
        while True:
            ok, frame = cap.read()
            if not ok:
                break
            stamp = index / fps if fps > 0 else 0.0
            index += 1
            if start is not None and fps > 0 and stamp < start:
                continue
            if end is not None and fps > 0 and stamp >= end:
                break
            if (index - 1) % stride != 0:
                continue
            frames.append(Image.fromarray(frame[:, :, ::-1]))
    finally:
        cap.release()
    if not frames:
        raise ValueError(f"no frames decoded from {path}")
    return frames


def load_clip(source: str | Path, policy: str = "native",
              start: float | None = None, end: float | None = None) -> list[Image.Image]:
    source = Path(source)
    if source.is_dir():
        return load_frames_from_dir(source, policy)
    return load_frames_from_video(source, policy, start, end)
