"""Frozen image-text encoders behind one small interface.

Two implementations:

* ``SiglipEncoder`` wraps a pretrained HF checkpoint (lazy torch/transformers
  import; needs downloaded weights). Its sigmoid logit scale/bias become the
  engine's calibration parameters.
* ``HashEncoder`` is a dependency-free deterministic stand-in: inputs are
  hashed to seed a Gaussian projection. It produces well-formed unit
  embeddings for pipeline tests and demos, not semantically meaningful ones.
"""

from __future__ import annotations

import hashlib
from typing import Protocol, Sequence

import numpy as np

from .tensorfile import unit_normalize


class CalibrationUnavailable(RuntimeError):
    """The encoder has no pretrained similarity scale/bias to export."""


class Encoder(Protocol):
    name: str
    dim: int

    def encode_texts(self, texts: Sequence[str]) -> np.ndarray: ...

    def encode_images(self, images: Sequence) -> np.ndarray: ...

    def calibration(self) -> tuple[float, float]: ...


class HashEncoder:
    """sha256(input) seeds a Gaussian vector; identical inputs always map to
    bit-identical unit rows."""

    def __init__(self, dim: int = 64, alpha: float = 10.0, beta: float = -1.0):
        self.name = f"hash-{dim}"
        self.dim = dim
        self._alpha = alpha
        self._beta = beta

    def _vector(self, payload: bytes) -> np.ndarray:
        seed = int.from_bytes(hashlib.sha256(payload).digest()[:8], "little")
        return np.random.default_rng(seed).standard_normal(self.dim)

    def encode_texts(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            raise ValueError("no texts to encode")
        rows = np.stack([self._vector(t.encode("utf-8")) for t in texts])
        return unit_normalize(rows)

    def encode_images(self, images: Sequence) -> np.ndarray:
        if not len(images):
            raise ValueError("no images to encode")
        rows = np.stack([
            self._vector(np.ascontiguousarray(np.asarray(img)).tobytes())
            for img in images
        ])
        return unit_normalize(rows)

    def calibration(self) -> tuple[float, float]:
        return self._alpha, self._beta


class UncalibratedHashEncoder(HashEncoder):
    """Hash encoder without pretrained scale/bias, for exercising the
    engine's fallback path."""

    def calibration(self) -> tuple[float, float]:
        raise CalibrationUnavailable(f"{self.name} carries no calibration")


class SiglipEncoder:
    """Frozen pretrained sigmoid-loss image-text encoder from HF."""

    def __init__(self, checkpoint: str = "google/siglip-so400m-patch14-384",
                 device: str = "cpu", batch_size: int = 16):
        import torch
        from transformers import AutoModel, AutoProcessor

        self._torch = torch
        self.name = checkpoint
        self.batch_size = batch_size
        self.device = device
        self.model = AutoModel.from_pretrained(checkpoint).to(device).eval()
        self.processor = AutoProcessor.from_pretrained(checkpoint)
        self.dim = int(self.model.config.text_config.hidden_size)

    def _batched(self, items, encode_batch) -> np.ndarray:
        chunks = []
        for i in range(0, len(items), self.batch_size):
            chunks.append(encode_batch(items[i:i + self.batch_size]))
        return unit_normalize(np.concatenate(chunks, axis=0))

    def encode_texts(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            raise ValueError("no texts to encode")

        def encode_batch(batch):
            inputs = self.processor(
                text=list(batch), padding="max_length", truncation=True,
                return_tensors="pt",
            ).to(self.device)
            with self._torch.no_grad():
                features = self.model.get_text_features(**inputs)
            return features.cpu().numpy()

        return self._batched(list(texts), encode_batch)

    def encode_images(self, images: Sequence) -> np.ndarray:
        if not len(images):
            raise ValueError("no images to encode")

        def encode_batch(batch):
            inputs = self.processor(images=list(batch), return_tensors="pt").to(self.device)
            with self._torch.no_grad():
                features = self.model.get_image_features(**inputs)
            return features.cpu().numpy()

        return self._batched(list(images), encode_batch)

    def calibration(self) -> tuple[float, float]:
        scale = getattr(self.model, "logit_scale", None)
        bias = getattr(self.model, "logit_bias", None)
        if scale is None or bias is None:
            raise CalibrationUnavailable(
                f"{self.name} does not expose logit_scale/logit_bias"
            )
        return float(scale.exp().item()), float(bias.item())


def make_encoder(spec: str, dim: int = 64) -> Encoder:
    """Build an encoder from a CLI spec: ``hash``, ``hash-nocal``, or an HF
    checkpoint id."""
    if spec == "hash":
        return HashEncoder(dim=dim)
    if spec == "hash-nocal":
        return UncalibratedHashEncoder(dim=dim)
    return SiglipEncoder(checkpoint=spec)
