"""Embedding extraction for the alignment engine: frame tensors, script and
name embeddings, calibration export, and LLM prompt emission."""

from .encoders import CalibrationUnavailable, HashEncoder, SiglipEncoder, make_encoder
from .frames import load_clip
from .jobs import (
    ClipSpec,
    ExtractionJob,
    embed_names,
    embed_scripts,
    emit_prompts,
    export_calibration,
    extract_frames,
    load_job,
)
from .prompts import CandidateAction, PromptGroup, augment_sub_action, build_prompt
from .tensorfile import read_tensor, unit_normalize, write_tensor

__version__ = "0.1.0"

__all__ = [
    "CalibrationUnavailable",
    "CandidateAction",
    "ClipSpec",
    "ExtractionJob",
    "HashEncoder",
    "PromptGroup",
    "SiglipEncoder",
    "augment_sub_action",
    "build_prompt",
    "embed_names",
    "embed_scripts",
    "emit_prompts",
    "export_calibration",
    "extract_frames",
    "load_clip",
    "load_job",
    "make_encoder",
    "read_tensor",
    "unit_normalize",
    "write_tensor",
]
