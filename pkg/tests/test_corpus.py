from __future__ import annotations

import json

import numpy as np
import pytest

from actalign.corpus import (
    EmbeddingSequence,
    load_embeddings,
    load_manifest,
    load_name_embeddings,
    load_scripts,
    read_tensor,
    write_embeddings,
    write_tensor,
)
from actalign.errors import ManifestError, ScriptError, TensorError

from conftest import unit_rows


def manifest_doc(videos):
    return {"videos": videos, "domains": {"d1": "Domain One"}}


def video_doc(video_id="v1", candidates=None, ground_truth=None, frame_count=4):
    candidates = candidates or ["c1", "c2", "c3", "c4", "c5"]
    return {
        "video_id": video_id,
        "domain": "d1",
        "frame_count": frame_count,
        "candidates": candidates,
        "ground_truth": ground_truth or candidates[0],
        "embedding_file": f"{video_id}.aaln",
    }


class TestManifest:
    def test_loads_two_videos(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps(manifest_doc([video_doc("v1"), video_doc("v2")])))
        manifest = load_manifest(path)
        assert len(manifest) == 2
        assert manifest.videos[0].candidates == ("c1", "c2", "c3", "c4", "c5")
        assert manifest.domains == {"d1": "Domain One"}

    def test_ground_truth_missing_names_video(self, tmp_path):
        bad = video_doc("v7")
        bad["ground_truth"] = "not_a_candidate"
        path = tmp_path / "m.json"
        path.write_text(json.dumps(manifest_doc([video_doc("v1"), bad])))
        with pytest.raises(ManifestError, match="v7.*ground_truth"):
            load_manifest(path)

    def test_duplicate_video_id(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps(manifest_doc([video_doc("v1"), video_doc("v1")])))
        with pytest.raises(ManifestError, match="duplicate"):
            load_manifest(path)

    def test_parse_failure(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text("{not json")
        with pytest.raises(ManifestError, match="not valid JSON"):
            load_manifest(path)

    def test_single_candidate_rejected(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps(manifest_doc([video_doc(candidates=["only"])])))
        with pytest.raises(ManifestError, match="at least 2"):
            load_manifest(path)

    def test_zero_frames_rejected(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps(manifest_doc([video_doc(frame_count=0)])))
        with pytest.raises(ManifestError, match="frame_count"):
            load_manifest(path)


class TestTensorFile:
    def test_pythagorean_normalization(self, tmp_path):
        path = tmp_path / "t.aaln"
        write_tensor(path, np.array([[3.0, 4.0], [0.0, 5.0]]))
        seq = load_embeddings(path, 2, 2)
        np.testing.assert_allclose(seq.frames, [[0.6, 0.8], [0.0, 1.0]], atol=1e-7)

    def test_zero_row_error_names_index(self, tmp_path):
        path = tmp_path / "t.aaln"
        write_tensor(path, np.array([[1.0, 0.0], [0.0, 0.0]]))
        with pytest.raises(TensorError, match="row 1.*zero norm"):
            load_embeddings(path, 2, 2)

    def test_shape_mismatch(self, tmp_path):
        path = tmp_path / "t.aaln"
        write_tensor(path, np.zeros((10, 4)) + 1.0)
        with pytest.raises(TensorError, match="shape mismatch"):
            load_embeddings(path, 12, 4)

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "t.aaln"
        write_tensor(path, np.array([[1.0, np.nan]]))
        with pytest.raises(TensorError, match="non-finite"):
            load_embeddings(path, 1, 2)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "t.aaln"
        write_tensor(path, np.ones((1, 2)))
        blob = bytearray(path.read_bytes())
        blob[:4] = b"NOPE"
        path.write_bytes(bytes(blob))
        with pytest.raises(TensorError, match="bad magic"):
            read_tensor(path)

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "t.aaln"
        write_tensor(path, np.ones((3, 3)))
        blob = path.read_bytes()
        path.write_bytes(blob[:-4])
        with pytest.raises(TensorError, match="size mismatch"):
            read_tensor(path)

    def test_round_trip_bit_exact(self, tmp_path, rng):
        first = tmp_path / "a.aaln"
        second = tmp_path / "b.aaln"
        write_tensor(first, rng.normal(size=(6, 5)))
        seq = load_embeddings(first, 6, 5, video_id="v")
        write_embeddings(second, seq)
        again = load_embeddings(second, 6, 5, video_id="v")
        assert np.array_equal(seq.frames, again.frames)

    def test_normalization_idempotent(self, tmp_path, rng):
        path = tmp_path / "t.aaln"
        rows = unit_rows(rng, 7, 6)
        write_tensor(path, rows)
        seq = load_embeddings(path, 7, 6)
        assert np.max(np.abs(seq.frames - rows)) <= 1e-7

    def test_norms_within_tolerance(self, tmp_path, rng):
        path = tmp_path / "t.aaln"
        write_tensor(path, rng.normal(size=(20, 9)) * 3.7)
        seq = load_embeddings(path, 20, 9)
        norms = np.linalg.norm(seq.frames, axis=1)
        assert np.max(np.abs(norms - 1.0)) <= 1e-4


class TestScripts:
    def write_scripts(self, tmp_path, sizes, with_embeddings=True, embed_rows=None):
        doc = {}
        rng = np.random.default_rng(3)
        for class_id, k in sizes.items():
            entry = {"domain": "d1", "texts": [f"{class_id}-{i}" for i in range(k)]}
            if with_embeddings:
                rows = embed_rows[class_id] if embed_rows else unit_rows(rng, k, 4)
                fname = f"{class_id}.aaln"
                write_tensor(tmp_path / fname, rows)
                entry["embedding_file"] = fname
            doc[class_id] = entry
        path = tmp_path / "scripts.json"
        path.write_text(json.dumps(doc))
        return path

    def test_two_classes_keep_lengths(self, tmp_path):
        path = self.write_scripts(tmp_path, {"spin_a": 6, "spin_b": 7})
        scripts = load_scripts(path)
        assert len(scripts) == 2
        assert scripts["spin_a"].steps == 6
        assert scripts["spin_b"].steps == 7
        assert scripts["spin_a"].texts[0] == "spin_a-0"

    def test_short_fixed_uniform_length(self, tmp_path):
        sizes = {f"c{i}": 10 for i in range(5)}
        path = self.write_scripts(tmp_path, sizes)
        scripts = load_scripts(path, prompt_style="short_fixed")
        assert all(s.steps == 10 for s in scripts.values())
        assert all(s.prompt_style == "short_fixed" for s in scripts.values())

    def test_length_mismatch(self, tmp_path):
        rows = {"c1": unit_rows(np.random.default_rng(0), 4, 4)}
        path = self.write_scripts(tmp_path, {"c1": 5}, embed_rows=rows)
        with pytest.raises(ScriptError, match="5 texts.*4 rows"):
            load_scripts(path)

    def test_empty_texts_rejected(self, tmp_path):
        path = tmp_path / "scripts.json"
        path.write_text(json.dumps({"c1": {"domain": "d", "texts": []}}))
        with pytest.raises(ScriptError, match="non-empty"):
            load_scripts(path)

    def test_texts_only_file(self, tmp_path):
        path = self.write_scripts(tmp_path, {"c1": 3}, with_embeddings=False)
        scripts = load_scripts(path)
        assert scripts["c1"].embeddings is None

    def test_name_embeddings_require_single_text(self, tmp_path):
        path = self.write_scripts(tmp_path, {"c1": 1, "c2": 1})
        names = load_name_embeddings(path)
        assert set(names) == {"c1", "c2"}
        assert names["c1"].embedding.shape == (4,)

        bad = self.write_scripts(tmp_path, {"c3": 2})
        with pytest.raises(ScriptError, match="exactly one text"):
            load_name_embeddings(bad)


def test_sequence_properties(rng):
    seq = EmbeddingSequence(video_id="v", frames=unit_rows(rng, 5, 3))
    assert seq.length == 5
    assert seq.dim == 3
