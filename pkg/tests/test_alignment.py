from __future__ import annotations

import numpy as np
import pytest

from actalign.affinity import AffinityMatrix, CalibrationParams, build_affinity
from actalign.alignment import (
    AlignmentResult,
    DtwConfig,
    align,
    align_affinity,
    backtrack,
    dtw_table,
)
from actalign.errors import ConfigError
from actalign.smoothing import SmoothingConfig

from conftest import unit_rows
from oracles import best_anchored_score, best_open_score, check_path
from test_affinity import script_from, seq_from

ANCHORED = DtwConfig()
OPEN = DtwConfig(endpoint="open_end")


def affinity_of(values) -> AffinityMatrix:
    values = np.asarray(values, dtype=np.float64)
    return AffinityMatrix(class_id="c", video_id="v", raw=values, calibrated=values)


class TestTable:
    def test_single_cell(self):
        np.testing.assert_allclose(dtw_table(np.array([[0.4]])), [[0.4]])

    def test_worked_two_by_three(self):
        aff = np.array([[0.9, 0.2, 0.1], [0.1, 0.8, 0.7]])
        expected = np.array([[0.9, 1.1, 1.2], [1.0, 1.9, 2.6]])
        np.testing.assert_allclose(dtw_table(aff), expected, atol=1e-12)

    def test_single_row_is_prefix_sum(self, rng):
        row = rng.random((1, 9))
        np.testing.assert_allclose(dtw_table(row), np.cumsum(row, axis=1))

    def test_empty_rejected(self):
        with pytest.raises(ConfigError, match="non-empty"):
            dtw_table(np.zeros((0, 3)))


class TestBacktrack:
    def test_worked_example_path(self):
        aff = affinity_of([[0.9, 0.2, 0.1], [0.1, 0.8, 0.7]])
        result = backtrack(dtw_table(aff.calibrated), aff, ANCHORED)
        np.testing.assert_array_equal(result.path, [[0, 0], [0, 1], [1, 1], [1, 2]])
        assert result.raw_score == pytest.approx(2.6, abs=1e-12)
        assert result.normalized_score == pytest.approx(0.65, abs=1e-12)
        assert result.dp_max_cell == (1, 2)

    def test_single_row_mean(self, rng):
        row = rng.random((1, 7))
        aff = affinity_of(row)
        result = align_affinity(aff, ANCHORED)
        assert result.path.shape == (7, 2)
        assert result.normalized_score == pytest.approx(float(np.mean(row)), abs=1e-12)

    def test_single_cell(self):
        aff = affinity_of([[0.37]])
        result = align_affinity(aff, ANCHORED)
        assert result.normalized_score == pytest.approx(0.37)
        np.testing.assert_array_equal(result.path, [[0, 0]])

    def test_open_end_backtracks_from_argmax(self):
        # negative tail: the open-end policy stops at the score peak
        aff = affinity_of([[0.9, 0.9, -0.5, -0.5]])
        anchored = align_affinity(aff, ANCHORED)
        open_end = align_affinity(aff, OPEN)
        assert anchored.path.shape[0] == 4
        assert open_end.path.shape[0] == 2
        assert open_end.raw_score == pytest.approx(1.8)
        assert open_end.dp_max_cell == (0, 1)
        assert open_end.normalized_score > anchored.normalized_score

    def test_open_end_coincides_with_anchored_on_positive_matrices(self, rng):
        # every cell is componentwise below the corner, so positive
        # affinities always put the table max at (K-1, T-1)
        for _ in range(30):
            aff = affinity_of(rng.random((int(rng.integers(1, 5)), int(rng.integers(1, 7)))))
            anchored = align_affinity(aff, ANCHORED)
            open_end = align_affinity(aff, OPEN)
            assert open_end.raw_score == pytest.approx(anchored.raw_score, abs=1e-12)
            np.testing.assert_array_equal(open_end.path, anchored.path)


class TestOracleEquivalence:
    def test_anchored_and_open_match_enumeration(self, rng):
        for _ in range(120):
            K = int(rng.integers(1, 5))
            T = int(rng.integers(1, 7))
            values = rng.random((K, T))
            aff = affinity_of(values)
            D = dtw_table(values)
            anchored = backtrack(D, aff, ANCHORED)
            assert anchored.raw_score == pytest.approx(
                best_anchored_score(values), abs=1e-9
            )
            check_path(anchored.path, K, T, anchored=True)
            path_sum = float(values[anchored.path[:, 0], anchored.path[:, 1]].sum())
            assert path_sum == pytest.approx(anchored.raw_score, abs=1e-12)

            open_end = backtrack(D, aff, OPEN)
            assert open_end.raw_score == pytest.approx(best_open_score(values), abs=1e-9)
            check_path(open_end.path, K, T, anchored=False)

    def test_path_length_bounds(self, rng):
        for _ in range(60):
            K = int(rng.integers(1, 6))
            T = int(rng.integers(1, 9))
            aff = affinity_of(rng.random((K, T)))
            result = align_affinity(aff, ANCHORED)
            assert max(K, T) <= len(result) <= K + T - 1

    def test_domination_monotonicity(self, rng):
        for _ in range(60):
            K = int(rng.integers(1, 5))
            T = int(rng.integers(1, 7))
            base = rng.random((K, T))
            bumped = base + rng.random((K, T)) * 0.3
            low = align_affinity(affinity_of(base), ANCHORED)
            high = align_affinity(affinity_of(bumped), ANCHORED)
            assert high.raw_score >= low.raw_score - 1e-12


class TestCompose:
    def test_identity_composition_gives_sigma_one(self):
        row = [[1.0, 0.0, 0.0]]
        result = align(
            script_from(row),
            seq_from(row),
            CalibrationParams(alpha=1.0, beta=0.0, source="t"),
            SmoothingConfig(window=1),
            ANCHORED,
        )
        assert result.normalized_score == pytest.approx(1.0 / (1.0 + np.exp(-1.0)))

    def test_normalized_score_in_unit_interval(self, rng):
        for _ in range(40):
            K = int(rng.integers(1, 5))
            T = int(rng.integers(1, 9))
            result = align(
                script_from(unit_rows(rng, K, 6)),
                seq_from(unit_rows(rng, T, 6)),
                CalibrationParams(alpha=10.0, beta=-2.0, source="t"),
                SmoothingConfig(window=3),
                ANCHORED,
            )
            assert 0.0 < result.normalized_score < 1.0

    def test_matches_bruteforce_end_to_end(self, rng):
        cal = CalibrationParams(alpha=4.0, beta=0.5, source="t")
        for _ in range(30):
            K = int(rng.integers(1, 5))
            T = int(rng.integers(1, 7))
            script = script_from(unit_rows(rng, K, 5))
            seq = seq_from(unit_rows(rng, T, 5))
            aff = build_affinity(script, seq, cal)
            result = align(script, seq, cal, SmoothingConfig(window=1), ANCHORED)
            expected = best_anchored_score(aff.calibrated)
            assert result.raw_score == pytest.approx(expected, abs=1e-9)
            assert result.normalized_score == pytest.approx(
                expected / len(result), abs=1e-9
            )


def test_dtw_config_validation():
    with pytest.raises(ConfigError, match="endpoint"):
        DtwConfig(endpoint="somewhere")
    with pytest.raises(ConfigError, match="permutation"):
        DtwConfig(tie_break=("diagonal", "up", "up"))


def test_export_dict_round_trip():
    aff = affinity_of([[0.9, 0.2], [0.1, 0.8]])
    result = align_affinity(aff, ANCHORED)
    doc = result.to_export_dict("vid", "cls")
    assert doc["video_id"] == "vid"
    assert doc["class_id"] == "cls"
    assert doc["path"][0] == [0, 0]
    assert doc["gamma"] == pytest.approx(result.raw_score)
    assert doc["gamma_hat"] == pytest.approx(result.normalized_score)
    assert isinstance(result, AlignmentResult)
