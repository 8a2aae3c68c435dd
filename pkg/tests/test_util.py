"""Seed derivation, atomic JSON, and full-precision CSV round trips."""

import glob
import json
import os

import numpy as np
import pytest

from pathlingam.util import (
    read_matrix_csv,
    stable_seed,
    write_json_atomic,
    write_matrix_csv,
)


class TestStableSeed:
    def test_deterministic(self):
        assert stable_seed(1, "x", 0.5) == stable_seed(1, "x", 0.5)

    def test_part_sensitivity(self):
        base = stable_seed(1, "x", 0.5)
        assert stable_seed(2, "x", 0.5) != base
        assert stable_seed(1, "y", 0.5) != base
        assert stable_seed(1, "x", 0.25) != base

    def test_order_matters(self):
        assert stable_seed(1, 2) != stable_seed(2, 1)

    def test_types_do_not_collide(self):
        # 1, "1", 1.0 and True encode with distinct prefixes.
        seeds = {
            stable_seed(1),
            stable_seed("1"),
            stable_seed(1.0),
            stable_seed(True),
        }
        assert len(seeds) == 4

    def test_numpy_scalars_match_python(self):
        assert stable_seed(np.int64(7)) == stable_seed(7)
        assert stable_seed(np.float64(0.1)) == stable_seed(0.1)

    def test_range_is_63_bit(self):
        for i in range(200):
            seed = stable_seed("range", i)
            assert 0 <= seed < 2**63

    def test_rejects_unsupported_parts(self):
        with pytest.raises(TypeError):
            stable_seed([1, 2])

    def test_spread(self):
        # Nearby inputs should not collide.
        seeds = {stable_seed("trial", i) for i in range(5000)}
        assert len(seeds) == 5000


class TestJsonAtomic:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "obj.json"
        obj = {"a": np.arange(3), "b": np.float64(0.1), "c": [np.int32(4)]}
        write_json_atomic(path, obj)
        loaded = json.loads(path.read_text())
        assert loaded == {"a": [0.0, 1.0, 2.0], "b": 0.1, "c": [4]}

    def test_trailing_newline(self, tmp_path):
        path = tmp_path / "obj.json"
        write_json_atomic(path, {"x": 1})
        assert path.read_text().endswith("\n")

    def test_full_float_precision(self, tmp_path):
        path = tmp_path / "obj.json"
        value = 1.0 / 3.0
        write_json_atomic(path, {"v": value})
        assert json.loads(path.read_text())["v"] == value

    def test_no_temp_files_left(self, tmp_path):
        path = tmp_path / "obj.json"
        write_json_atomic(path, {"x": 1})
        write_json_atomic(path, {"x": 2})
        assert glob.glob(str(tmp_path / "*.tmp")) == []
        assert os.listdir(tmp_path) == ["obj.json"]

    def test_overwrite_replaces_content(self, tmp_path):
        path = tmp_path / "obj.json"
        write_json_atomic(path, {"x": 1})
        write_json_atomic(path, {"x": 2})
        assert json.loads(path.read_text()) == {"x": 2}


class TestMatrixCsv:
    def test_round_trip_exact(self, tmp_path):
        path = tmp_path / "m.csv"
        rng = np.random.default_rng(0)
        values = rng.standard_normal((40, 3))
        values[0, 0] = 1.0 / 3.0
        values[1, 1] = 1e-300
        values[2, 2] = -1.2345678901234567e17
        write_matrix_csv(path, values, ["a", "b", "c"])
        loaded, names = read_matrix_csv(path)
        assert names == ["a", "b", "c"]
        assert np.array_equal(loaded, values)

    def test_header_line(self, tmp_path):
        path = tmp_path / "m.csv"
        write_matrix_csv(path, np.zeros((2, 2)), ["u", "v"])
        assert path.read_text().splitlines()[0] == "u,v"

    def test_field_count_mismatch_reports_line(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("a,b\n1.0,2.0\n3.0\n")
        with pytest.raises(ValueError, match=":3"):
            read_matrix_csv(path)

    def test_non_numeric_value(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("a,b\n1.0,oops\n")
        with pytest.raises(ValueError, match="non-numeric"):
            read_matrix_csv(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("")
        with pytest.raises(ValueError, match="empty"):
            read_matrix_csv(path)

    def test_header_only(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("a,b\n")
        with pytest.raises(ValueError, match="no data rows"):
            read_matrix_csv(path)
