import numpy as np
import pytest

from nmf2 import InputError, read_matrix, write_matrix
from nmf2.matrixio import format_of


class TestCsv:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(1)
        mat = rng.standard_normal((7, 5)) * np.exp(rng.uniform(-30, 30, (7, 5)))
        path = str(tmp_path / "m.csv")
        write_matrix(path, mat)
        back = read_matrix(path)
        assert np.array_equal(back, mat)

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2,3\n4,5\n")
        with pytest.raises(InputError):
            read_matrix(str(path))

    def test_non_numeric_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,x\n")
        with pytest.raises(InputError):
            read_matrix(str(path))

    def test_blank_lines_ignored(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1,2\n\n3,4\n")
        assert read_matrix(str(path)).tolist() == [[1.0, 2.0], [3.0, 4.0]]


class TestMatrixMarket:
    def test_array_round_trip(self, tmp_path):
        rng = np.random.default_rng(2)
        mat = rng.random((4, 6))
        path = str(tmp_path / "m.mtx")
        write_matrix(path, mat)
        assert format_of(path) == "matrixmarket"
        assert np.array_equal(read_matrix(path), mat)

    def test_coordinate_format(self, tmp_path):
        path = tmp_path / "m.mtx"
        path.write_text(
            "%%MatrixMarket matrix coordinate real general\n"
            "% a comment\n"
            "2 3 3\n"
            "1 1 5.0\n"
            "2 3 -1.5\n"
            "1 3 2.0\n"
        )
        mat = read_matrix(str(path))
        assert mat.tolist() == [[5.0, 0.0, 2.0], [0.0, 0.0, -1.5]]

    def test_symmetric_array(self, tmp_path):
        path = tmp_path / "s.mtx"
        path.write_text(
            "%%MatrixMarket matrix array real symmetric\n"
            "2 2\n"
            "1.0\n"
            "3.0\n"
            "2.0\n"
        )
        mat = read_matrix(str(path))
        assert mat.tolist() == [[1.0, 3.0], [3.0, 2.0]]

    def test_coordinate_symmetric(self, tmp_path):
        path = tmp_path / "s.mtx"
        path.write_text(
            "%%MatrixMarket matrix coordinate integer symmetric\n"
            "3 3 2\n"
            "2 1 4\n"
            "3 3 7\n"
        )
        mat = read_matrix(str(path))
        assert mat[0, 1] == 4.0 and mat[1, 0] == 4.0 and mat[2, 2] == 7.0

    def test_header_sniffing_without_extension(self, tmp_path):
        path = tmp_path / "data.txt"
        path.write_text("%%MatrixMarket matrix array real general\n1 2\n1.0\n2.0\n")
        assert format_of(str(path)) == "matrixmarket"
        assert read_matrix(str(path)).tolist() == [[1.0, 2.0]]

    def test_pattern_field_rejected(self, tmp_path):
        path = tmp_path / "p.mtx"
        path.write_text("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 1\n")
        with pytest.raises(InputError):
            read_matrix(str(path))

    def test_wrong_count_rejected(self, tmp_path):
        path = tmp_path / "m.mtx"
        path.write_text("%%MatrixMarket matrix array real general\n2 2\n1.0\n2.0\n")
        with pytest.raises(InputError):
            read_matrix(str(path))
