import struct

import numpy as np
import pytest

from sskdyn import io
from sskdyn.errors import DomainError


class TestWigm:
    def test_round_trip(self, tmp_path, goe_small):
        p = tmp_path / "m.wigm"
        io.write_wigm(p, goe_small)
        assert np.array_equal(io.read_wigm(p), goe_small)

    def test_header_layout(self, tmp_path):
        p = tmp_path / "m.wigm"
        io.write_wigm(p, np.eye(3))
        data = p.read_bytes()
        assert len(data) == 16 + 72
        assert struct.unpack("<4sIQ", data[:16]) == (b"WIGM", 1, 3)
        assert np.frombuffer(data[16:], "<f8")[4] == 1.0

    def test_rejects_bad_files(self, tmp_path):
        p = tmp_path / "bad.wigm"
        p.write_bytes(b"NOPE" + bytes(12))
        with pytest.raises(DomainError):
            io.read_wigm(p)
        io.write_wigm(p, np.eye(2))
        p.write_bytes(p.read_bytes()[:-8])
        with pytest.raises(DomainError):
            io.read_wigm(p)

    def test_non_square(self, tmp_path):
        with pytest.raises(DomainError):
            io.write_wigm(tmp_path / "x", np.zeros((2, 3)))


class TestCsv:
    def test_full_precision(self, tmp_path):
        x = np.array([1 / 3, np.pi, 1e-300, -2.5])
        p = tmp_path / "c.csv"
        io.write_columns(p, {"x": x, "i": np.arange(4)})
        header, rows = io.read_csv(p)
        assert header == ["x", "i"]
        assert [r[0] for r in rows] == list(x)
        assert p.read_text().splitlines()[1].endswith(",0")

    def test_matrix_size_limit(self, tmp_path):
        with pytest.raises(DomainError):
            io.write_matrix_csv(tmp_path / "m.csv", np.zeros((101, 101)))
