import numpy as np
import pytest

from lanekeep import netpbm
from lanekeep.errors import FrameFormatError


def test_pgm_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    gray = rng.integers(0, 256, (7, 9), dtype=np.uint8)
    path = tmp_path / "frame.pgm"
    netpbm.write_pgm(path, gray)
    assert np.array_equal(netpbm.read_pgm(path), gray)


def test_ppm_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    rgb = rng.integers(0, 256, (5, 4, 3), dtype=np.uint8)
    path = tmp_path / "frame.ppm"
    netpbm.write_ppm(path, rgb)
    assert np.array_equal(netpbm.read_ppm(path), rgb)


def test_edge_map_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    edges = rng.random((6, 8)) < 0.3
    path = tmp_path / "edges.pgm"
    netpbm.write_edge_pgm(path, edges)
    assert np.array_equal(netpbm.read_edge_pgm(path), edges)
    raw = netpbm.read_pgm(path)
    assert set(np.unique(raw)) <= {0, 255}


def test_read_frame_dispatches_on_magic(tmp_path):
    gray = np.zeros((3, 3), dtype=np.uint8)
    rgb = np.zeros((3, 3, 3), dtype=np.uint8)
    netpbm.write_pgm(tmp_path / "a.pgm", gray)
    netpbm.write_ppm(tmp_path / "b.ppm", rgb)
    assert netpbm.read_frame(tmp_path / "a.pgm").ndim == 2
    assert netpbm.read_frame(tmp_path / "b.ppm").ndim == 3


def test_comments_in_header(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# a comment\n2 2\n255\n\x01\x02\x03\x04")
    arr = netpbm.read_pgm(path)
    assert arr.tolist() == [[1, 2], [3, 4]]


def test_truncated_raster_rejected(tmp_path):
    path = tmp_path / "t.pgm"
    path.write_bytes(b"P5\n4 4\n255\n\x00\x00\x00")
    with pytest.raises(FrameFormatError):
        netpbm.read_pgm(path)


def test_wrong_magic_rejected(tmp_path):
    path = tmp_path / "w.pgm"
    path.write_bytes(b"P2\n1 1\n255\n0")
    with pytest.raises(FrameFormatError):
        netpbm.read_pgm(path)
    with pytest.raises(FrameFormatError):
        netpbm.read_frame(path)


def test_unsupported_maxval_rejected(tmp_path):
    path = tmp_path / "m.pgm"
    path.write_bytes(b"P5\n1 1\n65535\n\x00\x00")
    with pytest.raises(FrameFormatError):
        netpbm.read_pgm(path)
