import numpy as np
import pytest

from ggdshrink.benchmark import BenchmarkRow
from ggdshrink.image import ImageBuffer
from ggdshrink.io import (
    CSV_COLUMNS,
    PgmHeaderError,
    PgmMaxvalError,
    PgmTruncatedError,
    PgmUnsupportedError,
    emit_csv,
    read_pgm,
    read_raw_coeffs,
    write_pgm,
    write_raw_coeffs,
)


def put(tmp_path, data, name="x.pgm"):
    p = tmp_path / name
    p.write_bytes(data)
    return p


def test_read_minimal_8bit(tmp_path):
    img = read_pgm(put(tmp_path, b"P5\n2 2\n255\n" + bytes([0, 255, 128, 64])))
    np.testing.assert_array_equal(img.pixels, [[0, 255], [128, 64]])
    assert img.bit_depth == 8


def test_read_16bit_big_endian(tmp_path):
    img = read_pgm(put(tmp_path, b"P5 1 1 65535\n\x01\x02"))
    assert img.pixels[0, 0] == 258 and img.bit_depth == 16


def test_read_skips_comments(tmp_path):
    img = read_pgm(put(tmp_path, b"P5\n# made by hand\n3 1 # width height\n255\n\x01\x02\x03"))
    np.testing.assert_array_equal(img.pixels, [[1, 2, 3]])


def test_payload_may_start_with_whitespace_byte(tmp_path):
    img = read_pgm(put(tmp_path, b"P5\n2 1\n255\n\n\x20"))
    np.testing.assert_array_equal(img.pixels, [[10, 32]])


@pytest.mark.parametrize("data,err", [
    (b"P2\n2 2\n255\n0 1 2 3\n", PgmUnsupportedError),
    (b"XX\n2 2\n255\n\x00\x00\x00\x00", PgmHeaderError),
    (b"P5\n2 two\n255\n\x00\x00\x00\x00", PgmHeaderError),
    (b"P5\n2 2\n", PgmHeaderError),
    (b"P5\n2 2\n255\n\x00\x00\x00", PgmTruncatedError),
    (b"P5\n2 2\n1023\n" + bytes(8), PgmMaxvalError),
])
def test_read_errors(tmp_path, data, err):
    with pytest.raises(err):
        read_pgm(put(tmp_path, data))


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        read_pgm(tmp_path / "absent.pgm")


@pytest.mark.parametrize("depth", [8, 16])
def test_round_trip(tmp_path, rng, depth):
    px = rng.integers(0, 2 ** depth, (512, 512)).astype(float)
    write_pgm(ImageBuffer(px, depth), tmp_path / "r.pgm")
    back = read_pgm(tmp_path / "r.pgm")
    np.testing.assert_array_equal(back.pixels, px)
    assert back.bit_depth == depth


def test_rounding_half_away(tmp_path):
    write_pgm(ImageBuffer(np.array([[254.5, 0.49, 1.5, 2.5]])), tmp_path / "h.pgm")
    np.testing.assert_array_equal(read_pgm(tmp_path / "h.pgm").pixels, [[255, 0, 2, 3]])


@pytest.mark.parametrize("value", [255.5, -0.6, 300.0])
def test_write_out_of_range(tmp_path, value):
    with pytest.raises(ValueError):
        write_pgm(ImageBuffer(np.array([[value]])), tmp_path / "o.pgm")


def test_write_unwritable(tmp_path):
    with pytest.raises(OSError):
        write_pgm(ImageBuffer(np.zeros((2, 2))), tmp_path / "no" / "such" / "dir.pgm")


def test_raw_dump_layout(tmp_path, rng):
    arr = rng.normal(size=(3, 5))
    write_raw_coeffs(arr, tmp_path / "c.raw")
    data = (tmp_path / "c.raw").read_bytes()
    assert data[:8] == b"GGDWAV1\x00"
    assert int.from_bytes(data[8:12], "little") == 3
    assert int.from_bytes(data[12:16], "little") == 5
    assert len(data) == 16 + 15 * 8
    np.testing.assert_array_equal(read_raw_coeffs(tmp_path / "c.raw"), arr)


def test_raw_dump_bad_magic(tmp_path):
    with pytest.raises(ValueError):
        read_raw_coeffs(put(tmp_path, b"NOTMAGIC" + bytes(8), "bad.raw"))


def test_csv_one_row(tmp_path):
    emit_csv([BenchmarkRow(0.5, 15.0, "rbayes", 38.123456, 0.25, None, 100)], tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines == [",".join(CSV_COLUMNS), "0.5000,15.0000,rbayes,38.1235,0.2500,,100"]


def test_csv_image_rows_have_empty_beta(tmp_path):
    emit_csv([BenchmarkRow(None, 5.0, "bayes", 25.0, 0.0, 0.61, 3)], tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().splitlines()[1] == ",5.0000,bayes,25.0000,0.0000,0.6100,3"


def test_csv_empty_rows(tmp_path):
    with pytest.raises(ValueError):
        emit_csv([], tmp_path / "t.csv")
