"""File formats: byte-exact round trips and parse diagnostics."""

import numpy as np
import pytest

from entropics.core import (
    ValidationError,
    hermitian_matrix,
    random_channel,
    random_hermitian,
    random_state,
)
from entropics.io import (
    format_csv_value,
    format_entry,
    read_channel,
    read_hermitian,
    read_state,
    write_channel,
    write_csv,
    write_hermitian,
    write_state,
)


def test_state_round_trip_exact(tmp_path):
    rho = random_state(3, seed=42)
    p = tmp_path / "a.state"
    write_state(str(p), rho)
    back = read_state(str(p))
    assert np.array_equal(back.mat, rho.mat)


def test_state_file_is_stable(tmp_path):
    rho = random_state(2, seed=7)
    p1, p2 = tmp_path / "a.state", tmp_path / "b.state"
    write_state(str(p1), rho)
    write_state(str(p2), rho)
    assert p1.read_bytes() == p2.read_bytes()


def test_hermitian_round_trip(tmp_path):
    obs = random_hermitian(4, seed=5)
    p = tmp_path / "a.herm"
    write_hermitian(str(p), obs)
    assert np.array_equal(read_hermitian(str(p)).mat, obs.mat)


def test_channel_round_trip(tmp_path):
    ch = random_channel(2, 3, seed=9)
    p = tmp_path / "a.chan"
    write_channel(str(p), ch)
    back = read_channel(str(p))
    assert back.dim_in == 2 and back.dim_out == 3
    assert len(back.kraus) == len(ch.kraus)
    for a, b in zip(back.kraus, ch.kraus):
        assert np.array_equal(a, b)


def test_seventeen_digit_entries():
    assert format_entry(1.0 / 3.0) == "0.33333333333333331"
    assert float(format_entry(0.1)) == 0.1


def test_csv_value_formatting():
    assert format_csv_value(True) == "1"
    assert format_csv_value(False) == "0"
    assert format_csv_value(3) == "3"
    assert format_csv_value(0.5) == "0.5"
    assert format_csv_value("ok") == "ok"


def test_write_csv(tmp_path):
    p = tmp_path / "r.csv"
    write_csv(str(p), ["a", "b"], [[1, 2.5], ["x", True]])
    assert p.read_text() == "a,b\n1,2.5\nx,1\n"


def test_write_csv_rejects_ragged_rows(tmp_path):
    with pytest.raises(ValidationError):
        write_csv(str(tmp_path / "r.csv"), ["a", "b"], [[1]])


def test_missing_file_message():
    with pytest.raises(ValidationError, match="cannot read"):
        read_state("/nonexistent/path.state")


def test_empty_file(tmp_path):
    p = tmp_path / "e.state"
    p.write_text("\n\n")
    with pytest.raises(ValidationError, match="empty"):
        read_state(str(p))


def test_bad_header(tmp_path):
    p = tmp_path / "h.state"
    p.write_text("dims 2\n")
    with pytest.raises(ValidationError, match="dim"):
        read_state(str(p))


def test_entry_count_checked(tmp_path):
    p = tmp_path / "c.state"
    p.write_text("dim 2\n0 0 1 0\n")
    with pytest.raises(ValidationError, match="entry lines"):
        read_state(str(p))


def test_duplicate_entry_rejected(tmp_path):
    p = tmp_path / "d.state"
    body = "dim 2\n0 0 0.5 0\n0 0 0.5 0\n1 0 0 0\n1 1 0.5 0\n"
    p.write_text(body)
    with pytest.raises(ValidationError, match="duplicate"):
        read_state(str(p))


def test_index_out_of_range(tmp_path):
    p = tmp_path / "i.state"
    p.write_text("dim 1\n0 1 1 0\n")
    with pytest.raises(ValidationError, match="out of range"):
        read_state(str(p))


def test_read_state_validates_physics(tmp_path):
    # Parses fine but is not a density matrix.
    p = tmp_path / "p.state"
    p.write_text("dim 2\n0 0 1.5 0\n0 1 0 0\n1 0 0 0\n1 1 -0.5 0\n")
    with pytest.raises(ValidationError):
        read_state(str(p))


def test_read_hermitian_validates_symmetry(tmp_path):
    p = tmp_path / "h.herm"
    p.write_text("dim 2\n0 0 1 0\n0 1 1 0\n1 0 0 0\n1 1 1 0\n")
    with pytest.raises(ValidationError):
        read_hermitian(str(p))


def test_channel_block_header_checked(tmp_path):
    ch = random_channel(2, 2, seed=1)
    p = tmp_path / "a.chan"
    write_channel(str(p), ch)
    text = p.read_text().replace("kraus 1", "kraus 9", 1)
    p.write_text(text)
    with pytest.raises(ValidationError, match="block header"):
        read_channel(str(p))


def test_channel_trace_preservation_checked(tmp_path):
    # Header and shape are fine but the single Kraus operator is not an
    # isometry, so channel validation must reject it.
    p = tmp_path / "bad.chan"
    p.write_text("2 2 1\nkraus 0\n0 0 1 0\n0 1 0 0\n1 0 0 0\n1 1 0.5 0\n")
    with pytest.raises(ValidationError):
        read_channel(str(p))


def test_blank_lines_ignored(tmp_path):
    rho = random_state(2, seed=3)
    p = tmp_path / "a.state"
    write_state(str(p), rho)
    padded = tmp_path / "b.state"
    padded.write_text("\n" + p.read_text().replace("\n", "\n\n"))
    assert np.array_equal(read_state(str(padded)).mat, rho.mat)
