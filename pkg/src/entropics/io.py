"""Plain-text file formats for states, observables, channels and CSV output.

All formats are line oriented with whitespace-separated tokens and zero
based indices. Floats are written with 17 significant digits, which round
trips IEEE doubles exactly.

state / observable (.state, .herm)
    dim <d>
    <i> <j> <re> <im>          one line per entry, row major, d*d lines

channel (.chan)
    <din> <dout> <k>
    kraus <t>                  block header, t = 0 .. k-1
    <i> <j> <re> <im>          dout*din entry lines per block

CSV reports use 12 significant digits and are written atomically (temp file
then rename) so an interrupted run never leaves a half-written file.
"""

from __future__ import annotations

import os
import tempfile
from typing import Iterable, Sequence

import numpy as np

from .core import (DensityMatrix, HermitianMatrix, KrausChannel,
                   ValidationError, density_matrix, hermitian_matrix,
                   validate_channel)


def format_entry(x: float) -> str:
    return f"{x:.17g}"


def format_csv_value(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _matrix_lines(mat: np.ndarray) -> list[str]:
    rows, cols = mat.shape
    out = []
    for i in range(rows):
        for j in range(cols):
            z = mat[i, j]
            out.append(f"{i} {j} {format_entry(z.real)} {format_entry(z.imag)}")
    return out


def _parse_matrix_lines(lines: list[str], rows: int, cols: int,
                        path: str, start_line: int) -> np.ndarray:
    if len(lines) != rows * cols:
        raise ValidationError(
            f"{path}: expected {rows * cols} entry lines, got {len(lines)}")
    mat = np.zeros((rows, cols), dtype=complex)
    seen = np.zeros((rows, cols), dtype=bool)
    for off, line in enumerate(lines):
        parts = line.split()
        if len(parts) != 4:
            raise ValidationError(
                f"{path}:{start_line + off}: expected 'i j re im'")
        try:
            i, j = int(parts[0]), int(parts[1])
            re, im = float(parts[2]), float(parts[3])
        except ValueError as exc:
            raise ValidationError(
                f"{path}:{start_line + off}: bad entry line: {exc}") from exc
        if not (0 <= i < rows and 0 <= j < cols):
            raise ValidationError(
                f"{path}:{start_line + off}: index ({i}, {j}) out of range")
        if seen[i, j]:
            raise ValidationError(
                f"{path}:{start_line + off}: duplicate entry ({i}, {j})")
        seen[i, j] = True
        mat[i, j] = complex(re, im)
    return mat


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_nonempty_lines(path: str) -> list[str]:
    try:
        with open(path, "r") as handle:
            raw = handle.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    return [ln.strip() for ln in raw.splitlines() if ln.strip()]


def _write_square(path: str, mat: np.ndarray) -> None:
    lines = [f"dim {mat.shape[0]}"] + _matrix_lines(mat)
    _atomic_write(path, "\n".join(lines) + "\n")


def _read_square(path: str) -> np.ndarray:
    lines = _read_nonempty_lines(path)
    if not lines:
        raise ValidationError(f"{path}: empty file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "dim":
        raise ValidationError(f"{path}:1: expected header 'dim <d>'")
    try:
        d = int(head[1])
    except ValueError as exc:
        raise ValidationError(f"{path}:1: bad dimension: {exc}") from exc
    if d < 1:
        raise ValidationError(f"{path}:1: dimension must be positive")
    return _parse_matrix_lines(lines[1:], d, d, path, 2)


def write_state(path: str, state: DensityMatrix) -> None:
    _write_square(path, state.mat)


def read_state(path: str) -> DensityMatrix:
    return density_matrix(_read_square(path))


def write_hermitian(path: str, obs: HermitianMatrix) -> None:
    _write_square(path, obs.mat)


def read_hermitian(path: str) -> HermitianMatrix:
    return hermitian_matrix(_read_square(path))


def write_channel(path: str, channel: KrausChannel) -> None:
    lines = [f"{channel.dim_in} {channel.dim_out} {len(channel.kraus)}"]
    for t, k in enumerate(channel.kraus):
        lines.append(f"kraus {t}")
        lines.extend(_matrix_lines(k))
    _atomic_write(path, "\n".join(lines) + "\n")


def read_channel(path: str) -> KrausChannel:
    lines = _read_nonempty_lines(path)
    if not lines:
        raise ValidationError(f"{path}: empty file")
    head = lines[0].split()
    if len(head) != 3:
        raise ValidationError(f"{path}:1: expected header '<din> <dout> <k>'")
    try:
        din, dout, count = (int(x) for x in head)
    except ValueError as exc:
        raise ValidationError(f"{path}:1: bad header: {exc}") from exc
    if din < 1 or dout < 1 or count < 1:
        raise ValidationError(f"{path}:1: header values must be positive")
    block = dout * din + 1
    if len(lines) - 1 != count * block:
        raise ValidationError(
            f"{path}: expected {count} blocks of {block} lines, "
            f"got {len(lines) - 1} lines after the header")
    ops = []
    cursor = 1
    for t in range(count):
        header = lines[cursor].split()
        if header != ["kraus", str(t)]:
            raise ValidationError(
                f"{path}:{cursor + 1}: expected block header 'kraus {t}'")
        ops.append(_parse_matrix_lines(lines[cursor + 1:cursor + block],
                                       dout, din, path, cursor + 2))
        cursor += block
    return validate_channel(ops, din, dout)


def write_csv(path: str, header: Sequence[str],
              rows: Iterable[Sequence]) -> None:
    """Write a simple comma-separated report atomically."""
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValidationError(
                f"CSV row has {len(row)} fields, header has {len(header)}")
        lines.append(",".join(format_csv_value(x) for x in row))
    _atomic_write(path, "\n".join(lines) + "\n")
