"""File formats: matrix CSV, sample CSV, JSON documents.

Matrix CSV::

    d=3
    1,0.2,0
    0.2,1,0.5
    0,0.5,1

Sample CSV has a header ``y1,...,yd`` and one draw per line.  All writers go
through a temp file in the target directory followed by an atomic rename.
"""
from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np

from .copulas import SampleBatch
from .errors import FileFormatError

__all__ = [
    "atomic_write",
    "parse_matrix_csv",
    "read_matrix_csv",
    "format_matrix_csv",
    "write_matrix_csv",
    "read_rows_csv",
    "read_samples_csv",
    "format_samples_csv",
    "write_samples_csv",
    "read_json",
    "write_json",
]


def atomic_write(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _number(token: str, exact: bool, where: str):
    token = token.strip()
    try:
        return Fraction(token) if exact else float(token)
    except (ValueError, ZeroDivisionError):
        raise FileFormatError(f"{where}: not a number: {token!r}") from None


def parse_matrix_csv(text: str, exact: bool = False, source: str = "<matrix>") -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].replace(" ", "").startswith("d="):
        raise FileFormatError(f"{source}: first line must be 'd=<n>'")
    try:
        d = int(lines[0].replace(" ", "")[2:])
    except ValueError:
        raise FileFormatError(f"{source}: bad dimension line {lines[0]!r}") from None
    if d < 1 or len(lines) != d + 1:
        raise FileFormatError(f"{source}: expected {d} matrix rows, found {len(lines) - 1}")
    rows = []
    for r, line in enumerate(lines[1:], start=2):
        tokens = line.split(",")
        if len(tokens) != d:
            raise FileFormatError(f"{source}:{r}: expected {d} values, found {len(tokens)}")
        rows.append([_number(t, exact, f"{source}:{r}") for t in tokens])
    return np.array(rows, dtype=object if exact else float)


def read_matrix_csv(path, exact: bool = False) -> np.ndarray:
    """Read a matrix CSV; `exact` parses entries as Fractions of their decimal text."""
    return parse_matrix_csv(Path(path).read_text(), exact, str(path))


def format_matrix_csv(m) -> str:
    arr = np.asarray(m.values if hasattr(m, "values") else m)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    lines = [f"d={arr.shape[0]}"]
    lines += [",".join(repr(float(v)) for v in row) for row in arr]
    return "\n".join(lines) + "\n"


def write_matrix_csv(path, m) -> None:
    atomic_write(path, format_matrix_csv(m))


def read_rows_csv(path) -> np.ndarray:
    """Plain numeric CSV (no header), e.g. a substochastic matrix."""
    rows = []
    for r, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if line.strip():
            rows.append([_number(t, False, f"{path}:{r}") for t in line.split(",")])
    if not rows or len({len(r) for r in rows}) != 1:
        raise FileFormatError(f"{path}: expected a non-empty rectangular table")
    return np.array(rows, dtype=float)


def format_samples_csv(values: np.ndarray) -> str:
    values = np.asarray(values, dtype=float)
    header = ",".join(f"y{j + 1}" for j in range(values.shape[1]))
    body = "\n".join(",".join(repr(float(v)) for v in row) for row in values)
    return header + "\n" + body + ("\n" if body else "")


def write_samples_csv(path, batch) -> None:
    values = batch.values if isinstance(batch, SampleBatch) else batch
    atomic_write(path, format_samples_csv(values))


def read_samples_csv(path) -> SampleBatch:
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines:
        raise FileFormatError(f"{path}: empty file")
    header = [h.strip() for h in lines[0].split(",")]
    if header != [f"y{j + 1}" for j in range(len(header))]:
        raise FileFormatError(f"{path}: header must be y1,...,yd")
    rows = [ln for ln in lines[1:] if ln.strip()]
    if not rows:
        raise FileFormatError(f"{path}: no sample rows")
    try:
        values = np.loadtxt(rows, delimiter=",", ndmin=2, dtype=float)
    except ValueError as exc:
        raise FileFormatError(f"{path}: {exc}") from None
    if values.shape[1] != len(header):
        raise FileFormatError(f"{path}: rows do not match the header width")
    return SampleBatch(values)


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON ({exc})") from None


def write_json(path, data) -> None:
    atomic_write(path, json.dumps(data, indent=2, sort_keys=True) + "\n")
