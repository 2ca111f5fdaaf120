"""Flat-file exchange: Matrix Market array files and single-column CSV vectors."""

from __future__ import annotations

import io as _io
from pathlib import Path

import numpy as np
import scipy.io

from .errors import InputError


def write_matrix(path, A) -> None:
    A = np.asarray(A, dtype=float)
    # mmwrite picks coordinate format for sparse input only; dense -> array format
    scipy.io.mmwrite(str(path), A, field="real", precision=17)


def read_matrix(path) -> np.ndarray:
    try:
        A = scipy.io.mmread(str(path))
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read Matrix Market file {path}: {exc}") from exc
    if hasattr(A, "toarray"):
        A = A.toarray()
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise InputError(f"{path}: expected a matrix")
    return A


def write_vector(path, v, header: str) -> None:
    v = np.asarray(v, dtype=float).ravel()
    buf = _io.StringIO()
    buf.write(header + "\n")
    for value in v:
        buf.write(f"{value:.17g}\n")
    Path(path).write_text(buf.getvalue())


def read_vector(path, header: str | None = None) -> np.ndarray:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise InputError(f"{path}: empty file")
    if header is not None and lines[0] != header:
        raise InputError(f"{path}: expected header {header!r}, found {lines[0]!r}")
    try:
        return np.array([float(s) for s in lines[1:]])
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
