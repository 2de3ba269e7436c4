"""Plain-text matrix files.

Layout::

    dims: 2 2
    0.5+0i 0+0i 0+0i 0+0i
    ...

The first non-comment line carries the subsystem dimensions; each
following line is one matrix row with entries written as ``re+imi``.
A file with ``prod(dims)`` rows of a single entry (or one row of
``prod(dims)`` entries) is a ket; a square body is a matrix.  Lines
starting with ``#`` are ignored.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .qstate import DensityMatrix, DimensionError, InvariantError, Ket, Operator

__all__ = [
    "MatrixParseError",
    "format_complex",
    "parse_complex",
    "dumps",
    "write_matrix_file",
    "read_matrix_text",
    "load_matrix_file",
    "load_operator_file",
]


class MatrixParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


def format_complex(z: complex) -> str:
    z = complex(z)
    re = repr(float(z.real))
    im = repr(float(z.imag))
    if not im.startswith("-"):
        im = "+" + im
    return f"{re}{im}i"


def parse_complex(token: str) -> complex:
    t = token.strip()
    if t.endswith("i"):
        t = t[:-1] + "j"
    # tolerate "1+-2i" style sign pairs
    t = t.replace("+-", "-").replace("-+", "-")
    return complex(t)


def dumps(obj: Ket | Operator) -> str:
    lines = ["dims: " + " ".join(str(d) for d in obj.dims)]
    if isinstance(obj, Ket):
        lines += [format_complex(a) for a in obj.amplitudes]
    else:
        for row in obj.entries:
            lines.append(" ".join(format_complex(z) for z in row))
    return "\n".join(lines) + "\n"


def write_matrix_file(path: str | os.PathLike, obj: Ket | Operator) -> None:
    Path(path).write_text(dumps(obj))


def read_matrix_text(text: str) -> tuple[tuple[int, ...], np.ndarray]:
    """Parse to ``(dims, array)``; the array is 1-D for kets, 2-D otherwise."""
    rows: list[list[complex]] = []
    linenos: list[int] = []
    dims: tuple[int, ...] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if dims is None:
            if not line.startswith("dims:"):
                raise MatrixParseError("expected header 'dims: d1 d2 ...'", lineno, 1)
            try:
                dims = tuple(int(tok) for tok in line[5:].split())
            except ValueError as exc:
                raise MatrixParseError(f"bad dimension in header ({exc})", lineno) from None
            if not dims or any(d < 1 for d in dims):
                raise MatrixParseError("dims must be positive integers", lineno)
            continue
        row = []
        col = 1
        for tok in line.split():
            try:
                row.append(parse_complex(tok))
            except ValueError:
                raise MatrixParseError(f"non-numeric token {tok!r}", lineno, col) from None
            col += len(tok) + 1
        rows.append(row)
        linenos.append(lineno)
    if dims is None:
        raise MatrixParseError("missing 'dims:' header")
    n = int(np.prod(dims))
    widths = {len(r) for r in rows}
    if len(rows) == 1 and widths == {n} and n > 1:
        return dims, np.array(rows[0], dtype=complex)
    if widths <= {1} and len(rows) == n and n > 1:
        return dims, np.array([r[0] for r in rows], dtype=complex)
    for k, (r, ln) in enumerate(zip(rows, linenos), start=1):
        if k > n:
            raise MatrixParseError(f"row {k} exceeds the {n} rows implied by dims {dims}", ln)
        if len(r) != n:
            raise MatrixParseError(f"row {k} has {len(r)} entries, expected {n}", ln)
    if len(rows) < n:
        last = linenos[-1] if linenos else 1
        raise MatrixParseError(
            f"dims {dims} require {n} rows but the body ends at row {len(rows)}", last
        )
    return dims, np.array(rows, dtype=complex)


def load_matrix_file(path: str | os.PathLike) -> Ket | DensityMatrix:
    """Load a ket or a validated density matrix.

    Invariant violations (non-Hermitian, trace away from 1, negative
    eigenvalues) raise :class:`InvariantError` with the measured residual.
    """
    dims, arr = read_matrix_text(Path(path).read_text())
    try:
        if arr.ndim == 1:
            return Ket(dims, arr)
        return DensityMatrix(dims, arr)
    except InvariantError as exc:
        raise InvariantError(f"{path}: {exc}", exc.residual) from None
    except DimensionError as exc:
        raise DimensionError(f"{path}: {exc}") from None


def load_operator_file(path: str | os.PathLike) -> Operator:
    dims, arr = read_matrix_text(Path(path).read_text())
    if arr.ndim == 1:
        raise MatrixParseError(f"{path}: expected a square matrix, found a ket")
    return Operator(dims, arr)
