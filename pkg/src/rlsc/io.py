"""Text matrix files and JSON reports.

Matrix file layout::

    RLSC 1
    t n k d p w          # unknown parameters written as "-"
    0100...              # t rows of n characters
    # optional comment lines

Rows are written top to bottom, row 0 first.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .matrix import CodeMatrix, CodeParams

__all__ = ["MatrixFormatError", "MAGIC", "dumps_matrix", "loads_matrix", "save_matrix",
           "load_matrix", "write_atomic", "dumps_report"]

MAGIC = "RLSC 1"


class MatrixFormatError(ValueError):
    def __init__(self, message: str, line: int, column: int | None = None):
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


def _fmt(v) -> str:
    return "-" if v is None else str(v)


def dumps_matrix(matrix: CodeMatrix, comments=()) -> str:
    params = matrix.params
    k = d = p = w = None
    if params is not None:
        k, d, p, w = params.k, params.d, params.p, params.w
    lines = [MAGIC, " ".join(_fmt(v) for v in (matrix.t, matrix.n, k, d, p, w))]
    cols = matrix.columns
    for r in range(matrix.t):
        lines.append("".join("1" if (c >> r) & 1 else "0" for c in cols))
    lines.extend("# " + c for c in comments)
    return "\n".join(lines) + "\n"


def _parse_int(tok: str, line: int, col: int, name: str) -> int | None:
    if tok == "-":
        return None
    try:
        return int(tok)
    except ValueError:
        raise MatrixFormatError(f"{name} must be an integer or '-', got {tok!r}", line, col) from None


def loads_matrix(text: str) -> CodeMatrix:
    lines = text.splitlines()
    body = [(i + 1, ln) for i, ln in enumerate(lines) if not ln.startswith("#")]
    if not body or body[0][1].strip() != MAGIC:
        raise MatrixFormatError(f"expected header {MAGIC!r}", body[0][0] if body else 1)
    if len(body) < 2:
        raise MatrixFormatError("missing parameter line", body[0][0] + 1)
    lineno, header = body[1]
    toks = header.split()
    if len(toks) != 6:
        raise MatrixFormatError(f"parameter line needs 6 fields 't n k d p w', got {len(toks)}",
                                lineno)
    col = 1
    vals = []
    for name, tok in zip("tnkdpw", toks):
        col = header.index(tok, col - 1) + 1
        vals.append(_parse_int(tok, lineno, col, name))
        col += len(tok)
    t, n, k, d, p, w = vals
    if t is None or n is None or t < 1 or n < 1:
        raise MatrixFormatError("t and n must be positive integers", lineno)
    rows = [(ln_no, ln.rstrip()) for ln_no, ln in body[2:] if ln.strip()]
    if len(rows) != t:
        raise MatrixFormatError(f"expected {t} matrix rows, found {len(rows)}",
                                rows[-1][0] if rows else lineno)
    cols = [0] * n
    for r, (ln_no, row) in enumerate(rows):
        if len(row) != n:
            raise MatrixFormatError(f"expected {n} columns, found {len(row)}", ln_no)
        for j, ch in enumerate(row):
            if ch == "1":
                cols[j] |= 1 << r
            elif ch != "0":
                raise MatrixFormatError(f"unexpected character {ch!r}", ln_no, j + 1)
    params = None
    if k is not None:
        try:
            params = CodeParams(k=k, n=n, d=d or 0, p=p, w=w, t=t)
        except ValueError as exc:
            raise MatrixFormatError(str(exc), lineno) from None
    return CodeMatrix(t, tuple(cols), params)


def write_atomic(path, data: str) -> None:
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_matrix(matrix: CodeMatrix, path, comments=()) -> None:
    write_atomic(path, dumps_matrix(matrix, comments))


def load_matrix(path) -> CodeMatrix:
    return loads_matrix(Path(path).read_text())


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
