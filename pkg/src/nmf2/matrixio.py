"""Dense matrix file I/O: comma-separated values and MatrixMarket.

Values are serialized with 17 significant digits, so a write/read cycle is
bit-exact for float64. MatrixMarket support covers the ``array`` and
``coordinate`` formats with ``real``/``integer`` fields and ``general`` or
``symmetric`` symmetry; the writer emits the dense ``array`` format.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import InputError
from .linalg import as_matrix

_MM_HEADER = "%%MatrixMarket"


def format_of(path: str) -> str:
    """'matrixmarket' for .mtx/.mm files or MatrixMarket content, else 'csv'."""
    ext = os.path.splitext(path)[1].lower()
    if ext in (".mtx", ".mm"):
        return "matrixmarket"
    if ext == ".csv":
        return "csv"
    try:
        with open(path, "r", encoding="utf-8") as fh:
            first = fh.readline()
        if first.startswith(_MM_HEADER):
            return "matrixmarket"
    except OSError:
        pass
    return "csv"


def read_matrix(path: str) -> np.ndarray:
    fmt = format_of(path)
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if fmt == "matrixmarket":
        return _parse_matrixmarket(text, path)
    return _parse_csv(text, path)


def write_matrix(path: str, mat, fmt: str | None = None) -> None:
    mat = as_matrix(mat)
    if fmt is None:
        ext = os.path.splitext(path)[1].lower()
        fmt = "matrixmarket" if ext in (".mtx", ".mm") else "csv"
    if fmt == "csv":
        lines = [",".join(f"{v:.17g}" for v in row) for row in mat]
    elif fmt == "matrixmarket":
        lines = [f"{_MM_HEADER} matrix array real general", f"{mat.shape[0]} {mat.shape[1]}"]
        # array format is column-major
        lines.extend(f"{v:.17g}" for v in mat.T.ravel())
    else:
        raise InputError(f"unknown matrix format {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_csv(text: str, path: str) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise InputError(f"{path}: no data rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InputError(f"{path}: ragged rows")
    return as_matrix(rows)


def _parse_matrixmarket(text: str, path: str) -> np.ndarray:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(_MM_HEADER):
        raise InputError(f"{path}: missing MatrixMarket header")
    header = lines[0].split()
    if len(header) < 5 or header[1].lower() != "matrix":
        raise InputError(f"{path}: unsupported MatrixMarket header {lines[0]!r}")
    layout, field, symmetry = header[2].lower(), header[3].lower(), header[4].lower()
    if layout not in ("array", "coordinate"):
        raise InputError(f"{path}: unsupported layout {layout!r}")
    if field not in ("real", "integer"):
        raise InputError(f"{path}: unsupported field {field!r}")
    if symmetry not in ("general", "symmetric"):
        raise InputError(f"{path}: unsupported symmetry {symmetry!r}")

    body = [ln for ln in lines[1:] if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise InputError(f"{path}: empty MatrixMarket body")
    sizes = body[0].split()
    try:
        if layout == "array":
            m, n = int(sizes[0]), int(sizes[1])
            vals = [float(ln.split()[0]) for ln in body[1:]]
            expected = m * n if symmetry == "general" else m * (m + 1) // 2
            if len(vals) != expected:
                raise InputError(f"{path}: expected {expected} values, found {len(vals)}")
            if symmetry == "general":
                return as_matrix(np.array(vals).reshape(n, m).T)
            out = np.zeros((m, n))
            k = 0
            for j in range(n):
                for i in range(j, m):
                    out[i, j] = vals[k]
                    out[j, i] = vals[k]
                    k += 1
            return as_matrix(out)
        m, n, nnz = int(sizes[0]), int(sizes[1]), int(sizes[2])
        out = np.zeros((m, n))
        entries = body[1:]
        if len(entries) != nnz:
            raise InputError(f"{path}: expected {nnz} entries, found {len(entries)}")
        for ln in entries:
            toks = ln.split()
            i, j, v = int(toks[0]) - 1, int(toks[1]) - 1, float(toks[2])
            out[i, j] = v
            if symmetry == "symmetric":
                out[j, i] = v
        return as_matrix(out)
    except (ValueError, IndexError) as exc:
        raise InputError(f"{path}: malformed MatrixMarket data ({exc})") from None
