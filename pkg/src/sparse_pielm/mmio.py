"""Matrix Market coordinate I/O for real general/symmetric matrices."""
from __future__ import annotations

import numpy as np

from .sparse import SparseFormatError, SparseMatrix


class MatrixMarketError(SparseFormatError):
    """Raised on malformed Matrix Market input."""


def read_matrix_market(path) -> SparseMatrix:
    """Read a coordinate-format Matrix Market file into CSR.

    Accepts field ``real`` with symmetry ``general`` or ``symmetric``;
    symmetric files have their off-diagonal entries mirrored. Indices are
    1-based in the file. Pattern/integer/complex fields, array format and
    other symmetries are rejected.
    """
    with open(path, "r") as fh:
        header = fh.readline()
        parts = header.strip().lower().split()
        if len(parts) != 5 or parts[0] != "%%matrixmarket" or parts[1] != "matrix":
            raise MatrixMarketError(f"malformed Matrix Market header: {header.strip()!r}")
        fmt, field, symmetry = parts[2], parts[3], parts[4]
        if fmt != "coordinate":
            raise MatrixMarketError(f"unsupported format {fmt!r}, only coordinate is handled")
        if field != "real":
            raise MatrixMarketError(f"unsupported field {field!r}, only real is handled")
        if symmetry not in ("general", "symmetric"):
            raise MatrixMarketError(f"unsupported symmetry {symmetry!r}")

        size_line = None
        for line in fh:
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            size_line = stripped
            break
        if size_line is None:
            raise MatrixMarketError("missing size line")
        dims = size_line.split()
        if len(dims) != 3:
            raise MatrixMarketError(f"malformed size line: {size_line!r}")
        try:
            nrows, ncols, nnz = (int(d) for d in dims)
        except ValueError as exc:
            raise MatrixMarketError(f"malformed size line: {size_line!r}") from exc
        if nrows < 0 or ncols < 0 or nnz < 0:
            raise MatrixMarketError("negative dimension in size line")
        if symmetry == "symmetric" and nrows != ncols:
            raise MatrixMarketError("symmetric matrix must be square")

        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz, dtype=np.float64)
        count = 0
        for line in fh:
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            entry = stripped.split()
            if len(entry) != 3:
                raise MatrixMarketError(f"malformed entry line: {stripped!r}")
            if count >= nnz:
                raise MatrixMarketError("more entries than declared in size line")
            try:
                i = int(entry[0])
                j = int(entry[1])
                v = float(entry[2])
            except ValueError as exc:
                raise MatrixMarketError(f"malformed entry line: {stripped!r}") from exc
            if not (1 <= i <= nrows) or not (1 <= j <= ncols):
                raise MatrixMarketError(f"entry ({i}, {j}) out of range for {nrows}x{ncols}")
            rows[count] = i - 1
            cols[count] = j - 1
            vals[count] = v
            count += 1
        if count != nnz:
            raise MatrixMarketError(f"declared {nnz} entries but found {count}")

    if symmetry == "symmetric":
        off = rows != cols
        rows, cols, vals = (
            np.concatenate([rows, cols[off]]),
            np.concatenate([cols, rows[off]]),
            np.concatenate([vals, vals[off]]),
        )
    return SparseMatrix.from_coo(nrows, ncols, rows, cols, vals)


def write_matrix_market(A: SparseMatrix, path, comment: str | None = None) -> None:
    """Write CSR as coordinate real general, 1-based, full float64 precision."""
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix coordinate real general\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{A.nrows} {A.ncols} {A.nnz}\n")
        row_ids = np.repeat(np.arange(A.nrows, dtype=np.int64), np.diff(A.row_offsets))
        for i, j, v in zip(row_ids, A.col_indices, A.values):
            fh.write(f"{i + 1} {j + 1} {v:.17g}\n")
