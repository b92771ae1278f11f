"""Linear algebra over GF(2).

Matrices enter and leave as dense ``uint8`` arrays of 0/1 entries. Elimination
runs on rows packed little-endian into ``uint64`` words, so one XOR clears a
pivot column from every row that carries it. Pivots are always taken on the
lowest available column, which keeps every basis reproducible.
"""

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

WORD_BITS = 64


def as_binary(matrix: np.ndarray | list[list[int]], ncols: int | None = None) -> np.ndarray:
    """Return a 2-D ``uint8`` copy of ``matrix`` reduced mod 2.

    Args:
        matrix: Array-like of integers
        ncols: Column count to use when ``matrix`` has no rows

    Returns:
        Binary matrix with shape (rows, cols)
    """
    arr = np.array(matrix, dtype=np.int64)
    if arr.size == 0 and arr.ndim != 2 and ncols is not None:
        return np.zeros((0, ncols), dtype=np.uint8)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return (arr % 2).astype(np.uint8)


def pack_rows(matrix: np.ndarray) -> np.ndarray:
    """Pack binary rows into little-endian ``uint64`` words."""
    rows, cols = matrix.shape
    width = max(1, -(-cols // WORD_BITS)) * WORD_BITS
    padded = np.zeros((rows, width), dtype=np.uint8)
    padded[:, :cols] = matrix
    return np.packbits(padded, axis=1, bitorder="little").view(np.uint64)


def unpack_rows(packed: np.ndarray, ncols: int) -> np.ndarray:
    """Inverse of :func:`pack_rows`."""
    bits = np.unpackbits(
        np.ascontiguousarray(packed).view(np.uint8), axis=1, bitorder="little"
    )
    return bits[:, :ncols].copy()


def row_to_int(row: np.ndarray) -> int:
    """Encode a binary row as a Python integer (bit j = column j)."""
    return int.from_bytes(
        np.packbits(np.asarray(row, dtype=np.uint8), bitorder="little").tobytes(),
        "little",
    )


def _eliminate(packed: np.ndarray, pivot_cols: int) -> tuple[np.ndarray, list[int]]:
    """Gauss-Jordan elimination in place, pivoting only on the first columns.

    Args:
        packed: Packed rows, modified in place
        pivot_cols: Pivots are searched in columns ``0 .. pivot_cols - 1``

    Returns:
        Tuple of (packed rows of the reduced echelon form, pivot columns)
    """
    n_rows = packed.shape[0]
    pivots: list[int] = []
    row = 0
    for col in range(pivot_cols):
        if row == n_rows:
            break
        word, bit = divmod(col, WORD_BITS)
        mask = np.uint64(1 << bit)
        hits = np.flatnonzero(packed[row:, word] & mask)
        if hits.size == 0:
            continue
        pivot = row + int(hits[0])
        if pivot != row:
            packed[[row, pivot]] = packed[[pivot, row]]
        others = np.flatnonzero(packed[:, word] & mask)
        others = others[others != row]
        if others.size:
            packed[others] ^= packed[row]
        pivots.append(col)
        row += 1
    return packed[:row], pivots


@dataclass(frozen=True, eq=False)
class RowEchelon:
    """Reduced row echelon form of a binary matrix."""

    rows: np.ndarray
    pivots: tuple[int, ...]
    ncols: int

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vector: np.ndarray) -> np.ndarray:
        """Return ``vector`` reduced against the echelon rows (the residual)."""
        residual = as_binary(vector, self.ncols)[0].copy()
        for index, pivot in enumerate(self.pivots):
            if residual[pivot]:
                residual ^= self.rows[index]
        return residual


def row_reduce(matrix: np.ndarray) -> RowEchelon:
    """Compute the reduced row echelon form with lowest-index pivoting.

    Args:
        matrix: Binary matrix

    Returns:
        RowEchelon holding the nonzero reduced rows and their pivot columns
    """
    mat = as_binary(matrix)
    ncols = mat.shape[1]
    packed, pivots = _eliminate(pack_rows(mat), ncols)
    return RowEchelon(rows=unpack_rows(packed, ncols), pivots=tuple(pivots), ncols=ncols)


def rank(matrix: np.ndarray) -> int:
    """Rank over GF(2)."""
    mat = as_binary(matrix)
    if mat.shape[0] == 0:
        return 0
    return row_reduce(mat).rank


def independent_rows(matrix: np.ndarray) -> list[int]:
    """Indices of a maximal independent subset of rows, chosen greedily in order."""
    mat = as_binary(matrix)
    if mat.shape[0] == 0:
        return []
    return list(row_reduce(mat.T).pivots)


def kernel(matrix: np.ndarray) -> np.ndarray:
    """Basis of the right null space {x : matrix @ x = 0}.

    One basis vector per free column, in increasing column order.

    Args:
        matrix: Binary matrix with n columns

    Returns:
        Binary matrix of shape (n - rank, n)
    """
    mat = as_binary(matrix)
    ncols = mat.shape[1]
    echelon = row_reduce(mat)
    pivots = list(echelon.pivots)
    pivot_set = set(pivots)
    free = [col for col in range(ncols) if col not in pivot_set]
    basis = np.zeros((len(free), ncols), dtype=np.uint8)
    if free:
        basis[np.arange(len(free)), free] = 1
        if pivots:
            basis[:, pivots] = echelon.rows[:, free].T
    return basis


def left_kernel(matrix: np.ndarray) -> np.ndarray:
    """Basis of {a : a @ matrix = 0}."""
    return kernel(as_binary(matrix).T)


def solve(matrix: np.ndarray, vector: np.ndarray) -> np.ndarray | None:
    """Express ``vector`` as a combination of the rows of ``matrix``.

    Args:
        matrix: Binary matrix with m rows and n columns
        vector: Binary vector of length n

    Returns:
        Coefficient vector of length m, or None if ``vector`` is not in the row space
    """
    mat = as_binary(matrix)
    n_rows, ncols = mat.shape
    augmented = np.concatenate([mat, np.eye(n_rows, dtype=np.uint8)], axis=1)
    packed, pivots = _eliminate(pack_rows(augmented), ncols)
    rows = unpack_rows(packed, ncols + n_rows)
    target = np.concatenate(
        [as_binary(vector, ncols)[0], np.zeros(n_rows, dtype=np.uint8)]
    )
    for index, pivot in enumerate(pivots):
        if target[pivot]:
            target ^= rows[index]
    if target[:ncols].any():
        return None
    return target[ncols:].copy()


def in_rowspace(matrix: np.ndarray, vector: np.ndarray) -> bool:
    """True iff ``vector`` is a GF(2) combination of the rows of ``matrix``."""
    mat = as_binary(matrix)
    if mat.shape[0] == 0:
        return not as_binary(vector).any()
    return not row_reduce(mat).reduce(vector).any()


def inverse(matrix: np.ndarray) -> np.ndarray:
    """Inverse of a square invertible binary matrix.

    Raises:
        ValueError: If the matrix is not square or is singular
    """
    mat = as_binary(matrix)
    size = mat.shape[0]
    if mat.shape != (size, size):
        raise ValueError(f"Matrix is not square: {mat.shape}")
    augmented = np.concatenate([mat, np.eye(size, dtype=np.uint8)], axis=1)
    packed, pivots = _eliminate(pack_rows(augmented), size)
    if pivots != list(range(size)):
        raise ValueError("Matrix is singular over GF(2)")
    return unpack_rows(packed, 2 * size)[:, size:]


def matmul(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Matrix product mod 2.

    Integer counts are accumulated in float64 so BLAS does the work; counts stay
    far below 2**53.
    """
    product = as_binary(left).astype(np.float64) @ as_binary(right).astype(np.float64)
    return (np.rint(product).astype(np.int64) % 2).astype(np.uint8)
