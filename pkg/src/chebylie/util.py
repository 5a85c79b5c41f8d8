import json
import logging
import sys
from itertools import combinations
from typing import Sequence, TypeVar

from .errors import ConstraintError

T = TypeVar("T")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(verbosity: int = 0):
    # 0 -> WARNING, 1 -> INFO, 2+ -> DEBUG; one stderr handler on the package logger
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logger = logging.getLogger("chebylie")
    logger.handlers.clear()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)
    logger.setLevel(level)
    logger.propagate = False


def dump_json(payload) -> str:
    # Stable key order so reports are byte-identical across runs
    return json.dumps(payload, indent=2, sort_keys=True)


def matrix_product(left: Sequence[Sequence[T]], right: Sequence[Sequence[T]], zero: T) -> tuple:
    size = len(right)
    if any(len(row) != size for row in left):
        raise ConstraintError(f"cannot multiply a {len(left)}x{len(left[0])} matrix by a {size}-row matrix")
    columns = len(right[0])
    rows = []
    for row in left:
        entries = []
        for j in range(columns):
            total = zero
            for m in range(size):
                total = total + row[m] * right[m][j]
            entries.append(total)
        rows.append(tuple(entries))
    return tuple(rows)


def _row_minors(rows: Sequence[Sequence[T]], width: int, zero: T, one: T) -> dict[tuple[int, ...], T]:
    # minors[cols] = determinant of the last len(cols) rows restricted to cols
    minors: dict[tuple[int, ...], T] = {(): one}
    for size in range(1, len(rows) + 1):
        row = rows[len(rows) - size]
        next_minors = {}
        for cols in combinations(range(width), size):
            total = zero
            for position, col in enumerate(cols):
                entry = row[col]
                if not entry:
                    continue
                rest = cols[:position] + cols[position + 1:]
                term = entry * minors[rest]
                total = total - term if position % 2 else total + term
            next_minors[cols] = total
        minors = next_minors
    return minors


def _check_square(matrix: Sequence[Sequence[T]]) -> int:
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ConstraintError("determinant of a non-square matrix")
    return n


def laplace_determinant(matrix: Sequence[Sequence[T]], zero: T, one: T) -> T:
    """Cofactor expansion along rows, memoising minors by their column set."""
    n = _check_square(matrix)
    return _row_minors(matrix, n, zero, one)[tuple(range(n))]


def laplace_adjugate(matrix: Sequence[Sequence[T]], zero: T, one: T) -> tuple:
    """Transpose of the cofactor matrix, so that matrix @ adjugate = det(matrix) I."""
    n = _check_square(matrix)
    if n == 0:
        return ()
    adjugate = [[zero] * n for _ in range(n)]
    for r in range(n):
        # maximal minors of the matrix with row r removed, keyed by the kept columns
        minors = _row_minors([row for m, row in enumerate(matrix) if m != r], n, zero, one)
        for c in range(n):
            minor = minors[tuple(m for m in range(n) if m != c)]
            adjugate[c][r] = -minor if (r + c) % 2 else minor
    return tuple(tuple(row) for row in adjugate)
