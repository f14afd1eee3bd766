from typing import Dict, List, Optional, Sequence, Tuple

from app.exactnum.cyclotomic import CycNum, CyclotomicField
from app.utils.errors import ArithmeticDomainError

Row = Dict[int, CycNum]


def row_reduce(field: CyclotomicField, rows: Sequence[Row]) -> Tuple[List[Row], List[int]]:
    """Sparse Gauss-Jordan elimination; returns (reduced pivot rows, pivot columns)."""
    pivots: Dict[int, Row] = {}
    order: List[int] = []
    for raw in rows:
        row = {c: v for c, v in raw.items() if v}
        for col in sorted(row):
            if col in pivots and col in row:
                factor = row[col]
                for c, v in pivots[col].items():
                    value = row.get(c, field.zero) - factor * v
                    if value:
                        row[c] = value
                    else:
                        row.pop(c, None)
        if not row:
            continue
        lead = min(row)
        inv = row[lead].inverse()
        row = {c: v * inv for c, v in row.items()}
        for col, prow in pivots.items():
            if lead in prow:
                factor = prow[lead]
                for c, v in row.items():
                    value = prow.get(c, field.zero) - factor * v
                    if value:
                        prow[c] = value
                    else:
                        prow.pop(c, None)
        pivots[lead] = row
        order.append(lead)
    return [pivots[c] for c in order], order


def rank(field: CyclotomicField, rows: Sequence[Row]) -> int:
    return len(row_reduce(field, rows)[1])


def solve(field: CyclotomicField, rows: Sequence[Row], rhs: Sequence[CycNum], ncols: int) -> Optional[List[CycNum]]:
    """One solution x of A x = rhs, or None when the system is inconsistent."""
    augmented = []
    for row, value in zip(rows, rhs):
        aug = dict(row)
        if value:
            aug[ncols] = field.coerce(value)
        augmented.append(aug)
    reduced, pivots = row_reduce(field, augmented)
    if ncols in pivots:
        return None
    x = [field.zero] * ncols
    for row, col in zip(reduced, pivots):
        x[col] = row.get(ncols, field.zero)
    return x


def nullspace(field: CyclotomicField, rows: Sequence[Row], ncols: int) -> List[List[CycNum]]:
    """Basis of {x : A x = 0}."""
    reduced, pivots = row_reduce(field, rows)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [field.zero] * ncols
        x[f] = field.one
        for row, col in zip(reduced, pivots):
            if f in row:
                x[col] = -row[f]
        basis.append(x)
    return basis


def invert(field: CyclotomicField, matrix: Sequence[Sequence[CycNum]]) -> List[List[CycNum]]:
    """Inverse of a square matrix given as dense rows."""
    n = len(matrix)
    rows = []
    for i, line in enumerate(matrix):
        row = {j: field.coerce(v) for j, v in enumerate(line) if v}
        row[n + i] = field.one
        rows.append(row)
    reduced, pivots = row_reduce(field, rows)
    if sorted(pivots) != list(range(n)):
        raise ArithmeticDomainError("Matrix is singular")
    by_pivot = dict(zip(pivots, reduced))
    return [[by_pivot[i].get(n + j, field.zero) for j in range(n)] for i in range(n)]


class Eliminator:
    """Incremental row echelon form over a cyclotomic field."""

    def __init__(self, field: CyclotomicField):
        self.field = field
        self.pivots: Dict[int, Row] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, raw: Row) -> Row:
        row = {c: v for c, v in raw.items() if v}
        while True:
            hits = [c for c in row if c in self.pivots]
            if not hits:
                return row
            col = min(hits)
            factor = row[col]
            for c, v in self.pivots[col].items():
                value = row.get(c, self.field.zero) - factor * v
                if value:
                    row[c] = value
                else:
                    row.pop(c, None)

    def add(self, raw: Row) -> bool:
        """Adds a row; True when it was independent of the rows seen so far."""
        row = self.reduce(raw)
        if not row:
            return False
        lead = min(row)
        inv = row[lead].inverse()
        self.pivots[lead] = {c: v * inv for c, v in row.items()}
        return True
