from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from app.exactnum.cyclotomic import CycNum, CyclotomicField
from app.utils.errors import AlgebraError, ArithmeticDomainError

Label = Tuple[int, int]


class GMat:
    """An N x N matrix over Q(eps_N)."""

    __slots__ = ("field", "rows")

    def __init__(self, field: CyclotomicField, rows: Sequence[Sequence]):
        self.field = field
        self.rows = tuple(tuple(field.coerce(x) for x in row) for row in rows)
        if any(len(row) != field.n for row in self.rows) or len(self.rows) != field.n:
            raise AlgebraError(f"Matrix must be {field.n} x {field.n}")

    @classmethod
    def zeros(cls, field: CyclotomicField) -> "GMat":
        return cls(field, [[0] * field.n for _ in range(field.n)])

    @classmethod
    def identity(cls, field: CyclotomicField) -> "GMat":
        n = field.n
        return cls(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def elementary(cls, field: CyclotomicField, i: int, j: int) -> "GMat":
        """E_ij with 0-based indices taken mod N."""
        n = field.n
        i, j = i % n, j % n
        return cls(field, [[1 if (r, c) == (i, j) else 0 for c in range(n)] for r in range(n)])

    @classmethod
    def diagonal(cls, field: CyclotomicField, values: Sequence) -> "GMat":
        n = field.n
        return cls(field, [[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def n(self) -> int:
        return self.field.n

    def __getitem__(self, index: Tuple[int, int]) -> CycNum:
        i, j = index
        return self.rows[i][j]

    def __add__(self, other: "GMat") -> "GMat":
        return GMat(self.field, [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other: "GMat") -> "GMat":
        return GMat(self.field, [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self) -> "GMat":
        return GMat(self.field, [[-x for x in row] for row in self.rows])

    def scale(self, c) -> "GMat":
        c = self.field.coerce(c)
        return GMat(self.field, [[x * c for x in row] for row in self.rows])

    def __matmul__(self, other: "GMat") -> "GMat":
        n = self.n
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = self.field.zero
                for k in range(n):
                    a = self.rows[i][k]
                    if a:
                        b = other.rows[k][j]
                        if b:
                            acc = acc + a * b
                row.append(acc)
            out.append(row)
        return GMat(self.field, out)

    def __pow__(self, exponent: int) -> "GMat":
        base = self.inverse() if exponent < 0 else self
        result = GMat.identity(self.field)
        for _ in range(abs(exponent)):
            result = result @ base
        return result

    def commutator(self, other: "GMat") -> "GMat":
        return self @ other - other @ self

    def trace(self) -> CycNum:
        acc = self.field.zero
        for i in range(self.n):
            acc = acc + self.rows[i][i]
        return acc

    def transpose(self) -> "GMat":
        return GMat(self.field, list(zip(*self.rows)))

    def inverse(self) -> "GMat":
        """Gauss-Jordan inverse over Q(eps_N)."""
        n = self.n
        aug = [list(row) + [self.field.one if i == j else self.field.zero for j in range(n)]
               for i, row in enumerate(self.rows)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if aug[r][col]), None)
            if pivot is None:
                raise ArithmeticDomainError("Matrix is singular")
            aug[col], aug[pivot] = aug[pivot], aug[col]
            inv = aug[col][col].inverse()
            aug[col] = [x * inv for x in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    factor = aug[r][col]
                    aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
        return GMat(self.field, [row[n:] for row in aug])

    def is_zero(self) -> bool:
        return not any(x for row in self.rows for x in row)

    def to_numpy(self) -> np.ndarray:
        return np.array([[x.to_complex() for x in row] for row in self.rows], dtype=complex)

    def __eq__(self, other):
        if not isinstance(other, GMat):
            return NotImplemented
        return self.rows == other.rows

    __hash__ = None

    def __repr__(self):
        return "GMat(" + "; ".join(", ".join(str(x) for x in row) for row in self.rows) + ")"


def make_twist_pair(n: int) -> Tuple[GMat, GMat]:
    """Returns (beta, gamma): the cyclic shift beta e_j = e_(j-1) and gamma = diag(eps^-j)."""
    if n < 2:
        raise AlgebraError(f"Twist data needs N >= 2, got {n}")
    field = CyclotomicField.get(n)
    beta = GMat(field, [[1 if i == (j - 1) % n else 0 for j in range(n)] for i in range(n)])
    gamma = GMat.diagonal(field, [field.eps(-j) for j in range(n)])
    return beta, gamma


def labels(n: int, include_identity: bool = False) -> List[Label]:
    """All (a, b) in Z_N x Z_N, without (0, 0) unless asked."""
    return [(a, b) for a in range(n) for b in range(n) if include_identity or (a, b) != (0, 0)]


def j_basis(n: int, a: int, b: int) -> GMat:
    """J_ab = beta^a gamma^-b, so that J_ab e_j = eps^(bj) e_(j-a)."""
    field = CyclotomicField.get(n)
    a, b = a % n, b % n
    rows = [[field.zero] * n for _ in range(n)]
    for j in range(n):
        rows[(j - a) % n][j] = field.eps(b * j)
    return GMat(field, rows)


def ad(g: GMat, x: GMat) -> GMat:
    return g @ x @ g.inverse()


def inner(a: GMat, b: GMat) -> CycNum:
    """The trace form (A | B) = tr(AB)."""
    return (a @ b).trace()


def j_product_coeff(field: CyclotomicField, a: int, b: int, c: int, d: int) -> CycNum:
    """J_ab J_cd = eps^(-bc) J_(a+c, b+d)."""
    return field.eps(-b * c)


def j_bracket_coeff(field: CyclotomicField, a: int, b: int, c: int, d: int) -> CycNum:
    """[J_ab, J_cd] = (eps^(-bc) - eps^(-ad)) J_(a+c, b+d)."""
    return field.eps(-b * c) - field.eps(-a * d)


def j_trace(field: CyclotomicField, a: int, b: int, c: int, d: int) -> CycNum:
    """tr(J_ab J_cd) = N eps^(-bc) when (c, d) = (-a, -b) mod N, else 0."""
    n = field.n
    if (a + c) % n or (b + d) % n:
        return field.zero
    return field.eps(-b * c) * n


def dual_coeff(field: CyclotomicField, a: int, b: int) -> CycNum:
    """J^ab = dual_coeff * J_(-a,-b), with (J_ab | J^cd) = delta."""
    return field.eps(-a * b) / field.n


def dual_basis(n: int) -> Dict[Label, GMat]:
    field = CyclotomicField.get(n)
    return {(a, b): j_basis(n, -a, -b).scale(dual_coeff(field, a, b)) for a, b in labels(n)}


def j_decompose(x: GMat) -> Dict[Label, CycNum]:
    """Coefficients x_ab with X = sum x_ab J_ab, including the identity component (0, 0)."""
    field = x.field
    n = field.n
    out: Dict[Label, CycNum] = {}
    for a in range(n):
        for b in range(n):
            acc = field.zero
            for j in range(n):
                entry = x[(j - a) % n, j]
                if entry:
                    acc = acc + entry * field.eps(-b * j)
            if acc:
                out[(a, b)] = acc / n
    return out


def j_compose(field: CyclotomicField, coeffs: Dict[Label, CycNum]) -> GMat:
    n = field.n
    out = GMat.zeros(field)
    for (a, b), c in coeffs.items():
        if c:
            out = out + j_basis(n, a, b).scale(c)
    return out


def transpose_label(field: CyclotomicField, a: int, b: int) -> Tuple[CycNum, Label]:
    """J_ab^T = eps^(ab) J_(-a, b)."""
    n = field.n
    return field.eps(a * b), ((-a) % n, b % n)


def iter_entries(x: GMat) -> Iterator[Tuple[int, int, CycNum]]:
    for i, row in enumerate(x.rows):
        for j, v in enumerate(row):
            if v:
                yield i, j, v
