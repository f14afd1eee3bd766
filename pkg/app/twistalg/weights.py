from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Sequence, Tuple

import sympy

from app.utils.errors import AlgebraError, WeightError

REPRESENTATIONS = ("trivial", "fund", "antifund")


@dataclass(frozen=True)
class AffineWeight:
    """A level-k weight whose finite part is stored as N diagonal values summing to zero."""

    level: Fraction
    values: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.values) < 2:
            raise WeightError("A weight needs at least two diagonal values")
        if sum(self.values) != 0:
            raise WeightError(f"Diagonal values {self.values} do not sum to zero")

    @classmethod
    def from_values(cls, values: Sequence, level=0) -> "AffineWeight":
        """Accepts any diagonal values and subtracts their average."""
        vals = [Fraction(v) for v in values]
        avg = sum(vals) / len(vals)
        return cls(Fraction(level), tuple(v - avg for v in vals))

    @classmethod
    def from_h_values(cls, h_values: Sequence, level=0) -> "AffineWeight":
        """Builds the weight from its values mu(H_(i,i+1)) for i = 1..N-1."""
        vals = [Fraction(0)]
        for h in h_values:
            vals.append(vals[-1] - Fraction(h))
        return cls.from_values(vals, level)

    @classmethod
    def zero(cls, n: int, level=0) -> "AffineWeight":
        return cls(Fraction(level), tuple(Fraction(0) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.values)

    def h_value(self, i: int) -> Fraction:
        """mu(H_(i,i+1)) with i taken mod N; i = 0 gives mu(H_(N,1))."""
        n = self.n
        p = (i - 1) % n
        return self.values[p] - self.values[(p + 1) % n]

    def j0_value(self, field, b: int):
        """Scalar by which J_(0,b) = gamma^-b acts on a vector of this weight."""
        acc = field.zero
        for j, v in enumerate(self.values):
            acc = acc + field.eps(b * j) * v
        return acc

    def compose_adbeta(self, power: int = 1) -> "AffineWeight":
        """mu o Ad(beta)^power, using (mu o Ad beta)_j = mu_(j-1)."""
        n = self.n
        return AffineWeight(self.level, tuple(self.values[(j - power) % n] for j in range(n)))

    def __add__(self, other: "AffineWeight") -> "AffineWeight":
        return AffineWeight(self.level + other.level, tuple(x + y for x, y in zip(self.values, other.values)))

    def __neg__(self) -> "AffineWeight":
        return AffineWeight(-self.level, tuple(-x for x in self.values))

    def with_level(self, level) -> "AffineWeight":
        return AffineWeight(Fraction(level), self.values)

    def coroot_pairings(self, site: str = "node0") -> Dict[int, Fraction]:
        """<mu, alpha_i^v> for i = 0..N-1 through the node identification."""
        n = self.n
        sign = 1 if site == "node0" else -1
        if site not in ("node0", "nodeinf"):
            raise WeightError(f"Coroot pairings are defined at the nodes, not at {site}")
        return {i: sign * self.h_value(i) + self.level / n for i in (*range(1, n), 0)}

    def pairing_values(self, site: str = "node0") -> List[Fraction]:
        """The coroot pairings in the order alpha_1, ..., alpha_(N-1), alpha_0."""
        return list(self.coroot_pairings(site).values())

    def to_dict(self) -> dict:
        return {"level": str(self.level), "values": [str(v) for v in self.values],
                "h_values": [str(self.h_value(i)) for i in range(1, self.n)]}


def is_dominant_integral(mu: AffineWeight, site: str = "node0") -> bool:
    return all(v.denominator == 1 and v >= 0 for v in mu.coroot_pairings(site).values())


def _h_matrix(n: int, power: int) -> sympy.Matrix:
    """Ad(beta)^power on h in the basis H_1..H_(N-1), as a sympy matrix acting on columns."""
    cols = []
    for i in range(1, n):
        d = [0] * n
        d[i - 1], d[i] = 1, -1
        # Ad(beta) diag(d) = diag(d_(j+1))
        shifted = [d[(j + power) % n] for j in range(n)]
        coords = []
        acc = 0
        for j in range(n - 1):
            acc += shifted[j]
            coords.append(acc)
        cols.append(coords)
    return sympy.Matrix(cols).T


def weight_tilde(lam: AffineWeight, level) -> Tuple[AffineWeight, AffineWeight]:
    """The pair (-lam o (1 - Ad beta^-1)^-1, -lam o (1 - Ad beta)^-1) at the given level.

    Both are solved by cyclic recurrences on diagonal values and the first is
    cross-checked against lam o (1 - Ad beta)^-1 o Ad beta on the H basis.
    """
    n = lam.n
    level = Fraction(level)
    tilde = [Fraction(0)]
    prime = [Fraction(0)]
    for j in range(n - 1):
        tilde.append(tilde[-1] + lam.values[j])
        prime.append(prime[-1] - lam.values[j + 1])
    lam_tilde = AffineWeight.from_values(tilde, level)
    lam_prime = AffineWeight.from_values(prime, level)

    row = sympy.Matrix([[sympy.Rational(lam.h_value(i).numerator, lam.h_value(i).denominator)
                         for i in range(1, n)]])
    one = sympy.eye(n - 1)
    ad_beta = _h_matrix(n, 1)
    first = -row * (one - ad_beta.inv()).inv()
    second = row * (one - ad_beta).inv() * ad_beta
    third = -row * (one - ad_beta).inv()
    expected_tilde = [Fraction(int(x.p), int(x.q)) for x in first]
    if list(first) != list(second):
        raise AlgebraError("The two expressions for the tilde weight disagree")
    if expected_tilde != [lam_tilde.h_value(i) for i in range(1, n)]:
        raise AlgebraError("Recurrence and matrix forms of the tilde weight disagree")
    if [Fraction(int(x.p), int(x.q)) for x in third] != [lam_prime.h_value(i) for i in range(1, n)]:
        raise AlgebraError("Recurrence and matrix forms of the primed weight disagree")
    return lam_tilde, lam_prime


def rep_weights(kind: str, n: int) -> List[AffineWeight]:
    """Weights of the basis vectors e_0..e_(N-1) (a single zero weight for the trivial module)."""
    if kind == "trivial":
        return [AffineWeight.zero(n)]
    if kind not in REPRESENTATIONS:
        raise WeightError(f"Unknown representation {kind!r}")
    sign = 1 if kind == "fund" else -1
    return [AffineWeight.from_values([sign if j == l else 0 for j in range(n)]) for l in range(n)]


def rep_dim(kind: str, n: int) -> int:
    return 1 if kind == "trivial" else n


def tensor_weights(kinds: Sequence[str], n: int) -> Counter:
    """Multiset of weights of V_1 (x) ... (x) V_L, keyed by diagonal values."""
    out: Counter = Counter()
    for combo in product(*(rep_weights(k, n) for k in kinds)):
        total = AffineWeight.zero(n)
        for w in combo:
            total = total + w
        out[total.values] += 1
    return out


def weight_set(kinds: Sequence[str], n: int) -> List[AffineWeight]:
    """The distinct weights wt(V), in a fixed order."""
    return [AffineWeight(Fraction(0), vals) for vals in sorted(tensor_weights(kinds, n))]
