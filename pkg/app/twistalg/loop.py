from typing import Dict, Iterable, List, Tuple

from app.exactnum.cyclotomic import CycNum, CyclotomicField
from app.twistalg.matrices import GMat, j_bracket_coeff, j_compose, j_decompose, j_trace
from app.utils.errors import AlgebraError

SITES = ("node0", "nodeinf", "marked")

Key = Tuple[int, int, int]


class LoopElement:
    """A finite sum of J_ab (x) x^n plus a multiple of the central element k-hat.

    The loop variable x is t at node0, s = 1/t at nodeinf and the local
    coordinate at a marked point.
    """

    __slots__ = ("field", "terms", "central", "site")

    def __init__(self, field: CyclotomicField, terms: Dict[Key, CycNum], central=0, site: str = "marked"):
        if site not in SITES:
            raise AlgebraError(f"Unknown algebra site {site!r}")
        n = field.n
        self.field = field
        self.site = site
        self.central = field.coerce(central)
        self.terms: Dict[Key, CycNum] = {}
        for (a, b, m), c in terms.items():
            if not c:
                continue
            key = (a % n, b % n, m)
            if key[:2] == (0, 0):
                raise AlgebraError("The identity matrix is not in sl_N")
            if site == "node0" and (m - a) % n:
                raise AlgebraError(f"J_{a}{b} t^{m} violates the node0 grading")
            if site == "nodeinf" and (m + a) % n:
                raise AlgebraError(f"J_{a}{b} s^{m} violates the nodeinf grading")
            self.terms[key] = self.terms[key] + c if key in self.terms else c
        self.terms = {k: v for k, v in self.terms.items() if v}

    @classmethod
    def from_matrix(cls, x: GMat, power: int, site: str = "marked", coeff=1) -> "LoopElement":
        """X (x) x^power, decomposed in the J basis."""
        parts = j_decompose(x)
        if (0, 0) in parts:
            raise AlgebraError("Matrix is not traceless")
        c = x.field.coerce(coeff)
        return cls(x.field, {(a, b, power): v * c for (a, b), v in parts.items()}, 0, site)

    @classmethod
    def basis(cls, field: CyclotomicField, a: int, b: int, power: int, site: str = "marked") -> "LoopElement":
        return cls(field, {(a, b, power): field.one}, 0, site)

    @classmethod
    def khat(cls, field: CyclotomicField, site: str = "marked", coeff=1) -> "LoopElement":
        return cls(field, {}, coeff, site)

    def _check(self, other: "LoopElement") -> None:
        if self.site != other.site:
            raise AlgebraError(f"Cannot combine elements of {self.site} and {other.site}")

    def __add__(self, other: "LoopElement") -> "LoopElement":
        self._check(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return LoopElement(self.field, terms, self.central + other.central, self.site)

    def __neg__(self) -> "LoopElement":
        return self.scale(-1)

    def __sub__(self, other: "LoopElement") -> "LoopElement":
        return self + (-other)

    def scale(self, c) -> "LoopElement":
        c = self.field.coerce(c)
        return LoopElement(self.field, {k: v * c for k, v in self.terms.items()}, self.central * c, self.site)

    def matrix_terms(self) -> List[Tuple[GMat, int]]:
        """The element as a list of (X, n) pairs grouped by power."""
        by_power: Dict[int, Dict[Tuple[int, int], CycNum]] = {}
        for (a, b, m), c in self.terms.items():
            by_power.setdefault(m, {})[(a, b)] = c
        return [(j_compose(self.field, parts), m) for m, parts in sorted(by_power.items())]

    def is_zero(self) -> bool:
        return not self.terms and not self.central

    def __eq__(self, other):
        if not isinstance(other, LoopElement):
            return NotImplemented
        return self.site == other.site and self.terms == other.terms and self.central == other.central

    __hash__ = None

    def __repr__(self):
        parts = [f"({c})J_{a}{b}x^{m}" for (a, b, m), c in sorted(self.terms.items())]
        if self.central:
            parts.append(f"({self.central})k")
        return f"LoopElement[{self.site}](" + " + ".join(parts or ["0"]) + ")"


def mode_cocycle(field: CyclotomicField, site: str, a: int, b: int, m: int, c: int, d: int, n: int) -> CycNum:
    """Central term of [J_ab x^m, J_cd x^n]: Res(d(x^m) x^n) tr(J_ab J_cd), divided by N at the nodes."""
    if m + n != 0 or m == 0:
        return field.zero
    value = j_trace(field, a, b, c, d) * m
    if site in ("node0", "nodeinf"):
        value = value / field.n
    return value


def cocycle(x: LoopElement, y: LoopElement, site: str = None) -> CycNum:
    """Residue pairing: (1/N) Res (dA | B) at the nodes and Res (dA | B) at marked points."""
    x._check(y)
    site = site or x.site
    if site != x.site:
        raise AlgebraError(f"Elements of {x.site} cannot be paired at {site}")
    acc = x.field.zero
    for (a, b, m), c1 in x.terms.items():
        for (c, d, n), c2 in y.terms.items():
            value = mode_cocycle(x.field, site, a, b, m, c, d, n)
            if value:
                acc = acc + value * c1 * c2
    return acc


def bracket(x: LoopElement, y: LoopElement) -> LoopElement:
    """[X x^m, Y x^n] = [X, Y] x^(m+n) + cocycle * k-hat; k-hat is central."""
    x._check(y)
    field = x.field
    n_ = field.n
    terms: Dict[Key, CycNum] = {}
    central = field.zero
    for (a, b, m), c1 in x.terms.items():
        for (c, d, n), c2 in y.terms.items():
            coeff = j_bracket_coeff(field, a, b, c, d)
            if coeff:
                key = ((a + c) % n_, (b + d) % n_, m + n)
                value = coeff * c1 * c2
                terms[key] = terms[key] + value if key in terms else value
            central = central + mode_cocycle(field, x.site, a, b, m, c, d, n) * c1 * c2
    return LoopElement(field, terms, central, x.site)


def loop_basis(field: CyclotomicField, site: str, powers: Iterable[int]) -> List[LoopElement]:
    """All basis monomials J_ab x^m allowed at a site for the given powers."""
    n = field.n
    out = []
    for m in powers:
        for a in range(n):
            if site == "node0" and (m - a) % n:
                continue
            if site == "nodeinf" and (m + a) % n:
                continue
            for b in range(n):
                if (a, b) != (0, 0):
                    out.append(LoopElement.basis(field, a, b, m, site))
    return out
