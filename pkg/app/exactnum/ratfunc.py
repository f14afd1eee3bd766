import cmath
from fractions import Fraction
from typing import Dict, Optional, Tuple, Union

from app.exactnum.cyclotomic import CycNum, CyclotomicField
from app.exactnum.series import LaurentSeries
from app.utils.errors import ArithmeticDomainError, PoleProximityError

Point = Union[CycNum, str]


def _add_into(target: Dict[int, CycNum], exponent: int, value: CycNum) -> None:
    if exponent in target:
        total = target[exponent] + value
        if total:
            target[exponent] = total
        else:
            del target[exponent]
    elif value:
        target[exponent] = value


def _poly_mul(a: Dict[int, CycNum], b: Dict[int, CycNum]) -> Dict[int, CycNum]:
    out: Dict[int, CycNum] = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            _add_into(out, e1 + e2, c1 * c2)
    return out


def _divide_by_binomial(num: Dict[int, CycNum], n: int, c: CycNum) -> Tuple[Dict[int, CycNum], Dict[int, CycNum]]:
    """Divides a Laurent polynomial by (u^n - c); returns (quotient, remainder)."""
    rem = dict(num)
    quotient: Dict[int, CycNum] = {}
    if not rem:
        return quotient, rem
    floor = min(rem)
    while rem:
        top = max(rem)
        if top < floor + n:
            break
        q = rem.pop(top)
        quotient[top - n] = q
        _add_into(rem, top - n, q * c)
    return quotient, rem


class RatFunc:
    """A rational function P(u) / prod_c (u^N - c)^m over Q(eps_N).

    P is a Laurent polynomial, every c is nonzero, and no factor (u^N - c)
    divides P; equality is therefore coefficientwise.
    """

    __slots__ = ("field", "num", "den")

    def __init__(self, field: CyclotomicField, num: Dict[int, CycNum],
                 den: Optional[Dict[CycNum, int]] = None, normalize: bool = True):
        self.field = field
        self.num = {e: c for e, c in num.items() if c}
        self.den = {c: m for c, m in (den or {}).items() if m > 0}
        for c in self.den:
            if not c:
                raise ArithmeticDomainError("Denominator factor u^N - 0 is not allowed")
        if normalize:
            self._normalize()

    def _normalize(self) -> None:
        if not self.num:
            self.den = {}
            return
        n = self.field.n
        for c in list(self.den):
            while self.den.get(c, 0) > 0:
                quotient, rem = _divide_by_binomial(self.num, n, c)
                if rem:
                    break
                self.num = quotient
                self.den[c] -= 1
            if self.den.get(c) == 0:
                del self.den[c]

    @classmethod
    def constant(cls, field: CyclotomicField, value) -> "RatFunc":
        return cls(field, {0: field.coerce(value)}, normalize=False)

    @classmethod
    def monomial(cls, field: CyclotomicField, value, exponent: int) -> "RatFunc":
        return cls(field, {exponent: field.coerce(value)}, normalize=False)

    @classmethod
    def linear_pole(cls, field: CyclotomicField, z: CycNum, order: int = 1) -> "RatFunc":
        """(u - z)^(-order), written over the factor u^N - z^N."""
        n = field.n
        z = field.coerce(z)
        if not z:
            return cls.monomial(field, 1, -order)
        cofactor = {r: z ** (n - 1 - r) for r in range(n)}
        num = {0: field.one}
        for _ in range(order):
            num = _poly_mul(num, cofactor)
        return cls(field, num, {z ** n: order})

    def is_zero(self) -> bool:
        return not self.num

    def _with_den(self, den: Dict[CycNum, int]) -> Dict[int, CycNum]:
        """Numerator rewritten over a larger denominator."""
        n = self.field.n
        num = dict(self.num)
        for c, m in den.items():
            extra = m - self.den.get(c, 0)
            for _ in range(extra):
                num = _poly_mul(num, {n: self.field.one, 0: -c})
        return num

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        return RatFunc.constant(self.field, other)

    def __add__(self, other):
        other = self._coerce(other)
        if not other.num:
            return self
        if not self.num:
            return other
        den = dict(self.den)
        for c, m in other.den.items():
            den[c] = max(den.get(c, 0), m)
        num = self._with_den(den)
        for e, c in other._with_den(den).items():
            _add_into(num, e, c)
        return RatFunc(self.field, num, den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.field, {e: -c for e, c in self.num.items()}, self.den, normalize=False)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycNum)):
            c = self.field.coerce(other)
            if not c:
                return RatFunc(self.field, {})
            return RatFunc(self.field, {e: v * c for e, v in self.num.items()}, self.den, normalize=False)
        if not isinstance(other, RatFunc):
            return NotImplemented
        den = dict(self.den)
        for c, m in other.den.items():
            den[c] = den.get(c, 0) + m
        return RatFunc(self.field, _poly_mul(self.num, other.num), den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = self.field.coerce(other)
        return self * c.inverse()

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        try:
            return self == RatFunc.constant(self.field, other)
        except TypeError:
            return NotImplemented

    __hash__ = None

    def scale_var(self, lam: CycNum) -> "RatFunc":
        """Substitutes u -> lam * u."""
        lam = self.field.coerce(lam)
        n = self.field.n
        lam_n = lam ** n
        total = sum(self.den.values())
        shift = lam_n ** (-total)
        num = {e: c * (lam ** e) * shift for e, c in self.num.items()}
        den = {c / lam_n: m for c, m in self.den.items()}
        return RatFunc(self.field, num, den, normalize=False)

    def invert_var(self) -> "RatFunc":
        """Substitutes u -> 1/u."""
        n = self.field.n
        num = {-e: c for e, c in self.num.items()}
        den: Dict[CycNum, int] = {}
        for c, m in self.den.items():
            factor = (-c) ** (-m)
            num = {e + n * m: v * factor for e, v in num.items()}
            den[c.inverse()] = m
        return RatFunc(self.field, num, den, normalize=False)

    def derivative(self) -> "RatFunc":
        """Applies u d/du."""
        n = self.field.n
        result = RatFunc(self.field, {e: c * e for e, c in self.num.items()}, self.den)
        for c, m in self.den.items():
            den = dict(self.den)
            den[c] = den[c] + 1
            num = {e + n: v * (-m * n) for e, v in self.num.items()}
            result = result + RatFunc(self.field, num, den)
        return result

    def eval_exact(self, x) -> CycNum:
        x = self.field.coerce(x)
        n = self.field.n
        if not x and any(e < 0 for e in self.num):
            raise ArithmeticDomainError("Evaluation at u = 0 of a function with a pole there")
        value = self.field.zero
        for e, c in self.num.items():
            value = value + c * (x ** e)
        x_n = x ** n
        for c, m in self.den.items():
            d = x_n - c
            if not d:
                raise ArithmeticDomainError(f"Evaluation at a root of u^{n} - ({c})")
            value = value / (d ** m)
        return value

    def eval_complex(self, u: complex, tol: float = 1e-12) -> complex:
        n = self.field.n
        if abs(u) < tol and any(e < 0 for e in self.num):
            raise PoleProximityError(f"Point {u} is within {tol} of the pole at u = 0")
        value = sum(c.to_complex() * u ** e for e, c in self.num.items())
        u_n = u ** n
        for c, m in self.den.items():
            d = u_n - c.to_complex()
            if abs(d) < tol:
                raise PoleProximityError(f"Point {u} is within {tol} of a root of u^{n} - ({c})")
            value /= d ** m
        return complex(value)

    def expand_at(self, point: Point, order: int) -> LaurentSeries:
        """Laurent expansion known below local exponent `order`.

        The local variable is u at "0", s = 1/u at "inf", and
        xi = u/p - 1 at a nonzero point p.
        """
        if point == "inf":
            return self.invert_var().expand_at("0", order)
        if isinstance(point, str):
            if point != "0":
                raise ValueError(f"Unknown expansion point {point!r}")
            return self._expand_at_zero(order)
        return self._expand_at_point(self.field.coerce(point), order)

    def _expand_at_zero(self, order: int) -> LaurentSeries:
        field = self.field
        n = field.n
        if not self.num:
            return LaurentSeries.zero(field, order)
        v_num = min(self.num)
        work = max(order - v_num, 1)
        result = LaurentSeries(field, self.num, v_num + work + 1)
        for c, m in self.den.items():
            factor = LaurentSeries(field, {0: -c, n: field.one}, work + 1)
            result = result * (factor.inverse() ** m)
        return result.truncate(order)

    def _expand_at_point(self, p: CycNum, order: int) -> LaurentSeries:
        field = self.field
        n = field.n
        if not p:
            return self._expand_at_zero(order)
        p_n = p ** n
        pole = sum(m for c, m in self.den.items() if c == p_n)
        work_num = order + pole + 1
        work_den = order + 2 * pole + 2
        result = LaurentSeries.zero(field, work_num)
        for e, c in self.num.items():
            result = result + LaurentSeries.binomial(field, e, work_num) * (c * p ** e)
        for c, m in self.den.items():
            binom = LaurentSeries.binomial(field, n, work_den)
            factor = binom * p_n + LaurentSeries.monomial(field, -c, 0, work_den)
            result = result * (factor.inverse() ** m)
        return result.truncate(order)

    def residue(self, point: CycNum) -> CycNum:
        """Residue of f(u) du at u = point."""
        p = self.field.coerce(point)
        local = self._expand_at_point(p, 0)
        return local.coeff(-1) * p

    def pole_order_at(self, point: Point) -> int:
        """Order of the pole at a point, zero where f is regular."""
        series = self.expand_at(point, 1)
        v = series.valuation()
        if v is None or v >= 0:
            return 0
        return -v

    def __repr__(self):
        num = " + ".join(f"({c})*u^{e}" for e, c in sorted(self.num.items())) or "0"
        if not self.den:
            return f"RatFunc({num})"
        den = "*".join(f"(u^{self.field.n} - ({c}))^{m}" for c, m in self.den.items())
        return f"RatFunc(({num}) / {den})"
