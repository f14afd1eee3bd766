import cmath
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple, Union

import sympy

from app.utils.errors import ArithmeticDomainError

Rational = Union[int, Fraction]


def _trim(poly: List[Fraction]) -> List[Fraction]:
    """Drops trailing zero coefficients of a low-to-high coefficient list."""
    poly = list(poly)
    while poly and poly[-1] == 0:
        poly.pop()
    return poly


def _poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> List[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _poly_sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> List[Fraction]:
    size = max(len(a), len(b))
    out = [Fraction(0)] * size
    for i, x in enumerate(a):
        out[i] += x
    for i, y in enumerate(b):
        out[i] -= y
    return _trim(out)


def _poly_divmod(a: Sequence[Fraction], b: Sequence[Fraction]) -> Tuple[List[Fraction], List[Fraction]]:
    """Polynomial long division over Q; b must be trimmed and nonzero."""
    a = list(a)
    if len(a) < len(b):
        return [], _trim(a)
    quotient = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        coef = a[i + len(b) - 1] / lead
        quotient[i] = coef
        if coef:
            for j, bj in enumerate(b):
                a[i + j] -= coef * bj
    return _trim(quotient), _trim(a[:len(b) - 1])


class CyclotomicField:
    """The field Q(eps) for eps = exp(2 pi i / N), reduced modulo the N-th cyclotomic polynomial."""

    _instances: Dict[int, "CyclotomicField"] = {}

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"Cyclotomic order must be positive, got {n}")
        self.n = n
        x = sympy.Symbol("x")
        high_to_low = sympy.Poly(sympy.cyclotomic_poly(n, x), x).all_coeffs()
        self.modulus = tuple(Fraction(int(c)) for c in reversed(high_to_low))
        self.degree = len(self.modulus) - 1
        self.zero = CycNum(self, (Fraction(0),) * self.degree)
        self.one = self.from_rational(1)
        self._eps_powers = [CycNum(self, self.reduce([0] * j + [1])) for j in range(n)]

    @classmethod
    def get(cls, n: int) -> "CyclotomicField":
        """Returns the cached field for order n."""
        field = cls._instances.get(n)
        if field is None:
            field = cls(n)
            cls._instances[n] = field
        return field

    def reduce(self, coeffs: Sequence[Rational]) -> Tuple[Fraction, ...]:
        c = [Fraction(v) for v in coeffs]
        d = self.degree
        for i in range(len(c) - 1, d - 1, -1):
            lead = c[i]
            if lead:
                shift = i - d
                for j in range(d):
                    c[shift + j] -= lead * self.modulus[j]
                c[i] = Fraction(0)
        c = c[:d] + [Fraction(0)] * max(0, d - len(c))
        return tuple(c)

    def from_rational(self, value: Rational) -> "CycNum":
        return CycNum(self, (Fraction(value),) + (Fraction(0),) * (self.degree - 1))

    def from_coeffs(self, coeffs: Sequence[Rational]) -> "CycNum":
        """Builds sum coeffs[j] * eps^j, reducing as needed."""
        return CycNum(self, self.reduce(coeffs))

    def eps(self, power: int = 1) -> "CycNum":
        return self._eps_powers[power % self.n]

    def coerce(self, value) -> "CycNum":
        if isinstance(value, CycNum):
            if value.field is not self:
                raise ArithmeticDomainError(
                    f"Cannot mix Q(eps_{value.field.n}) with Q(eps_{self.n})")
            return value
        if isinstance(value, (int, Fraction)):
            return self.from_rational(value)
        raise TypeError(f"Cannot coerce {type(value).__name__} into Q(eps_{self.n})")

    def primitive_root_mod(self, prime: int) -> int:
        """Finds a root of the cyclotomic polynomial modulo a prime p with p = 1 mod N."""
        if (prime - 1) % self.n != 0:
            raise ArithmeticDomainError(f"Prime {prime} is not 1 mod {self.n}")
        modulus = [int(c) for c in self.modulus]
        for g in range(2, prime):
            omega = pow(g, (prime - 1) // self.n, prime)
            value = 0
            for c in reversed(modulus):
                value = (value * omega + c) % prime
            if value == 0:
                return omega
        raise ArithmeticDomainError(f"No primitive {self.n}-th root of unity modulo {prime}")

    def __repr__(self):
        return f"CyclotomicField({self.n})"


class CycNum:
    """An exact element of Q(eps_N) in the power basis 1, eps, ..., eps^(d-1)."""

    __slots__ = ("field", "coeffs", "_hash")

    def __init__(self, field: CyclotomicField, coeffs: Tuple[Fraction, ...]):
        self.field = field
        self.coeffs = coeffs
        self._hash = None

    @property
    def n(self) -> int:
        return self.field.n

    def _other(self, other):
        if isinstance(other, CycNum):
            if other.field is not self.field:
                raise ArithmeticDomainError(
                    f"Cannot mix Q(eps_{other.field.n}) with Q(eps_{self.field.n})")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        return None

    def __add__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return CycNum(self.field, tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return CycNum(self.field, tuple(x - y for x, y in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return CycNum(self.field, tuple(-x for x in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycNum(self.field, tuple(x * other for x in self.coeffs))
        other = self._other(other)
        if other is None:
            return NotImplemented
        if self.field.degree == 1:
            return CycNum(self.field, (self.coeffs[0] * other.coeffs[0],))
        return CycNum(self.field, self.field.reduce(_poly_mul(self.coeffs, other.coeffs)))

    __rmul__ = __mul__

    def inverse(self) -> "CycNum":
        """Inverse by the extended Euclidean algorithm against the cyclotomic modulus."""
        a = _trim(list(self.coeffs))
        if not a:
            raise ArithmeticDomainError(f"Division by zero in Q(eps_{self.field.n})")
        if self.field.degree == 1:
            return CycNum(self.field, (1 / self.coeffs[0],))
        r0, r1 = list(self.field.modulus), a
        s0: List[Fraction] = []
        s1 = [Fraction(1)]
        while r1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        # r0 is a nonzero constant because the modulus is irreducible
        c = r0[0]
        return CycNum(self.field, self.field.reduce([x / c for x in s0]))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ArithmeticDomainError(f"Division by zero in Q(eps_{self.field.n})")
            return CycNum(self.field, tuple(x / other for x in self.coeffs))
        other = self._other(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        base = self
        if exponent < 0:
            base = self.inverse()
            exponent = -exponent
        result = self.field.one
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __hash__(self):
        if self._hash is None:
            if all(c == 0 for c in self.coeffs[1:]):
                self._hash = hash(self.coeffs[0])
            else:
                self._hash = hash((self.field.n, self.coeffs))
        return self._hash

    def __bool__(self):
        return any(self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ArithmeticDomainError(f"{self} is not rational")
        return self.coeffs[0]

    def to_complex(self) -> complex:
        n = self.field.n
        return sum(complex(float(c)) * cmath.exp(2j * cmath.pi * j / n)
                   for j, c in enumerate(self.coeffs) if c)

    def mod_image(self, prime: int, omega: int) -> int:
        """Image under the ring map Z[1/d][eps] -> F_p sending eps to omega."""
        value = 0
        power = 1
        for c in self.coeffs:
            if c:
                if c.denominator % prime == 0:
                    raise ArithmeticDomainError(f"Denominator of {c} vanishes modulo {prime}")
                value += c.numerator * pow(c.denominator, -1, prime) * power
            power = power * omega % prime
        return value % prime

    def __str__(self):
        terms = []
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if j == 0:
                terms.append(str(c))
            elif j == 1:
                terms.append(f"{c}*e")
            else:
                terms.append(f"{c}*e^{j}")
        return " + ".join(terms) if terms else "0"

    def __repr__(self):
        return f"CycNum(N={self.field.n}, {self})"
