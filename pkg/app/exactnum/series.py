from fractions import Fraction
from typing import Dict, Optional

from app.exactnum.cyclotomic import CycNum, CyclotomicField
from app.utils.errors import ArithmeticDomainError, TruncationError


class LaurentSeries:
    """Truncated Laurent series sum c_k x^k, exact for every exponent below prec."""

    __slots__ = ("field", "coeffs", "prec")

    def __init__(self, field: CyclotomicField, coeffs: Dict[int, CycNum], prec: int):
        self.field = field
        self.prec = prec
        self.coeffs = {e: c for e, c in coeffs.items() if e < prec and c}

    @classmethod
    def zero(cls, field: CyclotomicField, prec: int) -> "LaurentSeries":
        return cls(field, {}, prec)

    @classmethod
    def monomial(cls, field: CyclotomicField, coeff, exponent: int, prec: int) -> "LaurentSeries":
        return cls(field, {exponent: field.coerce(coeff)}, prec)

    @classmethod
    def binomial(cls, field: CyclotomicField, exponent: int, prec: int) -> "LaurentSeries":
        """(1 + x)^exponent for an integer exponent, known below prec."""
        coeffs: Dict[int, CycNum] = {}
        binom = Fraction(1)
        for k in range(max(prec, 0)):
            if binom == 0:
                break
            coeffs[k] = field.from_rational(binom)
            binom = binom * (exponent - k) / (k + 1)
        return cls(field, coeffs, prec)

    def valuation(self) -> Optional[int]:
        """Lowest exponent with a nonzero coefficient, None for the zero series."""
        return min(self.coeffs) if self.coeffs else None

    def _order_floor(self) -> int:
        v = self.valuation()
        return self.prec if v is None else v

    def coeff(self, exponent: int) -> CycNum:
        if exponent >= self.prec:
            raise TruncationError(f"Coefficient x^{exponent} requested beyond precision {self.prec}")
        return self.coeffs.get(exponent, self.field.zero)

    def truncate(self, prec: int) -> "LaurentSeries":
        if prec > self.prec:
            raise TruncationError(f"Cannot raise precision from {self.prec} to {prec}")
        return LaurentSeries(self.field, self.coeffs, prec)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiplies by x^k."""
        return LaurentSeries(self.field, {e + k: c for e, c in self.coeffs.items()}, self.prec + k)

    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            other = LaurentSeries.monomial(self.field, other, 0, self.prec)
        prec = min(self.prec, other.prec)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out[e] + c if e in out else c
        return LaurentSeries(self.field, out, prec)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.field, {e: -c for e, c in self.coeffs.items()}, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            c = self.field.coerce(other)
            return LaurentSeries(self.field, {e: v * c for e, v in self.coeffs.items()}, self.prec)
        prec = min(self._order_floor() + other.prec, other._order_floor() + self.prec)
        out: Dict[int, CycNum] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if e >= prec:
                    continue
                out[e] = out[e] + c1 * c2 if e in out else c1 * c2
        return LaurentSeries(self.field, out, prec)

    __rmul__ = __mul__

    def inverse(self) -> "LaurentSeries":
        v = self.valuation()
        if v is None:
            raise ArithmeticDomainError(f"Cannot invert a series that vanishes below x^{self.prec}")
        rel = self.prec - v
        lead_inv = self.coeffs[v].inverse()
        unit = [self.coeffs.get(v + k, self.field.zero) for k in range(rel)]
        inv = [lead_inv]
        for k in range(1, rel):
            acc = self.field.zero
            for j in range(1, k + 1):
                if unit[j]:
                    acc = acc + unit[j] * inv[k - j]
            inv.append(-lead_inv * acc)
        return LaurentSeries(self.field, {k - v: c for k, c in enumerate(inv)}, rel - v)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        base = self.inverse() if exponent < 0 else self
        result = LaurentSeries.monomial(self.field, 1, 0, base.prec - base._order_floor())
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return self.prec == other.prec and self.coeffs == other.coeffs

    def __repr__(self):
        terms = ", ".join(f"{e}: {c}" for e, c in sorted(self.coeffs.items()))
        return f"LaurentSeries({{{terms}}}, prec={self.prec})"
