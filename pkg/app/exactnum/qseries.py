import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, Optional

from app.exactnum.cyclotomic import CycNum, CyclotomicField
from app.exactnum.ratfunc import RatFunc, _add_into
from app.utils.errors import ArithmeticDomainError, PoleProximityError, TruncationError


@dataclass(frozen=True)
class ValuationBound:
    """ord_(u=0) c_m >= intercept - slope * m for every coefficient c_m, stored or not."""

    intercept: Fraction
    slope: Fraction

    def __post_init__(self):
        object.__setattr__(self, "intercept", Fraction(self.intercept))
        object.__setattr__(self, "slope", Fraction(self.slope))
        if self.slope < 0:
            raise ValueError(f"Valuation slope must be non-negative, got {self.slope}")

    def at(self, m: int) -> Fraction:
        return self.intercept - self.slope * m

    def combine(self, other: "ValuationBound") -> "ValuationBound":
        """Bound for sums."""
        return ValuationBound(min(self.intercept, other.intercept), max(self.slope, other.slope))

    def product(self, other: "ValuationBound") -> "ValuationBound":
        return ValuationBound(self.intercept + other.intercept, max(self.slope, other.slope))

    def shift(self, amount: int) -> "ValuationBound":
        return ValuationBound(self.intercept + amount, self.slope)


def _valuation_at_zero(f: RatFunc) -> Optional[int]:
    # denominators u^N - c with c != 0 are units at u = 0
    return min(f.num) if f.num else None


class QSeries:
    """Power series sum_n c_n(u) q^n with rational-function coefficients, exact through q^order.

    `bound` optionally records a lower bound on the u-adic valuation of every
    coefficient, including the ones beyond `order`; u -> q u needs it to know
    which q-orders the omitted coefficients can still reach.
    """

    __slots__ = ("field", "coeffs", "order", "bound")

    def __init__(self, field: CyclotomicField, coeffs: Dict[int, RatFunc], order: int,
                 bound: Optional[ValuationBound] = None):
        self.field = field
        self.order = order
        self.coeffs = {n: c for n, c in coeffs.items() if n <= order and not c.is_zero()}
        self.bound = bound if all(n >= 0 for n in self.coeffs) else None

    @classmethod
    def constant(cls, field: CyclotomicField, value: RatFunc, order: int) -> "QSeries":
        v = _valuation_at_zero(value)
        return cls(field, {0: value}, order, ValuationBound(0 if v is None else v, 0))

    def valuation(self) -> Optional[int]:
        return min(self.coeffs) if self.coeffs else None

    def _floor(self) -> int:
        v = self.valuation()
        return self.order + 1 if v is None else v

    def coefficient(self, n: int) -> RatFunc:
        if n > self.order:
            raise TruncationError(f"Coefficient q^{n} requested beyond order {self.order}")
        return self.coeffs.get(n, RatFunc(self.field, {}))

    def truncate(self, order: int) -> "QSeries":
        if order > self.order:
            raise TruncationError(f"Cannot raise order from {self.order} to {order}")
        return QSeries(self.field, self.coeffs, order, self.bound)

    def _joint_bound(self, other: "QSeries", how: str) -> Optional[ValuationBound]:
        if self.bound is None or other.bound is None:
            return None
        return getattr(self.bound, how)(other.bound)

    def __add__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            out[n] = out[n] + c if n in out else c
        return QSeries(self.field, out, min(self.order, other.order), self._joint_bound(other, "combine"))

    def __neg__(self):
        return QSeries(self.field, {n: -c for n, c in self.coeffs.items()}, self.order, self.bound)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, QSeries):
            order = min(self.order + other._floor(), other.order + self._floor())
            out: Dict[int, RatFunc] = {}
            for n1, c1 in self.coeffs.items():
                for n2, c2 in other.coeffs.items():
                    n = n1 + n2
                    if n > order:
                        continue
                    out[n] = out[n] + c1 * c2 if n in out else c1 * c2
            return QSeries(self.field, out, order, self._joint_bound(other, "product"))
        if isinstance(other, RatFunc):
            v = _valuation_at_zero(other)
            bound = self.bound.shift(v) if self.bound is not None and v is not None else None
            return QSeries(self.field, {n: c * other for n, c in self.coeffs.items()}, self.order, bound)
        c = self.field.coerce(other)
        return QSeries(self.field, {n: v * c for n, v in self.coeffs.items()}, self.order, self.bound)

    __rmul__ = __mul__

    def inverse(self) -> "QSeries":
        """Inverse of a series whose q^0 coefficient is a nonzero constant."""
        lead = self.coeffs.get(0)
        if self._floor() < 0 or lead is None or lead.den or set(lead.num) != {0}:
            raise ArithmeticDomainError("Only series with a nonzero constant q^0 term are invertible")
        lead_inv = lead.num[0].inverse()
        inv: Dict[int, RatFunc] = {0: RatFunc.constant(self.field, lead_inv)}
        for k in range(1, self.order + 1):
            acc = RatFunc(self.field, {})
            for j in range(1, k + 1):
                if j in self.coeffs and (k - j) in inv:
                    acc = acc + self.coeffs[j] * inv[k - j]
            if not acc.is_zero():
                inv[k] = acc * (-lead_inv)
        bound = None
        if self.bound is not None:
            # a product of k coefficients of total q-degree m has k <= m factors
            bound = ValuationBound(0, self.bound.slope + max(-self.bound.intercept, 0))
        return QSeries(self.field, inv, self.order, bound)

    def subst_eps(self, power: int = 1) -> "QSeries":
        """Substitutes u -> eps^power * u."""
        lam = self.field.eps(power)
        return QSeries(self.field, {n: c.scale_var(lam) for n, c in self.coeffs.items()}, self.order, self.bound)

    def subst_q_order(self, u_degree_floor: Optional[int] = None) -> int:
        """Highest q-order at which u -> q u is determined by the stored coefficients.

        An omitted q^m u^e lands at q^(m + e). With the valuation bound this is at
        least (1 - slope) m + intercept, so no order is safe once slope >= 1.
        u_degree_floor is a caller-supplied bound on the omitted valuations.
        """
        if u_degree_floor is not None:
            target = self.order + min(u_degree_floor, 0)
        elif self.bound is None:
            raise TruncationError("u -> q u needs a valuation bound for the coefficients beyond the stored order")
        elif self.bound.slope >= 1:
            raise TruncationError(f"Coefficients beyond q^{self.order} reach every q-order under u -> q u "
                                  f"(valuation slope {self.bound.slope})")
        else:
            lowest = (1 - self.bound.slope) * (self.order + 1) + self.bound.intercept
            target = math.ceil(lowest) - 1
        if target < 0:
            raise TruncationError(f"u -> q u determines no q-order from a series known through q^{self.order}")
        return target

    def subst_q(self, u_degree_floor: Optional[int] = None, target: Optional[int] = None) -> "QSeries":
        """Substitutes u -> q u, re-expanding every denominator as a geometric series in q.

        The result is exact through subst_q_order() unless a caller with a
        sharper bound on the missing terms passes the target order itself.
        """
        n = self.field.n
        if target is None:
            target = self.subst_q_order(u_degree_floor)
        out: Dict[int, Dict[int, CycNum]] = {}
        for qn, c in self.coeffs.items():
            # (q^N U - c)^(-m) = (-c)^(-m) sum_k C(m+k-1, k) c^(-k) q^(N k) U^k
            expansion: Dict[int, Dict[int, CycNum]] = {0: {0: self.field.one}}
            for root, m in c.den.items():
                scale = (-root) ** (-m)
                root_inv = root.inverse()
                series: Dict[int, Dict[int, CycNum]] = {}
                k = 0
                while True:
                    shift = n * k
                    min_q = min(expansion) + shift
                    if qn + min_q + min(c.num) > target:
                        break
                    term = scale * comb(m + k - 1, k) * root_inv ** k
                    for eq, poly in expansion.items():
                        bucket = series.setdefault(eq + shift, {})
                        for eu, v in poly.items():
                            _add_into(bucket, eu + shift, v * term)
                    k += 1
                expansion = series
            for eq, poly in expansion.items():
                # each numerator monomial u^e picks up q^e
                for e_num, c_num in c.num.items():
                    for eu, v in poly.items():
                        q_exp = qn + eq + e_num
                        if q_exp > target:
                            continue
                        _add_into(out.setdefault(q_exp, {}), eu + e_num, v * c_num)
        coeffs = {qe: RatFunc(self.field, poly, normalize=False) for qe, poly in out.items()}
        return QSeries(self.field, coeffs, target)

    def eval_complex(self, u: complex, q: complex, tol: float = 1e-12) -> complex:
        if abs(u) < tol:
            raise PoleProximityError(f"Point u = {u} is too close to 0")
        return complex(sum(c.eval_complex(u, tol) * q ** n for n, c in self.coeffs.items()))

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        order = min(self.order, other.order)
        keys = {n for n in set(self.coeffs) | set(other.coeffs) if n <= order}
        return all(self.coefficient(n) == other.coefficient(n) for n in keys)

    __hash__ = None

    def __repr__(self):
        terms = ", ".join(f"q^{n}: {c!r}" for n, c in sorted(self.coeffs.items()))
        return f"QSeries({{{terms}}}, order={self.order})"
