import cmath
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional

from app.exactnum.cyclotomic import CycNum, CyclotomicField
from app.exactnum.qseries import QSeries, ValuationBound
from app.exactnum.ratfunc import RatFunc
from app.utils.errors import AlgebraError, CheckFailedError
from app.utils.logger import logger

# Bivariate truncated series: q-exponent -> {U-exponent: coefficient}, U = u^N
Bivariate = Dict[int, Dict[int, CycNum]]


def _shift_add(target: Dict[int, CycNum], source: Dict[int, CycNum], shift: int, factor: CycNum) -> None:
    for e, v in source.items():
        key = e + shift
        value = target.get(key)
        value = v * factor if value is None else value + v * factor
        if value:
            target[key] = value
        else:
            target.pop(key, None)


def _mul_factor(poly: Bivariate, c: CycNum, s: int, t: int, q_max: int) -> Bivariate:
    """Multiplies by (1 - c q^s U^t)."""
    out: Bivariate = {}
    for qe in range(q_max + 1):
        level = dict(poly.get(qe, {}))
        if qe - s >= 0 and (qe - s) in poly:
            _shift_add(level, poly[qe - s], t, -c)
        if level:
            out[qe] = level
    return out


def _div_factor(poly: Bivariate, c: CycNum, s: int, t: int, q_max: int) -> Bivariate:
    """Divides by (1 - c q^s U^t) for s > 0 using the geometric recurrence."""
    out: Bivariate = {}
    for qe in range(q_max + 1):
        level = dict(poly.get(qe, {}))
        if qe - s >= 0 and (qe - s) in out:
            _shift_add(level, out[qe - s], t, c)
        if level:
            out[qe] = level
    return out


def _scale(poly: Bivariate, c: CycNum) -> Bivariate:
    return {qe: {e: v * c for e, v in level.items()} for qe, level in poly.items()}


def _pochhammer(poly: Bivariate, c: CycNum, first: int, step: int, t: int, q_max: int) -> Bivariate:
    """Multiplies by prod_(j >= 0) (1 - c q^(first + j step) U^t), truncated at q^q_max."""
    s = first
    while s <= q_max:
        poly = _mul_factor(poly, c, s, t, q_max)
        s += step
    return poly


def _inv_pochhammer(poly: Bivariate, c: CycNum, first: int, step: int, t: int, q_max: int) -> Bivariate:
    s = first
    while s <= q_max:
        poly = _div_factor(poly, c, s, t, q_max)
        s += step
    return poly


def _check_label(n: int, a: int, b: int) -> None:
    if not (0 <= a < n and 0 <= b < n):
        raise AlgebraError(f"Indices ({a}, {b}) out of range for N={n}")
    if (a, b) == (0, 0):
        raise AlgebraError("w_00 is not defined")


def theta_numerator(n: int, a: int, b: int, q_max: int) -> Bivariate:
    """(q^(N-a) eps^b U^-1; q^N)(q^a eps^-b U; q^N), without the u^a prefactor."""
    field = CyclotomicField.get(n)
    poly: Bivariate = {0: {0: field.one}}
    poly = _pochhammer(poly, field.eps(b), n - a, n, -1, q_max)
    return _pochhammer(poly, field.eps(-b), a, n, 1, q_max)


def theta_denominator(n: int, q_max: int) -> Bivariate:
    """(U - 1)(q^N U^-1; q^N)(q^N U; q^N)."""
    field = CyclotomicField.get(n)
    poly: Bivariate = {0: {1: field.one, 0: -field.one}}
    poly = _pochhammer(poly, field.one, n, n, -1, q_max)
    return _pochhammer(poly, field.one, n, n, 1, q_max)


def _normalizer_inverse(poly: Bivariate, n: int, a: int, b: int, q_max: int) -> Bivariate:
    """Divides by (q^(N-a) eps^b; q^N)(q^a eps^-b; q^N)."""
    field = CyclotomicField.get(n)
    poly = _inv_pochhammer(poly, field.eps(b), n - a, n, 0, q_max)
    first = a
    if a == 0:
        poly = _scale(poly, (field.one - field.eps(-b)).inverse())
        first = n
    return _inv_pochhammer(poly, field.eps(-b), first, n, 0, q_max)


def _to_qseries(field: CyclotomicField, poly: Bivariate, a: int, q_max: int, den: bool,
                bound: Optional[ValuationBound] = None) -> QSeries:
    n = field.n
    coeffs = {}
    for qe, level in poly.items():
        num = {a + n * e: v for e, v in level.items()}
        coeffs[qe] = RatFunc(field, num, {field.one: 1} if den else None)
    return QSeries(field, coeffs, q_max, bound)


def theta_bound(n: int, first: int, shift: int, slope: Fraction = Fraction(1, 2)) -> ValuationBound:
    """Valuation bound for u^shift times a theta product whose U^-j terms start at q^(first j + N j(j-1)/2)."""

    def value(j: int) -> Fraction:
        return shift - n * j + slope * (first * j + n * j * (j - 1) // 2)

    j = 0
    while value(j + 1) < value(j):
        j += 1
    return ValuationBound(value(j), slope)


# 1/(q^N U^-1; q^N) puts U^-j at q^(N j), so ord c_m >= a - (m + a) = -m
W_BOUND = ValuationBound(0, 1)


def theta_numerator_series(n: int, a: int, b: int, q_max: int) -> QSeries:
    """u^a (q^(N-a) eps^b U^-1; q^N)(q^a eps^-b U; q^N) as a q-series."""
    field = CyclotomicField.get(n)
    return _to_qseries(field, theta_numerator(n, a, b, q_max), a, q_max, den=False,
                       bound=theta_bound(n, n - a, a))


def theta_denominator_series(n: int, q_max: int) -> QSeries:
    field = CyclotomicField.get(n)
    return _to_qseries(field, theta_denominator(n, q_max), 0, q_max, den=False, bound=theta_bound(n, n, 0))


@dataclass(frozen=True)
class WFunction:
    """The function w_ab(q; u) divided by 2 pi i, as an exact q-series."""

    n: int
    a: int
    b: int
    series: QSeries
    hatted: bool = True

    @property
    def field(self) -> CyclotomicField:
        return self.series.field

    @property
    def order(self) -> int:
        return self.series.order

    def q0(self) -> RatFunc:
        return self.series.coefficient(0)

    def eval_complex(self, u: complex, q: complex, unhatted: bool = False, tol: float = 1e-12) -> complex:
        value = self.series.eval_complex(u, q, tol)
        return value * 2j * cmath.pi if unhatted else value


@lru_cache(maxsize=256)
def wmul_series(n: int, a: int, b: int, q_max: int) -> WFunction:
    """u^a / (U - 1) times the theta quotient, expanded exactly through q^q_max."""
    _check_label(n, a, b)
    if q_max < 0:
        raise AlgebraError(f"Truncation order must be non-negative, got {q_max}")
    field = CyclotomicField.get(n)
    poly = theta_numerator(n, a, b, q_max)
    poly = _normalizer_inverse(poly, n, a, b, q_max)
    poly = _inv_pochhammer(poly, field.one, n, n, -1, q_max)
    poly = _inv_pochhammer(poly, field.one, n, n, 1, q_max)
    logger.debug(f"Expanded w_{a}{b} for N={n} through q^{q_max}")
    return WFunction(n, a, b, _to_qseries(field, poly, a, q_max, den=True, bound=W_BOUND))


def wmul_q0(n: int, a: int, b: int) -> RatFunc:
    """Closed form at q = 0: u^a/(U-1) for a != 0 and (U - eps^b)/((1 - eps^b)(U - 1)) for a = 0."""
    _check_label(n, a, b)
    field = CyclotomicField.get(n)
    if a != 0:
        return RatFunc(field, {a: field.one}, {field.one: 1})
    scale = (field.one - field.eps(b)).inverse()
    return RatFunc(field, {n: scale, 0: -field.eps(b) * scale}, {field.one: 1})


def wmul_product_value(n: int, a: int, b: int, q: complex, u: complex, tol: float = 1e-17) -> complex:
    """Direct complex evaluation of the Pochhammer products, without the 2 pi i."""
    _check_label(n, a, b)
    if abs(q) >= 1:
        raise ValueError(f"Product formula needs |q| < 1, got {q}")
    eps = cmath.exp(2j * cmath.pi / n)
    big_u = u ** n
    big_q = q ** n

    def poch(x: complex) -> complex:
        value = 1.0 + 0j
        term = x
        k = 0
        while True:
            value *= 1 - term
            k += 1
            term = x * big_q ** k
            if abs(term) < tol:
                return value

    num = poch(q ** (n - a) * eps ** b / big_u) * poch(q ** a * eps ** (-b) * big_u)
    den = poch(q ** (n - a) * eps ** b) * poch(big_q / big_u) * poch(q ** a * eps ** (-b)) * poch(big_q * big_u)
    return u ** a / (big_u - 1) * num / den


def _cone_order(n: int, q_max: int, first: int, shift: int) -> int:
    """Highest q-order at which u -> qu of a theta product truncated at q^q_max is exact.

    A missing term q^m carries U^-j only if m >= first*j + N j(j-1)/2, and
    u -> qu maps q^m u^(shift + N e) to q^(m + shift + N e).
    """
    best = None
    j = 0
    while True:
        cost = first * j + n * j * (j - 1) // 2
        lowest = max(q_max + 1, cost) - n * j + shift
        best = lowest if best is None else min(best, lowest)
        if cost > q_max + 1 and cost - n * j + shift > best:
            break
        j += 1
    return best - 1


def verifiable_order(n: int, a: int, q_max: int) -> int:
    """q-order through which the u -> qu identity is checked for a series computed to q_max."""
    return min(_cone_order(n, q_max, n - a, a), _cone_order(n, q_max, n, 0), q_max)


def internal_order(n: int, a: int, target: int) -> int:
    """Smallest truncation whose verifiable order reaches the target."""
    q_max = target
    while verifiable_order(n, a, q_max) < target:
        q_max += 1
    return q_max


@dataclass
class PeriodicityReport:
    n: int
    a: int
    b: int
    eps_order: int
    q_order: int
    eps_ok: bool
    q_ok: bool
    first_failure: Optional[str] = None

    def to_dict(self) -> dict:
        return {"N": self.n, "a": self.a, "b": self.b, "eps_verified_order": self.eps_order,
                "q_verified_order": self.q_order, "eps_ok": self.eps_ok, "q_ok": self.q_ok,
                "first_failure": self.first_failure}


def _first_mismatch(lhs: QSeries, rhs: QSeries, order: int) -> Optional[int]:
    for k in range(min(lhs.valuation() or 0, rhs.valuation() or 0, 0), order + 1):
        if lhs.coefficient(k) != rhs.coefficient(k):
            return k
    return None


def check_quasiperiodicity(w: WFunction, target: Optional[int] = None, raise_on_failure: bool = False) -> PeriodicityReport:
    """Checks w(eps u) = eps^a w(u) on the stored series and w(q u) = eps^b w(u) on its theta factors.

    The q-shift is checked on the numerator u^a(xU^-1;Q)(yU;Q), which picks up
    -eps^b U^-1, and on the denominator (U-1)(QU^-1;Q)(QU;Q), which picks up
    -U^-1; together they give the identity for w. The stored series of w itself
    fixes no q-order of w(q u): its valuation bound has slope 1 and
    QSeries.subst_q raises on it.
    """
    n, a, b = w.n, w.a, w.b
    field = w.field
    target = w.order if target is None else target

    shifted = w.series.subst_eps(1)
    expected = w.series * field.eps(a)
    k = _first_mismatch(shifted, expected, w.order)
    eps_ok = k is None
    failure = None if eps_ok else f"u -> eps u fails at q^{k}"

    q_int = internal_order(n, a, target)
    numerator = theta_numerator_series(n, a, b, q_int)
    denominator = theta_denominator_series(n, q_int)
    num_order = min(_cone_order(n, q_int, n - a, a), q_int)
    den_order = min(_cone_order(n, q_int, n, 0), q_int)
    u_inv = RatFunc(field, {-n: -field.one})
    q_ok = True
    for series, order, factor in ((numerator, num_order, u_inv * field.eps(b)), (denominator, den_order, u_inv)):
        lhs = series.subst_q(target=order)
        rhs = (series * factor).truncate(order)
        k = _first_mismatch(lhs, rhs, order)
        if k is not None:
            q_ok = False
            failure = failure or f"u -> q u fails at q^{k}"
    report = PeriodicityReport(n, a, b, w.order if eps_ok else -1, min(num_order, den_order) if q_ok else -1,
                               eps_ok, q_ok, failure)
    logger.debug(f"Quasi-periodicity of w_{a}{b}: {report.to_dict()}")
    if raise_on_failure and failure:
        raise CheckFailedError(failure)
    return report


def residue_at_one(n: int, a: int, b: int) -> CycNum:
    """Residue of the q = 0 limit at u = 1, which is 1/N for every label."""
    return wmul_q0(n, a, b).residue(CyclotomicField.get(n).one)


def labels_series(n: int, q_max: int) -> List[WFunction]:
    return [wmul_series(n, a, b, q_max) for a in range(n) for b in range(n) if (a, b) != (0, 0)]
