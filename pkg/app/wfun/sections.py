from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

from app.exactnum.cyclotomic import CycNum, CyclotomicField
from app.exactnum.qseries import QSeries
from app.exactnum.ratfunc import RatFunc
from app.exactnum.series import LaurentSeries
from app.twistalg.matrices import Label
from app.utils.errors import AlgebraError, CheckFailedError
from app.utils.logger import logger
from app.wfun.wmul import wmul_q0, wmul_series

# point index -> J label -> {pole order k >= 1: coefficient of xi^-k}, xi = u/u_i - 1
PrincipalParts = Dict[Union[int, str], Dict[Label, Dict[int, CycNum]]]


def check_points(field: CyclotomicField, points: Sequence) -> Tuple[CycNum, ...]:
    """Validates marked points: nonzero, and no two in the same eps-orbit."""
    pts = tuple(field.coerce(p) for p in points)
    n = field.n
    seen = []
    for i, p in enumerate(pts):
        if not p:
            raise AlgebraError(f"Marked point {i} is zero")
        p_n = p ** n
        if p_n in seen:
            raise AlgebraError(f"Marked point {i} lies on the eps-orbit of an earlier point")
        seen.append(p_n)
    return pts


@dataclass(frozen=True)
class WSection:
    """w_ab precomposed with u -> u/u_i."""

    n: int
    a: int
    b: int
    index: int
    point: CycNum
    series: QSeries

    def q0(self) -> RatFunc:
        return self.series.coefficient(0)

    def poles(self) -> List[CycNum]:
        field = self.point.field
        return [field.eps(j) * self.point for j in range(self.n)]

    def eval_complex(self, u: complex, q: complex = 0j, tol: float = 1e-12) -> complex:
        return self.series.eval_complex(u, q, tol)


def w_section(n: int, a: int, b: int, i: int, points: Sequence, q_max: int = 0) -> WSection:
    field = CyclotomicField.get(n)
    pts = check_points(field, points)
    if not 0 <= i < len(pts):
        raise AlgebraError(f"Point index {i} out of range")
    w = wmul_series(n, a, b, q_max)
    inv = pts[i].inverse()
    series = QSeries(field, {k: c.scale_var(inv) for k, c in w.series.coeffs.items()}, q_max, w.series.bound)
    return WSection(n, a, b, i, pts[i], series)


@lru_cache(maxsize=512)
def basis_q0(n: int, a: int, b: int, m: int) -> RatFunc:
    """(v d/dv)^m applied to the q = 0 limit of w_ab."""
    f = wmul_q0(n, a, b)
    for _ in range(m):
        f = f.derivative()
    return f


@lru_cache(maxsize=512)
def local_basis(n: int, a: int, b: int, m: int, order: int) -> LaurentSeries:
    """Expansion of basis_q0 at v = 1 in xi = v - 1, known below xi^order."""
    field = CyclotomicField.get(n)
    return basis_q0(n, a, b, m).expand_at(field.one, order)


@dataclass(frozen=True)
class OutTerm:
    a: int
    b: int
    point: int
    m: int
    coeff: CycNum


@dataclass
class OutSection:
    """A sum of coeff * J_ab (x) (u d/du)^m w_ab,i on the q = 0 fiber."""

    n: int
    points: Tuple[CycNum, ...]
    terms: List[OutTerm] = field(default_factory=list)

    @property
    def field(self) -> CyclotomicField:
        return CyclotomicField.get(self.n)

    def term_function(self, term: OutTerm) -> RatFunc:
        return basis_q0(self.n, term.a, term.b, term.m).scale_var(self.points[term.point].inverse())

    def components(self) -> Dict[Label, RatFunc]:
        out: Dict[Label, RatFunc] = {}
        for term in self.terms:
            f = self.term_function(term) * term.coeff
            key = (term.a, term.b)
            out[key] = out[key] + f if key in out else f
        return {k: v for k, v in out.items() if not v.is_zero()}

    def local_expansions(self, order: int) -> Dict[int, Dict[Label, LaurentSeries]]:
        """Expansions of every component at each marked point in xi = u/u_i - 1."""
        out: Dict[int, Dict[Label, LaurentSeries]] = {}
        comps = self.components()
        for i, p in enumerate(self.points):
            out[i] = {label: f.expand_at(p, order) for label, f in comps.items()}
        return out

    def principal_parts(self) -> PrincipalParts:
        out: PrincipalParts = {}
        for i, per_label in self.local_expansions(0).items():
            parts = {}
            for label, series in per_label.items():
                pp = {-e: c for e, c in series.coeffs.items() if e < 0}
                if pp:
                    parts[label] = pp
            if parts:
                out[i] = parts
        return out

    def to_dict(self) -> dict:
        return {"N": self.n, "points": [str(p) for p in self.points],
                "terms": [{"a": t.a, "b": t.b, "point": t.point, "m": t.m, "coeff": str(t.coeff)}
                          for t in self.terms]}


@dataclass
class RegularCertificate:
    """What remains after subtracting the OutSection: a zero residual and regular Taylor data."""

    residual: PrincipalParts
    regular: Dict[int, Dict[Label, LaurentSeries]]

    @property
    def ok(self) -> bool:
        return not any(any(c for c in pp.values()) for parts in self.residual.values() for pp in parts.values())


def split_singular(n: int, points: Sequence, germs: PrincipalParts, taylor_order: int = 2) -> Tuple[OutSection, RegularCertificate]:
    """Finds the unique OutSection with the given principal parts at the marked points."""
    field = CyclotomicField.get(n)
    pts = check_points(field, points)
    terms: List[OutTerm] = []
    residual: PrincipalParts = {}
    for key, parts in germs.items():
        if key in ("0", "inf") or not isinstance(key, int):
            raise AlgebraError(f"Principal parts are only allowed at marked points, got {key!r}")
        if not 0 <= key < len(pts):
            raise AlgebraError(f"Point index {key} out of range")
        for label, pp in parts.items():
            a, b = label[0] % n, label[1] % n
            if (a, b) == (0, 0):
                raise AlgebraError("Principal parts must be traceless")
            rest = {k: field.coerce(c) for k, c in pp.items() if c}
            if any(k < 1 for k in rest):
                raise AlgebraError("Pole orders must be positive")
            top = max(rest, default=0)
            for k in range(top, 0, -1):
                c = rest.get(k)
                if not c:
                    continue
                basis = local_basis(n, a, b, k - 1, 0)
                x = c / basis.coeff(-k)
                terms.append(OutTerm(a, b, key, k - 1, x))
                for e, v in basis.coeffs.items():
                    if e < 0:
                        value = rest.get(-e, field.zero) - x * v
                        if value:
                            rest[-e] = value
                        else:
                            rest.pop(-e, None)
            if rest:
                residual.setdefault(key, {})[(a, b)] = rest
    section = OutSection(n, pts, terms)
    regular = {}
    for i, per_label in section.local_expansions(taylor_order).items():
        regular[i] = {label: LaurentSeries(field, {e: -c for e, c in s.coeffs.items() if e >= 0}, taylor_order)
                      for label, s in per_label.items()}
    certificate = RegularCertificate(residual, regular)
    if not certificate.ok:
        raise CheckFailedError(f"Principal parts could not be matched: {residual}")
    logger.debug(f"Split singular data into {len(terms)} w-terms")
    return section, certificate


@dataclass
class QExpansion:
    chart: str
    coefficients: List[Dict[Label, RatFunc]]
    periodicity_ok: bool
    pole_bound_ok: bool
    failures: List[str] = field(default_factory=list)


def q_expand(section: OutSection, chart: str = "x", q_max: int = 4) -> QExpansion:
    """The q^n coefficients f_n of an OutSection in the x or y coordinate at the node.

    In the y chart u = q/y, and u -> q u periodicity turns w(q; u/u_i) into
    eps^b w(q; 1/(y u_i)).
    """
    if chart not in ("x", "y"):
        raise AlgebraError(f"Unknown chart {chart!r}")
    n = section.n
    field = section.field
    coeffs: List[Dict[Label, RatFunc]] = [dict() for _ in range(q_max + 1)]
    for term in section.terms:
        w = wmul_series(n, term.a, term.b, q_max)
        p = section.points[term.point]
        for k in range(q_max + 1):
            c = w.series.coefficient(k)
            if c.is_zero():
                continue
            for _ in range(term.m):
                c = c.derivative()
            if chart == "x":
                f = c.scale_var(p.inverse())
            else:
                f = c.invert_var().scale_var(p) * field.eps(term.b)
            f = f * term.coeff
            label = (term.a, term.b)
            bucket = coeffs[k]
            bucket[label] = bucket[label] + f if label in bucket else f
    failures = []
    periodicity_ok = True
    pole_bound_ok = True
    for k, bucket in enumerate(coeffs):
        for (a, b), f in bucket.items():
            sign = a if chart == "x" else -a
            if f.scale_var(field.eps(1)) != f * field.eps(sign):
                periodicity_ok = False
                failures.append(f"f_{k} component ({a},{b}) is not eps-equivariant")
            if f.pole_order_at("0") > k:
                pole_bound_ok = False
                failures.append(f"f_{k} component ({a},{b}) has a pole of order above {k} at 0")
    return QExpansion(chart, coeffs, periodicity_ok, pole_bound_ok, failures)
