from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from app.exactnum.cyclotomic import CycNum, CyclotomicField
from app.exactnum.linalg import nullspace, solve
from app.exactnum.ratfunc import RatFunc
from app.twistalg.chevalley import phi0
from app.twistalg.matrices import GMat, Label, j_basis, j_decompose
from app.utils.errors import AlgebraError, InconclusiveError
from app.utils.logger import logger
from app.wfun.sections import check_points


@dataclass
class EquivariantSection:
    """A g-valued rational function sum_ab J_ab (x) f_ab(t)."""

    n: int
    components: Dict[Label, RatFunc] = field(default_factory=dict)

    @property
    def field(self) -> CyclotomicField:
        return CyclotomicField.get(self.n)

    def is_equivariant(self) -> bool:
        """f(eps t) = Ad(gamma) f(t), i.e. f_ab(eps t) = eps^a f_ab(t)."""
        eps = self.field.eps(1)
        return all(f.scale_var(eps) == f * self.field.eps(a) for (a, b), f in self.components.items())

    def evaluate(self, t) -> GMat:
        out = GMat.zeros(self.field)
        for (a, b), f in self.components.items():
            out = out + j_basis(self.n, a, b).scale(f.eval_exact(t))
        return out

    def scale(self, c) -> "EquivariantSection":
        return EquivariantSection(self.n, {k: f * c for k, f in self.components.items()})

    def __eq__(self, other):
        if not isinstance(other, EquivariantSection):
            return NotImplemented
        keys = set(self.components) | set(other.components)
        zero = RatFunc(self.field, {})
        return all(self.components.get(k, zero) == other.components.get(k, zero) for k in keys)

    __hash__ = None


def cn_average(n: int, pairs: Sequence[Tuple[GMat, RatFunc]]) -> EquivariantSection:
    """sum_j Ad(gamma)^j f(eps^-j t) for f = sum X (x) r(t)."""
    field = CyclotomicField.get(n)
    comps: Dict[Label, RatFunc] = {}
    for x, r in pairs:
        parts = j_decompose(x)
        if (0, 0) in parts:
            raise AlgebraError("Averaged matrices must be traceless")
        for j in range(n):
            rj = r.scale_var(field.eps(-j))
            for (a, b), c in parts.items():
                term = rj * (c * field.eps(a * j))
                comps[(a, b)] = comps[(a, b)] + term if (a, b) in comps else term
    return EquivariantSection(n, {k: v for k, v in comps.items() if not v.is_zero()})


def section_pairs(section: EquivariantSection) -> List[Tuple[GMat, RatFunc]]:
    return [(j_basis(section.n, a, b), f) for (a, b), f in section.components.items()]


def averaged_pole(n: int, a: int, point: CycNum, m: int) -> RatFunc:
    """G = sum_j eps^(j(a+m)) (t - eps^j p)^-m, the averaged m-th order pole at p for label a."""
    field = CyclotomicField.get(n)
    r = RatFunc.linear_pole(field, point, m)
    out = RatFunc(field, {})
    for j in range(n):
        out = out + r.scale_var(field.eps(-j)) * field.eps(a * j)
    return out


@dataclass(frozen=True)
class OrbSection:
    """J_ab (x) func, an element of the orbifold g_out."""

    a: int
    b: int
    func: RatFunc
    kind: str
    point: Optional[int]
    order: int
    raise_degree: int
    parts: Tuple[str, ...] = ()

    def term(self) -> str:
        if self.kind == "laurent":
            return f"t^{self.order}"
        if self.kind == "combination":
            return f"({' + '.join(self.parts)})"
        return f"G[{self.point},{self.order}]"

    def label(self) -> str:
        return f"J_{self.a}{self.b} {self.term()}"

    def section(self, n: int) -> EquivariantSection:
        return EquivariantSection(n, {(self.a, self.b): self.func})


def _candidates(field: CyclotomicField, a: int, b: int, pts: Sequence[CycNum], p_max: int,
                bound: int) -> List[OrbSection]:
    n = field.n
    out = []
    for e in range(-bound, bound + 1):
        if (e - a) % n == 0:
            out.append(OrbSection(a, b, RatFunc.monomial(field, 1, e), "laurent", None, e, abs(e)))
    for i, p in enumerate(pts):
        for m in range(1, p_max + 1):
            out.append(OrbSection(a, b, averaged_pole(n, a, p, m), "pole", i, m, m))
    return out


def _vanishing_span(field: CyclotomicField, candidates: List[OrbSection], zero_at_inf: int,
                    bound: int) -> List[OrbSection]:
    """Basis of the combinations of the candidates with a zero of order zero_at_inf at infinity."""
    expansions = [c.func.expand_at("inf", zero_at_inf) for c in candidates]
    rows = []
    for e in range(-bound, zero_at_inf):
        row = {k: s.coeff(e) for k, s in enumerate(expansions) if s.coeff(e)}
        if row:
            rows.append(row)
    out = []
    for vector in nullspace(field, rows, len(candidates)):
        used = [(c, x) for c, x in zip(candidates, vector) if x]
        if len(used) == 1:
            out.append(used[0][0])
            continue
        func = RatFunc(field, {})
        for c, x in used:
            func = func + c.func * x
        pole_orders = [c.order for c, _ in used if c.kind == "pole"]
        parts = tuple(f"{x} {c.term()}" for c, x in used)
        out.append(OrbSection(used[0][0].a, used[0][0].b, func, "combination", None, max(pole_orders, default=0),
                              max(c.raise_degree for c, _ in used), parts))
    return out


def gout_orb_basis(n: int, points: Sequence, p_max: int, zero_at_inf: Optional[int] = None,
                   laurent_bound: Optional[int] = None) -> List[OrbSection]:
    """Equivariant sections with poles of order at most p_max at 0, the marked orbits and infinity.

    laurent_bound limits |n| of the J_ab t^n parts (default p_max). With
    zero_at_inf the result spans, label by label, the combinations of those
    sections that vanish to at least that order at infinity.
    """
    field = CyclotomicField.get(n)
    pts = check_points(field, points)
    bound = p_max if laurent_bound is None else laurent_bound
    out: List[OrbSection] = []
    for a in range(n):
        for b in range(n):
            if (a, b) == (0, 0):
                continue
            candidates = _candidates(field, a, b, pts, p_max, bound)
            if zero_at_inf is not None:
                candidates = _vanishing_span(field, candidates, zero_at_inf, bound)
            out.extend(candidates)
    if not out:
        logger.warning(f"Empty orbifold basis for p_max={p_max}, zero_at_inf={zero_at_inf}")
    return out


@dataclass
class RaisingSection:
    """e(t) = X (x) F(t) with X the node-0 matrix of e_i, F = t + O(t^order) at 0 and a zero at infinity."""

    chevalley_index: int
    matrix: GMat
    func: RatFunc
    pole_order: int
    coefficients: Dict[Tuple[int, int], CycNum]
    order_at_zero: int
    zero_at_inf: int

    def section(self, n: int) -> EquivariantSection:
        return cn_average(n, [(self.matrix, self.func)]).scale(Fraction(1, n))


def raising_section(n: int, i: int, order: int, points: Sequence, zero_at_inf: int,
                    max_pole: int = 8) -> RaisingSection:
    """Solves for F = sum c_jm G_(1,j,m) with F - t = O(t^order) at 0 and F = O(s^zero_at_inf) at infinity."""
    field = CyclotomicField.get(n)
    pts = check_points(field, points)
    target = phi0(n, i, "e")
    (matrix, _), = target.matrix_terms()
    for p_order in range(1, max_pole + 1):
        unknowns = [(j, m) for j in range(len(pts)) for m in range(1, p_order + 1)]
        funcs = [averaged_pole(n, 1, pts[j], m) for j, m in unknowns]
        at_zero = [f.expand_at("0", order) for f in funcs]
        at_inf = [f.expand_at("inf", zero_at_inf) for f in funcs]
        rows, rhs = [], []
        for e in range(0, order):
            if (e - 1) % n:
                continue
            rows.append({c: s.coeff(e) for c, s in enumerate(at_zero)})
            rhs.append(field.one if e == 1 else field.zero)
        for e in range(1, zero_at_inf):
            if (e + 1) % n:
                continue
            rows.append({c: s.coeff(e) for c, s in enumerate(at_inf)})
            rhs.append(field.zero)
        x = solve(field, rows, rhs, len(unknowns))
        if x is None:
            continue
        func = RatFunc(field, {})
        for c, f in zip(x, funcs):
            if c:
                func = func + f * c
        logger.debug(f"Raising section for e_{i} found with pole order {p_order}")
        return RaisingSection(i, matrix, func, p_order, dict(zip(unknowns, x)), order, zero_at_inf)
    raise InconclusiveError(f"No raising section for e_{i} with pole order up to {max_pole}")
