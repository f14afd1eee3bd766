from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from app.coinv.problem import CoinvProblem, CoinvResult, cc_dim
from app.exactnum.cyclotomic import CycNum, CyclotomicField
from app.repmods.forms import QuotientModule
from app.repmods.modules import integrable_module, radical_and_quotient
from app.repmods.pbw import add_into
from app.twistalg.matrices import GMat, j_decompose
from app.twistalg.weights import AffineWeight, is_dominant_integral, weight_set, weight_tilde
from app.utils.logger import logger


@dataclass
class FactorizationTerm:
    weight: AffineWeight
    tilde: AffineWeight
    prime: AffineWeight
    dominant: bool
    result: Optional[CoinvResult] = None

    def to_dict(self) -> dict:
        return {"lambda": [str(v) for v in self.weight.values], "tilde_h": [str(self.tilde.h_value(i)) for i in range(1, self.weight.n)],
                "prime_h": [str(self.prime.h_value(i)) for i in range(1, self.weight.n)],
                "dominant": self.dominant, "result": self.result.to_dict() if self.result else None}


@dataclass
class FactorizationReport:
    lhs: CoinvResult
    terms: List[FactorizationTerm] = field(default_factory=list)

    @property
    def rhs(self) -> int:
        return sum(t.result.dim for t in self.terms if t.result is not None)

    @property
    def stabilized(self) -> bool:
        return self.lhs.stabilized and all(t.result.stabilized for t in self.terms if t.result is not None)

    @property
    def status(self) -> str:
        if not self.stabilized:
            return "inconclusive"
        return "ok" if self.lhs.dim == self.rhs else "fail"

    def to_dict(self) -> dict:
        return {"lhs": self.lhs.to_dict(), "rhs": self.rhs, "status": self.status,
                "terms": [t.to_dict() for t in self.terms]}


def factorization_check(n: int, level, reps: Sequence[str], points: Sequence, max_degree: int,
                        max_pole: Optional[int] = None, rank_method: str = "exact",
                        primes: Sequence[int] = ()) -> FactorizationReport:
    """Trig coinvariants of L_k(V_i) against the sum over lambda in wt(V) of orb coinvariants."""
    level = Fraction(level)
    marked = [integrable_module(n, level, rep, max_degree)[1] for rep in reps]
    lhs = cc_dim(CoinvProblem("trig", n, points, marked, rank_method=rank_method, primes=primes),
                 max_degree, max_pole)
    report = FactorizationReport(lhs)
    for lam in weight_set(reps, n):
        tilde, prime = weight_tilde(lam, level)
        dominant = is_dominant_integral(tilde, "node0") and is_dominant_integral(prime, "nodeinf")
        term = FactorizationTerm(lam, tilde, prime, dominant)
        if dominant:
            radical, zero = radical_and_quotient(tilde, max_degree, "node0")
            inf = QuotientModule(radical, "right")
            problem = CoinvProblem("orb", n, points, marked, zero, inf, rank_method, primes)
            term.result = cc_dim(problem, max_degree, max_pole)
        report.terms.append(term)
    logger.info(f"Factorization: LHS {lhs.dim}, RHS {report.rhs}, status {report.status}")
    return report


@dataclass
class InvarianceReport:
    covered: List[int]
    excluded: List[int]
    residual_terms: int
    vacuous: bool
    dropped_components: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.residual_terms == 0

    def to_dict(self) -> dict:
        return {"covered_degrees": self.covered, "excluded_degrees": self.excluded,
                "residual_terms": self.residual_terms, "vacuous": self.vacuous,
                "dropped_components": self.dropped_components, "ok": self.ok}


def hat_iota_invariance_check(tilde: AffineWeight, x: GMat, mode: int, max_degree: int) -> InvarianceReport:
    """Checks (X[n] (x) 1 + 1 (x) Ad(beta)(X)[-n]) sum_i e_(d,i) (x) e^i_d = 0 in L0 (x) Linf.

    Only the components J_ab of X with a = n mod N give elements of g^(0);
    the others are dropped and reported.
    """
    field_ = CyclotomicField.get(tilde.n)
    size = field_.n
    radical, zero = radical_and_quotient(tilde, max_degree, "node0")
    inf = QuotientModule(radical, "right")
    parts = j_decompose(x)
    kept = {(a, b): c for (a, b), c in parts.items() if (a - mode) % size == 0 and (a, b) != (0, 0)}
    dropped = [f"J_{a}{b}" for (a, b) in parts if (a, b) not in kept]
    if not kept:
        return InvarianceReport([], list(range(max_degree + 1)), 0, True, dropped)
    covered, excluded = [], []
    residual = 0
    for d in range(max_degree + 1):
        d0 = d - mode
        if not 0 <= d0 <= max_degree:
            excluded.append(d)
            continue
        covered.append(d)
        total: Dict[tuple, CycNum] = {}
        lower, upper = radical.dual_bases(d)
        for e_low, e_up in zip(lower, upper):
            for (a, b), c in kept.items():
                for lbl, v in zero.act_mode((mode, a, b), e_low).items():
                    for lbl2, w in e_up.items():
                        add_into(total, (lbl, lbl2), c * v * w)
        lower0, upper0 = radical.dual_bases(d0)
        for e_low, e_up in zip(lower0, upper0):
            for (a, b), c in kept.items():
                image = inf.act((-mode, a, b), e_up)
                for lbl2, w in image.items():
                    add_into(total, (e_low, lbl2), c * field_.eps(b) * w)
        residual += len(total)
    report = InvarianceReport(covered, excluded, residual, False, dropped)
    logger.info(f"Sewing invariance for mode {mode}: {report.to_dict()}")
    return report
