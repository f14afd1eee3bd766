from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional

from app.coinv.problem import CoinvProblem, TensorLabel, TensorVector
from app.exactnum.cyclotomic import CycNum
from app.repmods.modules import ef_power_scalar, ef_power_vector
from app.repmods.pbw import HighestWeightTop, add_into
from app.utils.errors import InconclusiveError, TruncationError, WeightError
from app.utils.logger import logger
from app.wfun.orbifold import RaisingSection, raising_section


@dataclass
class ReductionResult:
    """v_kappa (x) v (x) v_inf rewritten as c^-1 (-1)^n f_i^n v_kappa (x) e(t)^n v (x) v_inf."""

    chevalley_index: int
    power: int
    scalar: Fraction
    section: RaisingSection
    representative: TensorVector
    nilpotency_index: Optional[int]

    @property
    def vanishes(self) -> bool:
        return not self.representative

    def to_dict(self) -> dict:
        return {"i": self.chevalley_index, "n": self.power, "c": str(self.scalar),
                "pole_order": self.section.pole_order, "nilpotency_index": self.nilpotency_index,
                "vanishes": self.vanishes, "terms": len(self.representative)}


def _marked_action(problem: CoinvProblem, section: RaisingSection, vector: Dict[tuple, CycNum], order: int):
    """rho_M(e(t)) = sum_j rho_j(e(t)) on a vector of the marked tensor factors."""
    marked = problem.modules[1:-1]
    components = section.section(problem.n).components
    expansions = [{label: f.expand_at(p, order + 1).coeffs for label, f in components.items()}
                  for p in problem.points]
    out: Dict[tuple, CycNum] = {}
    for labels, coeff in vector.items():
        for j, (module, lbl) in enumerate(zip(marked, labels)):
            deg = module.degree(lbl)
            for (a, b), series in expansions[j].items():
                for e, c in series.items():
                    if e > deg or not c:
                        continue
                    for lbl2, c2 in module.act_mode((e, a, b), lbl).items():
                        add_into(out, labels[:j] + (lbl2,) + labels[j + 1:], coeff * c * c2)
    return out


def singular_vector_reduce(problem: CoinvProblem, i: int, power: int, marked_vector: Dict[tuple, CycNum],
                           inf_label=None, max_pole: int = 8) -> ReductionResult:
    """Rewrites v_kappa (x) v (x) v_inf through a raising section e(t) for e_i.

    The node-0 module must be a Verma module whose weight gives e_i^n f_i^n v_kappa = c v_kappa
    with c != 0; e(t) acts as e_i on node-0 vectors of degree <= n and kills v_inf.
    """
    if problem.model != "orb":
        raise WeightError("Singular vector reduction runs on the orb model")
    node0 = problem.modules[0]
    nodeinf = problem.modules[-1]
    if not isinstance(node0.top, HighestWeightTop):
        raise WeightError("The node-0 module must be a highest weight module")
    kappa = node0.top.weight
    scalar = ef_power_scalar(kappa, i, power)
    if scalar == 0:
        raise WeightError(f"e_{i}^{power} f_{i}^{power} kills v_kappa; kappa(alpha_{i}^v) is a small non-negative integer")
    inf_label = inf_label if inf_label is not None else ((), 0)
    inf_degree = nodeinf.degree(inf_label)
    section = raising_section(problem.n, i, power + 1, problem.points, inf_degree + 1, max_pole)

    lowered = ef_power_vector(node0, i, power)
    order = max(m.max_degree for m in problem.modules[1:-1]) if len(problem.modules) > 2 else 0
    current = dict(marked_vector)
    nilpotency = 0 if not current else None
    try:
        for step in range(1, power + 1):
            current = _marked_action(problem, section, current, order)
            if not current and nilpotency is None:
                nilpotency = step
    except TruncationError as e:
        raise InconclusiveError(f"Marked modules are truncated too low for e(t)^{power}: {e}") from e

    factor = problem.field.coerce(Fraction((-1) ** power) / scalar)
    representative: TensorVector = {}
    for l0, c0 in lowered.items():
        for labels, c in current.items():
            key: TensorLabel = (l0,) + tuple(labels) + (inf_label,)
            add_into(representative, key, factor * c0 * c)
    logger.info(f"Singular vector reduction for e_{i}^{power}: c={scalar}, {len(representative)} terms")
    return ReductionResult(i, power, scalar, section, representative, nilpotency)


def nilpotency_index(problem: CoinvProblem, section: RaisingSection, marked_vector: Dict[tuple, CycNum],
                     limit: int) -> Optional[int]:
    """Smallest m <= limit with rho_M(e(t))^m v = 0, or None."""
    order = max(m.max_degree for m in problem.modules[1:-1])
    current = dict(marked_vector)
    for m in range(1, limit + 1):
        current = _marked_action(problem, section, current, order)
        if not current:
            return m
    return None


def initial_vector(problem: CoinvProblem, marked_vector: Dict[tuple, CycNum], inf_label=None) -> TensorVector:
    """v_kappa (x) v (x) v_inf as a tensor vector of the orb problem."""
    inf_label = inf_label if inf_label is not None else ((), 0)
    hw = ((), 0)
    return {(hw,) + tuple(labels) + (inf_label,): c for labels, c in marked_vector.items()}
