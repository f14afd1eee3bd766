import json
from fractions import Fraction
from math import factorial
from typing import Dict, Optional, Union

from app.exactnum.cyclotomic import CyclotomicField
from app.repmods.forms import NodePairing, QuotientModule, RadicalData, ShapovalovForm, partner_weight
from app.repmods.pbw import GradedModule, HighestWeightTop, RepTop, Vector, add_into
from app.twistalg.chevalley import phi0
from app.twistalg.matrices import dual_coeff
from app.twistalg.weights import REPRESENTATIONS, AffineWeight
from app.utils.errors import AlgebraError, ModuleConstructionError, WeightError
from app.utils.logger import logger

MODULE_KINDS = ("verma0", "vermainf", "weyl", "irreducible0", "irreducibleinf", "integrable")

Module = Union[GradedModule, QuotientModule]


def verma_module(weight: AffineWeight, site: str, max_degree: int) -> GradedModule:
    field = CyclotomicField.get(weight.n)
    kind = "verma0" if site == "node0" else "vermainf"
    return GradedModule(field, site, weight.level, HighestWeightTop(field, weight), max_degree, kind)


def weyl_module(n: int, level, rep: str, max_degree: int) -> GradedModule:
    if rep not in REPRESENTATIONS:
        raise ModuleConstructionError(f"Unknown representation {rep!r}")
    field = CyclotomicField.get(n)
    return GradedModule(field, "marked", Fraction(level), RepTop(field, rep), max_degree, f"weyl({rep})")


def node_pairing(mu0: AffineWeight, max_degree: int) -> NodePairing:
    """The pairing of M0_mu0 with its partner Verma module at infinity."""
    left = verma_module(mu0, "node0", max_degree)
    right = verma_module(partner_weight(mu0, "node0"), "nodeinf", max_degree)
    return NodePairing(left, right)


def radical_and_quotient(mu: AffineWeight, max_degree: int, site: str = "node0"):
    """Radical data of the node pairing and the irreducible quotient of the Verma module at `site`."""
    mu0 = mu if site == "node0" else partner_weight(mu, "nodeinf")
    radical = RadicalData(node_pairing(mu0, max_degree))
    return radical, QuotientModule(radical, "left" if site == "node0" else "right")


def integrable_module(n: int, level, rep: str, max_degree: int):
    """L_k(V) as the quotient of the Weyl module by the radical of its Shapovalov form."""
    radical = RadicalData(ShapovalovForm(weyl_module(n, level, rep, max_degree)))
    return radical, QuotientModule(radical, "left")


def build_module(kind: str, n: int, level, max_degree: int, weight: Optional[AffineWeight] = None,
                 rep: str = "trivial") -> Module:
    if kind not in MODULE_KINDS:
        raise ModuleConstructionError(f"Unknown module kind {kind!r}; expected one of {MODULE_KINDS}")
    if kind in ("verma0", "vermainf", "irreducible0", "irreducibleinf"):
        if weight is None:
            raise WeightError(f"Module kind {kind} needs a highest weight")
        if weight.n != n:
            raise WeightError(f"Weight has rank {weight.n}, expected {n}")
        weight = weight.with_level(level)
    if kind == "verma0":
        module = verma_module(weight, "node0", max_degree)
    elif kind == "vermainf":
        module = verma_module(weight, "nodeinf", max_degree)
    elif kind == "weyl":
        module = weyl_module(n, level, rep, max_degree)
    elif kind == "irreducible0":
        module = radical_and_quotient(weight, max_degree, "node0")[1]
    elif kind == "irreducibleinf":
        module = radical_and_quotient(weight, max_degree, "nodeinf")[1]
    else:
        module = integrable_module(n, level, rep, max_degree)[1]
    logger.info(f"Built {kind} module for N={n}, k={level}: graded dims {module.graded_dims()}")
    return module


def ef_power_scalar(kappa: AffineWeight, i: int, power: int) -> Fraction:
    """c with e_i^n f_i^n |kappa> = c |kappa>, namely n! prod_(l=1..n) (kappa(alpha_i^v) - l + 1)."""
    if power < 0:
        raise AlgebraError(f"Power must be non-negative, got {power}")
    value = kappa.coroot_pairings("node0")[i % kappa.n]
    out = Fraction(factorial(power))
    for l in range(1, power + 1):
        out *= value - l + 1
    return out


def ef_power_vector(module: Module, i: int, power: int) -> Vector:
    """f_i^n applied to the highest weight vector of a node-0 module."""
    f = phi0(module.field.n, i, "f")
    vec = module.highest_weight_vector()
    for _ in range(power):
        vec = module.act_loop(f, vec)
    return vec


def sugawara_lminus1(module: Module, vector: Vector) -> Vector:
    """T[-1] v = 1/(k+N) sum_ab sum_(m >= 0) J^ab[-1-m] J_ab[m] v on a marked-point module."""
    field = module.field
    n = field.n
    if module.site != "marked":
        raise AlgebraError("The Sugawara operator is built on marked-point modules")
    denominator = module.level + n
    if not denominator:
        raise AlgebraError(f"Sugawara construction is undefined at the critical level k = {-n}")
    top = max((module.degree(lbl) for lbl in vector), default=0)
    out: Vector = {}
    for a in range(n):
        for b in range(n):
            if (a, b) == (0, 0):
                continue
            dual = dual_coeff(field, a, b)
            for m in range(top + 1):
                inner = module.act((m, a, b), vector)
                if not inner:
                    continue
                outer = module.act((-1 - m, (-a) % n, (-b) % n), inner)
                for lbl, c in outer.items():
                    add_into(out, lbl, c * dual)
    inv = denominator.inverse()
    return {lbl: c * inv for lbl, c in out.items()}


def vector_to_dict(module: Module, vector: Vector) -> Dict[str, str]:
    return {module.label_text(lbl): str(c) for lbl, c in sorted(vector.items(), key=lambda kv: repr(kv[0]))}


def module_to_dict(module: Module, radical: Optional[RadicalData] = None) -> dict:
    """JSON-ready description; includes Gram ranks and matrices when radical data is given."""
    out = module.describe()
    out["basis"] = {str(d): [module.label_text(lbl) for lbl in module.basis(d)]
                    for d in range(module.max_degree + 1)}
    if radical is not None:
        out["gram_ranks"] = radical.ranks()
        out["gram"] = {str(d): [[str(v) for v in line] for line in data.gram]
                       for d, data in radical.degrees.items()}
    return out


def module_to_json(module: Module, radical: Optional[RadicalData] = None) -> str:
    return json.dumps(module_to_dict(module, radical), indent=2, sort_keys=True)
