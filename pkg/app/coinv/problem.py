from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from app.coinv.rank import block_rank, choose_primes
from app.exactnum.cyclotomic import CycNum, CyclotomicField
from app.repmods.pbw import BasisLabel, add_into, tensor_labels
from app.utils.errors import ConfigError, InconclusiveError, ModuleConstructionError
from app.utils.logger import logger
from app.wfun.orbifold import gout_orb_basis
from app.wfun.sections import basis_q0, check_points

MODELS = ("trig", "orb")
RANK_METHODS = ("exact", "modular")
TensorLabel = Tuple[BasisLabel, ...]
TensorVector = Dict[TensorLabel, CycNum]


@dataclass
class LocalSection:
    """J_ab (x) f together with the Laurent coefficients of f at every insertion slot."""

    a: int
    b: int
    raise_degree: int
    expansions: List[Dict[int, CycNum]]
    label: str


@dataclass
class CoinvResult:
    model: str
    dims: Dict[int, int]
    reduced_pole_dim: Optional[int]
    max_degree: int
    max_pole: int
    stabilized: bool
    blocks: Dict[int, Dict[str, int]] = field(default_factory=dict)
    rank_method: str = "exact"

    @property
    def dim(self) -> int:
        return self.dims[self.max_degree]

    def to_dict(self) -> dict:
        return {"model": self.model, "dim": self.dim, "dims_by_degree": {str(d): v for d, v in self.dims.items()},
                "dim_at_reduced_pole_bound": self.reduced_pole_dim, "max_degree": self.max_degree,
                "max_pole": self.max_pole, "stabilized": self.stabilized, "rank_method": self.rank_method,
                "blocks": {str(c): v for c, v in self.blocks.items()}}


class CoinvProblem:
    """Modules inserted on the q = 0 fiber; coinvariants are computed by truncating degrees and poles.

    The trig model has the marked modules only. The orb model adds a node-0
    module before them and a node-infinity module after them.
    """

    def __init__(self, model: str, n: int, points: Sequence, marked: Sequence, node0=None, nodeinf=None,
                 rank_method: str = "exact", primes: Sequence[int] = ()):
        if model not in MODELS:
            raise ConfigError(f"Unknown model {model!r}")
        if rank_method not in RANK_METHODS:
            raise ConfigError(f"Unknown rank method {rank_method!r}")
        self.model = model
        self.n = n
        self.field = CyclotomicField.get(n)
        self.points = check_points(self.field, points)
        if len(self.points) != len(marked):
            raise ModuleConstructionError(f"{len(marked)} modules for {len(self.points)} points")
        if model == "orb" and (node0 is None or nodeinf is None):
            raise ModuleConstructionError("The orb model needs modules at both nodes")
        if model == "trig" and (node0 is not None or nodeinf is not None):
            raise ModuleConstructionError("The trig model has no node insertions")
        self.modules = ([node0] if node0 is not None else []) + list(marked) + \
                       ([nodeinf] if nodeinf is not None else [])
        levels = {m.level for m in self.modules}
        if len(levels) > 1:
            raise ModuleConstructionError(f"Modules have different levels: {sorted(str(x) for x in levels)}")
        expected = {"node0": "node0", "nodeinf": "nodeinf"}
        for slot, module in zip(self.slots(), self.modules):
            if module.site != expected.get(slot, "marked"):
                raise ModuleConstructionError(f"Module at slot {slot} lives at {module.site}")
        self.level = self.modules[0].level if self.modules else self.field.zero
        self.rank_method = rank_method
        self.primes = list(primes) or (choose_primes(n) if rank_method == "modular" else [])
        self._sections: Dict[Tuple[int, int], List[LocalSection]] = {}

    def slots(self) -> List[str]:
        marked = [str(i) for i in range(len(self.points))]
        return (["node0"] + marked + ["nodeinf"]) if self.model == "orb" else marked

    def max_module_degree(self) -> int:
        return min((m.max_degree for m in self.modules), default=0)

    def sections(self, p_max: int, order: int) -> List[LocalSection]:
        key = (p_max, order)
        if key not in self._sections:
            self._sections[key] = self._trig_sections(p_max, order) if self.model == "trig" \
                else self._orb_sections(p_max, order)
        return self._sections[key]

    def _expand(self, func, point, order: int) -> Dict[int, CycNum]:
        series = func.expand_at(point, order + 1)
        return {e: c for e, c in series.coeffs.items() if c}

    def _trig_sections(self, p_max: int, order: int) -> List[LocalSection]:
        out = []
        for a in range(self.n):
            for b in range(self.n):
                if (a, b) == (0, 0):
                    continue
                for i, p in enumerate(self.points):
                    for m in range(p_max):
                        func = basis_q0(self.n, a, b, m).scale_var(p.inverse())
                        expansions = [self._expand(func, q, order) for q in self.points]
                        out.append(LocalSection(a, b, m + 1, expansions, f"J_{a}{b} (udu)^{m} w[{i}]"))
        return out

    def _orb_sections(self, p_max: int, order: int) -> List[LocalSection]:
        out = []
        for section in gout_orb_basis(self.n, self.points, p_max):
            targets = ["0"] + list(self.points) + ["inf"]
            expansions = [self._expand(section.func, q, order) for q in targets]
            out.append(LocalSection(section.a, section.b, section.raise_degree, expansions, section.label()))
        return out

    def charge(self, labels: TensorLabel) -> int:
        return sum(m.charge(lbl) for m, lbl in zip(self.modules, labels)) % self.n

    def degree(self, labels: TensorLabel) -> int:
        return sum(m.degree(lbl) for m, lbl in zip(self.modules, labels))

    def apply(self, section: LocalSection, labels: TensorLabel) -> TensorVector:
        """The image of a tensor basis vector under the diagonal action of a section."""
        out: TensorVector = {}
        for k, (module, lbl) in enumerate(zip(self.modules, labels)):
            deg = module.degree(lbl)
            for e, c in section.expansions[k].items():
                if e > deg:
                    continue
                for lbl2, c2 in module.act_mode((e, section.a, section.b), lbl).items():
                    add_into(out, labels[:k] + (lbl2,) + labels[k + 1:], c * c2)
        return out

    def columns(self, max_degree: int) -> Dict[int, List[TensorLabel]]:
        if max_degree > self.max_module_degree():
            raise InconclusiveError(f"Degree {max_degree} exceeds the module truncation {self.max_module_degree()}")
        blocks: Dict[int, List[TensorLabel]] = {}
        for labels in tensor_labels(self.modules, max_degree):
            blocks.setdefault(self.charge(labels), []).append(labels)
        return blocks

    def relation_rows(self, max_degree: int, p_max: int) -> Dict[int, List[TensorVector]]:
        """Images f.v with deg(v) + raise(f) <= max_degree, sorted into charge blocks."""
        rows: Dict[int, List[TensorVector]] = {}
        sources = tensor_labels(self.modules, max_degree)
        for section in self.sections(p_max, max_degree):
            budget = max_degree - section.raise_degree
            if budget < 0:
                continue
            for labels in sources:
                if self.degree(labels) > budget:
                    continue
                image = self.apply(section, labels)
                if image:
                    rows.setdefault((self.charge(labels) + section.a) % self.n, []).append(image)
        return rows

    def corank(self, max_degree: int, p_max: int) -> Tuple[int, Dict[int, Dict[str, int]]]:
        columns = self.columns(max_degree)
        rows = self.relation_rows(max_degree, p_max)
        total = 0
        blocks = {}
        for charge, labels in sorted(columns.items()):
            index = {lbl: i for i, lbl in enumerate(labels)}
            matrix = [{index[k]: v for k, v in row.items()} for row in rows.get(charge, [])]
            r = block_rank(self.field, matrix, self.rank_method, self.primes, len(labels))
            blocks[charge] = {"columns": len(labels), "rows": len(matrix), "rank": r}
            total += len(labels) - r
        logger.debug(f"{self.model} corank at D={max_degree}, P={p_max}: {total} ({blocks})")
        return total, blocks

    def contains(self, vector: TensorVector, max_degree: int, p_max: int) -> bool:
        """Whether a vector lies in the span of the relations at this truncation."""
        charges = {self.charge(lbl) for lbl in vector}
        rows = self.relation_rows(max_degree, p_max)
        for charge in charges:
            part = {k: v for k, v in vector.items() if self.charge(k) == charge}
            block = rows.get(charge, [])
            cols = sorted({k for row in block for k in row} | set(part), key=repr)
            index = {lbl: i for i, lbl in enumerate(cols)}
            matrix = [{index[k]: v for k, v in row.items()} for row in block]
            before = block_rank(self.field, matrix, self.rank_method, self.primes)
            after = block_rank(self.field, matrix + [{index[k]: v for k, v in part.items()}],
                               self.rank_method, self.primes)
            if after > before:
                return False
        return True


def cc_dim(problem: CoinvProblem, max_degree: int, max_pole: Optional[int] = None) -> CoinvResult:
    """Corank table for D = 0..max_degree at P = max_pole, plus (max_degree, max_pole - 1).

    Stabilized means the last two degrees and the reduced pole bound all agree.
    """
    if max_degree < 1:
        raise ConfigError(f"max_degree must be at least 1, got {max_degree}")
    p_max = max_degree + 1 if max_pole is None else max_pole
    if p_max < 1:
        raise ConfigError(f"max_pole must be at least 1, got {p_max}")
    dims = {}
    blocks = {}
    for d in range(max_degree + 1):
        dims[d], blocks = problem.corank(d, p_max)
    reduced = problem.corank(max_degree, p_max - 1)[0] if p_max > 1 else None
    stabilized = dims[max_degree] == dims[max_degree - 1] and reduced in (None, dims[max_degree])
    result = CoinvResult(problem.model, dims, reduced, max_degree, p_max, stabilized, blocks, problem.rank_method)
    if not stabilized:
        logger.warning(f"Coinvariant dimensions did not stabilize: {dims}, reduced pole bound {reduced}")
    logger.info(f"{problem.model} coinvariants: dim {result.dim} (stabilized={stabilized})")
    return result
