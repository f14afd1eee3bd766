from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from app.exactnum.cyclotomic import CycNum, CyclotomicField
from app.twistalg.loop import LoopElement, mode_cocycle
from app.twistalg.matrices import j_bracket_coeff
from app.twistalg.weights import AffineWeight, rep_dim
from app.utils.errors import AlgebraError, ModuleConstructionError, TruncationError

# A mode (n, a, b) is J_ab (x) x^n; tuples sort by depth first.
Mode = Tuple[int, int, int]
# A basis label is (creation modes in ascending order, top index).
BasisLabel = Tuple[Tuple[Mode, ...], int]
Vector = Dict[BasisLabel, CycNum]


def add_into(target: Dict, key, value: CycNum) -> None:
    if key in target:
        total = target[key] + value
        if total:
            target[key] = total
        else:
            del target[key]
    elif value:
        target[key] = value


def scale_vector(vector: Dict, c: CycNum) -> Dict:
    if not c:
        return {}
    return {k: v * c for k, v in vector.items()}


class TopSpace:
    """The degree-zero part and the action of zero modes on it."""

    dim = 1

    def act_zero(self, a: int, b: int, index: int) -> Dict[int, CycNum]:
        raise NotImplementedError

    def charge(self, index: int) -> int:
        return 0

    def describe(self) -> dict:
        raise NotImplementedError


class HighestWeightTop(TopSpace):
    """A single vector on which the Cartan modes J_0b[0] act by the weight."""

    def __init__(self, field: CyclotomicField, weight: AffineWeight):
        self.field = field
        self.weight = weight
        self._scalars = {b: weight.j0_value(field, b) for b in range(field.n)}

    def act_zero(self, a: int, b: int, index: int) -> Dict[int, CycNum]:
        if a % self.field.n:
            raise AlgebraError(f"Zero mode of J_{a}{b} does not exist at a node")
        c = self._scalars[b % self.field.n]
        return {0: c} if c else {}

    def describe(self) -> dict:
        return {"type": "highest_weight", "weight": self.weight.to_dict()}


class RepTop(TopSpace):
    """A finite-dimensional sl_N module: trivial, C^N, or its dual acting by -X^T."""

    def __init__(self, field: CyclotomicField, kind: str):
        self.field = field
        self.kind = kind
        self.dim = rep_dim(kind, field.n)

    def act_zero(self, a: int, b: int, index: int) -> Dict[int, CycNum]:
        n = self.field.n
        if self.kind == "trivial":
            return {}
        if self.kind == "fund":
            # J_ab e_j = eps^(bj) e_(j-a)
            return {(index - a) % n: self.field.eps(b * index)}
        # -J_ab^T e_j = -eps^(ab) eps^(bj) e_(j+a)
        return {(index + a) % n: -self.field.eps(a * b + b * index)}

    def charge(self, index: int) -> int:
        if self.kind == "fund":
            return (-index) % self.field.n
        if self.kind == "antifund":
            return index % self.field.n
        return 0

    def describe(self) -> dict:
        return {"type": "representation", "kind": self.kind}


class GradedModule:
    """A module freely generated by negative modes on a top space, truncated at max_degree.

    Positive modes kill the top space and zero modes act through it; every
    other action is computed by straightening PBW monomials.
    """

    def __init__(self, field: CyclotomicField, site: str, level, top: TopSpace, max_degree: int, kind: str):
        if max_degree < 0:
            raise ModuleConstructionError(f"max_degree must be non-negative, got {max_degree}")
        self.field = field
        self.site = site
        self.level = field.coerce(level)
        self.top = top
        self.max_degree = max_degree
        self.kind = kind
        self._modes = sorted(m for d in range(1, max_degree + 1) for m in self.modes_at_depth(d))
        self._basis: Dict[int, List[BasisLabel]] = {}
        self._memo: Dict[Tuple[Mode, BasisLabel], Vector] = {}

    def allowed(self, mode: Mode) -> bool:
        n, a, b = mode
        size = self.field.n
        if (a % size, b % size) == (0, 0):
            return False
        if self.site == "node0":
            return (n - a) % size == 0
        if self.site == "nodeinf":
            return (n + a) % size == 0
        return True

    def modes_at_depth(self, depth: int) -> List[Mode]:
        size = self.field.n
        return [(-depth, a, b) for a in range(size) for b in range(size) if self.allowed((-depth, a, b))]

    def basis(self, degree: int) -> List[BasisLabel]:
        if degree > self.max_degree:
            raise TruncationError(f"Degree {degree} exceeds truncation {self.max_degree}")
        if degree not in self._basis:
            monomials = list(self._monomials(degree, 0))
            self._basis[degree] = [(m, i) for m in monomials for i in range(self.top.dim)]
        return self._basis[degree]

    def _monomials(self, remaining: int, start: int) -> Iterable[Tuple[Mode, ...]]:
        if remaining == 0:
            yield ()
            return
        for idx in range(start, len(self._modes)):
            mode = self._modes[idx]
            depth = -mode[0]
            if depth > remaining:
                continue
            for rest in self._monomials(remaining - depth, idx):
                yield (mode,) + rest

    def dim(self, degree: int) -> int:
        return len(self.basis(degree))

    def graded_dims(self) -> List[int]:
        return [self.dim(d) for d in range(self.max_degree + 1)]

    @staticmethod
    def degree(label: BasisLabel) -> int:
        return -sum(m[0] for m in label[0])

    def charge(self, label: BasisLabel) -> int:
        return (sum(m[1] for m in label[0]) + self.top.charge(label[1])) % self.field.n

    def highest_weight_vector(self, index: int = 0) -> Vector:
        return {((), index): self.field.one}

    def act_mode(self, mode: Mode, label: BasisLabel) -> Vector:
        key = (mode, label)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        result = self._act_mode(mode, label)
        self._memo[key] = result
        return result

    def _act_mode(self, mode: Mode, label: BasisLabel) -> Vector:
        n, a, b = mode
        size = self.field.n
        mode = (n, a % size, b % size)
        if not self.allowed(mode):
            raise AlgebraError(f"Mode J_{a}{b}[{n}] is not in the algebra at {self.site}")
        modes, top = label
        if n < 0 and (not modes or mode <= modes[0]):
            if self.degree(label) - n > self.max_degree:
                raise TruncationError(f"Action of J_{a}{b}[{n}] leaves the truncation {self.max_degree}")
            return {((mode,) + modes, top): self.field.one}
        if not modes:
            if n > 0:
                return {}
            return {((), j): c for j, c in self.top.act_zero(mode[1], mode[2], top).items()}
        first = modes[0]
        rest = (modes[1:], top)
        out: Vector = {}
        for lbl, c in self.act_mode(mode, rest).items():
            for lbl2, c2 in self.act_mode(first, lbl).items():
                add_into(out, lbl2, c * c2)
        m, c_, d = first
        coeff = j_bracket_coeff(self.field, mode[1], mode[2], c_, d)
        if coeff:
            new_mode = (n + m, (mode[1] + c_) % size, (mode[2] + d) % size)
            for lbl, v in self.act_mode(new_mode, rest).items():
                add_into(out, lbl, v * coeff)
        central = mode_cocycle(self.field, self.site, mode[1], mode[2], n, c_, d, m)
        if central:
            add_into(out, rest, central * self.level)
        return out

    def act(self, mode: Mode, vector: Vector) -> Vector:
        out: Vector = {}
        for lbl, c in vector.items():
            for lbl2, c2 in self.act_mode(mode, lbl).items():
                add_into(out, lbl2, c * c2)
        return out

    def act_loop(self, element: LoopElement, vector: Vector) -> Vector:
        """Action of a loop element; k-hat acts by the level."""
        if element.site != self.site:
            raise AlgebraError(f"Element of {element.site} cannot act on a module at {self.site}")
        out: Vector = {}
        for (a, b, n), c in element.terms.items():
            for lbl, v in self.act((n, a, b), vector).items():
                add_into(out, lbl, v * c)
        if element.central:
            for lbl, v in vector.items():
                add_into(out, lbl, v * element.central * self.level)
        return out

    def label_text(self, label: BasisLabel) -> str:
        modes, top = label
        word = " ".join(f"J{a}{b}[{n}]" for n, a, b in modes)
        return f"{word} |{top}>" if word else f"|{top}>"

    def describe(self) -> dict:
        return {"kind": self.kind, "site": self.site, "N": self.field.n, "level": str(self.level),
                "max_degree": self.max_degree, "top": self.top.describe(),
                "graded_dims": self.graded_dims()}


def degree_components(vector: Vector) -> Dict[int, Vector]:
    out: Dict[int, Vector] = {}
    for lbl, c in vector.items():
        out.setdefault(GradedModule.degree(lbl), {})[lbl] = c
    return out


def tensor_labels(modules: Sequence, max_total: int) -> List[Tuple[BasisLabel, ...]]:
    """All tensor basis labels of total degree at most max_total."""
    out: List[Tuple[BasisLabel, ...]] = []

    def walk(i: int, budget: int, prefix: Tuple[BasisLabel, ...]):
        if i == len(modules):
            out.append(prefix)
            return
        module = modules[i]
        for d in range(0, min(budget, module.max_degree) + 1):
            for lbl in module.basis(d):
                walk(i + 1, budget - d, prefix + (lbl,))

    walk(0, max_total, ())
    return out
