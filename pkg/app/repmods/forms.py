from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from app.exactnum.cyclotomic import CycNum
from app.exactnum.linalg import Eliminator, invert, nullspace
from app.repmods.pbw import BasisLabel, GradedModule, Vector, add_into, degree_components
from app.twistalg.weights import AffineWeight
from app.utils.errors import ModuleConstructionError, TruncationError, WeightError
from app.utils.logger import logger


def partner_weight(mu: AffineWeight, site: str = "node0") -> AffineWeight:
    """Weight of the module on the other node that pairs with the Verma module of weight mu.

    M0_mu pairs with Minf_nu for nu = -mu o Ad(beta)^-1, at the same level.
    """
    if site == "node0":
        partner = mu.compose_adbeta(-1)
    elif site == "nodeinf":
        partner = mu.compose_adbeta(1)
    else:
        raise WeightError(f"Pairing partners exist only at the nodes, not at {site}")
    return AffineWeight(mu.level, tuple(-v for v in partner.values))


class BilinearForm:
    """A degree-preserving bilinear form between two graded modules, computed recursively."""

    def __init__(self, left: GradedModule, right: GradedModule):
        self.left = left
        self.right = right
        self.field = left.field
        self._memo: Dict[Tuple[BasisLabel, BasisLabel], CycNum] = {}

    def value(self, lhs: BasisLabel, rhs: BasisLabel) -> CycNum:
        if GradedModule.degree(lhs) != GradedModule.degree(rhs):
            return self.field.zero
        key = (lhs, rhs)
        cached = self._memo.get(key)
        if cached is None:
            cached = self._value(lhs, rhs)
            self._memo[key] = cached
        return cached

    def _value(self, lhs: BasisLabel, rhs: BasisLabel) -> CycNum:
        raise NotImplementedError

    def pair(self, u: Vector, v: Vector) -> CycNum:
        acc = self.field.zero
        for l1, c1 in u.items():
            for l2, c2 in v.items():
                value = self.value(l1, l2)
                if value:
                    acc = acc + value * c1 * c2
        return acc

    def gram(self, degree: int) -> List[List[CycNum]]:
        return [[self.value(r, c) for c in self.right.basis(degree)] for r in self.left.basis(degree)]


class NodePairing(BilinearForm):
    """<X[n] u, v> + <u, Ad(beta)(X)[-n] v> = 0 between node-0 and node-infinity modules, <hw, hw> = 1."""

    def __init__(self, left: GradedModule, right: GradedModule):
        if left.site != "node0" or right.site != "nodeinf":
            raise ModuleConstructionError("The node pairing needs a node-0 module on the left and a node-infinity module on the right")
        if left.level != right.level:
            raise ModuleConstructionError(f"Levels differ: {left.level} and {right.level}")
        super().__init__(left, right)

    def _value(self, lhs: BasisLabel, rhs: BasisLabel) -> CycNum:
        modes, _ = lhs
        if not modes:
            return self.field.one
        (n, a, b), rest = modes[0], (modes[1:], lhs[1])
        acc = self.field.zero
        for lbl, c in self.right.act_mode((-n, a, b), rhs).items():
            value = self.value(rest, lbl)
            if value:
                acc = acc + value * c
        return -acc * self.field.eps(b)


class ShapovalovForm(BilinearForm):
    """The contravariant form on a marked-point module for X[n] -> X^T[-n], standard on the top space."""

    def __init__(self, module: GradedModule):
        if module.site != "marked":
            raise ModuleConstructionError("The Shapovalov form is built on marked-point modules")
        super().__init__(module, module)

    def _value(self, lhs: BasisLabel, rhs: BasisLabel) -> CycNum:
        if self.left.charge(lhs) != self.left.charge(rhs):
            return self.field.zero
        modes, top = lhs
        if not modes:
            return self.field.one if top == rhs[1] else self.field.zero
        (n, a, b), rest = modes[0], (modes[1:], top)
        size = self.field.n
        acc = self.field.zero
        for lbl, c in self.right.act_mode((-n, (-a) % size, b), rhs).items():
            value = self.value(rest, lbl)
            if value:
                acc = acc + value * c
        return acc * self.field.eps(a * b)


@dataclass
class DegreeData:
    """Gram matrix of one degree with a pivot minor G[R, C] and its inverse."""

    degree: int
    gram: List[List[CycNum]]
    rows: List[int]
    cols: List[int]
    minor_inverse: List[List[CycNum]]
    left_radical: List[List[CycNum]] = field(default_factory=list)
    right_radical: List[List[CycNum]] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.rows)


def _pivots(form: BilinearForm, gram: List[List[CycNum]]) -> Tuple[List[int], List[int]]:
    elim = Eliminator(form.field)
    rows = [i for i, line in enumerate(gram) if elim.add({j: v for j, v in enumerate(line) if v})]
    elim = Eliminator(form.field)
    cols = [j for j in range(len(gram[0]) if gram else 0)
            if elim.add({i: gram[i][j] for i in rows if gram[i][j]})]
    return rows, cols


class RadicalData:
    """Per-degree Gram data of a form up to a maximal degree."""

    def __init__(self, form: BilinearForm, max_degree: Optional[int] = None):
        self.form = form
        top = min(form.left.max_degree, form.right.max_degree)
        self.max_degree = top if max_degree is None else max_degree
        if self.max_degree > top:
            raise TruncationError(f"Degree {self.max_degree} exceeds the module truncation {top}")
        self.degrees: Dict[int, DegreeData] = {}
        for d in range(self.max_degree + 1):
            self.degrees[d] = self._degree_data(d)
        logger.debug(f"Gram ranks by degree: {[self.degrees[d].rank for d in range(self.max_degree + 1)]}")

    def _degree_data(self, d: int) -> DegreeData:
        field_ = self.form.field
        gram = self.form.gram(d)
        rows, cols = _pivots(self.form, gram)
        minor = [[gram[r][c] for c in cols] for r in rows]
        inverse = invert(field_, minor) if rows else []
        ncols = len(self.form.right.basis(d))
        nrows = len(self.form.left.basis(d))
        transposed = [{i: gram[i][j] for i in range(nrows) if gram[i][j]} for j in range(ncols)]
        left_radical = nullspace(field_, transposed, nrows)
        right_radical = nullspace(field_, [{j: v for j, v in enumerate(line) if v} for line in gram], ncols)
        return DegreeData(d, gram, rows, cols, inverse, left_radical, right_radical)

    def ranks(self) -> List[int]:
        return [self.degrees[d].rank for d in range(self.max_degree + 1)]

    def in_left_radical(self, vector: Vector) -> bool:
        for d, part in degree_components(vector).items():
            for lbl in self.form.right.basis(d):
                if self.form.pair(part, {lbl: self.form.field.one}):
                    return False
        return True

    def in_right_radical(self, vector: Vector) -> bool:
        for d, part in degree_components(vector).items():
            for lbl in self.form.left.basis(d):
                if self.form.pair({lbl: self.form.field.one}, part):
                    return False
        return True

    def project_left(self, vector: Vector) -> Vector:
        """Coordinates of a left vector modulo the left radical, on the pivot rows."""
        out: Vector = {}
        for d, part in degree_components(vector).items():
            data = self._data(d)
            right = self.form.right.basis(d)
            y = [self.form.pair(part, {right[c]: self.form.field.one}) for c in data.cols]
            left = self.form.left.basis(d)
            for i, r in enumerate(data.rows):
                acc = self.form.field.zero
                for j, v in enumerate(y):
                    if v:
                        acc = acc + v * data.minor_inverse[j][i]
                add_into(out, left[r], acc)
        return out

    def project_right(self, vector: Vector) -> Vector:
        out: Vector = {}
        for d, part in degree_components(vector).items():
            data = self._data(d)
            left = self.form.left.basis(d)
            z = [self.form.pair({left[r]: self.form.field.one}, part) for r in data.rows]
            right = self.form.right.basis(d)
            for i, c in enumerate(data.cols):
                acc = self.form.field.zero
                for j, v in enumerate(z):
                    if v:
                        acc = acc + data.minor_inverse[i][j] * v
                add_into(out, right[c], acc)
        return out

    def _data(self, d: int) -> DegreeData:
        if d not in self.degrees:
            raise TruncationError(f"Degree {d} is beyond the radical data (max {self.max_degree})")
        return self.degrees[d]

    def dual_bases(self, d: int) -> Tuple[List[BasisLabel], List[Vector]]:
        """Bases e_i of the left quotient and e^i of the right quotient with <e_i, e^j> = delta."""
        data = self._data(d)
        left = self.form.left.basis(d)
        right = self.form.right.basis(d)
        lower = [left[r] for r in data.rows]
        upper = []
        for i in range(data.rank):
            vec: Vector = {}
            for k, c in enumerate(data.cols):
                add_into(vec, right[c], data.minor_inverse[k][i])
            upper.append(vec)
        return lower, upper


class QuotientModule:
    """The quotient of one side of a form by its radical, on pivot labels of the parent."""

    def __init__(self, radical: RadicalData, side: str = "left"):
        if side not in ("left", "right"):
            raise ModuleConstructionError(f"Unknown side {side!r}")
        self.radical = radical
        self.side = side
        self.parent = radical.form.left if side == "left" else radical.form.right
        self.field = self.parent.field
        self.site = self.parent.site
        self.level = self.parent.level
        self.top = self.parent.top
        self.max_degree = radical.max_degree
        self.kind = f"irreducible({self.parent.kind})"
        self._memo: Dict = {}

    def basis(self, degree: int) -> List[BasisLabel]:
        data = self.radical._data(degree)
        labels = self.parent.basis(degree)
        picks = data.rows if self.side == "left" else data.cols
        return [labels[i] for i in picks]

    def dim(self, degree: int) -> int:
        return len(self.basis(degree))

    def graded_dims(self) -> List[int]:
        return [self.dim(d) for d in range(self.max_degree + 1)]

    degree = staticmethod(GradedModule.degree)

    def charge(self, label: BasisLabel) -> int:
        return self.parent.charge(label)

    def highest_weight_vector(self, index: int = 0) -> Vector:
        return self.project(self.parent.highest_weight_vector(index))

    def project(self, vector: Vector) -> Vector:
        if self.side == "left":
            return self.radical.project_left(vector)
        return self.radical.project_right(vector)

    def act_mode(self, mode, label: BasisLabel) -> Vector:
        key = (mode, label)
        if key not in self._memo:
            image = self.parent.act_mode(mode, label)
            if image and GradedModule.degree(next(iter(image))) > self.max_degree:
                raise TruncationError(f"Action leaves the quotient truncation {self.max_degree}")
            self._memo[key] = self.project(image)
        return self._memo[key]

    def act(self, mode, vector: Vector) -> Vector:
        out: Vector = {}
        for lbl, c in vector.items():
            for lbl2, c2 in self.act_mode(mode, lbl).items():
                add_into(out, lbl2, c * c2)
        return out

    def act_loop(self, element, vector: Vector) -> Vector:
        return self.project(self.parent.act_loop(element, vector))

    def label_text(self, label: BasisLabel) -> str:
        return self.parent.label_text(label)

    def describe(self) -> dict:
        info = self.parent.describe()
        info.update({"kind": self.kind, "max_degree": self.max_degree, "graded_dims": self.graded_dims()})
        return info
