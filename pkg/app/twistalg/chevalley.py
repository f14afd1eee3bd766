from fractions import Fraction
from typing import List

from app.exactnum.cyclotomic import CyclotomicField
from app.twistalg.loop import LoopElement
from app.twistalg.matrices import GMat
from app.utils.errors import AlgebraError

KINDS = ("e", "f", "coroot")


def _simple_indices(n: int, i: int):
    """Row/column pair (0-based) of the simple root E_(i,i+1); i = 0 is the affine root E_(N,1)."""
    if not 0 <= i < n:
        raise AlgebraError(f"Chevalley index {i} out of range 0..{n - 1}")
    if i == 0:
        return n - 1, 0
    return i - 1, i


def _h(field: CyclotomicField, p: int, q: int) -> GMat:
    return GMat.elementary(field, p, p) - GMat.elementary(field, q, q)


def phi0(n: int, i: int, kind: str) -> LoopElement:
    """Preimage in g^(0) of e_i, f_i or the coroot alpha_i^v; the coroot carries k-hat/N."""
    field = CyclotomicField.get(n)
    p, q = _simple_indices(n, i)
    if kind == "e":
        return LoopElement.from_matrix(GMat.elementary(field, p, q), 1, "node0")
    if kind == "f":
        return LoopElement.from_matrix(GMat.elementary(field, q, p), -1, "node0")
    if kind == "coroot":
        h = LoopElement.from_matrix(_h(field, p, q), 0, "node0")
        return h + LoopElement.khat(field, "node0", Fraction(1, n))
    raise AlgebraError(f"Unknown Chevalley kind {kind!r}")


def phiinf(n: int, i: int, kind: str) -> LoopElement:
    """Preimage in g^(inf) (variable s = 1/t) of e_i, f_i or the coroot."""
    field = CyclotomicField.get(n)
    p, q = _simple_indices(n, i)
    if kind == "e":
        return LoopElement.from_matrix(GMat.elementary(field, q, p), 1, "nodeinf", -1)
    if kind == "f":
        return LoopElement.from_matrix(GMat.elementary(field, p, q), -1, "nodeinf", -1)
    if kind == "coroot":
        h = LoopElement.from_matrix(_h(field, p, q), 0, "nodeinf", -1)
        return h + LoopElement.khat(field, "nodeinf", Fraction(1, n))
    raise AlgebraError(f"Unknown Chevalley kind {kind!r}")


def chevalley(n: int, i: int, kind: str, site: str) -> LoopElement:
    if site == "node0":
        return phi0(n, i, kind)
    if site == "nodeinf":
        return phiinf(n, i, kind)
    raise AlgebraError(f"Chevalley generators live at the nodes, not at {site}")


def cartan_matrix(n: int) -> List[List[int]]:
    """Generalized Cartan matrix of affine A_(N-1), indexed 0..N-1 cyclically."""
    if n == 2:
        return [[2, -2], [-2, 2]]
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        out[i][i] = 2
        out[i][(i + 1) % n] = -1
        out[i][(i - 1) % n] = -1
    return out
