from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.exactnum.cyclotomic import CyclotomicField
from app.exactnum.ratfunc import RatFunc
from app.twistalg.matrices import Label, dual_coeff, j_basis, labels, make_twist_pair
from app.utils.errors import AlgebraError, PoleProximityError
from app.utils.logger import logger
from app.wfun.wmul import residue_at_one, wmul_q0, wmul_series

Coefficients = Dict[Label, complex]


@lru_cache(maxsize=16)
def j_numeric(n: int) -> Dict[Label, Tuple[np.ndarray, np.ndarray]]:
    """Complex matrices of J_ab and of its trace-form dual J^ab."""
    field = CyclotomicField.get(n)
    out = {}
    for a, b in labels(n):
        dual = j_basis(n, -a, -b).scale(dual_coeff(field, a, b))
        out[(a, b)] = (j_basis(n, a, b).to_numpy(), dual.to_numpy())
    return out


def rep_matrix(kind: str, x: np.ndarray) -> np.ndarray:
    """rho(X) for the trivial, defining and dual representations."""
    if kind == "trivial":
        return np.zeros((1, 1), dtype=complex)
    if kind == "fund":
        return x
    if kind == "antifund":
        return -x.T
    raise AlgebraError(f"Unknown representation {kind!r}")


def rep_size(kind: str, n: int) -> int:
    return 1 if kind == "trivial" else n


@lru_cache(maxsize=64)
def trig_functions(n: int, derivative: int = 0) -> Dict[Label, RatFunc]:
    """q = 0 limits of w_ab, or their (u d/du)-derivatives."""
    out = {}
    for a, b in labels(n):
        f = wmul_q0(n, a, b)
        for _ in range(derivative):
            f = f.derivative()
        out[(a, b)] = f
    return out


def trig_coefficients(n: int, u: complex, tol: float = 1e-9, derivative: int = 0) -> Coefficients:
    return {label: f.eval_complex(u, tol) for label, f in trig_functions(n, derivative).items()}


def elliptic_coefficients(n: int, q: complex, u: complex, q_max: int = 8, tol: float = 1e-9) -> Coefficients:
    """Truncated q-series values of w_ab(q; u)."""
    out = {}
    for a, b in labels(n):
        out[(a, b)] = wmul_series(n, a, b, q_max).eval_complex(u, q, tol=tol)
    return out


def r_tensor(n: int, coeffs: Coefficients) -> np.ndarray:
    """sum_ab c_ab J_ab (x) J^ab on C^N (x) C^N."""
    out = np.zeros((n * n, n * n), dtype=complex)
    for label, (x, y) in j_numeric(n).items():
        c = coeffs.get(label, 0)
        if c:
            out += c * np.kron(x, y)
    return out


def r_trig(n: int, u: complex, tol: float = 1e-9) -> np.ndarray:
    return r_tensor(n, trig_coefficients(n, u, tol))


def r_elliptic(n: int, q: complex, u: complex, q_max: int = 8, tol: float = 1e-9) -> np.ndarray:
    return r_tensor(n, elliptic_coefficients(n, q, u, q_max, tol))


def embed_pair(n: int, coeffs: Coefficients, i: int, j: int, kinds: Sequence[str]) -> np.ndarray:
    """r^(ij) = sum_ab c_ab rho_i(J_ab) rho_j(J^ab) on V_1 (x) ... (x) V_L."""
    if i == j:
        raise AlgebraError("r^(ij) needs two different slots")
    sizes = [rep_size(k, n) for k in kinds]
    total = int(np.prod(sizes)) if sizes else 1
    out = np.zeros((total, total), dtype=complex)
    for label, (x, y) in j_numeric(n).items():
        c = coeffs.get(label, 0)
        if not c:
            continue
        term = np.ones((1, 1), dtype=complex)
        for slot, kind in enumerate(kinds):
            if slot == i:
                factor = rep_matrix(kind, x)
            elif slot == j:
                factor = rep_matrix(kind, y)
            else:
                factor = np.eye(sizes[slot], dtype=complex)
            term = np.kron(term, factor)
        out += c * term
    return out


def swap(n: int) -> np.ndarray:
    """The flip P on C^N (x) C^N."""
    p = np.zeros((n * n, n * n))
    for i in range(n):
        for j in range(n):
            p[j * n + i, i * n + j] = 1
    return p


def casimir(n: int) -> np.ndarray:
    """sum_ab J_ab (x) J^ab, which equals P - I/N for the trace form."""
    return r_tensor(n, {label: 1 for label in labels(n)})


def cybe_residual(n: int, u12: complex, u23: complex,
                  coefficient_fn: Optional[Callable[[complex], Coefficients]] = None, tol: float = 1e-9) -> float:
    """Frobenius norm of [r12, r13] + [r12, r23] + [r13, r23] with u13 = u12 u23."""
    coefficient_fn = coefficient_fn or (lambda u: trig_coefficients(n, u, tol))
    kinds = ["fund"] * 3
    r12 = embed_pair(n, coefficient_fn(u12), 0, 1, kinds)
    r13 = embed_pair(n, coefficient_fn(u12 * u23), 0, 2, kinds)
    r23 = embed_pair(n, coefficient_fn(u23), 1, 2, kinds)
    total = (r12 @ r13 - r13 @ r12) + (r12 @ r23 - r23 @ r12) + (r13 @ r23 - r23 @ r13)
    return float(np.linalg.norm(total))


def unitarity_residual(n: int, u: complex, tol: float = 1e-9) -> float:
    """|| r12(u) + r21(1/u) ||."""
    p = swap(n)
    return float(np.linalg.norm(r_trig(n, u, tol) + p @ r_trig(n, 1 / u, tol) @ p))


def equivariance_residual(n: int, u: complex, tol: float = 1e-9) -> float:
    """|| r(eps u) - (gamma (x) 1) r(u) (gamma^-1 (x) 1) ||, from w_ab(eps u) = eps^a w_ab(u)."""
    _, gamma = make_twist_pair(n)
    g = gamma.to_numpy()
    left = np.kron(g, np.eye(n))
    right = np.kron(np.linalg.inv(g), np.eye(n))
    eps = np.exp(2j * np.pi / n)
    return float(np.linalg.norm(r_trig(n, eps * u, tol) - left @ r_trig(n, u, tol) @ right))


def residue_is_casimir(n: int) -> bool:
    """Every w_ab has residue exactly 1/N at u = 1, so Res r = Casimir / N."""
    field = CyclotomicField.get(n)
    return all(residue_at_one(n, a, b) == field.from_rational(1) / n for a, b in labels(n))


def degeneration_slope(n: int, u: complex, qs: Sequence[float], q_max: int = 8, tol: float = 1e-9) -> Tuple[float, List[float]]:
    """Least-squares slope of log ||r_ell(q) - r_trig|| against log q."""
    base = r_trig(n, u, tol)
    norms = [float(np.linalg.norm(r_elliptic(n, q, u, q_max, tol) - base)) for q in qs]
    if min(norms) <= 0:
        raise PoleProximityError(f"Degenerate difference norms {norms}")
    slope = float(np.polyfit(np.log(qs), np.log(norms), 1)[0])
    logger.debug(f"Degeneration norms {norms}, slope {slope}")
    return slope, norms


def random_spectral_points(rng: np.random.Generator, count: int, n: int, margin: float = 0.1) -> List[complex]:
    """Points with |u^N - 1| > margin and modulus between 1/3 and 3."""
    out = []
    while len(out) < count:
        u = np.exp(rng.uniform(-1.0, 1.0) + 1j * rng.uniform(0, 2 * np.pi))
        if abs(u ** n - 1) > margin:
            out.append(complex(u))
    return out
