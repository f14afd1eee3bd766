from dataclasses import dataclass
from typing import Callable, List, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from app.kz.connection import KZSystem
from app.utils.errors import IntegrationError
from app.utils.logger import logger

# Dormand-Prince 5(4): adaptive steps controlled by the embedded fourth-order solution.
METHOD = "RK45"
# The error estimate compares against a rerun with tolerances divided by this factor.
REFINEMENT = 16.0


@dataclass
class TransportResult:
    vector: np.ndarray
    steps: int
    evaluations: int
    error_estimate: float

    def to_dict(self) -> dict:
        return {"vector": [[float(v.real), float(v.imag)] for v in self.vector], "steps": self.steps,
                "evaluations": self.evaluations, "error_estimate": self.error_estimate}


def _solve(rhs: Callable[[float, np.ndarray], np.ndarray], v0: np.ndarray, rtol: float, atol: float):
    sol = solve_ivp(rhs, (0.0, 1.0), v0, method=METHOD, rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationError(f"Integration failed at s = {sol.t[-1]:.6g}: {sol.message}")
    return sol


def integrate(rhs: Callable[[float, np.ndarray], np.ndarray], v0: np.ndarray, rtol: float = 1e-10,
              atol: float = 1e-12) -> TransportResult:
    """Integrates dv/ds = rhs(s, v) for s in [0, 1].

    The returned vector comes from the tighter of two runs; their difference
    is the error estimate of the looser one.
    """
    v0 = np.asarray(v0, dtype=complex)
    coarse = _solve(rhs, v0, rtol, atol)
    fine = _solve(rhs, v0, rtol / REFINEMENT, atol / REFINEMENT)
    error = float(np.linalg.norm(fine.y[:, -1] - coarse.y[:, -1]))
    return TransportResult(fine.y[:, -1], len(fine.t) - 1, coarse.nfev + fine.nfev, error)


def transport(system: KZSystem, i: int, points: Sequence[complex], waypoints: Sequence[complex],
              v0: np.ndarray, rtol: float = 1e-10, atol: float = 1e-12) -> TransportResult:
    """Solves dv/dx_i = A_i v while x_i = log u_i runs along the polygon; other points stay fixed."""
    legs = len(waypoints) - 1
    if legs < 1:
        raise IntegrationError("A path needs at least two waypoints")
    fixed: List[complex] = list(points)
    v = np.asarray(v0, dtype=complex)
    steps = evaluations = 0
    error = 0.0
    for k in range(legs):
        start, delta = waypoints[k], waypoints[k + 1] - waypoints[k]

        def rhs(t: float, w: np.ndarray, start=start, delta=delta) -> np.ndarray:
            current = list(fixed)
            current[i] = complex(np.exp(start + t * delta))
            return delta * (system.operator(i, current) @ w)

        part = integrate(rhs, v, rtol, atol)
        v = part.vector
        steps += part.steps
        evaluations += part.evaluations
        error += part.error_estimate
    result = TransportResult(v, steps, evaluations, error)
    logger.info(f"Transport along {legs} legs: {result.steps} steps, error estimate {result.error_estimate:.3e}")
    return result


def constant_transport(matrix: np.ndarray, v0: np.ndarray, rtol: float = 1e-10, atol: float = 1e-12) -> TransportResult:
    """dv/ds = M v on [0, 1]; the exact answer is expm(M) v0."""
    return integrate(lambda s, v: matrix @ v, v0, rtol, atol)
