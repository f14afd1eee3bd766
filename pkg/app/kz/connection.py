from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from app.kz.rmatrix import embed_pair, rep_size, trig_coefficients
from app.utils.errors import AlgebraError
from app.utils.logger import logger


@dataclass
class KZSystem:
    """Trigonometric KZ connection d/dx_i - A_i on V_1 (x) ... (x) V_L in log coordinates x_i = log u_i.

    A_i = (k + N)^-1 sum_(j != i) r^(ij)(u_i / u_j).
    """

    n: int
    level: float
    kinds: List[str] = field(default_factory=list)
    tol: float = 1e-9

    def __post_init__(self):
        self.level = float(self.level)
        if self.level + self.n == 0:
            raise AlgebraError(f"KZ connection is undefined at the critical level k = {-self.n}")
        self.kappa = self.level + self.n

    @property
    def dim(self) -> int:
        return int(np.prod([rep_size(k, self.n) for k in self.kinds])) if self.kinds else 1

    def _check(self, points: Sequence[complex]) -> None:
        if len(points) != len(self.kinds):
            raise AlgebraError(f"{len(points)} points for {len(self.kinds)} modules")
        for i in range(len(points)):
            for j in range(i + 1, len(points)):
                if abs(points[i] ** self.n - points[j] ** self.n) < self.tol:
                    raise AlgebraError(f"Points {i} and {j} coincide up to eps")

    def operator(self, i: int, points: Sequence[complex], derivative: int = 0) -> np.ndarray:
        """A_i, or with derivative=1 the u d/du derivative of each r^(ij) at u_i/u_j."""
        self._check(points)
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for j in range(len(points)):
            if j != i:
                coeffs = trig_coefficients(self.n, points[i] / points[j], self.tol, derivative)
                out += embed_pair(self.n, coeffs, i, j, self.kinds)
        return out / self.kappa

    def derivative(self, i: int, j: int, points: Sequence[complex]) -> np.ndarray:
        """d A_j / d x_i for i != j: only r^(ji)(u_j/u_i) depends on x_i, with derivative -r'."""
        if i == j:
            raise AlgebraError("Mixed derivatives need i != j")
        self._check(points)
        coeffs = trig_coefficients(self.n, points[j] / points[i], self.tol, 1)
        return -embed_pair(self.n, coeffs, j, i, self.kinds) / self.kappa

    def flatness_residual(self, i: int, j: int, points: Sequence[complex]) -> float:
        """|| d_i A_j - d_j A_i - [A_i, A_j] ||, with exact derivatives of the coefficient functions."""
        if len(points) < 2:
            return 0.0
        a_i = self.operator(i, points)
        a_j = self.operator(j, points)
        value = self.derivative(i, j, points) - self.derivative(j, i, points) - (a_i @ a_j - a_j @ a_i)
        residual = float(np.linalg.norm(value))
        logger.debug(f"Flatness residual ({i},{j}) at {list(points)}: {residual}")
        return residual
