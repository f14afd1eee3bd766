import numpy as np
import pytest
from scipy.linalg import expm

from app.kz.connection import KZSystem
from app.kz.rmatrix import (casimir, cybe_residual, degeneration_slope, equivariance_residual, r_trig,
                            random_spectral_points, residue_is_casimir, swap, unitarity_residual)
from app.kz.transport import constant_transport, transport
from app.utils.errors import AlgebraError, IntegrationError, PoleProximityError


class TestRMatrix:
    """The trigonometric r-matrix built from the q = 0 limits of w_ab."""

    @pytest.mark.parametrize("n", [2, 3])
    def test_cybe(self, n):
        rng = np.random.default_rng(7)
        u12, u23 = random_spectral_points(rng, 2, n, margin=0.2)
        if abs((u12 * u23) ** n - 1) < 0.2:
            u23 = 1 / u23
        assert cybe_residual(n, u12, u23) < 1e-9

    @pytest.mark.parametrize("n", [2, 3])
    def test_unitarity(self, n):
        for u in (2.0, 0.3 + 0.8j, -1.7j):
            assert unitarity_residual(n, u) < 1e-9

    @pytest.mark.parametrize("n", [2, 3])
    def test_equivariance(self, n):
        assert equivariance_residual(n, 1.4 + 0.3j) < 1e-9

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_residue_is_casimir(self, n):
        assert residue_is_casimir(n)

    def test_casimir_is_flip_minus_trace(self):
        for n in (2, 3):
            assert np.allclose(casimir(n), swap(n) - np.eye(n * n) / n)

    def test_pole_at_one(self):
        with pytest.raises(PoleProximityError):
            r_trig(2, 1.0 + 1e-13)

    def test_elliptic_degenerates_linearly(self):
        slope, norms = degeneration_slope(2, 2.0, [1e-2, 1e-3, 1e-4])
        assert slope >= 0.9
        assert norms == sorted(norms, reverse=True)


class TestKZConnection:
    """Flatness of the trigonometric KZ connection."""

    @pytest.mark.parametrize("kinds", [["fund", "fund"], ["fund", "fund", "fund"], ["fund", "antifund", "fund"]])
    def test_flatness(self, kinds):
        system = KZSystem(2, 1.0, kinds)
        rng = np.random.default_rng(3)
        points = random_spectral_points(rng, len(kinds), 2, margin=0.3)
        while any(abs(points[i] ** 2 - points[j] ** 2) < 0.3 for i in range(len(points)) for j in range(i)):
            points = random_spectral_points(rng, len(kinds), 2, margin=0.3)
        for i in range(len(kinds)):
            for j in range(i + 1, len(kinds)):
                assert system.flatness_residual(i, j, points) < 1e-8

    def test_single_point_is_trivially_flat(self):
        assert KZSystem(2, 1.0, ["fund"]).flatness_residual(0, 0, [1.5]) == 0.0

    def test_critical_level(self):
        with pytest.raises(AlgebraError):
            KZSystem(3, -3.0, ["fund", "fund"])

    def test_coinciding_points(self):
        system = KZSystem(2, 1.0, ["fund", "fund"])
        with pytest.raises(AlgebraError):
            system.operator(0, [1.5, -1.5])
        with pytest.raises(AlgebraError):
            system.operator(0, [1.5])


class TestTransport:
    """Adaptive RK4 parallel transport along polygons in log coordinates."""

    def _setup(self):
        system = KZSystem(2, 1.0, ["fund", "fund"])
        v0 = np.array([1.0, 0.5j, -0.25, 2.0], dtype=complex)
        return system, [1.5, 0.7], v0

    def test_small_loop_has_trivial_holonomy(self):
        system, points, v0 = self._setup()
        x0 = complex(np.log(points[0]))
        loop = [x0, x0 + 0.1, x0 + 0.1 + 0.1j, x0 + 0.1j, x0]
        result = transport(system, 0, points, loop, v0)
        assert np.linalg.norm(result.vector - v0) < 1e-6
        assert result.steps >= 4

    def test_reversal(self):
        system, points, v0 = self._setup()
        x0 = complex(np.log(points[0]))
        path = [x0, x0 + 0.2 + 0.1j]
        there = transport(system, 0, points, path, v0)
        end = list(points)
        end[0] = complex(np.exp(path[-1]))
        back = transport(system, 0, end, path[::-1], there.vector)
        assert np.linalg.norm(back.vector - v0) < 1e-8

    def test_constant_matrix_matches_expm(self):
        rng = np.random.default_rng(11)
        m = 0.5 * (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        v0 = np.array([1.0, -1.0, 0.5], dtype=complex)
        result = constant_transport(m, v0, rtol=1e-12, atol=1e-14)
        expected = expm(m) @ v0
        assert np.linalg.norm(result.vector - expected) < 1e-10 * max(1.0, np.linalg.norm(expected))
        assert result.error_estimate < 1e-8
        assert result.steps > 0

    def test_path_needs_two_waypoints(self):
        system, points, v0 = self._setup()
        with pytest.raises(IntegrationError):
            transport(system, 0, points, [0.4], v0)
