from fractions import Fraction

import pytest

from app.exactnum.cyclotomic import CyclotomicField
from app.twistalg.chevalley import cartan_matrix, chevalley
from app.twistalg.loop import LoopElement, bracket, cocycle
from app.twistalg.matrices import (GMat, ad, dual_basis, inner, j_basis, j_bracket_coeff, j_compose, j_decompose,
                                   j_trace, labels, make_twist_pair, transpose_label)
from app.twistalg.weights import (AffineWeight, is_dominant_integral, rep_weights, tensor_weights, weight_set,
                                  weight_tilde)
from app.utils.errors import AlgebraError, WeightError


class TestJBasis:
    """Closed-form structure constants of the J basis."""

    @pytest.mark.parametrize("n", [2, 3])
    def test_brackets_and_traces(self, n):
        field = CyclotomicField.get(n)
        for a, b in labels(n):
            for c, d in labels(n):
                x, y = j_basis(n, a, b), j_basis(n, c, d)
                expected = j_basis(n, a + c, b + d).scale(j_bracket_coeff(field, a, b, c, d))
                assert x.commutator(y) == expected
                assert inner(x, y) == j_trace(field, a, b, c, d)

    def test_dual_basis(self, field3):
        duals = dual_basis(3)
        for a, b in labels(3):
            for c, d in labels(3):
                assert inner(j_basis(3, a, b), duals[(c, d)]) == (1 if (a, b) == (c, d) else 0)

    def test_twist_eigenvalues(self, field3):
        beta, gamma = make_twist_pair(3)
        for a, b in labels(3):
            x = j_basis(3, a, b)
            assert ad(gamma, x) == x.scale(field3.eps(a))
            assert ad(beta, x) == x.scale(field3.eps(b))

    def test_transpose(self, field3):
        for a, b in labels(3):
            c, (a2, b2) = transpose_label(field3, a, b)
            assert j_basis(3, a, b).transpose() == j_basis(3, a2, b2).scale(c)

    def test_decompose(self, field3):
        x = GMat.elementary(field3, 0, 1) + GMat.elementary(field3, 2, 1).scale(3)
        assert j_compose(field3, j_decompose(x)) == x
        assert (0, 0) not in j_decompose(x)

    def test_twist_needs_n_at_least_two(self):
        with pytest.raises(AlgebraError):
            make_twist_pair(1)


class TestLoopAlgebra:
    """Twisted loop algebras at the nodes and at marked points."""

    def test_cocycle_is_divided_by_n_at_nodes(self, field2):
        x = LoopElement.basis(field2, 1, 0, 1, "node0")
        y = LoopElement.basis(field2, 1, 0, -1, "node0")
        assert cocycle(x, y) == 1
        xm = LoopElement.basis(field2, 1, 0, 1, "marked")
        ym = LoopElement.basis(field2, 1, 0, -1, "marked")
        assert cocycle(xm, ym) == 2
        assert bracket(xm, ym).central == 2

    def test_grading_violation(self, field2):
        with pytest.raises(AlgebraError):
            LoopElement.basis(field2, 1, 0, 0, "node0")
        with pytest.raises(AlgebraError):
            LoopElement.basis(field2, 1, 1, 2, "nodeinf")

    def test_sites_do_not_mix(self, field2):
        with pytest.raises(AlgebraError):
            bracket(LoopElement.basis(field2, 1, 0, 1, "node0"), LoopElement.basis(field2, 1, 0, 1, "marked"))

    def test_identity_is_rejected(self, field2):
        with pytest.raises(AlgebraError):
            LoopElement.from_matrix(GMat.identity(field2), 0)


class TestChevalley:
    """The node images of e_i, f_i and the coroots satisfy the affine A_(N-1) relations."""

    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("site", ["node0", "nodeinf"])
    def test_relations(self, n, site):
        field = CyclotomicField.get(n)
        zero = LoopElement(field, {}, 0, site)
        a = cartan_matrix(n)
        for i in range(n):
            for j in range(n):
                ef = bracket(chevalley(n, i, "e", site), chevalley(n, j, "f", site))
                assert ef == (chevalley(n, i, "coroot", site) if i == j else zero)
                he = bracket(chevalley(n, i, "coroot", site), chevalley(n, j, "e", site))
                assert he == chevalley(n, j, "e", site).scale(a[i][j])
                hf = bracket(chevalley(n, i, "coroot", site), chevalley(n, j, "f", site))
                assert hf == chevalley(n, j, "f", site).scale(-a[i][j])

    def test_index_out_of_range(self):
        with pytest.raises(AlgebraError):
            chevalley(2, 2, "e", "node0")
        with pytest.raises(AlgebraError):
            chevalley(2, 0, "e", "marked")

    def test_cartan_matrix(self):
        assert cartan_matrix(2) == [[2, -2], [-2, 2]]
        assert cartan_matrix(3) == [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]


class TestWeights:
    """Affine weights, the tilde map and dominance."""

    def test_h_values(self):
        mu = AffineWeight.from_h_values([1, Fraction(1, 2)], 2)
        assert mu.h_value(1) == 1 and mu.h_value(2) == Fraction(1, 2)
        assert sum(mu.coroot_pairings("node0").values()) == 2
        assert sum(mu.coroot_pairings("nodeinf").values()) == 2

    def test_values_must_sum_to_zero(self):
        with pytest.raises(WeightError):
            AffineWeight(Fraction(1), (Fraction(1), Fraction(0)))

    def test_weight_map_example(self):
        lam = AffineWeight.from_h_values([1])
        tilde, prime = weight_tilde(lam, 1)
        assert tilde.h_value(1) == Fraction(-1, 2)
        assert prime.h_value(1) == Fraction(-1, 2)
        assert tilde.coroot_pairings("node0") == {0: 1, 1: 0}
        assert tilde.pairing_values("node0") == [0, 1]
        assert prime.pairing_values("nodeinf") == [1, 0]
        assert is_dominant_integral(tilde, "node0")
        assert is_dominant_integral(prime, "nodeinf")

    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("level", [1, 2])
    def test_tilde_dominant_iff_prime_dominant(self, n, level):
        for reps in (["fund"], ["fund", "fund"], ["fund", "antifund"]):
            for lam in weight_set(reps, n):
                tilde, prime = weight_tilde(lam, level)
                assert is_dominant_integral(tilde, "node0") == is_dominant_integral(prime, "nodeinf")

    def test_tensor_weights(self):
        counts = tensor_weights(["fund", "fund"], 2)
        assert sorted(counts.values()) == [1, 1, 2]
        assert len(weight_set(["fund", "fund"], 2)) == 3
        assert len(rep_weights("trivial", 3)) == 1

    def test_unknown_representation(self):
        with pytest.raises(WeightError):
            rep_weights("adjoint", 2)
