import json
from fractions import Fraction

import numpy as np
import pytest

from app.repmods.forms import NodePairing, RadicalData, partner_weight
from app.repmods.modules import (build_module, ef_power_scalar, ef_power_vector, integrable_module, module_to_json,
                                 node_pairing, radical_and_quotient, sugawara_lminus1, verma_module, weyl_module)
from app.repmods.pbw import add_into
from app.twistalg.chevalley import phi0
from app.twistalg.weights import AffineWeight
from app.utils.errors import AlgebraError, ModuleConstructionError, TruncationError, WeightError


class TestGradedModules:
    """PBW bases and graded dimensions."""

    def test_verma_dims(self, generic_weight):
        assert verma_module(generic_weight, "node0", 3).graded_dims() == [1, 2, 4, 8]
        assert verma_module(generic_weight, "nodeinf", 3).graded_dims() == [1, 2, 4, 8]

    def test_weyl_dims(self):
        assert weyl_module(2, 1, "trivial", 1).graded_dims() == [1, 3]
        assert weyl_module(2, 1, "fund", 1).graded_dims() == [2, 6]

    def test_creation_beyond_truncation(self, generic_weight):
        module = verma_module(generic_weight, "node0", 1)
        with pytest.raises(TruncationError):
            module.act((-1, 1, 0), {((((-1, 1, 0),), 0)): module.field.one})

    def test_mode_outside_the_twisted_algebra(self, generic_weight):
        module = verma_module(generic_weight, "node0", 2)
        with pytest.raises(AlgebraError):
            module.act((-1, 0, 1), module.highest_weight_vector())

    def test_zero_modes_act_by_the_weight(self, generic_weight):
        module = verma_module(generic_weight, "node0", 1)
        hw = module.highest_weight_vector()
        image = module.act((0, 0, 1), hw)
        assert image == {((), 0): generic_weight.j0_value(module.field, 1)}

    def test_fund_top_space(self, field3):
        module = weyl_module(3, 1, "fund", 0)
        image = module.act((0, 1, 2), {((), 0): field3.one})
        assert image == {((), 2): field3.one}

    def test_unknown_kind(self):
        with pytest.raises(ModuleConstructionError):
            build_module("adjoint", 2, 1, 2)
        with pytest.raises(WeightError):
            build_module("verma0", 2, 1, 2)


class TestNodePairing:
    """The pairing between node-0 and node-infinity Verma modules."""

    def test_partner_weight(self, generic_weight):
        partner = partner_weight(generic_weight, "node0")
        assert partner.level == generic_weight.level
        assert partner_weight(partner, "nodeinf") == generic_weight

    def test_normalization_and_orthogonality(self, generic_weight):
        pairing = node_pairing(generic_weight, 2)
        left, right = pairing.left, pairing.right
        assert pairing.pair(left.highest_weight_vector(), right.highest_weight_vector()) == 1
        for lhs in left.basis(1):
            for rhs in right.basis(2):
                assert pairing.value(lhs, rhs) == 0

    def test_invariance(self, generic_weight):
        pairing = node_pairing(generic_weight, 3)
        left, right = pairing.left, pairing.right
        field = pairing.field
        for depth in (1, 2):
            for mode in left.modes_at_depth(depth):
                n, a, b = mode
                for d in range(0, 4 - depth):
                    for u in left.basis(d):
                        for v in right.basis(d + depth):
                            lhs = pairing.pair(left.act(mode, {u: field.one}), {v: field.one})
                            rhs = pairing.pair({u: field.one}, right.act((-n, a, b), {v: field.one}))
                            assert lhs == -field.eps(b) * rhs

    @pytest.mark.slow
    def test_invariance_on_random_pairs(self, generic_weight):
        pairing = node_pairing(generic_weight, 4)
        left, right = pairing.left, pairing.right
        field = pairing.field
        rng = np.random.default_rng(0)
        for _ in range(60):
            d = int(rng.integers(0, 4))
            depth = int(rng.integers(1, 5 - d))
            modes = left.modes_at_depth(depth)
            n, a, b = modes[int(rng.integers(len(modes)))]
            lower, upper = left.basis(d), right.basis(d + depth)
            u = {lower[int(rng.integers(len(lower)))]: field.one}
            v = {upper[int(rng.integers(len(upper)))]: field.one}
            lhs = pairing.pair(left.act((n, a, b), u), v)
            rhs = pairing.pair(u, right.act((-n, a, b), v))
            assert lhs == -field.eps(b) * rhs

    def test_generic_weight_is_nondegenerate(self, generic_weight):
        assert RadicalData(node_pairing(generic_weight, 3)).ranks() == [1, 2, 4, 8]

    def test_dominant_weight_has_a_radical(self, dominant_weight):
        radical, quotient = radical_and_quotient(dominant_weight, 2)
        assert radical.ranks()[1] == 1
        assert quotient.graded_dims() == radical.ranks()

    def test_dual_bases(self, dominant_weight):
        radical, _ = radical_and_quotient(dominant_weight, 2)
        for d in range(3):
            lower, upper = radical.dual_bases(d)
            for i, e in enumerate(lower):
                for j, f in enumerate(upper):
                    assert radical.form.pair({e: radical.form.field.one}, f) == (1 if i == j else 0)

    def test_levels_must_match(self, generic_weight):
        left = verma_module(generic_weight, "node0", 1)
        right = verma_module(partner_weight(generic_weight).with_level(2), "nodeinf", 1)
        with pytest.raises(ModuleConstructionError):
            NodePairing(left, right)


class TestIntegrableModules:
    """Quotients of Weyl modules by the Shapovalov radical."""

    def test_basic_module_dims(self):
        _, vacuum = integrable_module(2, 1, "trivial", 2)
        assert vacuum.graded_dims() == [1, 3, 4]

    def test_null_vector_projects_to_zero(self):
        _, vacuum = integrable_module(2, 1, "trivial", 2)
        v = vacuum.highest_weight_vector()
        once = vacuum.act((-1, 1, 0), v)
        assert once
        # E_21[-1]^2 v vanishes at level 1; E_21 = (J_10 + J_11) / 2 for N = 2
        e = {}
        for b in (0, 1):
            for lbl, c in vacuum.act((-1, 1, b), v).items():
                add_into(e, lbl, c / 2)
        twice = {}
        for b in (0, 1):
            for lbl, c in vacuum.act((-1, 1, b), e).items():
                add_into(twice, lbl, c / 2)
        assert twice == {}

    def test_json(self):
        radical, vacuum = integrable_module(2, 1, "trivial", 1)
        data = json.loads(module_to_json(vacuum, radical))
        assert data["graded_dims"] == [1, 3]
        assert data["gram_ranks"] == [1, 3]
        assert len(data["basis"]["1"]) == 3


class TestSingularVectorScalars:
    """e_i^n f_i^n on a highest weight vector."""

    def test_closed_form(self):
        kappa = AffineWeight.from_h_values([Fraction(3, 2)], 1)
        assert ef_power_scalar(kappa, 1, 2) == 4
        assert ef_power_scalar(kappa, 1, 0) == 1

    @pytest.mark.parametrize("h", [Fraction(3, 2), Fraction(-1), Fraction(1, 3), Fraction(5, 7), Fraction(-5, 2)])
    @pytest.mark.parametrize("power", [1, 2, 3])
    def test_matches_verma_computation(self, h, power):
        kappa = AffineWeight.from_h_values([h], 1)
        module = verma_module(kappa, "node0", power)
        for i in range(2):
            vec = ef_power_vector(module, i, power)
            e = phi0(2, i, "e")
            for _ in range(power):
                vec = module.act_loop(e, vec)
            scalar = ef_power_scalar(kappa, i, power)
            assert vec == ({((), 0): module.field.coerce(scalar)} if scalar else {})


class TestSugawara:
    """T[-1] on marked-point modules."""

    @pytest.mark.parametrize("mode", [-1, 0, 1])
    def test_commutator(self, mode):
        module = weyl_module(2, 1, "fund", 3)
        field = module.field
        for top in range(2):
            v = {((), top): field.one}
            for a, b in ((1, 0), (1, 1), (0, 1)):
                x = (mode, a, b)
                lhs = dict(sugawara_lminus1(module, module.act(x, v)))
                for lbl, c in module.act(x, sugawara_lminus1(module, v)).items():
                    add_into(lhs, lbl, -c)
                rhs = {lbl: -mode * c for lbl, c in module.act((mode - 1, a, b), v).items() if mode}
                assert lhs == rhs

    @pytest.mark.parametrize("mode", [-1, 0, 1])
    @pytest.mark.parametrize("degree", [1, 2])
    def test_commutator_above_the_top(self, mode, degree):
        module = weyl_module(2, 1, "fund", 4)
        field = module.field
        for label in module.basis(degree):
            v = {label: field.one}
            for a, b in ((1, 0), (1, 1), (0, 1)):
                x = (mode, a, b)
                lhs = dict(sugawara_lminus1(module, module.act(x, v)))
                for lbl, c in module.act(x, sugawara_lminus1(module, v)).items():
                    add_into(lhs, lbl, -c)
                rhs = {lbl: -mode * c for lbl, c in module.act((mode - 1, a, b), v).items() if mode}
                assert lhs == rhs

    def test_critical_level(self):
        module = weyl_module(2, -2, "fund", 1)
        with pytest.raises(AlgebraError):
            sugawara_lminus1(module, module.highest_weight_vector())
