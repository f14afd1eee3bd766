from fractions import Fraction

import pytest
import sympy

from app.coinv.checks import factorization_check, hat_iota_invariance_check
from app.coinv.problem import CoinvProblem, cc_dim
from app.coinv.rank import block_rank, choose_primes, exact_rank, modular_ranks
from app.coinv.reduction import initial_vector, singular_vector_reduce
from app.repmods.modules import build_module, integrable_module, weyl_module
from app.twistalg.matrices import GMat
from app.twistalg.weights import AffineWeight, weight_tilde
from app.utils.errors import ConfigError, InconclusiveError, ModuleConstructionError, WeightError


def _node_pair(h, level, max_degree, kind="verma"):
    mu0 = AffineWeight.from_h_values([h], level)
    muinf = AffineWeight(mu0.level, tuple(-v for v in mu0.values))
    if kind == "verma":
        return (build_module("verma0", 2, level, max_degree, weight=mu0),
                build_module("vermainf", 2, level, max_degree, weight=muinf))
    return (build_module("irreducible0", 2, level, max_degree, weight=mu0),
            build_module("irreducibleinf", 2, level, max_degree, weight=muinf))


class TestRank:
    """Modular and exact ranks of the relation blocks."""

    def test_choose_primes(self):
        primes = choose_primes(3, 3)
        assert len(primes) == 3
        for p in primes:
            assert sympy.isprime(p)
            assert p % 3 == 1
        assert primes == sorted(primes, reverse=True)

    def test_modular_matches_exact(self, field3):
        eps = field3.eps(1)
        c = field3.coerce
        rows = [{0: c(1), 1: eps}, {0: eps, 1: eps ** 2}, {1: c(Fraction(1, 2)), 2: c(3)}]
        assert block_rank(field3, rows, "exact") == 2
        assert block_rank(field3, rows, "modular") == 2

    def test_prime_must_be_one_mod_n(self, field3):
        with pytest.raises(ConfigError):
            block_rank(field3, [{0: field3.one}], "modular", primes=[5])

    def test_disagreeing_primes_fall_back_to_exact(self, field3):
        rows = [{0: field3.coerce(7)}]
        assert modular_ranks(field3, rows, [7, 13]) == [0, 1]
        assert block_rank(field3, rows, "modular", primes=[7, 13]) == 1
        assert exact_rank(field3, rows) == 1


class TestCoinvProblem:
    """Assembling coinvariant problems from modules and points."""

    def test_model_validation(self):
        marked = [weyl_module(2, 1, "fund", 1)]
        node0, nodeinf = _node_pair(Fraction(1, 3), 1, 1)
        with pytest.raises(ConfigError):
            CoinvProblem("elliptic", 2, [2], marked)
        with pytest.raises(ModuleConstructionError):
            CoinvProblem("trig", 2, [2, 3], marked)
        with pytest.raises(ModuleConstructionError):
            CoinvProblem("orb", 2, [2], marked)
        with pytest.raises(ModuleConstructionError):
            CoinvProblem("trig", 2, [2], marked, node0, nodeinf)
        with pytest.raises(ModuleConstructionError):
            CoinvProblem("orb", 2, [2], marked, nodeinf, node0)

    def test_rank_method_is_validated(self):
        with pytest.raises(ConfigError):
            CoinvProblem("trig", 2, [2], [weyl_module(2, 1, "fund", 1)], rank_method="gauss")

    def test_report_names_the_rank_method(self):
        result = cc_dim(CoinvProblem("trig", 2, [2], [weyl_module(2, 1, "fund", 1)]), 1)
        assert result.rank_method == "exact"
        assert result.to_dict()["rank_method"] == "exact"

    def test_levels_must_agree(self):
        with pytest.raises(ModuleConstructionError):
            CoinvProblem("trig", 2, [2, 3], [weyl_module(2, 1, "fund", 1), weyl_module(2, 2, "fund", 1)])

    def test_degree_beyond_truncation(self):
        problem = CoinvProblem("trig", 2, [2], [weyl_module(2, 1, "fund", 1)])
        with pytest.raises(InconclusiveError):
            problem.columns(2)

    def test_max_degree_must_be_positive(self):
        problem = CoinvProblem("trig", 2, [2], [weyl_module(2, 1, "fund", 1)])
        with pytest.raises(ConfigError):
            cc_dim(problem, 0)


class TestTrigCoinvariants:
    """Coinvariants of marked-point modules in the trigonometric model."""

    def test_weyl_module_is_free(self):
        problem = CoinvProblem("trig", 2, [2], [weyl_module(2, 1, "fund", 2)])
        result = cc_dim(problem, 2)
        assert result.stabilized
        assert result.dims[1] == 2
        assert result.dim == 2

    def test_exact_and_modular_ranks_agree(self):
        marked = [weyl_module(2, 1, "fund", 1)]
        modular = CoinvProblem("trig", 2, [2], marked, rank_method="modular").corank(1, 2)[0]
        exact = CoinvProblem("trig", 2, [2], marked, rank_method="exact").corank(1, 2)[0]
        assert modular == exact == 2

    @pytest.mark.slow
    @pytest.mark.parametrize("n, points, reps, expected", [
        (2, [2, 3], ["fund", "fund"], 4),
        (2, [2, 3], ["fund", "antifund"], 4),
        (3, [2], ["fund"], 3),
    ])
    def test_weyl_freeness_in_larger_cases(self, n, points, reps, expected):
        marked = [weyl_module(n, 1, rep, 2) for rep in reps]
        result = cc_dim(CoinvProblem("trig", n, points, marked), 2)
        assert result.stabilized
        assert result.dim == expected

    def test_factorization(self):
        report = factorization_check(2, 1, ["fund"], [2], 3)
        assert report.stabilized
        assert report.status == "ok"
        assert report.lhs.dim == report.rhs
        assert any(term.dominant for term in report.terms)


class TestOrbCoinvariants:
    """Coinvariants with modules at both nodes."""

    @pytest.mark.parametrize("h", [Fraction(1, 2), Fraction(-1, 2)])
    def test_verma_pair_without_marked_points(self, h):
        node0, nodeinf = _node_pair(h, 1, 3)
        result = cc_dim(CoinvProblem("orb", 2, [], [], node0, nodeinf), 3)
        assert result.dim == 1

    def test_irreducible_pair_without_marked_points(self):
        node0, nodeinf = _node_pair(Fraction(1, 2), 1, 3, kind="irreducible")
        result = cc_dim(CoinvProblem("orb", 2, [], [], node0, nodeinf), 3)
        assert result.dim == 1

    @pytest.mark.slow
    @pytest.mark.parametrize("h", [Fraction(1, 2), Fraction(-1, 2)])
    def test_verma_and_irreducible_nodes_with_a_vacuum(self, h):
        _, vacuum = integrable_module(2, 1, "trivial", 4)
        for kind in ("verma", "irreducible"):
            node0, nodeinf = _node_pair(h, 1, 4, kind)
            result = cc_dim(CoinvProblem("orb", 2, [2], [vacuum], node0, nodeinf), 4)
            assert result.stabilized, kind
            assert result.dims == {d: 1 for d in range(5)}, kind

    @pytest.mark.slow
    def test_non_dominant_node_weight_gives_zero(self):
        node0, nodeinf = _node_pair(Fraction(1, 3), 1, 5)
        _, vacuum = integrable_module(2, 1, "trivial", 5)
        result = cc_dim(CoinvProblem("orb", 2, [2], [vacuum], node0, nodeinf), 5)
        assert result.stabilized
        assert result.dim == 0


class TestSingularVectorReduction:
    """Rewriting v_kappa (x) v (x) v_inf through a raising section."""

    def _problem(self, h, model="orb"):
        _, vacuum = integrable_module(2, 1, "trivial", 2)
        if model == "trig":
            return CoinvProblem("trig", 2, [2], [vacuum]), vacuum
        node0, nodeinf = _node_pair(h, 1, 2)
        return CoinvProblem("orb", 2, [2], [vacuum], node0, nodeinf), vacuum

    def test_vacuum_vector_reduces_to_zero(self):
        problem, vacuum = self._problem(Fraction(1, 3))
        marked = {(((), 0),): vacuum.field.one}
        result = singular_vector_reduce(problem, 1, 2, marked)
        assert result.scalar != 0
        assert result.section.pole_order == 1
        assert result.nilpotency_index == 2
        assert result.vanishes
        assert result.to_dict()["vanishes"] is True

    def test_initial_vector(self):
        problem, vacuum = self._problem(Fraction(1, 3))
        vector = initial_vector(problem, {(((), 0),): vacuum.field.one})
        assert list(vector) == [(((), 0), ((), 0), ((), 0))]

    def test_vanishing_scalar(self):
        problem, vacuum = self._problem(Fraction(-1, 2))
        with pytest.raises(WeightError):
            singular_vector_reduce(problem, 1, 2, {(((), 0),): vacuum.field.one})

    def test_needs_the_orb_model(self):
        problem, vacuum = self._problem(None, model="trig")
        with pytest.raises(WeightError):
            singular_vector_reduce(problem, 1, 2, {(((), 0),): vacuum.field.one})


class TestSewingInvariance:
    """The canonical element of L0 (x) Linf is invariant under the node action."""

    @pytest.mark.parametrize("mode", [-1, 0, 1])
    def test_hat_iota(self, field2, mode):
        tilde, _ = weight_tilde(AffineWeight.from_h_values([1]), 1)
        matrices = [GMat.elementary(field2, 0, 1), GMat.elementary(field2, 1, 0),
                    GMat.elementary(field2, 0, 0) - GMat.elementary(field2, 1, 1)]
        for x in matrices:
            report = hat_iota_invariance_check(tilde, x, mode, 3)
            assert report.ok, report.to_dict()
