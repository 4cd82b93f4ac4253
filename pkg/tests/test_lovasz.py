import math
import random
from fractions import Fraction

import pytest

from submodcert import (
    CapacityError,
    GroundSet,
    JaccardFamily,
    PreconditionError,
    RelaxedPoint,
    convexity_probe,
    direct_handle,
    loss_handle,
    lovasz_extension,
    misprediction_handle,
    modular_function,
    subgradient_probe,
    subgradient_validity_check,
    symdiff_transform,
    tabulate,
    tabulated_function,
    vertex_agreement_check,
)
from conftest import random_tabulated


def loss_fn(n, truth):
    return loss_handle(JaccardFamily(GroundSet(n), truth))


def one_minus_direct(n, truth):
    # 1 - direct index == loss conjugated by the truth mask
    return symdiff_transform(loss_fn(n, truth), truth)


class TestExtensionValues:
    def test_all_ones_vertex(self):
        result = lovasz_extension(loss_fn(2, 0b01), [1.0, 1.0])
        assert result.value == 1.0

    def test_interior_point(self):
        result = lovasz_extension(loss_fn(2, 0b01), [0.5, 0.0])
        assert result.value == 0.5
        assert result.subgradient == (1.0, 0.0)
        assert result.permutation == (0, 1)

    def test_origin(self):
        result = lovasz_extension(loss_fn(2, 0b01), [0.0, 0.0])
        assert result.value == 0.0

    def test_descending_sort_with_index_ties(self):
        fn = modular_function(GroundSet(3), [1, 2, 3])
        result = lovasz_extension(fn, [0.5, 0.9, 0.5])
        assert result.permutation == (1, 0, 2)

    def test_value_is_dot_product_plus_base(self):
        fn = random_tabulated(12)
        rng = random.Random(5)
        coords = [rng.random() for _ in range(fn.ground.n)]
        result = lovasz_extension(fn, coords)
        recomputed = float(result.base_value)
        for element, inc in zip(result.permutation, result.increments):
            recomputed += coords[element] * float(inc)
        assert result.value == recomputed

    def test_nonzero_base_value_is_added(self):
        fn = tabulated_function(GroundSet(1), [Fraction(3), Fraction(5)])
        assert lovasz_extension(fn, [0.0]).value == 3.0
        assert lovasz_extension(fn, [1.0]).value == 5.0


class TestValidation:
    def test_coordinate_range(self):
        with pytest.raises(PreconditionError):
            lovasz_extension(loss_fn(2, 0b01), [0.5, 1.5])
        with pytest.raises(PreconditionError):
            RelaxedPoint((-0.1,))
        with pytest.raises(PreconditionError):
            RelaxedPoint((float("nan"),))

    def test_dimension_mismatch(self):
        with pytest.raises(PreconditionError):
            lovasz_extension(loss_fn(2, 0b01), [0.5])

    def test_caps_are_named(self):
        big = modular_function(GroundSet(25), [0] * 25)
        with pytest.raises(CapacityError, match="24"):
            lovasz_extension(big, [0.0] * 25)
        mid = modular_function(GroundSet(13), [0] * 13)
        with pytest.raises(CapacityError, match="12"):
            vertex_agreement_check(mid)


class TestVertexAgreement:
    @pytest.mark.parametrize("n,truth", [(1, 0b1), (4, 0b1010), (10, 0b0110010011)])
    def test_jaccard_families(self, n, truth):
        fam = JaccardFamily(GroundSet(n), truth)
        for build in (direct_handle, misprediction_handle, loss_handle):
            assert vertex_agreement_check(build(fam))

    def test_modular(self):
        fn = modular_function(GroundSet(5), [1, -2, Fraction(1, 3), 0, 7])
        assert vertex_agreement_check(fn)

    @pytest.mark.parametrize("seed", [2, 5, 9, 14])
    def test_random_tables_regardless_of_structure(self, seed):
        assert vertex_agreement_check(random_tabulated(seed))

    def test_float_backed(self):
        rng = random.Random(3)
        values = [rng.uniform(-1, 1) for _ in range(64)]
        assert vertex_agreement_check(tabulated_function(GroundSet(6), values))


class TestIncrements:
    def test_telescoping_is_exact(self):
        for seed in (0, 4, 10):
            fn = random_tabulated(seed)
            if not fn.exact:
                continue
            n = fn.ground.n
            rng = random.Random(seed)
            result = lovasz_extension(fn, [rng.random() for _ in range(n)])
            assert sum(result.increments, Fraction(0)) == fn((1 << n) - 1) - fn(0)

    def test_increments_follow_the_chain(self):
        fn = loss_fn(4, 0b0110)
        result = lovasz_extension(fn, [0.9, 0.1, 0.5, 0.3])
        table = tabulate(fn)
        mask = 0
        prev = table[0]
        for element, inc in zip(result.permutation, result.increments):
            mask |= 1 << element
            assert inc == table[mask] - prev
            prev = table[mask]


class TestHomogeneity:
    def test_scaling_scales_value(self):
        fn = loss_fn(6, 0b010011)
        rng = random.Random(77)
        point = [rng.random() for _ in range(6)]
        base = lovasz_extension(fn, point).value
        for lam in (0.25, 0.5, 0.75, 1.0):
            scaled = lovasz_extension(fn, [lam * c for c in point]).value
            assert abs(scaled - lam * base) <= 1e-12


class TestPermutationInvariance:
    @pytest.mark.parametrize("seed", range(6))
    def test_relabeling(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 6)
        values = [Fraction(rng.randint(-12, 12), rng.randint(1, 9)) for _ in range(1 << n)]
        fn = tabulated_function(GroundSet(n), values)
        perm = list(range(n))
        rng.shuffle(perm)

        def relabel(mask):
            out = 0
            for i in range(n):
                if mask >> perm[i] & 1:
                    out |= 1 << i
            return out

        relabeled = tabulated_function(GroundSet(n), [values[relabel(m)] for m in range(1 << n)])
        coords = [rng.random() for _ in range(n)]
        moved = [0.0] * n
        for i in range(n):
            moved[perm[i]] = coords[i]
        assert lovasz_extension(fn, coords).value == lovasz_extension(relabeled, moved).value


class TestConvexityProbe:
    def test_loss_extension_is_midpoint_convex(self):
        probe = convexity_probe(loss_fn(8, 0b00000101), trials=2000, seed=42)
        assert probe.violations == 0
        assert probe.worst_gap >= -1e-12

    def test_direct_index_extension_is_not_convex(self):
        probe = convexity_probe(one_minus_direct(4, 0b0001), trials=10000, seed=42)
        assert probe.violations >= 1
        assert probe.worst_gap < -1e-12

    def test_modular_extension_is_linear(self):
        fn = modular_function(GroundSet(5), [1, 2, -1, Fraction(1, 2), 0])
        probe = convexity_probe(fn, trials=500, seed=7)
        assert probe.violations == 0
        assert abs(probe.worst_gap) <= 1e-12

    def test_seeded_reproducibility(self):
        fn = loss_fn(5, 0b00110)
        assert convexity_probe(fn, 300, 9) == convexity_probe(fn, 300, 9)

    def test_trials_validation(self):
        with pytest.raises(PreconditionError):
            convexity_probe(loss_fn(2, 0b01), 0, 1)


class TestSubgradient:
    def test_loss_subgradient_inequality(self):
        fn = loss_fn(6, 0b000011)
        rng = random.Random(123)
        point = [rng.random() for _ in range(6)]
        assert subgradient_validity_check(fn, point, probes=1000, seed=5)

    def test_tight_at_the_same_vertex(self):
        fn = loss_fn(4, 0b0101)
        point = [1.0, 0.0, 1.0, 0.0]
        base = lovasz_extension(fn, point)
        same = lovasz_extension(fn, point)
        linear = base.value + sum(
            s * (v - m) for s, v, m in zip(base.subgradient, point, point)
        )
        assert same.value == linear

    def test_modular_gradient_is_tight_everywhere(self):
        fn = modular_function(GroundSet(4), [0.5, -1.25, 2.0, 0.125])
        probe = subgradient_probe(fn, [0.3, 0.6, 0.1, 0.9], probes=200, seed=11)
        assert probe.ok
        assert abs(probe.worst_slack) <= 1e-12

    def test_probe_validation(self):
        with pytest.raises(PreconditionError):
            subgradient_probe(loss_fn(2, 0b01), [0.0, 0.0], probes=0, seed=0)
