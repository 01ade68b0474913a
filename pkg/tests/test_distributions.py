"""Tests for independent/correlated distributions and reluctant i-sets."""

from fractions import Fraction

import pytest

from andor_equilibrium.distributions import (
    CorrelatedDistribution,
    IndependentDistribution,
    ISet,
    enumerate_reluctant,
    iid,
    mix,
    reluctant_count,
    root_probability,
    uniform_on,
)
from andor_equilibrium.errors import CapabilityError, InputError
from andor_equilibrium.tree import (
    Assignment,
    GateKind,
    TreeShape,
    all_assignments,
    dual,
    evaluate,
)

HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# Independent distributions
# ---------------------------------------------------------------------------


class TestIndependentDistribution:
    def test_rejects_probability_above_one(self):
        with pytest.raises(InputError):
            IndependentDistribution((0.5, 1.5))

    def test_iid_flag(self):
        assert IndependentDistribution((HALF, HALF)).is_iid
        assert not IndependentDistribution((HALF, Fraction(1, 3))).is_iid

    def test_deviation(self):
        d = IndependentDistribution((Fraction(1, 4), Fraction(3, 4)))
        assert d.deviation() == 0.25

    def test_length_checked(self, and_or_2):
        with pytest.raises(InputError):
            IndependentDistribution((HALF, HALF)).matches(and_or_2)

    def test_iid_rejects_bad_x(self, and_or_1):
        with pytest.raises(InputError):
            iid(and_or_1, -0.1)


class TestRootProbability:
    def test_and_or_half(self, and_or_2):
        # 2x^2 - x^4 at x = 1/2
        assert root_probability(and_or_2, iid(and_or_2, HALF)) == Fraction(
            7, 16
        )

    def test_or_and_half(self, or_and_2):
        assert root_probability(or_and_2, iid(or_and_2, HALF)) == Fraction(
            9, 16
        )

    def test_single_or_node(self):
        shape = TreeShape(GateKind.OR, 1)
        d = IndependentDistribution((Fraction(1, 3), Fraction(3, 4)))
        assert root_probability(shape, d) == Fraction(1, 4)

    def test_matches_lifted_distribution(self, and_or_2):
        d = IndependentDistribution(
            (Fraction(1, 5), HALF, Fraction(2, 3), Fraction(1, 7))
        )
        lifted = CorrelatedDistribution.from_independent(and_or_2, d)
        assert lifted.root_probability() == root_probability(and_or_2, d)


# ---------------------------------------------------------------------------
# Correlated distributions
# ---------------------------------------------------------------------------


class TestCorrelatedDistribution:
    def test_weights_must_sum_to_one(self, and_or_1):
        with pytest.raises(InputError):
            CorrelatedDistribution(
                and_or_1, {Assignment((0, 0)): Fraction(1, 2)}
            )

    def test_negative_weight(self, and_or_1):
        with pytest.raises(InputError):
            CorrelatedDistribution(
                and_or_1,
                {Assignment((0, 0)): Fraction(3, 2), Assignment((1, 1)): -HALF},
            )

    def test_zero_weights_dropped(self, and_or_1):
        d = CorrelatedDistribution(
            and_or_1, {Assignment((0, 0)): 1, Assignment((1, 1)): 0}
        )
        assert d.support() == [Assignment((0, 0))]

    def test_assignment_length_checked(self, and_or_1):
        with pytest.raises(InputError):
            CorrelatedDistribution(and_or_1, {Assignment((0, 0, 0)): 1})

    def test_float_weights_within_tolerance(self, and_or_1):
        d = CorrelatedDistribution(
            and_or_1,
            {
                Assignment((0, 1)): 0.1,
                Assignment((1, 0)): 0.2,
                Assignment((1, 1)): 0.7,
            },
        )
        assert not d.exact
        assert d.root_probability() == pytest.approx(0.3)

    def test_product_lift(self, and_or_1):
        d = CorrelatedDistribution.from_independent(
            and_or_1, iid(and_or_1, HALF)
        )
        assert len(d.support()) == 4
        assert all(w == Fraction(1, 4) for w in d.weights.values())
        assert d.root_probability() == Fraction(3, 4)

    def test_json_keys_are_bit_strings(self, and_or_1):
        d = CorrelatedDistribution(
            and_or_1, {Assignment((1, 0)): HALF, Assignment((0, 1)): HALF}
        )
        assert list(d.to_json()) == ["01", "10"]


# ---------------------------------------------------------------------------
# Reluctant assignments
# ---------------------------------------------------------------------------


class TestReluctant:
    def test_zero_set_and_or_2(self, and_or_2):
        iset = enumerate_reluctant(and_or_2, 0)
        assert iset.to_json() == ["0001", "0010", "0100", "1000"]

    def test_one_set_and_or_2(self, and_or_2):
        iset = enumerate_reluctant(and_or_2, 1)
        assert iset.to_json() == ["0101", "0110", "1001", "1010"]

    def test_members_have_root_value(self, and_or_3):
        for i in (0, 1):
            for a in enumerate_reluctant(and_or_3, i).members:
                assert evaluate(and_or_3, a) == i

    @pytest.mark.parametrize(
        "gate, height, i, expected",
        [
            (GateKind.AND, 1, 0, 2),
            (GateKind.AND, 1, 1, 1),
            (GateKind.AND, 2, 0, 4),
            (GateKind.AND, 2, 1, 4),
            (GateKind.AND, 3, 0, 32),
            (GateKind.AND, 3, 1, 16),
            (GateKind.OR, 3, 1, 32),
        ],
    )
    def test_counts(self, gate, height, i, expected):
        assert reluctant_count(TreeShape(gate, height), i) == expected

    def test_count_matches_enumeration(self, and_or_3):
        for i in (0, 1):
            assert len(enumerate_reluctant(and_or_3, i)) == reluctant_count(
                and_or_3, i
            )

    @pytest.mark.parametrize("gate", list(GateKind))
    @pytest.mark.parametrize("height", range(1, 11))
    def test_zero_set_matches_dual_one_set(self, gate, height):
        shape = TreeShape(gate, height)
        assert reluctant_count(shape, 0) == reluctant_count(dual(shape), 1)

    def test_dual_sets_are_complements(self, and_or_2):
        members = enumerate_reluctant(and_or_2, 0).members
        zero = {a.complement() for a in members}
        one = set(enumerate_reluctant(dual(and_or_2), 1).members)
        assert zero == one

    def test_counts_beyond_enumeration(self):
        assert reluctant_count(TreeShape(GateKind.AND, 4), 1) == 32**2

    def test_reluctant_is_subset_of_root_class(self, and_or_2):
        zero_roots = {
            a for a in all_assignments(and_or_2) if evaluate(and_or_2, a) == 0
        }
        assert set(enumerate_reluctant(and_or_2, 0).members) < zero_roots

    def test_enumeration_capped(self):
        with pytest.raises(CapabilityError):
            enumerate_reluctant(TreeShape(GateKind.AND, 4), 0)

    def test_bad_root_value(self, and_or_2):
        with pytest.raises(InputError):
            reluctant_count(and_or_2, 2)


class TestUniformAndMix:
    def test_uniform_weights(self, and_or_2):
        d = uniform_on(enumerate_reluctant(and_or_2, 1))
        assert set(d.weights.values()) == {Fraction(1, 4)}

    def test_uniform_on_empty(self, and_or_2):
        with pytest.raises(InputError):
            uniform_on(ISet(and_or_2, 0, ()))

    @pytest.mark.parametrize("r", [Fraction(0), Fraction(1, 4), Fraction(1)])
    def test_mix_root_probability(self, and_or_2, r):
        d0 = uniform_on(enumerate_reluctant(and_or_2, 0))
        d1 = uniform_on(enumerate_reluctant(and_or_2, 1))
        assert mix(d0, d1, r).root_probability() == r

    def test_mix_shapes_must_match(self, and_or_2, or_and_2):
        d0 = uniform_on(enumerate_reluctant(and_or_2, 0))
        d1 = uniform_on(enumerate_reluctant(or_and_2, 1))
        with pytest.raises(InputError):
            mix(d0, d1, HALF)
