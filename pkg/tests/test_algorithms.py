"""Tests for alpha-beta run costs, the order DP and the adaptive oracle."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from andor_equilibrium.algorithms import (
    AdaptiveStrategy,
    DirectionalOrder,
    Halt,
    Query,
    Side,
    all_orders,
    expected_cost_exhaustive,
    expected_cost_id,
    iid_cost_prob,
    min_cost_adaptive,
    min_cost_directional,
    min_cost_over_orders,
    run_cost,
)
from andor_equilibrium.distributions import (
    CorrelatedDistribution,
    IndependentDistribution,
    enumerate_reluctant,
    iid,
    uniform_on,
)
from andor_equilibrium.errors import (
    CapabilityError,
    ContractError,
    InputError,
)
from andor_equilibrium.tree import (
    Assignment,
    GateKind,
    TreeShape,
    all_assignments,
)

HALF = Fraction(1, 2)


def bits(text: str) -> Assignment:
    return Assignment.from_string(text)


def query_all_then_halt(shape: TreeShape) -> AdaptiveStrategy:
    """Query leaf 0 then leaf 1 of an AND node, halting correctly."""
    return AdaptiveStrategy(
        Query(0, Halt(0), Query(1, Halt(0), Halt(1)))
    )


# ---------------------------------------------------------------------------
# run_cost
# ---------------------------------------------------------------------------


class TestRunCostDirectional:
    @pytest.mark.parametrize(
        "text, expected",
        [("0000", 2), ("1111", 2), ("1110", 2), ("0011", 2), ("0101", 4)],
    )
    def test_left_to_right(self, and_or_2, text, expected):
        order = DirectionalOrder.left_to_right(and_or_2)
        assert run_cost(and_or_2, order, bits(text)) == expected

    def test_right_first_order(self, and_or_1):
        order = DirectionalOrder({"": Side.RIGHT})
        assert run_cost(and_or_1, order, bits("10")) == 1
        assert run_cost(and_or_1, order, bits("01")) == 2

    def test_order_must_cover_nodes(self, and_or_2):
        with pytest.raises(ContractError):
            run_cost(and_or_2, DirectionalOrder({"": Side.LEFT}), bits("0000"))

    def test_length_mismatch(self, and_or_2):
        order = DirectionalOrder.left_to_right(and_or_2)
        with pytest.raises(InputError):
            run_cost(and_or_2, order, bits("00"))

    def test_leaf_sequence(self, and_or_2):
        order = DirectionalOrder(
            {"": Side.RIGHT, "0": Side.LEFT, "1": Side.RIGHT}
        )
        assert order.leaf_sequence(and_or_2) == [3, 2, 0, 1]

    def test_json_round_trip(self, and_or_2):
        order = DirectionalOrder(
            {"": Side.RIGHT, "0": Side.LEFT, "1": Side.RIGHT}
        )
        assert order.to_json() == {"": "R", "0": "L", "1": "R"}
        assert DirectionalOrder.from_json(order.to_json()) == order


class TestRunCostBounds:
    @pytest.mark.parametrize("gate", list(GateKind))
    @pytest.mark.parametrize("height", [1, 2, 3])
    def test_between_one_and_all_leaves(self, gate, height):
        shape = TreeShape(gate, height)
        if height <= 2:
            orders = list(all_orders(shape))
        else:
            right_first = DirectionalOrder(
                {addr: Side.RIGHT for addr in shape.internal_addresses()}
            )
            orders = [DirectionalOrder.left_to_right(shape), right_first]
        for a in all_assignments(shape):
            for order in orders:
                assert 1 <= run_cost(shape, order, a) <= 2**height


class TestRunCostAdaptive:
    def test_counts_queries(self, and_or_1):
        strat = query_all_then_halt(and_or_1)
        assert run_cost(and_or_1, strat, bits("01")) == 1
        assert run_cost(and_or_1, strat, bits("11")) == 2

    def test_query_in_determined_subtree(self, and_or_1):
        strat = AdaptiveStrategy(Query(0, Query(1, Halt(0), Halt(0)), Halt(1)))
        with pytest.raises(ContractError):
            run_cost(and_or_1, strat, bits("00"))

    def test_early_halt(self, and_or_1):
        strat = AdaptiveStrategy(Query(0, Halt(0), Halt(1)))
        with pytest.raises(ContractError):
            run_cost(and_or_1, strat, bits("10"))

    def test_wrong_halt_value(self, and_or_1):
        strat = AdaptiveStrategy(Query(0, Halt(1), Query(1, Halt(0), Halt(1))))
        with pytest.raises(ContractError):
            run_cost(and_or_1, strat, bits("01"))

    def test_leaf_out_of_range(self, and_or_1):
        strat = AdaptiveStrategy(Query(5, Halt(0), Halt(1)))
        with pytest.raises(ContractError):
            run_cost(and_or_1, strat, bits("00"))

    def test_json_shape(self, and_or_1):
        assert query_all_then_halt(and_or_1).to_json() == {
            "query": 0,
            "0": {"halt": 0},
            "1": {"query": 1, "0": {"halt": 0}, "1": {"halt": 1}},
        }


# ---------------------------------------------------------------------------
# Independent distributions
# ---------------------------------------------------------------------------


class TestExpectedCostId:
    def test_or_and_half(self, or_and_2):
        order = DirectionalOrder.left_to_right(or_and_2)
        cost = expected_cost_id(or_and_2, order, iid(or_and_2, HALF))
        assert cost == Fraction(21, 8)

    def test_or_and_all_zero_leaves(self, or_and_2):
        order = DirectionalOrder.left_to_right(or_and_2)
        assert expected_cost_id(or_and_2, order, iid(or_and_2, 1)) == 2

    def test_and_or_half(self, and_or_2):
        order = DirectionalOrder.left_to_right(and_or_2)
        cost = expected_cost_id(and_or_2, order, iid(and_or_2, HALF))
        assert cost == Fraction(21, 8)

    @pytest.mark.parametrize("gate", list(GateKind))
    @pytest.mark.parametrize("height", [1, 2, 3])
    def test_iid_cost_same_for_every_order(self, gate, height):
        shape = TreeShape(gate, height)
        d = iid(shape, Fraction(1, 3))
        costs = {expected_cost_id(shape, o, d) for o in all_orders(shape)}
        assert costs == {iid_cost_prob(gate, height, Fraction(1, 3))[0]}

    def test_iid_recursion_agrees(self, and_or_2):
        order = DirectionalOrder.left_to_right(and_or_2)
        x = Fraction(2, 7)
        cost, prob = iid_cost_prob(GateKind.AND, 2, x)
        assert cost == expected_cost_id(and_or_2, order, iid(and_or_2, x))
        assert prob == 2 * x**2 - x**4


class TestMinCostOverOrders:
    def test_iid_float(self, and_or_2):
        report = min_cost_over_orders(and_or_2, iid(and_or_2, 0.3))
        assert report.expected_cost == pytest.approx(1.3 * (2 - 0.09))

    def test_and_node_queries_likely_zero_first(self, and_or_1):
        d = IndependentDistribution((Fraction(9, 10), Fraction(1, 10)))
        report = min_cost_over_orders(and_or_1, d)
        assert report.expected_cost == Fraction(11, 10)
        assert report.witness_strategy.first_child[""] is Side.LEFT

    def test_or_node_queries_likely_one_first(self):
        shape = TreeShape(GateKind.OR, 1)
        d = IndependentDistribution((Fraction(9, 10), Fraction(1, 10)))
        report = min_cost_over_orders(shape, d)
        assert report.expected_cost == Fraction(11, 10)
        assert report.witness_strategy.first_child[""] is Side.RIGHT

    def test_ties_prefer_left(self, and_or_2):
        report = min_cost_over_orders(and_or_2, iid(and_or_2, HALF))
        assert report.witness_strategy == DirectionalOrder.left_to_right(
            and_or_2
        )

    def test_report_json(self, and_or_1):
        report = min_cost_over_orders(and_or_1, iid(and_or_1, HALF))
        assert report.to_json()["witness_kind"] == "directional"


# ---------------------------------------------------------------------------
# Correlated distributions
# ---------------------------------------------------------------------------


class TestAdaptiveOracle:
    def test_uniform_one_set(self, and_or_2):
        d = uniform_on(enumerate_reluctant(and_or_2, 1))
        assert min_cost_adaptive(and_or_2, d).expected_cost == 3

    def test_uniform_zero_set(self, and_or_2):
        d = uniform_on(enumerate_reluctant(and_or_2, 0))
        assert min_cost_adaptive(and_or_2, d).expected_cost == Fraction(
            11, 4
        )

    def test_point_mass(self, and_or_2):
        d = CorrelatedDistribution(and_or_2, {bits("0000"): 1})
        assert min_cost_adaptive(and_or_2, d).expected_cost == 2

    def test_witness_attains_value(self, and_or_2):
        d = uniform_on(enumerate_reluctant(and_or_2, 0))
        report = min_cost_adaptive(and_or_2, d)
        assert isinstance(report.witness_strategy, AdaptiveStrategy)
        assert (
            expected_cost_exhaustive(and_or_2, report.witness_strategy, d)
            == report.expected_cost
        )

    def test_witness_runs_on_every_assignment(self, and_or_2):
        d = CorrelatedDistribution(and_or_2, {bits("0000"): 1})
        strat = min_cost_adaptive(and_or_2, d).witness_strategy
        # Unreachable branches still form a legal algorithm.
        for text in ("0101", "1111", "1010"):
            assert run_cost(and_or_2, strat, bits(text)) >= 2

    def test_adaptive_never_worse_than_directional(self, and_or_2):
        d = uniform_on(enumerate_reluctant(and_or_2, 1))
        adaptive = min_cost_adaptive(and_or_2, d).expected_cost
        directional = min_cost_directional(and_or_2, d).expected_cost
        assert adaptive <= directional

    def test_height_capped(self):
        shape = TreeShape(GateKind.AND, 4)
        with pytest.raises(CapabilityError):
            list(all_orders(shape))

    def test_order_count(self, and_or_2):
        assert len(list(all_orders(and_or_2))) == 8


# ---------------------------------------------------------------------------
# Cross-validation on random rational IDs
# ---------------------------------------------------------------------------

leaf_prob = st.fractions(min_value=0, max_value=1, max_denominator=12)


@st.composite
def shape_and_id(draw):
    shape = TreeShape(
        draw(st.sampled_from(list(GateKind))), draw(st.sampled_from([1, 2]))
    )
    probs = draw(
        st.lists(
            leaf_prob, min_size=shape.leaf_count, max_size=shape.leaf_count
        )
    )
    return shape, IndependentDistribution(tuple(probs))


class TestOracleAgreement:
    @settings(max_examples=100, deadline=None)
    @given(shape_and_id())
    def test_recursion_matches_exhaustive(self, case):
        shape, d = case
        order = DirectionalOrder.left_to_right(shape)
        lifted = CorrelatedDistribution.from_independent(shape, d)
        assert expected_cost_id(shape, order, d) == expected_cost_exhaustive(
            shape, order, lifted
        )

    @settings(max_examples=100, deadline=None)
    @given(shape_and_id())
    def test_order_dp_matches_adaptive(self, case):
        shape, d = case
        lifted = CorrelatedDistribution.from_independent(shape, d)
        assert (
            min_cost_over_orders(shape, d).expected_cost
            == min_cost_adaptive(shape, lifted).expected_cost
        )


# ---------------------------------------------------------------------------
# Depth-first versus adaptive at height 3
# ---------------------------------------------------------------------------

SKEWED_LEAVES = (
    Fraction(1, 2),
    Fraction(5, 6),
    Fraction(1, 12),
    Fraction(3, 4),
    Fraction(1, 3),
    Fraction(1, 12),
    Fraction(1, 6),
    Fraction(7, 12),
)


class TestDepthFirstGapAtHeightThree:
    def test_adaptive_strictly_cheaper_on_skewed_id(self):
        # For one of the two root gates no directional order is optimal.
        found = {}
        for gate in GateKind:
            shape = TreeShape(gate, 3)
            d = IndependentDistribution(SKEWED_LEAVES)
            lifted = CorrelatedDistribution.from_independent(shape, d)
            dp = min_cost_over_orders(shape, d).expected_cost
            adaptive = min_cost_adaptive(shape, lifted).expected_cost
            assert adaptive <= dp
            found[gate] = (dp, adaptive)
        assert (
            Fraction(348359, 124416),
            Fraction(344431, 124416),
        ) in found.values()

    @pytest.mark.parametrize("gate", list(GateKind))
    def test_iid_still_agrees(self, gate):
        shape = TreeShape(gate, 3)
        d = iid(shape, Fraction(1, 3))
        lifted = CorrelatedDistribution.from_independent(shape, d)
        assert (
            min_cost_over_orders(shape, d).expected_cost
            == min_cost_adaptive(shape, lifted).expected_cost
        )

    @pytest.mark.slow
    @settings(max_examples=20, deadline=None)
    @given(
        st.sampled_from(list(GateKind)),
        st.lists(leaf_prob, min_size=8, max_size=8),
    )
    def test_adaptive_never_worse(self, gate, probs):
        shape = TreeShape(gate, 3)
        d = IndependentDistribution(tuple(probs))
        lifted = CorrelatedDistribution.from_independent(shape, d)
        assert (
            min_cost_adaptive(shape, lifted).expected_cost
            <= min_cost_over_orders(shape, d).expected_cost
        )
