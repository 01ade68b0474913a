"""Deterministic alpha-beta algorithms and their costs.

Two families of deterministic algorithms are represented:

* ``DirectionalOrder`` fixes, at every internal node, which child is
  evaluated first. The induced leaf arrangement never changes, so the
  algorithm is directional.
* ``AdaptiveStrategy`` is a full decision tree over observed leaf values;
  the next query may depend on everything seen so far.

Costs are exact when the inputs are ``Fraction``; float inputs give float
costs for optimization loops.
"""

import enum
import itertools
import logging
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .distributions import CorrelatedDistribution, IndependentDistribution
from .errors import CapabilityError, ContractError, InputError
from .tree import (
    ENUMERATION_LIMIT,
    Assignment,
    GateKind,
    TreeShape,
    is_open,
    partial_levels,
)

log = logging.getLogger(__name__)

__all__ = [
    "Side",
    "DirectionalOrder",
    "Query",
    "Halt",
    "AdaptiveStrategy",
    "CostReport",
    "node_cost_prob",
    "iid_cost_prob",
    "run_cost",
    "expected_cost_id",
    "min_cost_over_orders",
    "all_orders",
    "expected_cost_exhaustive",
    "min_cost_directional",
    "min_cost_adaptive",
]


class Side(enum.Enum):
    LEFT = "L"
    RIGHT = "R"


@dataclass(frozen=True)
class DirectionalOrder:
    """Which child every internal node (by address) evaluates first."""

    first_child: Mapping[str, Side]

    @classmethod
    def left_to_right(cls, shape: TreeShape) -> "DirectionalOrder":
        return cls({addr: Side.LEFT for addr in shape.internal_addresses()})

    @classmethod
    def from_json(cls, data: Mapping[str, str]) -> "DirectionalOrder":
        return cls({addr: Side(side) for addr, side in data.items()})

    def fits(self, shape: TreeShape) -> None:
        if set(self.first_child) != set(shape.internal_addresses()):
            raise ContractError(
                f"order does not cover exactly the internal nodes"
                f" of {shape.label}"
            )

    def children(self, address: str) -> tuple[str, str]:
        """(first, second) child addresses in evaluation order."""
        left, right = address + "0", address + "1"
        if self.first_child[address] is Side.LEFT:
            return left, right
        return right, left

    def leaf_sequence(self, shape: TreeShape) -> list[int]:
        """The linear leaf arrangement this order induces."""
        self.fits(shape)
        sequence: list[int] = []

        def walk(address: str) -> None:
            if len(address) == shape.height:
                sequence.append(int(address, 2))
                return
            for child in self.children(address):
                walk(child)

        walk("")
        return sequence

    def to_json(self) -> dict[str, str]:
        ordered = sorted(self.first_child, key=lambda a: (len(a), a))
        return {addr: self.first_child[addr].value for addr in ordered}


@dataclass(frozen=True)
class Halt:
    value: int

    def to_json(self) -> dict:
        return {"halt": self.value}


@dataclass(frozen=True)
class Query:
    leaf: int
    on_false: "StrategyNode"
    on_true: "StrategyNode"

    def to_json(self) -> dict:
        return {
            "query": self.leaf,
            "0": self.on_false.to_json(),
            "1": self.on_true.to_json(),
        }


StrategyNode = Union[Query, Halt]


@dataclass(frozen=True)
class AdaptiveStrategy:
    root: StrategyNode

    def to_json(self) -> dict:
        return self.root.to_json()


Strategy = Union[DirectionalOrder, AdaptiveStrategy]


@dataclass(frozen=True)
class CostReport:
    expected_cost: object
    witness_strategy: Strategy

    def to_json(self) -> dict:
        kind = (
            "directional"
            if isinstance(self.witness_strategy, DirectionalOrder)
            else "adaptive"
        )
        return {
            "expected_cost": self.expected_cost,
            "witness_kind": kind,
            "witness": self.witness_strategy.to_json(),
        }


# ---------------------------------------------------------------------------
# Cost recursion shared by IDs, the order DP and the polynomial families
# ---------------------------------------------------------------------------


def node_cost_prob(gate: GateKind, first: tuple, second: tuple) -> tuple:
    """Combine (cost, prob) of the first and second evaluated children."""
    c1, p1 = first
    c2, p2 = second
    return c1 + gate.continue_probability(p1) * c2, gate.zero_probability(
        p1, p2
    )


def iid_cost_prob(gate: GateKind, height: int, x) -> tuple:
    """(cost, prob) of a ``gate``-rooted tree whose leaves all sit at ``x``.

    ``x`` may be a float, a ``Fraction`` or a polynomial in x.
    """
    value = (1, x)
    for depth in reversed(range(height)):
        level_gate = gate if depth % 2 == 0 else gate.dual
        value = node_cost_prob(level_gate, value, value)
    return value


# ---------------------------------------------------------------------------
# Single-assignment cost
# ---------------------------------------------------------------------------


def _run_directional(
    shape: TreeShape, order: DirectionalOrder, a: Assignment, address: str
) -> tuple[int, int]:
    if len(address) == shape.height:
        return 1, a[int(address, 2)]
    gate = shape.gate_at(len(address))
    first, second = order.children(address)
    queries, value = _run_directional(shape, order, a, first)
    if value == gate.absorbing:
        return queries, value
    more, other = _run_directional(shape, order, a, second)
    return queries + more, gate.apply(value, other)


def _run_adaptive(
    shape: TreeShape, strat: AdaptiveStrategy, a: Assignment
) -> int:
    known: list[int | None] = [None] * shape.leaf_count
    node = strat.root
    queries = 0
    while isinstance(node, Query):
        if not 0 <= node.leaf < shape.leaf_count:
            raise ContractError(f"leaf {node.leaf} is not in {shape.label}")
        levels = partial_levels(shape, known)
        if not is_open(shape, levels, node.leaf):
            raise ContractError(
                f"leaf {node.leaf} is queried twice or lies in a determined"
                f" subtree (observed {known})"
            )
        known[node.leaf] = a[node.leaf]
        queries += 1
        node = node.on_true if a[node.leaf] else node.on_false

    root = partial_levels(shape, known)[0][0]
    if root is None:
        raise ContractError("strategy halts before the root is determined")
    if root != node.value:
        raise ContractError(
            f"strategy halts with {node.value}, root value is {root}"
        )
    return queries


def run_cost(shape: TreeShape, strat: Strategy, a: Assignment) -> int:
    """Number of leaves alpha-beta queries on ``a`` under ``strat``."""
    if len(a) != shape.leaf_count:
        raise InputError(
            f"{shape.label} has {shape.leaf_count} leaves, got {len(a)} bits"
        )
    if isinstance(strat, DirectionalOrder):
        strat.fits(shape)
        queries, _ = _run_directional(shape, strat, a, "")
        return queries
    return _run_adaptive(shape, strat, a)


# ---------------------------------------------------------------------------
# Independent distributions
# ---------------------------------------------------------------------------


def expected_cost_id(
    shape: TreeShape, order: DirectionalOrder, d: IndependentDistribution
):
    order.fits(shape)
    d.matches(shape)

    def walk(address: str) -> tuple:
        if len(address) == shape.height:
            return 1, d.leaf_probs[int(address, 2)]
        first, second = order.children(address)
        return node_cost_prob(
            shape.gate_at(len(address)), walk(first), walk(second)
        )

    cost, _ = walk("")
    return cost


def min_cost_over_orders(
    shape: TreeShape, d: IndependentDistribution
) -> CostReport:
    """Cheapest directional order for an ID, by per-node dynamic program.

    This is the best depth-first algorithm. It matches the adaptive optimum
    for every ID at heights 1 and 2; at height 3 an adaptive algorithm that
    leaves a subtree and comes back can be strictly cheaper on a non-IID
    input. Ties prefer evaluating the left child first.
    """
    d.matches(shape)
    values = [(1, p) for p in d.leaf_probs]
    choices: dict[str, Side] = {}
    for depth in reversed(range(shape.height)):
        gate = shape.gate_at(depth)
        merged = []
        for i in range(0, len(values), 2):
            left, right = values[i], values[i + 1]
            left_first = node_cost_prob(gate, left, right)
            right_first = node_cost_prob(gate, right, left)
            address = format(i // 2, f"0{depth}b") if depth else ""
            if left_first[0] <= right_first[0]:
                choices[address] = Side.LEFT
                merged.append(left_first)
            else:
                choices[address] = Side.RIGHT
                merged.append(right_first)
        values = merged
    return CostReport(values[0][0], DirectionalOrder(choices))


# ---------------------------------------------------------------------------
# Correlated distributions (desk scale)
# ---------------------------------------------------------------------------


def _check_enumerable(shape: TreeShape, what: str) -> None:
    if shape.height > ENUMERATION_LIMIT:
        raise CapabilityError(
            f"{what} is limited to height {ENUMERATION_LIMIT},"
            f" got {shape.label}"
        )


def _check_distribution(shape: TreeShape, d: CorrelatedDistribution) -> None:
    if d.shape != shape:
        raise InputError(
            f"distribution lives on {d.shape.label}, not {shape.label}"
        )


def all_orders(shape: TreeShape) -> Iterator[DirectionalOrder]:
    _check_enumerable(shape, "order enumeration")
    addresses = list(shape.internal_addresses())
    for sides in itertools.product(list(Side), repeat=len(addresses)):
        yield DirectionalOrder(dict(zip(addresses, sides)))


def expected_cost_exhaustive(
    shape: TreeShape, strat: Strategy, d: CorrelatedDistribution
):
    """Sum over the support of Pr(a) * run_cost(strat, a)."""
    _check_distribution(shape, d)
    return sum(
        (w * run_cost(shape, strat, a) for a, w in d.weights.items()),
        start=Fraction(0) if d.exact else 0.0,
    )


def min_cost_directional(
    shape: TreeShape, d: CorrelatedDistribution
) -> CostReport:
    """Cheapest directional order for any distribution (h <= 3)."""
    _check_enumerable(shape, "directional search")
    _check_distribution(shape, d)
    best_cost, best_order = None, None
    for order in all_orders(shape):
        cost = expected_cost_exhaustive(shape, order, d)
        if best_cost is None or cost < best_cost:
            best_cost, best_order = cost, order
    assert best_order is not None
    return CostReport(best_cost, best_order)


def min_cost_adaptive(
    shape: TreeShape, d: CorrelatedDistribution
) -> CostReport:
    """Exact minimum expected cost over all deterministic alpha-beta
    decision trees, by memoized search over observation states (h <= 3).

    The search works with unnormalized masses: the value of a state is the
    sum over consistent assignments of weight times remaining queries, so no
    conditional probability is ever divided out.
    """
    _check_enumerable(shape, "adaptive search")
    _check_distribution(shape, d)
    n = shape.leaf_count
    zero = Fraction(0) if d.exact else 0.0
    memo: dict[tuple, tuple] = {}

    def observe(state: tuple, leaf: int, bit: int) -> tuple:
        return state[:leaf] + (bit,) + state[leaf + 1 :]

    def solve(state: tuple, members: list) -> object:
        if state in memo:
            return memo[state][0]
        levels = partial_levels(shape, state)
        if levels[0][0] is not None or not members:
            memo[state] = (zero, None)
            return zero
        mass = sum((w for _, w in members), start=zero)
        best, best_leaf = None, None
        for leaf in range(n):
            if not is_open(shape, levels, leaf):
                continue
            total = mass
            for bit in (0, 1):
                branch = [(a, w) for a, w in members if a[leaf] == bit]
                total += solve(observe(state, leaf, bit), branch)
            if best is None or total < best:
                best, best_leaf = total, leaf
        memo[state] = (best, best_leaf)
        return best

    def build(state: tuple) -> StrategyNode:
        levels = partial_levels(shape, state)
        root = levels[0][0]
        if root is not None:
            return Halt(root)
        leaf = memo.get(state, (None, None))[1]
        if leaf is None:
            # Unreachable under d; any legal query completes the tree.
            leaf = next(j for j in range(n) if is_open(shape, levels, j))
        return Query(
            leaf,
            build(observe(state, leaf, 0)),
            build(observe(state, leaf, 1)),
        )

    start: tuple = (None,) * n
    cost = solve(start, list(d.weights.items()))
    log.debug("adaptive search on %s visited %d states", shape.label, len(memo))
    return CostReport(cost, AdaptiveStrategy(build(start)))
