"""Independent, IID and correlated distributions on truth assignments.

Throughout, the probability of a node is the probability that the node has
the value 0.
"""

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import CapabilityError, InputError
from .tree import (
    ENUMERATION_LIMIT,
    Assignment,
    GateKind,
    TreeShape,
    all_assignments,
    evaluate,
)

log = logging.getLogger(__name__)

__all__ = [
    "FLOAT_WEIGHT_TOL",
    "IndependentDistribution",
    "CorrelatedDistribution",
    "ISet",
    "root_probability",
    "iid",
    "enumerate_reluctant",
    "reluctant_count",
    "uniform_on",
    "mix",
]

FLOAT_WEIGHT_TOL = 1e-12


def check_probability(value, what: str = "probability") -> None:
    if not 0 <= value <= 1:
        raise InputError(f"{what} must lie in [0, 1], got {value}")


def is_exact(value) -> bool:
    return isinstance(value, (int, Fraction))


@dataclass(frozen=True)
class IndependentDistribution:
    """Per-leaf probability of the value 0, in canonical leaf order."""

    leaf_probs: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "leaf_probs", tuple(self.leaf_probs))
        for p in self.leaf_probs:
            check_probability(p, "leaf probability")

    def __len__(self) -> int:
        return len(self.leaf_probs)

    def matches(self, shape: TreeShape) -> None:
        if len(self.leaf_probs) != shape.leaf_count:
            raise InputError(
                f"{shape.label} has {shape.leaf_count} leaves,"
                f" distribution has {len(self.leaf_probs)}"
            )

    @property
    def is_iid(self) -> bool:
        return len(set(self.leaf_probs)) <= 1

    def mean(self):
        return sum(self.leaf_probs) / len(self.leaf_probs)

    def deviation(self) -> float:
        """max_i |x_i - mean|; zero exactly for an IID."""
        mean = self.mean()
        return float(max(abs(p - mean) for p in self.leaf_probs))

    def to_json(self) -> list:
        return list(self.leaf_probs)


def root_probability(shape: TreeShape, d: IndependentDistribution):
    d.matches(shape)
    probs = list(d.leaf_probs)
    for depth in reversed(range(shape.height)):
        gate = shape.gate_at(depth)
        probs = [
            gate.zero_probability(probs[i], probs[i + 1])
            for i in range(0, len(probs), 2)
        ]
    return probs[0]


def iid(shape: TreeShape, x) -> IndependentDistribution:
    check_probability(x)
    return IndependentDistribution((x,) * shape.leaf_count)


@dataclass(frozen=True)
class CorrelatedDistribution:
    """A finitely supported weighting of assignments.

    Weights are exact (``Fraction``) unless any weight is a float, in which
    case the total must be within ``FLOAT_WEIGHT_TOL`` of 1.
    """

    shape: TreeShape
    weights: Mapping[Assignment, object]

    def __post_init__(self) -> None:
        cleaned: dict[Assignment, object] = {}
        for a, w in self.weights.items():
            if len(a) != self.shape.leaf_count:
                raise InputError(
                    f"assignment {a.to_string()} does not fit"
                    f" {self.shape.label}"
                )
            if w < 0:
                raise InputError(f"negative weight {w} on {a.to_string()}")
            if w:
                cleaned[a] = w
        object.__setattr__(self, "weights", cleaned)

        total = sum(cleaned.values())
        if self.exact:
            if total != 1:
                raise InputError(f"weights sum to {total}, not 1")
        elif abs(total - 1) > FLOAT_WEIGHT_TOL:
            raise InputError(f"weights sum to {total}, not 1")

    @property
    def exact(self) -> bool:
        return all(is_exact(w) for w in self.weights.values())

    @classmethod
    def from_independent(
        cls, shape: TreeShape, d: IndependentDistribution
    ) -> "CorrelatedDistribution":
        """Product distribution of ``d`` over all assignments (h <= 3)."""
        d.matches(shape)
        weights = {}
        for a in all_assignments(shape):
            w = 1
            for bit, p in zip(a.bits, d.leaf_probs):
                w = w * (p if bit == 0 else 1 - p)
            weights[a] = w
        return cls(shape, weights)

    def support(self) -> list[Assignment]:
        return sorted(self.weights, key=Assignment.to_string)

    def probability_of(self, a: Assignment):
        return self.weights.get(a, 0)

    def root_probability(self):
        return sum(
            (
                w
                for a, w in self.weights.items()
                if evaluate(self.shape, a) == 0
            ),
            start=Fraction(0) if self.exact else 0.0,
        )

    def to_json(self) -> dict:
        return {a.to_string(): self.weights[a] for a in self.support()}


@dataclass(frozen=True)
class ISet:
    shape: TreeShape
    i: int
    members: tuple[Assignment, ...]

    def __len__(self) -> int:
        return len(self.members)

    def to_json(self) -> list[str]:
        return [a.to_string() for a in self.members]


def _check_bit(i: int) -> None:
    if i not in (0, 1):
        raise InputError(f"root value must be 0 or 1, got {i}")


def _reluctant(gate: GateKind, height: int, value: int) -> list[tuple]:
    if height == 0:
        return [(value,)]

    def pairs(left: Iterable[tuple], right: list[tuple]) -> list[tuple]:
        return [lhs + rhs for lhs in left for rhs in right]

    child = gate.dual
    if value == gate.absorbing:
        # Exactly one child carries the deciding value.
        deciding = _reluctant(child, height - 1, value)
        other = _reluctant(child, height - 1, 1 - value)
        return pairs(deciding, other) + pairs(other, deciding)
    same = _reluctant(child, height - 1, value)
    return pairs(same, same)


def enumerate_reluctant(shape: TreeShape, i: int) -> ISet:
    """The i-set: every reluctant assignment whose root value is ``i``."""
    _check_bit(i)
    if shape.height > ENUMERATION_LIMIT:
        raise CapabilityError(
            f"i-sets are materialized up to height {ENUMERATION_LIMIT};"
            " use reluctant_count for larger trees"
        )
    found = _reluctant(shape.root_gate, shape.height, i)
    members = sorted(
        (Assignment(bits) for bits in found),
        key=Assignment.to_string,
    )
    log.debug("%d-set of %s has %d members", i, shape.label, len(members))
    return ISet(shape, i, tuple(members))


@lru_cache(maxsize=None)
def _reluctant_count(gate: GateKind, height: int, value: int) -> int:
    if height == 0:
        return 1
    child = gate.dual
    if value == gate.absorbing:
        return (
            2
            * _reluctant_count(child, height - 1, value)
            * _reluctant_count(child, height - 1, 1 - value)
        )
    return _reluctant_count(child, height - 1, value) ** 2


def reluctant_count(shape: TreeShape, i: int) -> int:
    _check_bit(i)
    return _reluctant_count(shape.root_gate, shape.height, i)


def uniform_on(iset: ISet) -> CorrelatedDistribution:
    if not iset.members:
        raise InputError("cannot put a uniform distribution on an empty set")
    weight = Fraction(1, len(iset.members))
    return CorrelatedDistribution(iset.shape, {a: weight for a in iset.members})


def mix(
    d0: CorrelatedDistribution, d1: CorrelatedDistribution, r
) -> CorrelatedDistribution:
    """Pointwise r*d0 + (1-r)*d1."""
    if d0.shape != d1.shape:
        raise InputError(
            f"cannot mix distributions on {d0.shape.label} and {d1.shape.label}"
        )
    check_probability(r, "mixing weight")
    weights: dict[Assignment, object] = {}
    for a, w in d0.weights.items():
        weights[a] = weights.get(a, 0) + r * w
    for a, w in d1.weights.items():
        weights[a] = weights.get(a, 0) + (1 - r) * w
    return CorrelatedDistribution(d0.shape, weights)
