"""Uniform binary AND-OR / OR-AND trees, truth assignments and evaluation.

Nodes are addressed by binary strings: the root is ``""``, the children of
``a`` are ``a + "0"`` (left) and ``a + "1"`` (right). A leaf address read as
a binary number is the leaf's index in the canonical left-to-right order.
"""

import enum
import itertools
import logging
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass

from .errors import CapabilityError, InputError

log = logging.getLogger(__name__)

__all__ = [
    "MAX_HEIGHT",
    "ENUMERATION_LIMIT",
    "GateKind",
    "TreeShape",
    "Assignment",
    "evaluate",
    "dual",
    "all_assignments",
    "partial_levels",
    "partial_value",
    "is_open",
]

MAX_HEIGHT = 16
# Exhaustive enumeration of assignments, orders and i-sets stops here.
ENUMERATION_LIMIT = 3


class GateKind(enum.Enum):
    AND = "and"
    OR = "or"

    @property
    def dual(self) -> "GateKind":
        return GateKind.OR if self is GateKind.AND else GateKind.AND

    @property
    def absorbing(self) -> int:
        """The child value that decides this gate on its own."""
        return 0 if self is GateKind.AND else 1

    def apply(self, left: int, right: int) -> int:
        if self is GateKind.AND:
            return left & right
        return left | right

    def zero_probability(self, p1, p2):
        """Probability the gate is 0 given independent children at p1, p2."""
        if self is GateKind.OR:
            return p1 * p2
        return 1 - (1 - p1) * (1 - p2)

    def continue_probability(self, p1):
        """Probability the second child must be queried after the first."""
        if self is GateKind.OR:
            return p1
        return 1 - p1


@dataclass(frozen=True)
class TreeShape:
    root_gate: GateKind
    height: int

    def __post_init__(self) -> None:
        if not 1 <= self.height <= MAX_HEIGHT:
            raise InputError(
                f"height must be between 1 and {MAX_HEIGHT}, got {self.height}"
            )

    @property
    def leaf_count(self) -> int:
        return 1 << self.height

    @property
    def label(self) -> str:
        root = self.root_gate.name
        return f"{root}-{self.root_gate.dual.name} h={self.height}"

    def gate_at(self, depth: int) -> GateKind:
        """Gate kind of every internal node at ``depth`` (root is depth 0)."""
        if not 0 <= depth < self.height:
            raise InputError(f"no internal nodes at depth {depth}")
        return self.root_gate if depth % 2 == 0 else self.root_gate.dual

    def internal_addresses(self) -> Iterator[str]:
        for depth in range(self.height):
            for bits in itertools.product("01", repeat=depth):
                yield "".join(bits)

    def leaf_addresses(self) -> Iterator[str]:
        for bits in itertools.product("01", repeat=self.height):
            yield "".join(bits)

    def dual(self) -> "TreeShape":
        return TreeShape(self.root_gate.dual, self.height)

    def to_json(self) -> dict:
        return {"root": self.root_gate.value, "height": self.height}


@dataclass(frozen=True)
class Assignment:
    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.bits):
            raise InputError(f"assignment bits must be 0 or 1: {self.bits}")

    @classmethod
    def from_string(cls, text: str) -> "Assignment":
        if not text or set(text) - {"0", "1"}:
            raise InputError(f"not a bit-string: {text!r}")
        return cls(tuple(int(ch) for ch in text))

    def to_string(self) -> str:
        return "".join(str(b) for b in self.bits)

    def complement(self) -> "Assignment":
        return Assignment(tuple(1 - b for b in self.bits))

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, index: int) -> int:
        return self.bits[index]

    def to_json(self) -> str:
        return self.to_string()


def _check_length(shape: TreeShape, length: int) -> None:
    if length != shape.leaf_count:
        raise InputError(
            f"{shape.label} has {shape.leaf_count} leaves, got {length} values"
        )


def evaluate(shape: TreeShape, a: Assignment) -> int:
    _check_length(shape, len(a))
    values = list(a.bits)
    for depth in reversed(range(shape.height)):
        gate = shape.gate_at(depth)
        values = [
            gate.apply(values[i], values[i + 1])
            for i in range(0, len(values), 2)
        ]
    return values[0]


def dual(shape: TreeShape) -> TreeShape:
    return shape.dual()


def all_assignments(shape: TreeShape) -> Iterator[Assignment]:
    """Every assignment in lexicographic bit-string order (h <= 3)."""
    if shape.height > ENUMERATION_LIMIT:
        raise CapabilityError(
            f"exhaustive enumeration is limited to height {ENUMERATION_LIMIT}"
        )
    for bits in itertools.product((0, 1), repeat=shape.leaf_count):
        yield Assignment(bits)


def partial_levels(
    shape: TreeShape, known: Mapping[int, int] | Sequence[int | None]
) -> list[list[int | None]]:
    """Three-valued evaluation of every node from partially observed leaves.

    ``levels[d][i]`` is the value of the i-th node at depth ``d`` (``None``
    when not yet determined); ``levels[height]`` are the leaves themselves.
    """
    if isinstance(known, Mapping):
        leaves: list[int | None] = [
            known.get(i) for i in range(shape.leaf_count)
        ]
    else:
        _check_length(shape, len(known))
        leaves = list(known)

    levels = [leaves]
    for depth in reversed(range(shape.height)):
        gate = shape.gate_at(depth)
        below = levels[0]
        current: list[int | None] = []
        for i in range(0, len(below), 2):
            left, right = below[i], below[i + 1]
            if gate.absorbing in (left, right):
                current.append(gate.absorbing)
            elif left is not None and right is not None:
                current.append(1 - gate.absorbing)
            else:
                current.append(None)
        levels.insert(0, current)
    return levels


def partial_value(
    shape: TreeShape,
    known: Mapping[int, int] | Sequence[int | None],
    address: str = "",
) -> int | None:
    levels = partial_levels(shape, known)
    return levels[len(address)][int(address, 2) if address else 0]


def is_open(
    shape: TreeShape, levels: list[list[int | None]], leaf: int
) -> bool:
    """True when ``leaf`` is unobserved and no ancestor is determined."""
    if levels[shape.height][leaf] is not None:
        return False
    return all(
        levels[depth][leaf >> (shape.height - depth)] is None
        for depth in range(shape.height)
    )
