"""Eigen-distributions under a root-probability constraint.

Covers the constrained extremum problem on the two children of an OR root,
the multi-start search for the ID maximizing the minimum expected cost, the
degenerate root values, the unconstrained IID maximum and the comparison of
the ID equilibrium with a correlated witness.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy import optimize

from .algorithms import (
    AdaptiveStrategy,
    DirectionalOrder,
    min_cost_adaptive,
    min_cost_directional,
    min_cost_over_orders,
    node_cost_prob,
)
from .distributions import (
    IndependentDistribution,
    enumerate_reluctant,
    iid,
    mix,
    root_probability,
    uniform_on,
)
from .errors import CapabilityError, DomainError, InputError
from .poly import (
    INVERSE_TOL,
    cost_prob,
    cost_prob_float,
    conditioned_cost,
    find_alpha,
    inverse_prob,
)
from .search import bisect_increasing, golden_section_max, grid_refine_max
from .tree import ENUMERATION_LIMIT, GateKind, TreeShape

log = logging.getLogger(__name__)

__all__ = [
    "ARGMAX_TOL",
    "CONSTRAINT_TOL",
    "EIGEN_LIMIT",
    "RootConstraint",
    "ChildProbPair",
    "Cep1Solution",
    "EquilibriumReport",
    "PropositionReport",
    "IidMaximum",
    "Comparison",
    "cep1_objective",
    "cep1_solve",
    "f1_decreasing_check",
    "eigen_search",
    "iid_root",
    "proposition_values",
    "proposition_report",
    "proposition_check",
    "endpoint_non_iid_witness",
    "maximize_iid",
    "odd_height_bound_check",
    "even_height_dominance_check",
    "argmax_gap_check",
    "unconstrained_interior_check",
    "compare_id_vs_correlated",
    "compare_unconstrained",
]

ARGMAX_TOL = 1e-6
CONSTRAINT_TOL = 1e-10
EIGEN_LIMIT = 4
NUDGE = 1e-9
RESTARTS = 3


@dataclass(frozen=True)
class RootConstraint:
    r: object

    def __post_init__(self) -> None:
        if not 0 <= self.r <= 1:
            raise InputError(
                f"root probability must lie in [0, 1], got {self.r}"
            )

    @property
    def interior(self) -> bool:
        return 0 < self.r < 1

    def require_interior(self) -> None:
        if not self.interior:
            raise DomainError(
                "root probability must lie strictly inside (0, 1),"
                f" got {self.r}"
            )


@dataclass(frozen=True)
class ChildProbPair:
    """Root-zero probabilities (z, w) of the first and second child."""

    z: float
    w: float

    def residual(self, r) -> float:
        return abs((1 - self.z) * (1 - self.w) - (1 - float(r)))

    def satisfies(self, r, tol: float = CONSTRAINT_TOL) -> bool:
        in_range = 0 <= self.w <= self.z + tol <= float(r) + 2 * tol
        return in_range and self.residual(r) <= tol

    def to_json(self) -> dict:
        return {"z": self.z, "w": self.w}


# ---------------------------------------------------------------------------
# Constrained extremum problem on an OR root
# ---------------------------------------------------------------------------


def _child_cost(h: int, u: float, inverse_tol: float) -> float:
    return conditioned_cost(GateKind.OR, h, u, inverse_tol)


def cep1_objective(
    h: int,
    pair: ChildProbPair,
    r=None,
    tol: float = CONSTRAINT_TOL,
    inverse_tol: float = INVERSE_TOL,
) -> float:
    """f(z, w) = c(z) + (1 - z) c(w), c(u) = c_{OR,h}(p_{OR,h}^{-1}(u)).

    Mirrored pairs (w > z) are accepted so both orders can be compared;
    without ``r`` the constraint is the one the pair itself induces.
    """
    lo, hi = sorted((pair.z, pair.w))
    if lo < 0 or hi > 1:
        raise DomainError(f"child probabilities must lie in [0, 1]: {pair}")
    if r is not None:
        if pair.residual(r) > tol or hi > float(r) + tol:
            raise DomainError(
                f"(1 - z)(1 - w) = {(1 - pair.z) * (1 - pair.w)!r}"
                f" does not match 1 - r = {1 - float(r)!r}"
            )
    return _child_cost(h, pair.z, inverse_tol) + (1 - pair.z) * _child_cost(
        h, pair.w, inverse_tol
    )


def _cep1_bracket(r: float) -> tuple[float, float]:
    return 1 - math.sqrt(1 - r), r


def _omega(r: float, z: float) -> float:
    return max(0.0, 1 - (1 - r) / (1 - z))


def _f1(h: int, r: float, inverse_tol: float = INVERSE_TOL):
    def f1(z: float) -> float:
        w = _omega(r, z)
        return _child_cost(h, z, inverse_tol) + (1 - z) * _child_cost(
            h, w, inverse_tol
        )

    return f1


def f1_decreasing_check(
    h: int, r: float, points: int = 200, inverse_tol: float = INVERSE_TOL
) -> bool:
    """Finite differences of f1 on a grid of [1 - sqrt(1 - r), r] are < 0."""
    RootConstraint(r).require_interior()
    lo, hi = _cep1_bracket(float(r))
    zs = np.linspace(lo, hi, points)
    f1 = _f1(h, float(r), inverse_tol)
    steps = np.diff([f1(float(z)) for z in zs])
    log.debug("f1 at h=%d, r=%s: largest step %g", h, r, float(steps.max()))
    return bool((steps < 0).all())


@dataclass(frozen=True)
class Cep1Solution:
    pair: ChildProbPair
    value: float
    iterations: int
    converged: bool
    f1_decreasing: bool

    def to_json(self) -> dict:
        return {
            "argmax": self.pair.to_json(),
            "value": self.value,
            "iterations": self.iterations,
            "converged": self.converged,
            "f1_decreasing": self.f1_decreasing,
        }


def cep1_solve(
    h: int, r, tol: float = ARGMAX_TOL, inverse_tol: float = INVERSE_TOL
) -> Cep1Solution:
    """Maximize f1(z) = f(z, omega(z)) over the feasible bracket."""
    RootConstraint(r).require_interior()
    r = float(r)
    lo, hi = _cep1_bracket(r)
    result = grid_refine_max(_f1(h, r, inverse_tol), lo, hi, tol)
    pair = ChildProbPair(result.x, _omega(r, result.x))
    log.info(
        "Constrained child maximum at h=%d, r=%g: z=%.9g w=%.9g",
        h,
        r,
        pair.z,
        pair.w,
    )
    return Cep1Solution(
        pair=pair,
        value=result.value,
        iterations=result.iterations,
        converged=result.converged,
        f1_decreasing=f1_decreasing_check(h, r, inverse_tol=inverse_tol),
    )


# ---------------------------------------------------------------------------
# Eigen-distribution search among IDs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EquilibriumReport:
    value: float
    argmax: IndependentDistribution
    iterations: int
    deviation: float
    certified_iid: bool
    converged: bool
    seeds: tuple[int, ...]
    iid_root: float
    tol: float
    residual: float = 0.0

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "argmax": self.argmax.to_json(),
            "mean": float(self.argmax.mean()),
            "iid_root": self.iid_root,
            "deviation": self.deviation,
            "certified_iid": self.certified_iid,
            "iterations": self.iterations,
            "converged": self.converged,
            "seeds": list(self.seeds),
            "tol": self.tol,
            "residual": self.residual,
        }


def iid_root(
    shape: TreeShape, r, inverse_tol: float = INVERSE_TOL
) -> float:
    """The common leaf probability whose IID has root probability r."""
    RootConstraint(r)
    return inverse_prob(
        shape.root_gate, shape.height, float(r), inverse_tol
    )


def _min_cost(shape: TreeShape, x) -> float:
    return float(
        min_cost_over_orders(
            shape, IndependentDistribution(tuple(x))
        ).expected_cost
    )


def _root_prob(shape: TreeShape, x) -> float:
    return float(root_probability(shape, IndependentDistribution(tuple(x))))


def _project(shape: TreeShape, x: np.ndarray, r: float) -> np.ndarray:
    """Move x onto {root probability = r}.

    The last coordinate is solved for by bisection; when no value of it
    reaches r, all coordinates are scaled toward 1 (or toward 0).
    """
    x = np.clip(np.asarray(x, dtype=float), NUDGE, 1 - NUDGE)

    def with_last(t: float) -> np.ndarray:
        y = x.copy()
        y[-1] = t
        return y

    if _root_prob(shape, with_last(0.0)) <= r <= _root_prob(
        shape, with_last(1.0)
    ):
        t = bisect_increasing(
            lambda t: _root_prob(shape, with_last(t)), r, 0.0, 1.0, 1e-15
        )
        return with_last(t)

    if _root_prob(shape, x) < r:

        def toward(s: float) -> np.ndarray:
            return x + s * (1 - x)

    else:

        def toward(s: float) -> np.ndarray:
            return s * x

    s = bisect_increasing(
        lambda s: _root_prob(shape, toward(s)), r, 0.0, 1.0, 1e-15
    )
    return toward(s)


def _ascend(
    shape: TreeShape, start: np.ndarray, r: float, tol: float
) -> tuple[np.ndarray, float, int, bool]:
    """Nelder-Mead over the free coordinates; the last one is projected."""

    def full(free: np.ndarray) -> np.ndarray:
        return _project(shape, np.append(free, start[-1]), r)

    def loss(free: np.ndarray) -> float:
        return -_min_cost(shape, full(free))

    x = _project(shape, start, r)
    value = _min_cost(shape, x)
    iterations = 0
    converged = True
    if x.size == 1:
        return x, value, iterations, converged

    bounds = [(0.0, 1.0)] * (x.size - 1)
    for _ in range(RESTARTS):
        result = optimize.minimize(
            loss,
            x[:-1],
            method="Nelder-Mead",
            bounds=bounds,
            options={
                "xatol": tol,
                "fatol": tol * 1e-3,
                "maxiter": 2000 * x.size,
                "adaptive": True,
            },
        )
        iterations += int(result.nit)
        converged = bool(result.success)
        candidate = full(result.x)
        candidate_value = _min_cost(shape, candidate)
        if candidate_value <= value + tol * 1e-3:
            if candidate_value > value:
                x, value = candidate, candidate_value
            break
        x, value = candidate, candidate_value
    return x, value, iterations, converged


def eigen_search(
    shape: TreeShape,
    r,
    tol: float = ARGMAX_TOL,
    starts: int = 8,
    seed: int = 0,
    constraint_tol: float = CONSTRAINT_TOL,
    inverse_tol: float = INVERSE_TOL,
) -> EquilibriumReport:
    """Maximize min_cost_over_orders over IDs with root probability r.

    The inner minimum is over depth-first (directional) algorithms. Up to
    height 2 that is the optimum over all algorithms for every ID; at
    height 3 it can exceed the adaptive optimum off the IID diagonal.

    Start 0 is the IID on the constraint; the others are drawn from
    ``numpy.random.default_rng(seed + k)``. The best run wins by value,
    then by lexicographically smallest argmax.
    """
    if shape.height > EIGEN_LIMIT:
        raise CapabilityError(
            f"eigen search is limited to height {EIGEN_LIMIT},"
            f" got {shape.label}"
        )
    RootConstraint(r).require_interior()
    if starts < 1:
        raise InputError(f"starts must be positive, got {starts}")
    r = float(r)
    x_iid = iid_root(shape, r, inverse_tol)
    seeds = tuple(seed + k for k in range(1, starts))

    initial = [np.full(shape.leaf_count, x_iid)]
    for s in seeds:
        rng = np.random.default_rng(s)
        initial.append(rng.uniform(0.0, 1.0, shape.leaf_count))

    runs = []
    iterations = 0
    all_converged = True
    for k, start in enumerate(initial):
        x, value, used, converged = _ascend(shape, start, r, tol)
        log.debug("start %d: value %.12g after %d steps", k, value, used)
        iterations += used
        all_converged = all_converged and converged
        runs.append((value, tuple(float(v) for v in x)))

    value, best = min(runs, key=lambda run: (-run[0], run[1]))
    argmax = IndependentDistribution(best)
    residual = abs(_root_prob(shape, best) - r)
    if residual > constraint_tol:
        log.warning(
            "constraint residual %g exceeds %g", residual, constraint_tol
        )
    deviation = argmax.deviation()
    log.info(
        "Eigen search on %s at r=%g: value %.9g, deviation %.3g",
        shape.label,
        r,
        value,
        deviation,
    )
    return EquilibriumReport(
        value=value,
        argmax=argmax,
        iterations=iterations,
        deviation=deviation,
        certified_iid=deviation < 10 * tol,
        converged=all_converged,
        seeds=(seed,) + seeds,
        iid_root=x_iid,
        tol=tol,
        residual=residual,
    )


# ---------------------------------------------------------------------------
# Degenerate root values
# ---------------------------------------------------------------------------


def _check_bit(i: int) -> None:
    if i not in (0, 1):
        raise InputError(f"root value must be 0 or 1, got {i}")


def proposition_values(shape: TreeShape, i: int) -> int:
    """Minimum cost of any ID forcing the root value to i."""
    _check_bit(i)
    k, odd = divmod(shape.height, 2)
    if not odd:
        return 2**k
    decided = i == shape.root_gate.absorbing
    return 2**k if decided else 2 ** (k + 1)


def _lattice_pairs(shape: TreeShape, grid: int) -> Counter:
    """(min cost, root prob) of every lattice ID, with multiplicities."""
    level: Counter = Counter(
        {(Fraction(1), Fraction(k, grid)): 1 for k in range(grid + 1)}
    )
    for depth in reversed(range(shape.height)):
        gate = shape.gate_at(depth)
        merged: Counter = Counter()
        for left, m in level.items():
            for right, n in level.items():
                a = node_cost_prob(gate, left, right)
                b = node_cost_prob(gate, right, left)
                merged[(min(a[0], b[0]), a[1])] += m * n
        level = merged
    return level


@dataclass(frozen=True)
class PropositionReport:
    shape: TreeShape
    i: int
    grid: int
    value: int
    forcing_ids: int
    costs: tuple
    iid_attains: bool

    @property
    def holds(self) -> bool:
        return self.iid_attains and set(self.costs) == {self.value}

    def to_json(self) -> dict:
        return {
            "tree": self.shape.to_json(),
            "i": self.i,
            "grid": self.grid,
            "value": self.value,
            "forcing_ids": self.forcing_ids,
            "costs": list(self.costs),
            "iid_attains": self.iid_attains,
            "holds": self.holds,
        }


def proposition_report(
    shape: TreeShape, i: int, grid: int
) -> PropositionReport:
    _check_bit(i)
    if shape.height > ENUMERATION_LIMIT:
        raise CapabilityError(
            f"lattice enumeration is limited to height {ENUMERATION_LIMIT}"
        )
    if grid < 1:
        raise InputError(f"grid must be positive, got {grid}")
    forced = Fraction(1 - i)
    counts: Counter = Counter()
    for (cost, prob), n in _lattice_pairs(shape, grid).items():
        if prob == forced:
            counts[cost] += n
    value = proposition_values(shape, i)
    iid_cost = min_cost_over_orders(shape, iid(shape, forced)).expected_cost
    return PropositionReport(
        shape=shape,
        i=i,
        grid=grid,
        value=value,
        forcing_ids=sum(counts.values()),
        costs=tuple(sorted(counts)),
        iid_attains=iid_cost == value,
    )


def proposition_check(shape: TreeShape, i: int, grid: int) -> bool:
    return proposition_report(shape, i, grid).holds


def endpoint_non_iid_witness(
    shape: TreeShape, i: int
) -> IndependentDistribution | None:
    """A non-IID ID with root value forced to i attaining the minimum cost.

    One leaf of the all-i IID is moved to 1/2; None when no leaf can move
    without releasing the root.
    """
    _check_bit(i)
    forced = Fraction(1 - i)
    value = proposition_values(shape, i)
    for leaf in range(shape.leaf_count):
        probs = [forced] * shape.leaf_count
        probs[leaf] = Fraction(1, 2)
        d = IndependentDistribution(tuple(probs))
        if root_probability(shape, d) != forced:
            continue
        if min_cost_over_orders(shape, d).expected_cost == value:
            return d
    return None


# ---------------------------------------------------------------------------
# Unconstrained equilibrium among IDs
# ---------------------------------------------------------------------------


class IidMaximum(NamedTuple):
    x: float
    value: float

    def to_json(self) -> dict:
        return {"x": self.x, "value": self.value}


def maximize_iid(shape: TreeShape, tol: float = ARGMAX_TOL) -> IidMaximum:
    """Maximize c_{gate,h} over [0, 1].

    Each critical point is isolated in its own rational bracket, so the
    cost is unimodal or monotone there and golden-section applies.
    """
    gate, h = shape.root_gate, shape.height
    cost = cost_prob(gate, h).cost

    def c(x: float) -> float:
        return cost_prob_float(gate, h, x)[0]

    candidates = [(float(cost(0)), 0.0), (float(cost(1)), 1.0)]
    brackets = cost.derivative().isolating_intervals()
    for lo, hi in brackets:
        result = golden_section_max(c, float(lo), float(hi), tol)
        candidates.append((result.value, result.x))
    value, x = max(candidates)
    log.debug(
        "%s: %d critical point(s), maximum %.12g at %.12g",
        shape.label,
        len(brackets),
        value,
        x,
    )
    return IidMaximum(x, value)


def odd_height_bound_check(k: int, points: int = 500) -> bool:
    """c_{OR,2k+1}(x) > 2^(k+1) on a grid of (alpha + 1e-3, 1 - 1e-3)."""
    alpha = find_alpha(1e-12)
    xs = np.linspace(alpha + 1e-3, 1 - 1e-3, points)
    bound = 2 ** (k + 1)
    return all(
        cost_prob_float(GateKind.OR, 2 * k + 1, float(x))[0] > bound
        for x in xs
    )


def even_height_dominance_check(k: int, points: int = 500) -> bool:
    """c(z) > c(0) = c(1) = 2^k inside (0, 1), z the AND root probability."""
    cost = cost_prob(GateKind.AND, 2 * k).cost
    ends = cost(0) == 2**k and cost(1) == 2**k
    zs = np.arange(1, points) / points
    inside = all(
        conditioned_cost(GateKind.AND, 2 * k, float(z)) > 2**k for z in zs
    )
    return ends and inside


def argmax_gap_check() -> bool:
    """The maximizers of c_{AND,2} and c_{OR,3} are more than 1e-3 apart."""
    even = maximize_iid(TreeShape(GateKind.AND, 2))
    odd = maximize_iid(TreeShape(GateKind.OR, 3))
    log.debug("argmax c_AND,2 %.9g, argmax c_OR,3 %.9g", even.x, odd.x)
    return abs(even.x - odd.x) > 1e-3


def unconstrained_interior_check(shape: TreeShape) -> bool:
    """The IID maximum beats both forced-root values."""
    best = maximize_iid(shape)
    forced = max(proposition_values(shape, 0), proposition_values(shape, 1))
    return best.value > forced


# ---------------------------------------------------------------------------
# IDs versus correlated distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Comparison:
    shape: TreeShape
    r: object
    lhs: object
    rhs_witness: object
    strict: bool
    witness_name: str
    adaptive: AdaptiveStrategy
    directional_cost: object
    directional: DirectionalOrder
    eigen: EquilibriumReport | None = None

    def to_json(self) -> dict:
        return {
            "tree": self.shape.to_json(),
            "r": self.r,
            "lhs": self.lhs,
            "rhs_witness": self.rhs_witness,
            "strict": self.strict,
            "witness": self.witness_name,
            "adaptive_strategy": self.adaptive.to_json(),
            "directional_cost": self.directional_cost,
            "directional_order": self.directional.to_json(),
            "eigen": self.eigen.to_json() if self.eigen else None,
        }


def _check_comparable(shape: TreeShape) -> None:
    if not 2 <= shape.height <= ENUMERATION_LIMIT:
        raise CapabilityError(
            f"comparisons need 2 <= height <= {ENUMERATION_LIMIT},"
            f" got {shape.label}"
        )


def compare_id_vs_correlated(
    shape: TreeShape,
    r,
    tol: float = ARGMAX_TOL,
    starts: int = 8,
    seed: int = 0,
    constraint_tol: float = CONSTRAINT_TOL,
    inverse_tol: float = INVERSE_TOL,
) -> Comparison:
    """ID equilibrium at root probability r against the r:(1-r) mixture of
    the uniform 0-set and 1-set, solved exactly by the adaptive oracle.

    The witness only bounds the correlated equilibrium from below, so
    ``strict`` is sufficient evidence of the gap.
    The ID side comes from eigen_search and so uses the depth-first
    minimum; the correlated side uses the adaptive optimum.
    """
    _check_comparable(shape)
    RootConstraint(r)
    eigen = None
    if r == 1:
        lhs: object = proposition_values(shape, 0)
    elif r == 0:
        lhs = proposition_values(shape, 1)
    else:
        eigen = eigen_search(
            shape, r, tol, starts, seed, constraint_tol, inverse_tol
        )
        lhs = eigen.value

    d0 = uniform_on(enumerate_reluctant(shape, 0))
    d1 = uniform_on(enumerate_reluctant(shape, 1))
    d_mix = mix(d0, d1, Fraction(r))
    adaptive = min_cost_adaptive(shape, d_mix)
    directional = min_cost_directional(shape, d_mix)
    rhs = adaptive.expected_cost
    strict = bool(lhs < rhs)
    log.info(
        "%s at r=%s: ID equilibrium %s, mixture witness %s",
        shape.label,
        r,
        lhs,
        rhs,
    )
    assert isinstance(adaptive.witness_strategy, AdaptiveStrategy)
    assert isinstance(directional.witness_strategy, DirectionalOrder)
    return Comparison(
        shape=shape,
        r=r,
        lhs=lhs,
        rhs_witness=rhs,
        strict=strict,
        witness_name="mix(uniform 0-set, uniform 1-set)",
        adaptive=adaptive.witness_strategy,
        directional_cost=directional.expected_cost,
        directional=directional.witness_strategy,
        eigen=eigen,
    )


def compare_unconstrained(shape: TreeShape) -> Comparison:
    """IID maximum against the better of the uniform 0-set and 1-set."""
    _check_comparable(shape)
    best = maximize_iid(shape)
    reports = []
    for i in (0, 1):
        d = uniform_on(enumerate_reluctant(shape, i))
        reports.append(
            (
                min_cost_adaptive(shape, d),
                min_cost_directional(shape, d),
                i,
            )
        )
    adaptive, directional, i = max(
        reports, key=lambda item: item[0].expected_cost
    )
    assert isinstance(adaptive.witness_strategy, AdaptiveStrategy)
    assert isinstance(directional.witness_strategy, DirectionalOrder)
    return Comparison(
        shape=shape,
        r=None,
        lhs=best.value,
        rhs_witness=adaptive.expected_cost,
        strict=best.value < adaptive.expected_cost,
        witness_name=f"uniform {i}-set",
        adaptive=adaptive.witness_strategy,
        directional_cost=directional.expected_cost,
        directional=directional.witness_strategy,
    )
