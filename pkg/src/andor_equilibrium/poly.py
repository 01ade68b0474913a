"""Exact cost/probability polynomial families and their certificates.

For a ``gate``-rooted uniform binary tree of height h whose leaves are
independently 0 with probability x, ``cost_prob(gate, h)`` returns the
expected alpha-beta cost c(x) and the root-is-0 probability p(x) as exact
rational polynomials. Strict sign conditions on (0, 1) are certified by
a Descartes sign-change bound (Sturm counting when it is inconclusive)
plus one interior sample.
"""

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly
from sympy import QQ, ZZ, Poly, Rational, Symbol

from .algorithms import iid_cost_prob, node_cost_prob
from .errors import CapabilityError, CertificationError, InputError
from .search import bisect_increasing, bisect_sign_change
from .tree import MAX_HEIGHT, GateKind

log = logging.getLogger(__name__)

__all__ = [
    "X",
    "INVERSE_TOL",
    "CURVE_LIMIT",
    "CERTIFICATE_LIMIT",
    "ALPHA_POLY",
    "RatPoly",
    "CostProbPair",
    "Certificate",
    "cost_prob",
    "cost_prob_float",
    "inverse_prob",
    "conditioned_cost",
    "derivative",
    "sign_certificate",
    "two_level_consistency",
    "lemma1_report",
    "lemma1_certificate",
    "lemma2_report",
    "lemma2_certificate",
    "positive_derivative_certificate",
    "duality_check",
    "identity38_check",
    "factorization35_check",
    "alpha_root_count",
    "find_alpha",
    "ratio_curve",
    "concavity_check",
]

X = Symbol("x")
INVERSE_TOL = 1e-12
# Dense plot data is evaluated exactly; above this height it gets slow.
CURVE_LIMIT = 8
# Certificates are exact polynomial computations of degree about 2^h.
CERTIFICATE_LIMIT = 10


def _fraction(value) -> Fraction:
    return Fraction(int(value.p), int(value.q))


def _rational(value) -> Rational:
    value = Fraction(value)
    return Rational(value.numerator, value.denominator)


class RatPoly:
    """Univariate polynomial with exact rational coefficients.

    ``RatPoly([2, 3, -4, 1])`` is 2 + 3x - 4x^2 + x^3: index is degree.
    """

    __slots__ = ("_poly", "_coefficients", "_floats")

    def __init__(self, coefficients: Iterable = ()):
        descending = [_rational(c) for c in reversed(list(coefficients))]
        self._set(Poly(descending or [0], X, domain=QQ))

    def _set(self, poly: Poly) -> None:
        self._poly = poly
        if poly.is_zero:
            self._coefficients: tuple[Fraction, ...] = ()
        else:
            self._coefficients = tuple(
                _fraction(c) for c in reversed(poly.all_coeffs())
            )
        self._floats: list[float] | None = None

    @classmethod
    def _wrap(cls, poly: Poly) -> "RatPoly":
        obj = cls.__new__(cls)
        obj._set(poly)
        return obj

    @classmethod
    def x(cls) -> "RatPoly":
        return cls([0, 1])

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return self._coefficients

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self._coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return not self._coefficients

    @staticmethod
    def _coerce(other) -> Poly:
        if isinstance(other, RatPoly):
            return other._poly
        return Poly(_rational(other), X, domain=QQ)

    def __add__(self, other) -> "RatPoly":
        return RatPoly._wrap(self._poly + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other) -> "RatPoly":
        return RatPoly._wrap(self._poly - self._coerce(other))

    def __rsub__(self, other) -> "RatPoly":
        return RatPoly._wrap(self._coerce(other) - self._poly)

    def __mul__(self, other) -> "RatPoly":
        return RatPoly._wrap(self._poly * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self) -> "RatPoly":
        return RatPoly._wrap(-self._poly)

    def __pow__(self, exponent: int) -> "RatPoly":
        return RatPoly._wrap(self._poly**exponent)

    def __eq__(self, other) -> bool:
        if isinstance(other, RatPoly):
            return self._coefficients == other._coefficients
        if isinstance(other, (int, Fraction)):
            return self._coefficients == RatPoly([other])._coefficients
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._coefficients)

    def __repr__(self) -> str:
        return f"RatPoly({[str(c) for c in self._coefficients]})"

    def __call__(self, x):
        """Exact value at an ``int``/``Fraction``; float value otherwise."""
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self._coefficients):
                acc = acc * x + c
            return acc
        if self._floats is None:
            self._floats = [float(c) for c in self._coefficients] or [0.0]
        return npoly.polyval(x, self._floats)

    def derivative(self) -> "RatPoly":
        return RatPoly._wrap(self._poly.diff(X))

    def compose(self, inner: "RatPoly") -> "RatPoly":
        """self(inner(x))."""
        return RatPoly._wrap(self._poly.compose(inner._poly))

    def sign_changes_open_unit(self) -> int:
        """Descartes bound on the roots in (0, 1), with multiplicity.

        The x^m factor is divided out and x = 1/(1 + t) maps (0, 1) onto
        (0, inf). Zero sign changes prove there is no root, one proves
        exactly one.
        """
        ascending = list(self._coefficients)
        while ascending and ascending[0] == 0:
            ascending.pop(0)
        if len(ascending) <= 1:
            return 0
        scale = math.lcm(*(c.denominator for c in ascending))
        integral = [int(c * scale) for c in ascending]
        # (1 + t)^d M(1/(1 + t)) is the reversal of M evaluated at 1 + t.
        moved = Poly(integral, X, domain=ZZ).shift(1)
        signs = [c > 0 for c in moved.all_coeffs() if c != 0]
        return sum(a != b for a, b in zip(signs, signs[1:]))

    def count_roots_open_unit(self) -> int:
        """Distinct real roots in (0, 1).

        Settled by the Descartes bound when it is 0 or 1, by a Sturm
        count otherwise.
        """
        if self.is_zero:
            raise InputError("the zero polynomial has no finite root count")
        if self.degree == 0:
            return 0
        bound = self.sign_changes_open_unit()
        if bound <= 1:
            return bound
        log.debug("Descartes bound %d, falling back to Sturm", bound)
        closed = int(self._poly.count_roots(0, 1))
        return closed - (self(0) == 0) - (self(1) == 0)

    def isolating_intervals(self) -> list[tuple[Fraction, Fraction]]:
        """Disjoint rational brackets, one per distinct root in (0, 1)."""
        if self.degree <= 0:
            return []
        found = []
        for (lo, hi), _mult in self._poly.intervals(inf=0, sup=1):
            lo, hi = _fraction(lo), _fraction(hi)
            if lo == hi and lo in (0, 1):
                continue
            found.append((lo, hi))
        return found

    def to_json(self) -> list[str]:
        return [str(c) for c in self._coefficients] or ["0"]


def derivative(p: RatPoly) -> RatPoly:
    return p.derivative()


# ---------------------------------------------------------------------------
# Families c_{gate,h}, p_{gate,h}
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CostProbPair:
    cost: RatPoly
    prob: RatPoly
    gate: GateKind
    height: int

    def to_json(self) -> dict:
        return {
            "gate": self.gate.value,
            "height": self.height,
            "cost": self.cost.to_json(),
            "prob": self.prob.to_json(),
        }


def _check_height(h: int, limit: int = MAX_HEIGHT) -> None:
    if not 1 <= h <= limit:
        raise InputError(f"height must be between 1 and {limit}, got {h}")


@lru_cache(maxsize=None)
def _family(gate: GateKind, height: int) -> tuple[RatPoly, RatPoly]:
    if height == 0:
        return RatPoly([1]), RatPoly.x()
    # A gate-rooted tree joins two copies of the dual-rooted tree below it.
    child = _family(gate.dual, height - 1)
    return node_cost_prob(gate, child, child)


def cost_prob(gate: GateKind, h: int) -> CostProbPair:
    _check_height(h)
    cost, prob = _family(gate, h)
    return CostProbPair(cost, prob, gate, h)


def cost_prob_float(gate: GateKind, h: int, x: float) -> tuple[float, float]:
    """(cost, prob) at x by the level recursion, stable at every height."""
    return iid_cost_prob(gate, h, float(x))


def inverse_prob(
    gate: GateKind, h: int, u: float, tol: float = INVERSE_TOL
) -> float:
    """x in [0, 1] with p_{gate,h}(x) = u, by monotone bisection."""
    if not 0 <= u <= 1:
        raise InputError(f"probability must lie in [0, 1], got {u}")
    return float(
        bisect_increasing(
            lambda x: cost_prob_float(gate, h, x)[1], u, 0.0, 1.0, tol
        )
    )


def conditioned_cost(
    gate: GateKind, h: int, u: float, tol: float = INVERSE_TOL
) -> float:
    """Cost as a function of root probability: c(p^{-1}(u))."""
    return cost_prob_float(gate, h, inverse_prob(gate, h, u, tol))[0]


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Outcome of certifying that a polynomial is negative on (0, 1)."""

    name: str
    height: int
    certified: bool
    roots_in_interval: int
    sample_value: Fraction
    offending_interval: tuple[Fraction, Fraction] | None = None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "height": self.height,
            "certified": self.certified,
            "roots_in_interval": self.roots_in_interval,
            "sample_at_half": self.sample_value,
            "offending_interval": (
                list(self.offending_interval)
                if self.offending_interval
                else None
            ),
        }


def sign_certificate(poly: RatPoly, name: str, height: int) -> Certificate:
    """Certify poly < 0 on (0, 1): no root inside and negative at 1/2."""
    roots = poly.count_roots_open_unit()
    sample = poly(Fraction(1, 2))
    certified = roots == 0 and sample < 0
    interval = None
    if not certified:
        brackets = poly.isolating_intervals()
        interval = brackets[0] if brackets else (Fraction(0), Fraction(1))
        log.warning(
            "%s at height %d is not negative on (0, 1):"
            " %d root(s), offending interval [%s, %s]",
            name,
            height,
            roots,
            interval[0],
            interval[1],
        )
    return Certificate(name, height, certified, roots, sample, interval)


def _check_certificate_height(h: int) -> None:
    _check_height(h)
    if h > CERTIFICATE_LIMIT:
        raise CapabilityError(
            f"certificates are computed up to height {CERTIFICATE_LIMIT},"
            f" got {h}"
        )


def _check_pair_height(h: int) -> None:
    if h + 2 > MAX_HEIGHT:
        raise InputError(f"height {h} + 2 exceeds {MAX_HEIGHT}")


def two_level_consistency(h: int) -> bool:
    """The one-level recursion applied twice matches the two-level forms."""
    _check_height(h)
    _check_pair_height(h)
    c_or, p_or = _family(GateKind.OR, h)
    c_or2, p_or2 = _family(GateKind.OR, h + 2)
    or_ok = c_or2 == (2 - p_or) * (-(p_or**2) + 2 * p_or + 1) * c_or and (
        p_or2 == p_or**2 * (p_or - 2) ** 2
    )

    c_and, p_and = _family(GateKind.AND, h)
    c_and2, p_and2 = _family(GateKind.AND, h + 2)
    and_ok = c_and2 == c_and * (1 + p_and) * (2 - p_and**2) and (
        p_and2 == 1 - (1 - p_and**2) ** 2
    )
    log.debug("two-level identities at h=%d: OR %s, AND %s", h, or_ok, and_ok)
    return or_ok and and_ok


def lemma1_report(h: int) -> Certificate:
    """c_{OR,h}/p_{OR,h} decreasing: numerator of its derivative < 0."""
    _check_certificate_height(h)
    pair = cost_prob(GateKind.OR, h)
    c, p = pair.cost, pair.prob
    numerator = c.derivative() * p - c * p.derivative()
    log.info("Certifying cost/prob ratio monotonicity at height %d ...", h)
    return sign_certificate(numerator, "cost/prob ratio", h)


def lemma1_certificate(h: int) -> bool:
    return lemma1_report(h).certified


def lemma2_report(h: int) -> Certificate:
    """c'_{OR,h}/p'_{OR,h} decreasing: numerator of its derivative < 0."""
    _check_certificate_height(h)
    pair = cost_prob(GateKind.OR, h)
    c1, p1 = pair.cost.derivative(), pair.prob.derivative()
    numerator = c1.derivative() * p1 - c1 * p1.derivative()
    log.info("Certifying derivative ratio monotonicity at height %d ...", h)
    return sign_certificate(numerator, "derivative ratio", h)


def lemma2_certificate(h: int) -> bool:
    return lemma2_report(h).certified


def positive_derivative_certificate(gate: GateKind, h: int) -> Certificate:
    """p'_{gate,h} > 0 on (0, 1), the basis of every inverse p^{-1}."""
    _check_certificate_height(h)
    return sign_certificate(
        -cost_prob(gate, h).prob.derivative(), "negated prob derivative", h
    )


def duality_check(h: int, grid: int) -> bool:
    """c_AND/(1-p_AND) at x equals c_OR/p_OR at 1-x, and the primed form.

    Both identities are checked cross-multiplied as polynomial equalities,
    then as exact ratios at the interior points k/grid.
    """
    _check_height(h)
    if grid < 2:
        raise InputError(f"grid must be at least 2, got {grid}")
    c_and, p_and = _family(GateKind.AND, h)
    c_or, p_or = _family(GateKind.OR, h)
    flip = RatPoly([1, -1])
    c_or_f, p_or_f = c_or.compose(flip), p_or.compose(flip)
    dc_or_f = c_or.derivative().compose(flip)
    dp_or_f = p_or.derivative().compose(flip)

    plain = c_and * p_or_f == c_or_f * (1 - p_and)
    primed = c_and.derivative() * dp_or_f == dc_or_f * -p_and.derivative()

    sampled = True
    for k in range(1, grid):
        x = Fraction(k, grid)
        lhs = c_and(x) / (1 - p_and(x))
        rhs = c_or_f(x) / p_or_f(x)
        lhs_primed = c_and.derivative()(x) / -p_and.derivative()(x)
        rhs_primed = dc_or_f(x) / dp_or_f(x)
        sampled = sampled and lhs == rhs and lhs_primed == rhs_primed
    log.debug(
        "duality at h=%d: plain %s, primed %s, sampled %s",
        h,
        plain,
        primed,
        sampled,
    )
    return plain and primed and sampled


def identity38_check() -> bool:
    """c_{AND,2}(t)(1 + p_{AND,2}(t)) = (1 + t)(t^2(1-t^2)(3-t^2) + 2)."""
    c, p = _family(GateKind.AND, 2)
    t = RatPoly.x()
    return c * (1 + p) == (1 + t) * (t**2 * (1 - t**2) * (3 - t**2) + 2)


# f(x) = x^6 + 2x^5 - 2x^4 - 6x^3 - 3x^2 + 2
ALPHA_POLY = RatPoly([2, 0, -3, -6, -2, 2, 1])


def factorization35_check() -> bool:
    """c_{OR,3}(x) - 4 = (x - 1) f(x)."""
    c, _ = _family(GateKind.OR, 3)
    return c - 4 == (RatPoly.x() - 1) * ALPHA_POLY


def alpha_root_count() -> int:
    return ALPHA_POLY.count_roots_open_unit()


def find_alpha(tol: float) -> float:
    """The unique root of f in (0, 1), bracketed exactly to width ``tol``."""
    if tol <= 0:
        raise InputError(f"tol must be positive, got {tol}")
    count = alpha_root_count()
    if count != 1:
        raise CertificationError(
            f"f has {count} roots in (0, 1), expected exactly one",
            (Fraction(0), Fraction(1)),
        )
    lo, hi = bisect_sign_change(ALPHA_POLY, Fraction(0), Fraction(1), tol)
    return float((lo + hi) / 2)


# ---------------------------------------------------------------------------
# Plot data and sampled properties
# ---------------------------------------------------------------------------


def ratio_curve(h: int, points: int = 999) -> list[dict]:
    """Rows (x, c, p, c/p, c'/p') of the OR family on x = k/(points+1)."""
    _check_height(h)
    if h > CURVE_LIMIT:
        raise CapabilityError(
            f"dense curves are evaluated exactly up to height {CURVE_LIMIT}"
        )
    pair = cost_prob(GateKind.OR, h)
    dc, dp = pair.cost.derivative(), pair.prob.derivative()
    rows = []
    for k in range(1, points + 1):
        x = Fraction(k, points + 1)
        c, p = pair.cost(x), pair.prob(x)
        rows.append(
            {
                "x": float(x),
                "c": float(c),
                "p": float(p),
                "c_over_p": float(c / p),
                "dc_over_dp": float(dc(x) / dp(x)),
            }
        )
    return rows


def concavity_check(k: int, points: int = 1000, tol: float = 1e-14) -> bool:
    """Second differences of c(z) = c_{AND,2k}(p_{AND,2k}^{-1}(z)) are < 0.

    Sampled on the interior points z = j/points.
    """
    if not 1 <= k <= 4:
        raise InputError(f"even heights 2k are checked for k in 1..4, got {k}")
    zs = np.arange(1, points) / points
    values = np.array(
        [conditioned_cost(GateKind.AND, 2 * k, z, tol) for z in zs]
    )
    second = np.diff(values, 2)
    worst = float(second.max())
    log.debug(
        "concavity at height %d: largest second difference %g", 2 * k, worst
    )
    return bool((second < 0).all())
