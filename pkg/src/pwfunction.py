##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# Z-periodic, possibly discontinuous piecewise linear functions over a complex P_B. A function   #
# is stored on the fundamental domain [0, 1): value, left limit and right limit at every         #
# breakpoint; the datum at x = 1 is implied by the datum at x = 0. On an open interval the       #
# function interpolates the right limit at its left end and the left limit at its right end.     #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

import bisect
import functools
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from src.errors import InputError
from src.exactfield import DEFAULT_D, QuadraticElement, Scalar, field_element, format_element

##################################################################################################
#                                        CONFIGURATION                                           #
##################################################################################################

# limits memoized per function
LIMIT_CACHE_SIZE = 4096

##################################################################################################
#                                        IMPLEMENTATION                                          #
##################################################################################################


class Side(str, Enum):
    LEFT = "left"
    AT = "at"
    RIGHT = "right"


@dataclass(frozen=True)
class BreakpointDatum:
    """Value and one-sided limits of a function at one breakpoint."""

    x: QuadraticElement
    value: QuadraticElement
    left_limit: QuadraticElement
    right_limit: QuadraticElement

    @classmethod
    def continuous(cls, x: QuadraticElement, value: QuadraticElement) -> "BreakpointDatum":
        return cls(x, value, value, value)


@dataclass
class ConsistencyReport:
    consistent: bool
    violations: List[str] = field(default_factory=list)

    @property
    def first_violation(self) -> Optional[str]:
        return self.violations[0] if self.violations else None


class PiecewiseFunction:
    """
    Periodic piecewise linear function given by its breakpoint data on [0, 1).

    `slopes` optionally declares the slope of each interval (x_i, x_{i+1}); declared slopes are
    only checked by check_table_consistency, evaluation always uses the limits. `closing` is an
    optional datum for x = 1 that must agree with the datum at 0.
    """

    def __init__(
        self,
        f: Scalar,
        breakpoints: Sequence[BreakpointDatum],
        slopes: Optional[Sequence[Optional[QuadraticElement]]] = None,
        closing: Optional[BreakpointDatum] = None,
        name: str = "",
        d: int = DEFAULT_D,
    ):
        if not breakpoints:
            raise InputError("a piecewise linear function needs at least one breakpoint")
        self.f = field_element(f, d)
        if not (0 < self.f < 1):
            raise InputError(f"f must lie in (0, 1), got {self.f}")
        xs = [b.x for b in breakpoints]
        if xs[0] != 0:
            raise InputError("the first breakpoint must be 0")
        for prev, nxt in zip(xs, xs[1:]):
            if not prev < nxt:
                raise InputError(f"breakpoints must be strictly increasing ({prev} >= {nxt})")
        if not xs[-1] < 1:
            raise InputError("breakpoints must lie in [0, 1); the datum at 1 is implied by 0")
        if slopes is not None and len(slopes) != len(xs):
            raise InputError(f"expected {len(xs)} declared slopes, got {len(slopes)}")
        self.name = name
        self.d = d
        self.xs: Tuple[QuadraticElement, ...] = tuple(xs)
        self.values: Tuple[QuadraticElement, ...] = tuple(b.value for b in breakpoints)
        self.lefts: Tuple[QuadraticElement, ...] = tuple(b.left_limit for b in breakpoints)
        self.rights: Tuple[QuadraticElement, ...] = tuple(b.right_limit for b in breakpoints)
        self.declared_slopes: Optional[Tuple[Optional[QuadraticElement], ...]] = tuple(slopes) if slopes is not None else None
        self.closing = closing
        self._slopes = tuple((self.end_limit(i) - self.rights[i]) / (self.end(i) - self.xs[i]) for i in range(len(xs)))
        self._cached_limit = functools.lru_cache(maxsize=LIMIT_CACHE_SIZE)(self._limit)

    # ---------------------------------------------------------------- structure

    @property
    def n(self) -> int:
        return len(self.xs)

    @property
    def breakpoints(self) -> List[BreakpointDatum]:
        return [BreakpointDatum(x, v, lft, rgt) for x, v, lft, rgt in zip(self.xs, self.values, self.lefts, self.rights)]

    def end(self, i: int) -> QuadraticElement:
        """Right endpoint of interval i."""
        return self.xs[i + 1] if i + 1 < self.n else QuadraticElement.coerce(1, self.d)

    def end_limit(self, i: int) -> QuadraticElement:
        """Left limit at the right endpoint of interval i (wraps to x = 1 ~ 0)."""
        return self.lefts[i + 1] if i + 1 < self.n else self.lefts[0]

    def interval(self, i: int) -> Tuple[QuadraticElement, QuadraticElement]:
        return self.xs[i], self.end(i)

    def intervals(self) -> List[Tuple[QuadraticElement, QuadraticElement]]:
        return [self.interval(i) for i in range(self.n)]

    def slope(self, i: int) -> QuadraticElement:
        return self._slopes[i]

    def slopes(self) -> List[QuadraticElement]:
        return list(self._slopes)

    def locate(self, t: QuadraticElement) -> Tuple[bool, int]:
        """For t in [0, 1): (True, i) if t == x_i, else (False, i) with x_i < t < x_{i+1}."""
        i = bisect.bisect_right(self.xs, t) - 1
        return self.xs[i] == t, i

    def is_continuous_at(self, i: int, side: Side = Side.AT) -> bool:
        if side is Side.LEFT:
            return self.lefts[i] == self.values[i]
        if side is Side.RIGHT:
            return self.rights[i] == self.values[i]
        return self.lefts[i] == self.values[i] == self.rights[i]

    def is_continuous(self) -> bool:
        return all(self.is_continuous_at(i) for i in range(self.n))

    # ---------------------------------------------------------------- evaluation

    def limit(self, x: Scalar, side: Side = Side.AT) -> QuadraticElement:
        """Value (side=AT) or one-sided limit of the periodic function at x."""
        return self._cached_limit(field_element(x, self.d), side)

    def _limit(self, x: QuadraticElement, side: Side) -> QuadraticElement:
        t = x.frac()
        on_breakpoint, i = self.locate(t)
        if on_breakpoint:
            return self.lefts[i] if side is Side.LEFT else self.rights[i] if side is Side.RIGHT else self.values[i]
        return self.rights[i] + self._slopes[i] * (t - self.xs[i])

    def evaluate(self, x: Scalar) -> QuadraticElement:
        return self.limit(x, Side.AT)

    def __call__(self, x: Scalar) -> QuadraticElement:
        return self.limit(x, Side.AT)

    # ---------------------------------------------------------------- transformations

    def refine(self, points: Iterable[Scalar]) -> "PiecewiseFunction":
        """The same function over the union of its breakpoints and `points` (mod 1)."""
        extra = {field_element(p, self.d).frac() for p in points}
        merged = sorted(set(self.xs) | extra)
        if len(merged) == self.n:
            return self
        data = [BreakpointDatum(x, self.limit(x, Side.AT), self.limit(x, Side.LEFT), self.limit(x, Side.RIGHT)) for x in merged]
        slopes = None
        if self.declared_slopes is not None:
            slopes = [self.declared_slopes[self.locate(x)[1]] for x in merged]
        return PiecewiseFunction(self.f, data, slopes=slopes, name=self.name, d=self.d)

    def scale(self, c: Scalar) -> "PiecewiseFunction":
        c = field_element(c, self.d)
        data = [BreakpointDatum(b.x, c * b.value, c * b.left_limit, c * b.right_limit) for b in self.breakpoints]
        slopes = None if self.declared_slopes is None else [None if s is None else c * s for s in self.declared_slopes]
        return PiecewiseFunction(self.f, data, slopes=slopes, name=self.name, d=self.d)

    def negate(self) -> "PiecewiseFunction":
        return self.scale(-1)

    def is_zero(self) -> bool:
        return all(v.is_zero() and lft.is_zero() and rgt.is_zero() for v, lft, rgt in zip(self.values, self.lefts, self.rights))

    def to_rows(self) -> List[Dict[str, str]]:
        """Serialize to the row schema of function files, omitting limits equal to the value."""
        rows: List[Dict[str, str]] = []
        for i, b in enumerate(self.breakpoints):
            row = {"x": format_element(b.x), "value": format_element(b.value)}
            if b.left_limit != b.value:
                row["left"] = format_element(b.left_limit)
            if b.right_limit != b.value:
                row["right"] = format_element(b.right_limit)
            if self.declared_slopes is not None and self.declared_slopes[i] is not None:
                row["slope"] = format_element(self.declared_slopes[i])
            rows.append(row)
        return rows

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PiecewiseFunction):
            return NotImplemented
        return self.f == other.f and self.xs == other.xs and self.values == other.values and self.lefts == other.lefts and self.rights == other.rights

    def __hash__(self) -> int:
        return hash((self.f, self.xs, self.values))

    def __repr__(self) -> str:
        label = self.name or "PiecewiseFunction"
        return f"<{label} f={format_element(self.f)} with {self.n} breakpoints>"


def evaluate(pi: PiecewiseFunction, x: Scalar) -> QuadraticElement:
    return pi.evaluate(x)


def limit(pi: PiecewiseFunction, x: Scalar, side: Side) -> QuadraticElement:
    return pi.limit(x, side)


def delta_pi(pi: PiecewiseFunction, x: Scalar, y: Scalar) -> QuadraticElement:
    """Subadditivity slack pi(x) + pi(y) - pi(x + y)."""
    x = field_element(x, pi.d)
    y = field_element(y, pi.d)
    return pi(x) + pi(y) - pi(x + y)


def add_scaled(pi: PiecewiseFunction, other: PiecewiseFunction, eps: Scalar) -> PiecewiseFunction:
    """pi + eps*other over the common refinement, limits included."""
    eps = field_element(eps, pi.d)
    merged = sorted(set(pi.xs) | set(other.xs))
    data = [
        BreakpointDatum(
            x,
            pi.limit(x, Side.AT) + eps * other.limit(x, Side.AT),
            pi.limit(x, Side.LEFT) + eps * other.limit(x, Side.LEFT),
            pi.limit(x, Side.RIGHT) + eps * other.limit(x, Side.RIGHT),
        )
        for x in merged
    ]
    return PiecewiseFunction(pi.f, data, name=pi.name, d=pi.d)


def compose_with_multiplication(pi: PiecewiseFunction, k: int, f: Optional[Scalar] = None) -> PiecewiseFunction:
    """x -> pi(k*x mod 1) for an integer k >= 1; f defaults to pi's f."""
    if k < 1:
        raise InputError("the multiplier must be a positive integer")
    points = sorted({(x + j) / k for x in pi.xs for j in range(k)})
    data = [BreakpointDatum(t, pi.limit(k * t, Side.AT), pi.limit(k * t, Side.LEFT), pi.limit(k * t, Side.RIGHT)) for t in points]
    return PiecewiseFunction(pi.f if f is None else f, data, d=pi.d)


def check_table_consistency(pi: PiecewiseFunction) -> ConsistencyReport:
    """
    Verify declared slopes against the limits on every interval and the periodic wrap-around.

    For consecutive breakpoints x_i < x_{i+1}: left(x_{i+1}) = right(x_i) + c_i*(x_{i+1} - x_i).
    The closing datum at 1, when present, must equal the datum at 0.
    """
    violations: List[str] = []
    if pi.declared_slopes is not None:
        for i, declared in enumerate(pi.declared_slopes):
            if declared is None:
                continue
            lo, hi = pi.interval(i)
            expected = pi.rights[i] + declared * (hi - lo)
            if expected != pi.end_limit(i):
                violations.append(f"interval {i} ({lo}, {hi}): left limit at {hi} is {pi.end_limit(i)}, slope {declared} predicts {expected}")
    if pi.closing is not None:
        start = pi.breakpoints[0]
        for label, got, want in (("value", pi.closing.value, start.value), ("left limit", pi.closing.left_limit, start.left_limit), ("right limit", pi.closing.right_limit, start.right_limit)):
            if got != want:
                violations.append(f"wrap-around: {label} at 1 is {got}, datum at 0 gives {want}")
    return ConsistencyReport(consistent=not violations, violations=violations)
