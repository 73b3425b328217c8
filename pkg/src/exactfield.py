##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# Exact arithmetic in Q and in a real quadratic field Q(sqrt(d)), embedded in the reals.         #
# An element is stored as (a + b*sqrt(d)) / den with integers a, b, den, den > 0 and             #
# gcd(a, b, den) = 1, so equal values have equal representations. Order comparisons are done     #
# symbolically with integer arithmetic; floating point is only used for display.                 #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

import math
import re
from fractions import Fraction
from typing import Tuple, Union

import mpmath

from src.errors import FieldMismatchError, ParseError

##################################################################################################
#                                        CONFIGURATION                                           #
##################################################################################################

DEFAULT_D = 2

Rational = Fraction
Scalar = Union[int, Fraction, "QuadraticElement"]

_TERM_RE = re.compile(r"([+-]?)(?:(\d+(?:\.\d+)?(?:/\d+)?)(?:\*sqrt\((\d+)\))?|sqrt\((\d+)\)(?:\*(\d+(?:\.\d+)?(?:/\d+)?))?)")

##################################################################################################
#                                        IMPLEMENTATION                                          #
##################################################################################################


def _is_squarefree(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


class QuadraticElement:
    """
    Immutable element (a + b*sqrt(d)) / den of Q(sqrt(d)).

    Rational elements (b == 0) are compatible with every d; they adopt the d of the other
    operand in mixed arithmetic.
    """

    __slots__ = ("a", "b", "den", "d", "_hash")

    def __init__(self, a: int, b: int = 0, den: int = 1, d: int = DEFAULT_D):
        if den == 0:
            raise ZeroDivisionError("denominator must be non-zero")
        if den < 0:
            a, b, den = -a, -b, -den
        g = math.gcd(a, b, den)
        if g > 1:
            a, b, den = a // g, b // g, den // g
        self.a = a
        self.b = b
        self.den = den
        self.d = d
        self._hash = None

    # ---------------------------------------------------------------- constructors

    @classmethod
    def from_parts(cls, rat: Union[int, Fraction], irr: Union[int, Fraction] = 0, d: int = DEFAULT_D) -> "QuadraticElement":
        """Build rat + irr*sqrt(d) from two rationals."""
        if irr != 0 and not _is_squarefree(d):
            raise ParseError(f"d must be a square-free integer >= 2, got {d}")
        rat, irr = Fraction(rat), Fraction(irr)
        den = rat.denominator * irr.denominator // math.gcd(rat.denominator, irr.denominator)
        return cls(rat.numerator * (den // rat.denominator), irr.numerator * (den // irr.denominator), den, d)

    @classmethod
    def coerce(cls, value: Scalar, d: int = DEFAULT_D) -> "QuadraticElement":
        if isinstance(value, QuadraticElement):
            return value
        if isinstance(value, int):
            return cls(value, 0, 1, d)
        if isinstance(value, Fraction):
            return cls(value.numerator, 0, value.denominator, d)
        raise TypeError(f"cannot convert {type(value).__name__} to a field element")

    # ---------------------------------------------------------------- helpers

    def _common_d(self, other: "QuadraticElement") -> int:
        if self.b == 0:
            return other.d
        if other.b == 0 or other.d == self.d:
            return self.d
        raise FieldMismatchError(f"cannot combine elements of Q(sqrt({self.d})) and Q(sqrt({other.d}))")

    def _other(self, other: Scalar) -> "QuadraticElement":
        return other if isinstance(other, QuadraticElement) else QuadraticElement.coerce(other, self.d)

    @property
    def rat(self) -> Fraction:
        return Fraction(self.a, self.den)

    @property
    def irr(self) -> Fraction:
        return Fraction(self.b, self.den)

    def is_rational(self) -> bool:
        return self.b == 0

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    # ---------------------------------------------------------------- arithmetic

    def __add__(self, other: Scalar) -> "QuadraticElement":
        o = self._other(other)
        d = self._common_d(o)
        if self.den == o.den:
            return QuadraticElement(self.a + o.a, self.b + o.b, self.den, d)
        return QuadraticElement(self.a * o.den + o.a * self.den, self.b * o.den + o.b * self.den, self.den * o.den, d)

    __radd__ = __add__

    def __neg__(self) -> "QuadraticElement":
        return QuadraticElement(-self.a, -self.b, self.den, self.d)

    def __pos__(self) -> "QuadraticElement":
        return self

    def __sub__(self, other: Scalar) -> "QuadraticElement":
        return self + (-self._other(other))

    def __rsub__(self, other: Scalar) -> "QuadraticElement":
        return self._other(other) + (-self)

    def __mul__(self, other: Scalar) -> "QuadraticElement":
        o = self._other(other)
        d = self._common_d(o)
        if o.b == 0:
            return QuadraticElement(self.a * o.a, self.b * o.a, self.den * o.den, d)
        if self.b == 0:
            return QuadraticElement(self.a * o.a, self.a * o.b, self.den * o.den, d)
        return QuadraticElement(self.a * o.a + self.b * o.b * d, self.a * o.b + o.a * self.b, self.den * o.den, d)

    __rmul__ = __mul__

    def invert(self) -> "QuadraticElement":
        """Multiplicative inverse; raises ZeroDivisionError for zero."""
        if self.is_zero():
            raise ZeroDivisionError("cannot invert zero")
        norm = self.a * self.a - self.b * self.b * self.d
        return QuadraticElement(self.a * self.den, -self.b * self.den, norm, self.d)

    def __truediv__(self, other: Scalar) -> "QuadraticElement":
        o = self._other(other)
        if o.b == 0:
            if o.a == 0:
                raise ZeroDivisionError("division by zero")
            return QuadraticElement(self.a * o.den, self.b * o.den, self.den * o.a, self._common_d(o))
        return self * o.invert()

    def __rtruediv__(self, other: Scalar) -> "QuadraticElement":
        return self._other(other) / self

    def conjugate(self) -> "QuadraticElement":
        return QuadraticElement(self.a, -self.b, self.den, self.d)

    # ---------------------------------------------------------------- order

    def sign(self) -> int:
        """Exact sign of the real value, computed from integer comparisons only."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a >= 0 and b > 0:
            return 1
        if a <= 0 and b < 0:
            return -1
        # opposite signs: the term with the larger square dominates
        if a * a > b * b * self.d:
            return 1 if a > 0 else -1
        return 1 if b > 0 else -1

    def __abs__(self) -> "QuadraticElement":
        return -self if self.sign() < 0 else self

    def _cmp(self, other: Scalar) -> int:
        return (self - self._other(other)).sign()

    def __lt__(self, other: Scalar) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: Scalar) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: Scalar) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: Scalar) -> bool:
        return self._cmp(other) >= 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = QuadraticElement.coerce(other, self.d)
        if not isinstance(other, QuadraticElement):
            return NotImplemented
        return self.a == other.a and self.b == other.b and self.den == other.den and (self.b == 0 or self.d == other.d)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(Fraction(self.a, self.den)) if self.b == 0 else hash((self.a, self.b, self.den, self.d))
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero()

    def floor(self) -> int:
        """Exact floor of the real value."""
        if self.b == 0:
            return self.a // self.den
        root = math.isqrt(self.b * self.b * self.d)
        # floor(b*sqrt(d)); b*b*d is never a perfect square here
        lower = self.a + (root if self.b > 0 else -root - 1)
        q = lower // self.den
        while (self - q).sign() < 0:
            q -= 1
        while (self - (q + 1)).sign() >= 0:
            q += 1
        return q

    def frac(self) -> "QuadraticElement":
        """x - floor(x), the representative in [0, 1)."""
        return self - self.floor()

    # ---------------------------------------------------------------- display

    def to_mpf(self, digits: int = 30) -> mpmath.mpf:
        with mpmath.workdps(digits + 10):
            return (mpmath.mpf(self.a) + mpmath.mpf(self.b) * mpmath.sqrt(self.d)) / self.den

    def to_decimal(self, digits: int = 30) -> str:
        """Decimal rendering for display only."""
        with mpmath.workdps(digits + 10):
            return mpmath.nstr(self.to_mpf(digits), digits)

    def __float__(self) -> float:
        return float(self.to_mpf(20))

    def __repr__(self) -> str:
        return f"QuadraticElement({format_element(self)})"

    def __str__(self) -> str:
        return format_element(self)


def rational_and_irrational_parts(x: QuadraticElement) -> Tuple[Fraction, Fraction]:
    """Return (rat, irr) with x = rat + irr*sqrt(d); x is rational iff irr == 0."""
    return x.rat, x.irr


def sign(x: Scalar) -> int:
    return QuadraticElement.coerce(x).sign()


def invert(x: QuadraticElement) -> QuadraticElement:
    return x.invert()


def is_rationally_independent(s: QuadraticElement, t: QuadraticElement) -> bool:
    """
    Decide Q-linear independence of two elements of Q(sqrt(d)).

    Over the 2-dimensional coordinate space the elements are independent iff their coordinate
    vectors are not proportional, i.e. the 2x2 determinant is non-zero.
    """
    s_rat, s_irr = rational_and_irrational_parts(s)
    t_rat, t_irr = rational_and_irrational_parts(t)
    return s_rat * t_irr - s_irr * t_rat != 0


def field_element(value: Union[Scalar, str], d: int = DEFAULT_D) -> QuadraticElement:
    """Accept an element, an int, a Fraction or element text and return an element."""
    if isinstance(value, str):
        return parse_element(value, d)
    return QuadraticElement.coerce(value, d)


def _coefficient(coeff: str, text: str) -> Fraction:
    try:
        return Fraction(coeff)
    except (ZeroDivisionError, ValueError) as exc:
        raise ParseError(f"bad coefficient {coeff!r} in {text!r}: {exc}") from exc


def parse_element(text: str, d: int = DEFAULT_D) -> QuadraticElement:
    """
    Parse `p/q`, `p/q+r/s*sqrt(D)`, `r/s*sqrt(D)`, `sqrt(D)` or decimals like `0.0003`.

    Whitespace is ignored and terms may appear in any order. A sqrt(D) that disagrees with a
    different D elsewhere in the same text raises ParseError.
    """
    if not isinstance(text, str):
        raise ParseError(f"expected element text, got {type(text).__name__}")
    compact = re.sub(r"\s+", "", text)
    if not compact:
        raise ParseError("empty element text")
    rat = Fraction(0)
    irr = Fraction(0)
    found_d = None
    pos = 0
    for match in _TERM_RE.finditer(compact):
        if match.start() != pos or match.end() == match.start():
            raise ParseError(f"cannot parse element {text!r} near position {pos}")
        pos = match.end()
        sign_txt, coeff, radicand, bare_radicand, trailing = match.groups()
        factor = -1 if sign_txt == "-" else 1
        if pos != len(compact) and compact[pos] not in "+-":
            raise ParseError(f"cannot parse element {text!r} near position {pos}")
        if coeff is not None and radicand is None:
            rat += factor * _coefficient(coeff, text)
            continue
        radicand = radicand or bare_radicand
        value = _coefficient(coeff if coeff is not None else (trailing or "1"), text)
        if found_d is not None and int(radicand) != found_d:
            raise ParseError(f"mixed radicands in {text!r}")
        found_d = int(radicand)
        irr += factor * value
    if pos != len(compact):
        raise ParseError(f"cannot parse element {text!r} near position {pos}")
    if found_d is None:
        return QuadraticElement.from_parts(rat, 0, d)
    if not _is_squarefree(found_d):
        raise ParseError(f"sqrt({found_d}) is not a square-free radicand")
    return QuadraticElement.from_parts(rat, irr, found_d)


def format_element(x: QuadraticElement) -> str:
    """Inverse of parse_element: `p/q`, `r/s*sqrt(D)` or `p/q+r/s*sqrt(D)`."""
    rat, irr = rational_and_irrational_parts(x)
    if irr == 0:
        return str(rat)
    irr_txt = f"{irr}*sqrt({x.d})"
    if rat == 0:
        return irr_txt
    return f"{rat}{'+' if irr > 0 else ''}{irr_txt}"
