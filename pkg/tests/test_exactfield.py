##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# Tests exact arithmetic in Q(sqrt(d)): field axioms and exact signs on seeded random elements,  #
# floor and fractional part, parsing / formatting of element text, field mismatch errors and     #
# continued-fraction convergents of quadratic irrationals.                                       #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

import random
from fractions import Fraction

import mpmath
import pytest

from src.covering import continued_fraction_convergents
from src.errors import FieldMismatchError, InputError, ParseError
from src.exactfield import QuadraticElement, format_element, is_rationally_independent, parse_element, rational_and_irrational_parts, sign

##################################################################################################
#                                             TESTS                                              #
##################################################################################################

SQRT2 = QuadraticElement(0, 1)


def _random_element(rng: random.Random) -> QuadraticElement:
    return QuadraticElement.from_parts(Fraction(rng.randint(-50, 50), rng.randint(1, 30)), Fraction(rng.randint(-50, 50), rng.randint(1, 30)))


def test_field_axioms_randomized():
    """2500 random triples x 4 identities: associativity, distributivity, inverses."""
    rng = random.Random(20171)
    checks = 0
    for _ in range(2500):
        a, b, c = (_random_element(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        assert (a - b) + b == a
        if not a.is_zero():
            assert a * a.invert() == 1
        checks += 4
    assert checks == 10_000


def test_sign_matches_high_precision_value():
    """Exact sign agrees with a 60-digit mpmath evaluation."""
    rng = random.Random(7)
    with mpmath.workdps(60):
        for _ in range(2000):
            x = _random_element(rng)
            ref = mpmath.mpf(x.a) + mpmath.mpf(x.b) * mpmath.sqrt(2)
            expected = 0 if ref == 0 else (1 if ref > 0 else -1)
            assert x.sign() == expected


def test_sign_of_near_cancellation():
    """99/70 - sqrt(2) is positive, 140/99 - sqrt(2) is negative."""
    assert (Fraction(99, 70) - SQRT2).sign() == 1
    assert (Fraction(140, 99) - SQRT2).sign() == -1
    assert sign(Fraction(-1, 3)) == -1


def test_rational_elements_mix_with_any_field():
    """A rational element adopts the radicand of the other operand."""
    sqrt3 = parse_element("sqrt(3)")
    total = QuadraticElement.coerce(Fraction(1, 2)) + sqrt3
    assert total.d == 3
    assert total == parse_element("1/2+sqrt(3)")


def test_field_mismatch_raises():
    """sqrt(2) + sqrt(3) has no representation."""
    with pytest.raises(FieldMismatchError):
        _ = SQRT2 + parse_element("sqrt(3)")


def test_floor_and_frac():
    """Floors of quadratic irrationals are exact."""
    assert SQRT2.floor() == 1
    assert (-SQRT2).floor() == -2
    assert (SQRT2 * 100).floor() == 141
    assert parse_element("849/5000+77/7752*sqrt(2)").floor() == 0
    x = SQRT2 + 3
    assert x.frac() == SQRT2 - 1
    assert QuadraticElement.coerce(Fraction(-1, 2)).frac() == Fraction(1, 2)


def test_invert_zero_raises():
    """Zero has no inverse."""
    with pytest.raises(ZeroDivisionError):
        QuadraticElement.coerce(0).invert()
    with pytest.raises(ZeroDivisionError):
        _ = SQRT2 / 0


def test_parse_and_format():
    """Element text in every accepted form."""
    x = parse_element("4851099/11999000 - 1925/71994*sqrt(2)")
    assert rational_and_irrational_parts(x) == (Fraction(4851099, 11999000), Fraction(-1925, 71994))
    assert parse_element("-1925/71994*sqrt(2)+4851099/11999000") == x
    assert parse_element("sqrt(2)") == SQRT2
    assert parse_element("sqrt(2)*3/4") == SQRT2 * Fraction(3, 4)
    assert parse_element("0.0003") == Fraction(3, 10000)
    assert parse_element(format_element(x)) == x
    assert format_element(QuadraticElement.coerce(Fraction(4, 5))) == "4/5"
    assert format_element(SQRT2 * Fraction(77, 7752)) == "77/7752*sqrt(2)"


@pytest.mark.parametrize("text", ["", "1/2+", "abc", "sqrt(4)", "1+sqrt(2)+sqrt(3)", "1/2 x", "1/0", "sqrt(2)*3/0", "0.5/2"])
def test_parse_rejects_malformed_text(text):
    """Malformed element text raises ParseError."""
    with pytest.raises(ParseError):
        parse_element(text)


def test_rational_independence():
    """1 and sqrt(2) are independent; sqrt(2)/2 and 3*sqrt(2) are not."""
    assert is_rationally_independent(QuadraticElement.coerce(1), SQRT2)
    assert not is_rationally_independent(SQRT2 / 2, SQRT2 * 3)
    assert is_rationally_independent(SQRT2 * Fraction(77, 7752), QuadraticElement.coerce(Fraction(77, 2584)))


def test_convergents_of_sqrt2():
    """sqrt(2) = [1; 2, 2, ...]."""
    assert continued_fraction_convergents(SQRT2, QuadraticElement.coerce(1), 5) == [(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)]


def test_convergents_of_one_plus_sqrt2():
    """1 + sqrt(2) = [2; 2, 2, ...]."""
    assert continued_fraction_convergents(SQRT2 + 1, QuadraticElement.coerce(1), 5) == [(2, 1), (5, 2), (12, 5), (29, 12), (70, 29)]


def test_convergents_reject_rational_ratio():
    """A rational ratio has a finite expansion."""
    with pytest.raises(InputError):
        continued_fraction_convergents(SQRT2, SQRT2 * 3, 5)


def test_decimal_rendering():
    """30-digit display of sqrt(2)."""
    assert SQRT2.to_decimal(30).startswith("1.414213562373095048801688724")


def test_sign_is_multiplicative_randomized():
    """sign(a * b) = sign(a) * sign(b) and sign(a + b) agrees with 30-digit decimals."""
    rng = random.Random(2017)
    for _ in range(2000):
        a, b = _random_element(rng), _random_element(rng)
        assert (a * b).sign() == a.sign() * b.sign()
        total = a + b
        if not total.is_zero():
            assert (mpmath.mpf(a.to_decimal(30)) + mpmath.mpf(b.to_decimal(30)) > 0) == (total.sign() > 0)


def test_convergent_errors_decrease_for_sqrt2():
    """|q_n sqrt(2) - p_n| strictly decreases over the first 10 convergents."""
    convergents = continued_fraction_convergents(SQRT2, QuadraticElement.coerce(1), 10)
    assert len(convergents) == 10
    assert convergents[-1] == (3363, 2378)
    errors = [abs(SQRT2 * q - p) for p, q in convergents]
    assert all(later < earlier for earlier, later in zip(errors, errors[1:]))
