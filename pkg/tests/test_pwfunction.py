##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# Tests periodic discontinuous piecewise linear functions: table fidelity of the 40-breakpoint   #
# function (declared slopes, wrap-around, exact symmetry with one-sided limits), evaluation,     #
# refinement, linear combinations, composition with multiplication and input validation.         #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

from fractions import Fraction

import pytest

from src import compendium
from src.errors import InputError
from src.exactfield import QuadraticElement, parse_element
from src.pwfunction import LIMIT_CACHE_SIZE, BreakpointDatum, PiecewiseFunction, Side, add_scaled, check_table_consistency, compose_with_multiplication, delta_pi, evaluate, limit

##################################################################################################
#                                             TESTS                                              #
##################################################################################################


def q(value) -> QuadraticElement:
    return QuadraticElement.coerce(Fraction(value))


def test_kzh_table_is_consistent(kzh):
    """Declared slopes and the closing row agree with the limits."""
    report = check_table_consistency(kzh)
    assert report.consistent, report.first_violation
    assert kzh.n == 40
    assert kzh.f == Fraction(4, 5)


def test_kzh_symmetry_with_limits(kzh):
    """pi(x) + pi(f - x) = 1 at every breakpoint, limits paired left with right."""
    points = list(kzh.xs) + [q(1)]
    assert len(points) == 41
    for x in points:
        mirror = kzh.f - x
        assert kzh(x) + kzh(mirror) == 1
        assert kzh.limit(x, Side.LEFT) + kzh.limit(mirror, Side.RIGHT) == 1
        assert kzh.limit(x, Side.RIGHT) + kzh.limit(mirror, Side.LEFT) == 1


def test_kzh_slopes(kzh):
    """Only the three slopes 35/13, 5/11999 and -5 occur."""
    assert set(kzh.slopes()) == {q(Fraction(35, 13)), q(Fraction(5, 11999)), q(-5)}
    assert kzh.declared_slopes is not None
    assert list(kzh.declared_slopes) == kzh.slopes()


def test_kzh_values(kzh):
    """Values inside an interval and at an irrational breakpoint."""
    assert evaluate(kzh, Fraction(101, 10000)) == Fraction(2727, 26000)
    x5 = parse_element("77/7752*sqrt(2)+849/5000")
    assert kzh(x5) == parse_element("2695/100776*sqrt(2)+4851099/11999000")
    assert limit(kzh, x5, Side.LEFT) == parse_element("385/93016248*sqrt(2)+4851099/11999000")
    assert kzh(0) == 0
    assert kzh(kzh.f) == 1


def test_periodicity(kzh):
    """pi(x + k) = pi(x) for integers k, limits included."""
    x = parse_element("19/100")
    for k in (-2, -1, 1, 3):
        assert kzh(x + k) == kzh(x)
        assert kzh.limit(x + k, Side.LEFT) == kzh.limit(x, Side.LEFT)
    assert kzh.limit(1, Side.LEFT) == Fraction(101, 650)
    assert kzh.limit(0, Side.LEFT) == Fraction(101, 650)


def test_gomory_fractional_limits():
    """frac(x)/f jumps from 1/f back to 0 at the integers."""
    pi = compendium.gomory_fractional(Fraction(4, 5))
    assert pi(0) == 0
    assert pi.limit(0, Side.LEFT) == Fraction(5, 4)
    assert pi(Fraction(9, 10)) == Fraction(9, 8)
    assert not pi.is_continuous()


def test_refine_keeps_the_function(kzh):
    """Inserted breakpoints do not change values or limits."""
    extra = [Fraction(1, 3), parse_element("1/3*sqrt(2)")]
    refined = kzh.refine(extra)
    assert refined.n == kzh.n + 2
    for x in list(kzh.xs) + [q(Fraction(1, 3)), q(Fraction(7, 9))]:
        for side in Side:
            assert refined.limit(x, side) == kzh.limit(x, side)
    assert kzh.refine(kzh.xs) is kzh


def test_add_scaled_and_scale():
    """pi + eps*other over the common refinement."""
    g = compendium.gmic(Fraction(1, 2))
    h = compose_with_multiplication(g, 3)
    combo = add_scaled(g, h, Fraction(-1, 2))
    assert combo.n == 6
    assert combo(Fraction(1, 6)) == g(Fraction(1, 6)) - Fraction(1, 2) * h(Fraction(1, 6))
    assert g.scale(2)(Fraction(1, 4)) == 1
    assert g.negate()(Fraction(1, 2)) == -1
    assert add_scaled(g, g, -1).is_zero()


def test_compose_with_multiplication():
    """x -> pi(3x mod 1) for the two-slope function with f = 1/2."""
    g = compendium.gmic(Fraction(1, 2))
    h = compose_with_multiplication(g, 3)
    assert [h(x) for x in (0, Fraction(1, 6), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(5, 6))] == [0, 1, 0, 1, 0, 1]
    assert h.slopes()[0] == 6
    with pytest.raises(InputError):
        compose_with_multiplication(g, 0)


def test_delta_pi():
    """Subadditivity slack of the two-slope function."""
    g = compendium.gmic(Fraction(4, 5))
    assert delta_pi(g, Fraction(1, 5), Fraction(1, 5)) == 0
    assert delta_pi(g, Fraction(9, 10), Fraction(9, 10)) == 0
    assert delta_pi(g, Fraction(1, 2), Fraction(1, 2)) > 0


def test_wrong_declared_slope_is_reported():
    """A declared slope that contradicts the limits is a consistency violation."""
    zero, one = q(0), q(1)
    f = q(Fraction(4, 5))
    pi = PiecewiseFunction(f, [BreakpointDatum.continuous(zero, zero), BreakpointDatum.continuous(f, one)], slopes=[q(1), q(-5)])
    report = check_table_consistency(pi)
    assert not report.consistent
    assert "interval 0" in report.first_violation


def test_closing_row_mismatch_is_reported():
    """The datum at 1 must repeat the datum at 0."""
    zero, one = q(0), q(1)
    f = q(Fraction(4, 5))
    closing = BreakpointDatum(one, q(Fraction(1, 10)), zero, zero)
    pi = PiecewiseFunction(f, [BreakpointDatum.continuous(zero, zero), BreakpointDatum.continuous(f, one)], closing=closing)
    assert "wrap-around" in check_table_consistency(pi).first_violation


@pytest.mark.parametrize(
    "xs, f",
    [
        ([Fraction(1, 10), Fraction(1, 2)], Fraction(1, 2)),
        ([0, Fraction(1, 2), Fraction(1, 4)], Fraction(1, 2)),
        ([0, 1], Fraction(1, 2)),
        ([0, Fraction(1, 2)], Fraction(3, 2)),
    ],
)
def test_invalid_breakpoints(xs, f):
    """First breakpoint 0, strictly increasing, inside [0, 1), f in (0, 1)."""
    data = [BreakpointDatum.continuous(q(x), q(0)) for x in xs]
    with pytest.raises(InputError):
        PiecewiseFunction(f, data)


def test_slope_count_must_match():
    """One declared slope per interval."""
    with pytest.raises(InputError):
        PiecewiseFunction(Fraction(1, 2), [BreakpointDatum.continuous(q(0), q(0))], slopes=[q(1), q(2)])


def test_to_rows_omits_limits_equal_to_value(kzh):
    """Serialized rows follow the table convention."""
    rows = kzh.to_rows()
    assert rows[2] == {"x": "60153/369200", "value": "421071/959920", "slope": "-5"}
    assert rows[17]["x"] == "219/800"
    assert "left" not in rows[17] and rows[17]["right"] == "51443/147680"


def test_limit_cache_is_bounded():
    """Memoized limits never outgrow LIMIT_CACHE_SIZE and still agree with fresh values."""
    pi = compendium.gmic()
    info = pi._cached_limit.cache_info()
    assert info.maxsize == LIMIT_CACHE_SIZE
    points = [Fraction(k, 2 * LIMIT_CACHE_SIZE + 1) for k in range(LIMIT_CACHE_SIZE + 100)]
    for x in points:
        pi.limit(x, Side.AT)
    assert pi._cached_limit.cache_info().currsize == LIMIT_CACHE_SIZE
    x = points[0]
    assert pi.limit(x, Side.AT) == pi._limit(QuadraticElement.coerce(x), Side.AT)
