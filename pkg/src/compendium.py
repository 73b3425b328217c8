##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# Constructors for concrete functions and certificates: the Gomory mixed-integer function, the   #
# Gomory fractional cut, the two-sided discontinuous function over Q(sqrt(2)) whose only         #
# effective perturbations are microperiodic, its certificate of non-extremality, and a convex    #
# combination fixture that is minimal but not extreme.                                           #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Union

from src.errors import InputError
from src.exactfield import QuadraticElement, Scalar, field_element, parse_element
from src.microperturb import CrazyPerturbation, DenseGroup, MicroPiece
from src.pwfunction import BreakpointDatum, PiecewiseFunction, add_scaled, compose_with_multiplication

##################################################################################################
#                                        CONFIGURATION                                           #
##################################################################################################

KZH_NAME = "kzh_minimal_has_only_crazy_perturbation_1"

C1 = "35/13"
C2 = "5/11999"
C3 = "-5"

# (x, left limit, value, right limit, slope on (x_i, x_{i+1})); None means the limit equals the value
KZH_TABLE = [
    ("0", "101/650", "0", "101/650", C3),
    ("101/5000", "707/13000", "2727/13000", "707/13000", C1),
    ("60153/369200", None, "421071/959920", None, C3),
    ("849/5000", "4851099/11999000", "-1925/71994*sqrt(2)+4851099/11999000", "4851099/11999000", C1),
    ("1925/298129*sqrt(2)+849/5000", None, "67375/3875677*sqrt(2)+4851099/11999000", None, C3),
    ("77/7752*sqrt(2)+849/5000", "385/93016248*sqrt(2)+4851099/11999000", "2695/100776*sqrt(2)+4851099/11999000", "385/93016248*sqrt(2)+4851099/11999000", C1),
    ("19/100", "-1925/71994*sqrt(2)+275183/599950", "18196/59995", "-1925/71994*sqrt(2)+275183/599950", C1),
    ("77/22152*sqrt(2)+281986521/1490645000", None, "-385/22152*sqrt(2)+10467633/22933000", None, C3),
    ("40294/201875", "848837/2099500", "795836841/1937838500", "848837/2099500", C1),
    ("36999/184600", None, "975607/2399800", None, C3),
    ("77/7752*sqrt(2)+19/100", "-385/7752*sqrt(2)+275183/599950", "385/93016248*sqrt(2)+18196/59995", "-385/7752*sqrt(2)+275183/599950", C3),
    ("1051/5000", "4291761/11999000", "-1925/71994*sqrt(2)+4291761/11999000", "4291761/11999000", C1),
    ("1925/298129*sqrt(2)+1051/5000", None, "67375/3875677*sqrt(2)+4291761/11999000", None, C3),
    ("14199/64600", "192500/3875677*sqrt(2)+240046061/775135400", "50943/167960", "192500/3875677*sqrt(2)+240046061/775135400", C3),
    ("77/7752*sqrt(2)+1051/5000", "385/93016248*sqrt(2)+4291761/11999000", "2695/100776*sqrt(2)+4291761/11999000", "385/93016248*sqrt(2)+4291761/11999000", C1),
    ("77/22152*sqrt(2)+342208579/1490645000", None, "-385/22152*sqrt(2)+122181831/298129000", None, C3),
    ("193799/807500", None, "187742/524875", None, C1),
    ("219/800", None, "933/2080", "51443/147680", C2),
    ("269/800", "668809/1919840", "683/2080", None, C1),
    ("371/800", None, "1397/2080", "1251031/1919840", C2),
    ("421/800", "96237/147680", "1147/2080", None, C1),
    ("452201/807500", None, "337133/524875", None, C3),
    ("-77/22152*sqrt(2)+850307421/1490645000", None, "385/22152*sqrt(2)+175947169/298129000", None, C1),
    ("-77/7752*sqrt(2)+2949/5000", "-385/93016248*sqrt(2)+7707239/11999000", "-2695/100776*sqrt(2)+7707239/11999000", "-385/93016248*sqrt(2)+7707239/11999000", C3),
    ("37481/64600", "-192500/3875677*sqrt(2)+535089339/775135400", "117017/167960", "-192500/3875677*sqrt(2)+535089339/775135400", C3),
    ("-1925/298129*sqrt(2)+2949/5000", None, "-67375/3875677*sqrt(2)+7707239/11999000", None, C1),
    ("2949/5000", "7707239/11999000", "1925/71994*sqrt(2)+7707239/11999000", "7707239/11999000", C3),
    ("-77/7752*sqrt(2)+61/100", "385/7752*sqrt(2)+324767/599950", "-385/93016248*sqrt(2)+41799/59995", "385/7752*sqrt(2)+324767/599950", C3),
    ("110681/184600", None, "1424193/2399800", None, C1),
    ("121206/201875", "1250663/2099500", "1142001659/1937838500", "1250663/2099500", C3),
    ("-77/22152*sqrt(2)+910529479/1490645000", None, "385/22152*sqrt(2)+12465367/22933000", None, C1),
    ("61/100", "1925/71994*sqrt(2)+324767/599950", "41799/59995", "1925/71994*sqrt(2)+324767/599950", C1),
    ("-77/7752*sqrt(2)+3151/5000", "-385/93016248*sqrt(2)+7147901/11999000", "-2695/100776*sqrt(2)+7147901/11999000", "-385/93016248*sqrt(2)+7147901/11999000", C3),
    ("-1925/298129*sqrt(2)+3151/5000", None, "-67375/3875677*sqrt(2)+7147901/11999000", None, C1),
    ("3151/5000", "7147901/11999000", "1925/71994*sqrt(2)+7147901/11999000", "7147901/11999000", C3),
    ("235207/369200", None, "538849/959920", None, C1),
    ("3899/5000", "12293/13000", "10273/13000", "12293/13000", C3),
    ("4/5", "549/650", "1", "549/650", C1),
    ("4101/5000", "899/1000", "9667/13000", "899/1000", C3),
    ("4899/5000", "101/1000", "3333/13000", "101/1000", C1),
]
KZH_CLOSING = ("1", "101/650", "0", "101/650")

KZH_F = "4/5"
KZH_L = "219/800"
KZH_U = "269/800"
KZH_T1 = "77/7752*sqrt(2)"
KZH_T2 = "77/2584"

##################################################################################################
#                                        IMPLEMENTATION                                          #
##################################################################################################


def _datum(x: str, left: Optional[str], value: str, right: Optional[str]) -> BreakpointDatum:
    v = parse_element(value)
    return BreakpointDatum(parse_element(x), v, v if left is None else parse_element(left), v if right is None else parse_element(right))


def _unit_f(f: Scalar) -> QuadraticElement:
    f = field_element(f)
    if not (0 < f < 1):
        raise InputError(f"f must lie in (0, 1), got {f}")
    return f


def gmic(f: Scalar = Fraction(4, 5)) -> PiecewiseFunction:
    """Continuous two-slope function through pi(0) = 0, pi(f) = 1, pi(1) = 0."""
    f = _unit_f(f)
    zero, one = QuadraticElement.coerce(0, f.d), QuadraticElement.coerce(1, f.d)
    data = [BreakpointDatum.continuous(zero, zero), BreakpointDatum.continuous(f, one)]
    return PiecewiseFunction(f, data, slopes=[1 / f, -1 / (1 - f)], name="gmic", d=f.d)


def gomory_fractional(f: Scalar = Fraction(4, 5)) -> PiecewiseFunction:
    """Sawtooth frac(x)/f: value 0 at the integers, left limit 1/f."""
    f = _unit_f(f)
    zero, one = QuadraticElement.coerce(0, f.d), QuadraticElement.coerce(1, f.d)
    data = [BreakpointDatum(zero, zero, 1 / f, zero), BreakpointDatum.continuous(f, one)]
    return PiecewiseFunction(f, data, slopes=[1 / f, 1 / f], name="gomory_fractional", d=f.d)


def kzh_minimal_has_only_crazy_perturbation_1() -> PiecewiseFunction:
    """The 40-breakpoint two-sided discontinuous function over Q(sqrt(2)), f = 4/5."""
    data = [_datum(x, left, value, right) for x, left, value, right, _ in KZH_TABLE]
    slopes = [parse_element(row[4]) for row in KZH_TABLE]
    return PiecewiseFunction(parse_element(KZH_F), data, slopes=slopes, closing=_datum(*KZH_CLOSING), name=KZH_NAME)


def kzh_crazy_perturbation() -> CrazyPerturbation:
    """+1/-1 on the cosets of l, u and f-u, f-l under <t1, t2>, zero piecewise linear part."""
    f, lo, hi = parse_element(KZH_F), parse_element(KZH_L), parse_element(KZH_U)
    zero, one = QuadraticElement.coerce(0), QuadraticElement.coerce(1)
    pwl = PiecewiseFunction(f, [BreakpointDatum.continuous(zero, zero)], name="zero")
    group = DenseGroup([parse_element(KZH_T1), parse_element(KZH_T2)])
    pieces = [
        MicroPiece(lo, hi, ((lo, one), (hi, -one))),
        MicroPiece(f - hi, f - lo, ((f - hi, one), (f - lo, -one))),
    ]
    return CrazyPerturbation(pwl, pieces, group, name="kzh_crazy_perturbation")


def convex_combination(pi1: PiecewiseFunction, pi2: PiecewiseFunction, lam: Union[int, Fraction]) -> PiecewiseFunction:
    """lam*pi1 + (1 - lam)*pi2 over the common refinement."""
    if pi1.f != pi2.f:
        raise InputError("convex combination needs functions with the same f")
    lam = Fraction(lam)
    if not (0 < lam < 1):
        raise InputError(f"lambda must lie in (0, 1), got {lam}")
    out = add_scaled(pi1.scale(lam), pi2, 1 - lam)
    out.name = f"{lam}*{pi1.name or 'pi1'} + {1 - lam}*{pi2.name or 'pi2'}"
    return out


def _automorphism_pair() -> List[PiecewiseFunction]:
    pi1 = gmic(Fraction(1, 2))
    pi2 = compose_with_multiplication(pi1, 3)
    pi2.name = "gmic(1/2) o 3x"
    return [pi1, pi2]


def gmic_automorphism_average() -> PiecewiseFunction:
    """(pi1 + pi2)/2 for pi1 = gmic(1/2) and pi2(x) = pi1(3x mod 1): minimal, not extreme."""
    pi1, pi2 = _automorphism_pair()
    out = convex_combination(pi1, pi2, Fraction(1, 2))
    out.name = "gmic_automorphism_average"
    return out


def gmic_automorphism_witness() -> PiecewiseFunction:
    """(pi1 - pi2)/2: an effective perturbation of gmic_automorphism_average."""
    pi1, pi2 = _automorphism_pair()
    out = add_scaled(pi1.scale(Fraction(1, 2)), pi2, Fraction(-1, 2))
    out.name = "gmic_automorphism_witness"
    return out


@dataclass(frozen=True)
class CompendiumEntry:
    name: str
    kind: str  # "function" or "perturbation"
    build: Callable[[], Union[PiecewiseFunction, CrazyPerturbation]]
    description: str
    expected: Dict[str, bool] = field(default_factory=dict)


REGISTRY: Dict[str, CompendiumEntry] = {
    entry.name: entry
    for entry in (
        CompendiumEntry("gmic", "function", gmic, "Gomory mixed-integer function, f = 4/5", {"minimal": True, "extreme": True}),
        CompendiumEntry("gomory_fractional", "function", gomory_fractional, "Gomory fractional cut frac(x)/f, f = 4/5", {"minimal": False}),
        CompendiumEntry(KZH_NAME, "function", kzh_minimal_has_only_crazy_perturbation_1, "two-sided discontinuous function over Q(sqrt(2)), f = 4/5", {"minimal": True, "extreme_relative_to_pwc": True, "has_crazy_perturbation": True}),
        CompendiumEntry("kzh_crazy_perturbation", "perturbation", kzh_crazy_perturbation, "microperiodic certificate of non-extremality for " + KZH_NAME, {"effective": True}),
        CompendiumEntry("gmic_automorphism_average", "function", gmic_automorphism_average, "(gmic(1/2) + gmic(1/2) o 3x) / 2", {"minimal": True, "extreme": False}),
        CompendiumEntry("gmic_automorphism_witness", "function", gmic_automorphism_witness, "(gmic(1/2) - gmic(1/2) o 3x) / 2, a perturbation of the average", {}),
    )
}


def build(name: str) -> Union[PiecewiseFunction, CrazyPerturbation]:
    entry = REGISTRY.get(name)
    if entry is None:
        raise InputError(f"unknown compendium entry {name!r}; known: {', '.join(sorted(REGISTRY))}")
    return entry.build()


def emit(name: str, path: str) -> str:
    """Write the named entry as a function or perturbation file; returns the path."""
    from utils.file_io import save_function_file, save_perturbation_file

    obj = build(name)
    if isinstance(obj, CrazyPerturbation):
        save_perturbation_file(obj, path)
    else:
        save_function_file(obj, path)
    return path
