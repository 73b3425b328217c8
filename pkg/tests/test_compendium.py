##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# Tests the compendium of named functions: registry contents, constructors with their expected   #
# properties, convex combinations and emitting entries as files.                                 #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

import json
from fractions import Fraction

import pytest

from src import compendium
from src.errors import InputError
from src.microperturb import CrazyPerturbation
from src.pwfunction import PiecewiseFunction, check_table_consistency
from utils.file_io import load_function_file, load_perturbation_file

##################################################################################################
#                                             TESTS                                              #
##################################################################################################


def test_registry_names():
    """Every entry builds an object of its declared kind."""
    assert set(compendium.REGISTRY) == {
        "gmic",
        "gomory_fractional",
        "kzh_minimal_has_only_crazy_perturbation_1",
        "kzh_crazy_perturbation",
        "gmic_automorphism_average",
        "gmic_automorphism_witness",
    }
    for name, entry in compendium.REGISTRY.items():
        expected_type = CrazyPerturbation if entry.kind == "perturbation" else PiecewiseFunction
        assert isinstance(compendium.build(name), expected_type)


def test_unknown_entry_raises():
    """Unknown names list the known ones."""
    with pytest.raises(InputError, match="known: gmic"):
        compendium.build("nope")


@pytest.mark.parametrize("f", [Fraction(1, 2), Fraction(4, 5), Fraction(2, 3)])
def test_gmic_values(f):
    """pi(0) = 0, pi(f) = 1, continuous, declared slopes consistent."""
    pi = compendium.gmic(f)
    assert pi(0) == 0 and pi(f) == 1
    assert pi.is_continuous()
    assert check_table_consistency(pi).consistent


@pytest.mark.parametrize("f", [0, 1, Fraction(3, 2)])
def test_f_outside_unit_interval(f):
    """f must lie in (0, 1)."""
    with pytest.raises(InputError):
        compendium.gmic(f)


def test_convex_combination():
    """Pointwise lam*pi1 + (1 - lam)*pi2."""
    pi1 = compendium.gmic(Fraction(1, 2))
    pi2 = compendium.gmic_automorphism_average()
    combo = compendium.convex_combination(pi1, pi2, Fraction(1, 3))
    x = Fraction(1, 5)
    assert combo(x) == Fraction(1, 3) * pi1(x) + Fraction(2, 3) * pi2(x)
    assert "1/3*gmic" in combo.name


@pytest.mark.parametrize("lam", [0, 1, Fraction(-1, 2)])
def test_convex_combination_needs_lambda_inside(lam):
    """lam outside (0, 1) is rejected."""
    pi = compendium.gmic(Fraction(1, 2))
    with pytest.raises(InputError):
        compendium.convex_combination(pi, pi, lam)


def test_convex_combination_needs_same_f():
    """Functions with different f cannot be combined."""
    with pytest.raises(InputError):
        compendium.convex_combination(compendium.gmic(Fraction(1, 2)), compendium.gmic(Fraction(4, 5)), Fraction(1, 2))


def test_witness_is_half_difference():
    """average +/- witness gives back the two automorphic functions."""
    average = compendium.gmic_automorphism_average()
    witness = compendium.gmic_automorphism_witness()
    assert [witness.slope(i) for i in range(witness.n)] == [-2, 4, -2, 2, -4, 2]
    assert [average.slope(i) for i in range(average.n)] == [4, -2, 4, -4, 2, -4]
    assert (average(Fraction(1, 6)) + witness(Fraction(1, 6))) == compendium.gmic(Fraction(1, 2))(Fraction(1, 6))


def test_emit_writes_loadable_files(tmp_path, kzh):
    """Function and perturbation entries round-trip through their files."""
    function_path = compendium.emit("kzh_minimal_has_only_crazy_perturbation_1", str(tmp_path / "kzh.json"))
    assert load_function_file(function_path) == kzh
    document = json.loads((tmp_path / "kzh.json").read_text(encoding="utf-8"))
    assert document["f"] == "4/5" and len(document["rows"]) == 40
    perturbation_path = compendium.emit("kzh_crazy_perturbation", str(tmp_path / "crazy.json"))
    p = load_perturbation_file(perturbation_path)
    assert [piece.interval for piece in p.pieces] == [piece.interval for piece in compendium.kzh_crazy_perturbation().pieces]
