##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# Tests error and warning edge cases for utils.file_io module.                                   #
# Covers missing files, malformed JSON, schema and element-syntax errors, radicand mismatches,   #
# rows that do not describe a function, perturbation files and the CSV writer.                   #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

import json
from fractions import Fraction

import pandas as pd
import pytest
from pydantic import ValidationError

from src import compendium
from src.errors import InputError
from utils import file_io

##################################################################################################
#                                             TESTS                                              #
##################################################################################################


def _write(tmp_path, name, document) -> str:
    path = tmp_path / name
    path.write_text(json.dumps(document) if not isinstance(document, str) else document, encoding="utf-8")
    return str(path)


def test_missing_function_file(tmp_path):
    """Missing file → FileNotFoundError."""
    with pytest.raises(FileNotFoundError):
        file_io.load_function_file(str(tmp_path / "nope.json"))


def test_malformed_json(tmp_path):
    """Broken JSON → ValidationError."""
    path = _write(tmp_path, "broken.json", '{"f": "4/5", "rows": [')
    with pytest.raises(ValidationError):
        file_io.load_function_file(path)


def test_integers_are_element_text(tmp_path):
    """0 and 1 may be written as JSON numbers."""
    path = _write(tmp_path, "ints.json", {"f": "1/2", "rows": [{"x": 0, "value": 0}, {"x": "1/2", "value": 1}]})
    pi = file_io.load_function_file(path)
    assert pi.n == 2
    assert pi.xs[1] == Fraction(1, 2) and pi(pi.xs[1]) == 1


@pytest.mark.parametrize(
    "document, message",
    [
        ({"rows": [{"x": "0", "value": "0"}]}, "f"),
        ({"f": "4/5", "rows": []}, "rows"),
        ({"f": "4/5", "rows": [{"x": "0"}]}, "value"),
        ({"f": "4/5", "rows": [{"x": "0", "value": "zero"}]}, "zero"),
        ({"f": "4/5", "rows": [{"x": "0", "value": "0", "left": "1//2"}]}, "1//2"),
        ({"d": 2, "f": "4/5", "rows": [{"x": "0", "value": "sqrt(3)"}]}, "declares d = 2"),
    ],
    ids=["missing f", "no rows", "missing value", "bad element", "bad limit", "other radicand"],
)
def test_schema_errors(tmp_path, document, message):
    """Schema and element problems surface as ValidationError naming the culprit."""
    path = _write(tmp_path, "bad.json", document)
    with pytest.raises(ValidationError, match=message):
        file_io.load_function_file(path)


def test_rows_must_start_at_zero(tmp_path):
    """Valid JSON that is not a function on [0, 1) → InputError."""
    path = _write(tmp_path, "shifted.json", {"f": "4/5", "rows": [{"x": "1/10", "value": "0"}]})
    with pytest.raises(InputError, match="first breakpoint"):
        file_io.load_function_file(path)


def test_function_file_round_trip(tmp_path, kzh):
    """Saved files load back to the same function with declared slopes and closing row."""
    path = str(tmp_path / "out" / "kzh.json")
    file_io.save_function_file(kzh, path)
    loaded = file_io.load_function_file(path)
    assert loaded == kzh
    assert loaded.declared_slopes == kzh.declared_slopes
    assert loaded.closing == kzh.closing
    assert loaded.name == kzh.name


def test_perturbation_file(kzh_crazy_file, kzh_crazy):
    """The certificate file keeps group, intervals and coset values."""
    p = file_io.load_perturbation_file(kzh_crazy_file)
    assert p.group.generators == kzh_crazy.group.generators
    assert p.pieces == kzh_crazy.pieces
    assert p.pwl.is_zero()


def test_perturbation_file_field_must_match(kzh_crazy_file):
    """A certificate over sqrt(2) is refused for a function over sqrt(3)."""
    with pytest.raises(InputError, match="declares d = 2"):
        file_io.load_perturbation_file(kzh_crazy_file, d=3)
    assert file_io.load_perturbation_file(kzh_crazy_file, d=2).group.generators


def test_perturbation_file_needs_group(tmp_path):
    """An empty generator list → ValidationError."""
    document = json.loads(file_io.PerturbationFile.from_perturbation(compendium.kzh_crazy_perturbation()).model_dump_json())
    document["group"] = []
    with pytest.raises(ValidationError, match="group"):
        file_io.load_perturbation_file(_write(tmp_path, "nogroup.json", document))


def test_write_csv_empty_data(tmp_path, caplog):
    """Writing empty dataset logs a warning and creates no file."""
    out_file = tmp_path / "empty.csv"
    file_io.write_output_csv(str(out_file), [])
    assert not out_file.exists()
    assert any("No data" in rec.message for rec in caplog.records)


def test_write_csv_keeps_column_order(tmp_path):
    """Columns follow the key order of the first row."""
    out_file = tmp_path / "nested" / "rows.csv"
    file_io.write_output_csv(str(out_file), [{"kind": "breakpoint", "x_decimal": "0"}, {"kind": "sample", "x_decimal": "0.5"}])
    df = pd.read_csv(out_file, dtype=str)
    assert list(df.columns) == ["kind", "x_decimal"]
    assert df["kind"].tolist() == ["breakpoint", "sample"]
