##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# End-to-end runs of the verification pipeline on the two-sided discontinuous function and its  #
# certificate: minimality, covering with the dense merge, extremality relative to piecewise      #
# continuous perturbations and the certificate check with re-verification at eps = 3/10000.      #
# Also covers environment settings and plot rows.                                                #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

import json

import pytest

from src import compendium, pipeline
from src.pipeline import Settings, plot_rows, run_covering, run_extremality, run_minimality, run_verify_perturbation

##################################################################################################
#                                             TESTS                                              #
##################################################################################################


def test_kzh_minimality_run(kzh_file):
    """Minimal and table-consistent."""
    result = run_minimality(kzh_file, threads=2)
    assert result.exit_code == 0
    assert result.document["table_consistent"] is True
    assert result.document["breakpoints"] == 40
    assert result.lines[-1] == "minimal: true"
    json.dumps(result.document)


def test_kzh_covering_run(kzh_file):
    """The protocol reports the dense merge of (l, u)."""
    result = run_covering(kzh_file, assume_pwc=True)
    assert result.exit_code == 0
    assert any(line.startswith("Dense merge of (219/800, 269/800)") for line in result.lines)
    assert "Uncovered intervals: none" in result.lines


def test_kzh_extremality_run(kzh_file):
    """Dimension 0 relative to piecewise continuous perturbations."""
    result = run_extremality(kzh_file, assume_pwc=True)
    assert result.exit_code == 0
    assert "Dimension: 0" in result.lines
    assert result.lines[-1] == "Verdict: extreme"
    assert result.document["verdict"] == "extreme"
    json.dumps(result.document)


def test_kzh_certificate_run(kzh_file, kzh_crazy_file):
    """Effective, eps above 3/10000 and pi +/- 3/10000 * perturbation minimal."""
    result = run_verify_perturbation(kzh_file, kzh_crazy_file, recheck="3/10000")
    assert result.exit_code == 0, result.lines
    assert result.lines[0] == "effective: yes"
    epsilon = next(line for line in result.lines if line.startswith("epsilon: "))
    assert "~ 0.000395866" in epsilon
    assert result.lines[-1] == "pi +/- 3/10000*perturbation minimal: true"
    assert result.document["recheck"]["plus"]["is_minimal"] is True
    json.dumps(result.document)


def test_settings_from_env(monkeypatch):
    """GJ_* variables with fallbacks for invalid values."""
    monkeypatch.setenv("GJ_THREADS", "4")
    monkeypatch.setenv("GJ_ASSUME_PWC", "yes")
    monkeypatch.setenv("GJ_OUTPUT_DIR", "somewhere")
    assert Settings.from_env() == Settings(threads=4, assume_pwc=True, output_dir="somewhere")
    monkeypatch.setenv("GJ_THREADS", "abc")
    monkeypatch.setenv("GJ_ASSUME_PWC", "maybe")
    assert Settings.from_env().threads == 1
    assert Settings.from_env().assume_pwc is False
    monkeypatch.setenv("GJ_THREADS", "0")
    assert Settings.from_env().threads == 1


def test_assume_pwc_defaults_to_env(monkeypatch, gmic_file):
    """Without an explicit flag the covering run follows GJ_ASSUME_PWC."""
    monkeypatch.setenv("GJ_ASSUME_PWC", "true")
    assert run_covering(gmic_file).document["assume_pwc"] is True
    monkeypatch.setenv("GJ_ASSUME_PWC", "false")
    assert run_covering(gmic_file).document["assume_pwc"] is False


@pytest.mark.parametrize("samples", [0, 2])
def test_plot_rows(samples):
    """Breakpoints with limits plus evenly spaced interior samples."""
    pi = compendium.gomory_fractional()
    rows = plot_rows(pi, samples)
    assert len(rows) == pi.n * (samples + 1) + 1
    first = rows[0]
    assert first["kind"] == "breakpoint" and first["note"] == "0"
    assert float(first["left_decimal"]) == pytest.approx(1.25)
    assert float(first["right_decimal"]) == 0


def test_compendium_runs(tmp_path):
    """list and emit return documents."""
    listing = pipeline.run_compendium_list()
    assert {e["name"] for e in listing.document["entries"]} == set(compendium.REGISTRY)
    emitted = pipeline.run_compendium_emit("gmic_automorphism_average", str(tmp_path / "avg.json"))
    assert (tmp_path / "avg.json").exists()
    assert emitted.document["name"] == "gmic_automorphism_average"
