##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# Runs shared by the CLI and the HTTP front end: load files, run one verification stage and      #
# return the report as a JSON-shaped document plus the text protocol and the exit code. Worker   #
# threads, the piecewise continuity default and the output directory come from the environment. #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

import os
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from src import compendium
from src.complexes import DeltaComplex, additive_polygons_rows, face_document
from src.covering import generate_covered_components, interval_text
from src.exactfield import QuadraticElement, format_element, parse_element
from src.microperturb import CrazyPerturbation, verify_perturbation
from src.minimality import minimality_test, perturbed_minimality
from src.perturbation_space import extremality_test_pwc
from src.pwfunction import PiecewiseFunction, Side, check_table_consistency
from utils.file_io import load_function_file, load_perturbation_file, write_output_csv
from utils.logs_config import log_completion

##################################################################################################
#                                        CONFIGURATION                                           #
##################################################################################################

# .env loader
try:
    from dotenv import load_dotenv

    load_dotenv()
except Exception:
    pass

DIGITS = 30
PLOT_SAMPLES = 4

##################################################################################################
#                                        IMPLEMENTATION                                          #
##################################################################################################


def _env_int(key: str, default: int) -> int:
    try:
        return int(os.getenv(key, str(default)))
    except ValueError:
        return default


def _env_bool(key: str, default: bool) -> bool:
    raw = os.getenv(key)
    if raw is None:
        return default
    raw = raw.strip().lower()
    if raw in {"1", "true", "yes", "on"}:
        return True
    if raw in {"0", "false", "no", "off"}:
        return False
    return default


@dataclass(frozen=True)
class Settings:
    threads: int = 1
    assume_pwc: bool = False
    output_dir: str = "outputs"

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            threads=max(1, _env_int("GJ_THREADS", 1)),
            assume_pwc=_env_bool("GJ_ASSUME_PWC", False),
            output_dir=os.getenv("GJ_OUTPUT_DIR", "outputs"),
        )


@dataclass
class RunResult:
    """Outcome of one run: exit code (0 yes, 1 no), JSON-shaped document and text protocol."""

    command: str
    exit_code: int
    document: Dict[str, Any]
    lines: List[str] = field(default_factory=list)
    duration_s: float = 0.0


def _threads(threads: Optional[int]) -> int:
    return Settings.from_env().threads if threads is None else max(1, threads)


def _show(x: Optional[QuadraticElement]) -> str:
    return "none" if x is None else f"{format_element(x)} ~ {x.to_decimal(DIGITS)}"


def _timed(result: RunResult, start: float) -> RunResult:
    result.duration_s = log_completion(result.command, start, exit=result.exit_code)
    return result


# ---------------------------------------------------------------- minimality


def run_minimality(function_path: str, threads: Optional[int] = None) -> RunResult:
    pi = load_function_file(function_path)
    start = time.perf_counter()
    report = minimality_test(pi, threads=_threads(threads))
    consistency = check_table_consistency(pi)
    document = {"command": "minimality", "function": pi.name, "breakpoints": pi.n, "table_consistent": consistency.consistent, **report.to_dict()}
    lines = [f"function: {pi.name or function_path}", f"breakpoints: {pi.n}", f"faces checked: {report.faces_checked}"]
    if not consistency.consistent:
        lines += [f"table inconsistency: {v}" for v in consistency.violations]
    lines += [f"violation: {v.kind} at {v.witness}" + ("" if v.slack is None else f" (slack {format_element(v.slack)})") for v in report.violations]
    lines.append(f"minimal: {'true' if report.is_minimal else 'false'}")
    return _timed(RunResult("minimality", 0 if report.is_minimal else 1, document, lines), start)


# ---------------------------------------------------------------- covering and extremality


def _assume_pwc(assume_pwc: Optional[bool]) -> bool:
    return Settings.from_env().assume_pwc if assume_pwc is None else assume_pwc


def run_covering(function_path: str, assume_pwc: Optional[bool] = None) -> RunResult:
    pi = load_function_file(function_path)
    start = time.perf_counter()
    protocol = generate_covered_components(pi, _assume_pwc(assume_pwc))
    lines = protocol.lines()
    for e in protocol.evidence:
        lines.append(f"Dense merge of {interval_text(e.interval)}: independent generators {format_element(e.independent_pair[0])}, {format_element(e.independent_pair[1])}; convergents {', '.join(f'{p}/{q}' for p, q in e.convergents)}")
    document = {"command": "covering", "function": pi.name, **protocol.to_dict()}
    return _timed(RunResult("covering", 0, document, lines), start)


def run_extremality(function_path: str, assume_pwc: Optional[bool] = None, threads: Optional[int] = None) -> RunResult:
    pi = load_function_file(function_path)
    start = time.perf_counter()
    threads = _threads(threads)
    complex_ = DeltaComplex(pi)
    minimality = minimality_test(pi, complex_, threads)
    if not minimality.is_minimal:
        document = {"command": "extremality", "function": pi.name, "verdict": "not minimal", "minimality": minimality.to_dict()}
        lines = [f"violation: {v.kind} at {v.witness}" for v in minimality.violations] + ["Verdict: not minimal"]
        return _timed(RunResult("extremality", 1, document, lines), start)
    report = extremality_test_pwc(pi, _assume_pwc(assume_pwc), complex_, threads)
    lines = report.covering.lines()
    lines.append(f"Parameters: {report.parameters}")
    lines.append(f"Equations: {len(report.system.rows)} (rank {report.system.rank})")
    lines += [f"  {eq}" for eq in report.to_dict()["full_rank_equations"]]
    if report.unknown_slopes:
        lines.append(f"Unknown slopes: {report.unknown_slopes}")
    lines.append(f"Dimension: {report.dimension}")
    for k, (p, eps) in enumerate(zip(report.perturbations, report.epsilons)):
        lines.append(f"Perturbation {k + 1} (epsilon {_show(eps)}):")
        lines += [f"  {row}" for row in p.to_rows()]
    lines.append(f"Verdict: {report.verdict}")
    document = {"command": "extremality", "function": pi.name, **report.to_dict()}
    return _timed(RunResult("extremality", 0 if report.is_extreme else 1, document, lines), start)


# ---------------------------------------------------------------- certificates


def run_verify_perturbation(function_path: str, perturbation_path: str, threads: Optional[int] = None, recheck: Optional[str] = None) -> RunResult:
    """Verify the certificate; with `recheck`, also re-verify pi +/- recheck*perturbation."""
    pi = load_function_file(function_path)
    p = load_perturbation_file(perturbation_path, d=pi.d)
    start = time.perf_counter()
    report = verify_perturbation(pi, p, threads=_threads(threads))
    document = {"command": "verify-perturbation", "function": pi.name, "perturbation": p.name, **report.to_dict(DIGITS)}
    lines = [f"effective: {'yes' if report.is_effective else 'no'}"]
    if report.witness is not None:
        lines += [f"witness {key}: {value}" for key, value in report.witness.items()]
    if report.is_effective:
        lines += [f"m: {_show(report.m)}", f"M_hat: {_show(report.M_hat)}", "epsilon: " + ("unbounded" if report.unbounded else _show(report.epsilon))]
    ok = report.is_effective
    if recheck is not None and report.is_effective:
        eps = parse_element(recheck, pi.d)
        plus, minus = perturbed_minimality(pi, p, eps)
        both = plus.is_minimal and minus.is_minimal
        document["recheck"] = {"epsilon": format_element(eps), "plus": plus.to_dict(), "minus": minus.to_dict()}
        lines.append(f"pi +/- {format_element(eps)}*perturbation minimal: {'true' if both else 'false'}")
        ok = ok and both
    return _timed(RunResult("verify-perturbation", 0 if ok else 1, document, lines), start)


# ---------------------------------------------------------------- complex and plot data


def run_show_complex(function_path: str, csv_path: Optional[str] = None) -> RunResult:
    pi = load_function_file(function_path)
    start = time.perf_counter()
    complex_ = DeltaComplex(pi)
    faces = [face_document(complex_, F) for F in complex_.faces]
    lines = [
        f"F({doc['I']}, {doc['J']}, {doc['K']}) dim {doc['dim']}{' additive' if doc['additive'] else ''}: "
        + "; ".join(f"({u}, {v}) -> {delta}" for (u, v), delta in zip(doc["vertices"], doc["delta"]))
        for doc in faces
    ]
    document: Dict[str, Any] = {"command": "show-complex", "function": pi.name, "faces": faces}
    if csv_path is not None:
        write_output_csv(csv_path, additive_polygons_rows(complex_, DIGITS))
        document["csv"] = csv_path
        lines.append(f"additive polygons → {csv_path}")
    return _timed(RunResult("show-complex", 0, document, lines), start)


def plot_rows(pi: PiecewiseFunction, samples: int = PLOT_SAMPLES) -> List[Dict[str, str]]:
    """Breakpoint markers and interior samples; decimal columns are for display only."""
    rows = []
    for i, (lo, hi) in enumerate(pi.intervals()):
        rows.append({"kind": "breakpoint", "x_decimal": lo.to_decimal(DIGITS), "value_decimal": pi(lo).to_decimal(DIGITS), "left_decimal": pi.limit(lo, Side.LEFT).to_decimal(DIGITS), "right_decimal": pi.limit(lo, Side.RIGHT).to_decimal(DIGITS), "note": format_element(lo)})
        for k in range(1, samples + 1):
            x = lo + (hi - lo) * k / (samples + 1)
            y = pi(x).to_decimal(DIGITS)
            rows.append({"kind": "sample", "x_decimal": x.to_decimal(DIGITS), "value_decimal": y, "left_decimal": y, "right_decimal": y, "note": ""})
    one = QuadraticElement.coerce(1, pi.d)
    rows.append({"kind": "breakpoint", "x_decimal": one.to_decimal(DIGITS), "value_decimal": pi(one).to_decimal(DIGITS), "left_decimal": pi.limit(one, Side.LEFT).to_decimal(DIGITS), "right_decimal": pi.limit(one, Side.RIGHT).to_decimal(DIGITS), "note": "1"})
    return rows


def coset_rows(p: CrazyPerturbation) -> List[Dict[str, str]]:
    """Micro parts as coset metadata: they are not sampled pointwise."""
    generators = ", ".join(format_element(t) for t in p.group.generators)
    return [
        {"kind": "coset", "x_decimal": b.to_decimal(DIGITS), "value_decimal": c.to_decimal(DIGITS), "left_decimal": "", "right_decimal": "", "note": f"{format_element(b)} + <{generators}>_Z on ({format_element(piece.lo)}, {format_element(piece.hi)}) has value {format_element(c)}"}
        for piece in p.pieces
        for b, c in piece.cosets
    ]


def run_plot_data(input_path: str, output_csv: str, perturbation: bool = False, samples: int = PLOT_SAMPLES) -> RunResult:
    start = time.perf_counter()
    if perturbation:
        p = load_perturbation_file(input_path)
        rows = plot_rows(p.pwl, samples) + coset_rows(p)
    else:
        rows = plot_rows(load_function_file(input_path), samples)
    write_output_csv(output_csv, rows)
    document = {"command": "plot-data", "rows": len(rows), "output_path": output_csv}
    return _timed(RunResult("plot-data", 0, document, [f"rows written: {len(rows)} → {output_csv}"]), start)


# ---------------------------------------------------------------- compendium


def run_compendium_list() -> RunResult:
    entries = [{"name": e.name, "kind": e.kind, "description": e.description, "expected": e.expected} for e in compendium.REGISTRY.values()]
    lines = [f"{e['name']}  [{e['kind']}]  {e['description']}" for e in entries]
    return RunResult("compendium", 0, {"command": "compendium list", "entries": entries}, lines)


def run_compendium_emit(name: str, output_path: str) -> RunResult:
    path = compendium.emit(name, output_path)
    return RunResult("compendium", 0, {"command": "compendium emit", "name": name, "output_path": path}, [f"{name} → {path}"])
