##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# Minimality test for piecewise linear functions by finite checks at the vertices of the complex #
# Delta P_B: normalization, range, subadditivity, symmetry and periodic wrap-around. Every       #
# violation is collected; the report is the result, exceptions are reserved for bad input.       #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Tuple

from src.complexes import DeltaComplex, Face2D, map_faces
from src.exactfield import QuadraticElement, Scalar, field_element, format_element
from src.pwfunction import PiecewiseFunction, add_scaled
from utils.logs_config import logger

if TYPE_CHECKING:
    from src.microperturb import CrazyPerturbation

##################################################################################################
#                                        CONFIGURATION                                           #
##################################################################################################

VALUE_AT_0 = "value-at-0"
VALUE_AT_F = "value-at-f"
RANGE = "range"
SUBADDITIVITY = "subadditivity"
SYMMETRY = "symmetry"
PERIODICITY = "periodicity"

##################################################################################################
#                                        IMPLEMENTATION                                          #
##################################################################################################


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: str
    slack: Optional[QuadraticElement] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "witness": self.witness, "slack": None if self.slack is None else format_element(self.slack)}


@dataclass
class MinimalityReport:
    violations: List[Violation] = field(default_factory=list)
    faces_checked: int = 0

    @property
    def is_minimal(self) -> bool:
        return not self.violations

    def kinds(self) -> List[str]:
        return sorted({v.kind for v in self.violations})

    def first(self, kind: str) -> Optional[Violation]:
        return next((v for v in self.violations if v.kind == kind), None)

    def to_dict(self) -> Dict[str, Any]:
        return {"is_minimal": self.is_minimal, "faces_checked": self.faces_checked, "violations": [v.to_dict() for v in self.violations]}


def _point_text(u: QuadraticElement, v: QuadraticElement) -> str:
    return f"({format_element(u)}, {format_element(v)})"


def _is_symmetry_face(F: Face2D, f: QuadraticElement) -> bool:
    return F.K.is_vertex() and (F.K.lo == f or F.K.lo == f + 1)


def _face_violations(complex_: DeltaComplex, F: Face2D) -> List[Violation]:
    out: List[Violation] = []
    symmetric = _is_symmetry_face(F, complex_.pi.f)
    for (u, v), slack in zip(F.vertices, complex_.delta_at_vertices(F)):
        if slack.sign() < 0:
            out.append(Violation(SUBADDITIVITY, f"{F} at {_point_text(u, v)}", slack))
        elif symmetric and not slack.is_zero():
            out.append(Violation(SYMMETRY, f"{F} at {_point_text(u, v)}", slack))
    return out


def _pointwise_violations(pi: PiecewiseFunction) -> List[Violation]:
    out: List[Violation] = []
    if not pi(0).is_zero():
        out.append(Violation(VALUE_AT_0, "x = 0", pi(0)))
    if pi(pi.f) != 1:
        out.append(Violation(VALUE_AT_F, f"x = {format_element(pi.f)}", pi(pi.f) - 1))
    for b in pi.breakpoints:
        for label, value in (("value", b.value), ("left limit", b.left_limit), ("right limit", b.right_limit)):
            if value.sign() < 0 or value > 1:
                out.append(Violation(RANGE, f"{label} at {format_element(b.x)}", value))
    for x in pi.xs:
        total = pi(x) + pi(pi.f - x)
        if total != 1:
            out.append(Violation(SYMMETRY, f"pi({format_element(x)}) + pi(f - {format_element(x)})", total - 1))
    if pi.closing is not None:
        start = pi.breakpoints[0]
        if (pi.closing.value, pi.closing.left_limit, pi.closing.right_limit) != (start.value, start.left_limit, start.right_limit):
            out.append(Violation(PERIODICITY, "datum at 1 differs from datum at 0"))
    return out


def minimality_test(pi: PiecewiseFunction, complex_: Optional[DeltaComplex] = None, threads: int = 1) -> MinimalityReport:
    """
    Decide minimality of pi with finite checks.

    Checks pi(0) = 0, pi(f) = 1, 0 <= pi <= 1 over values and one-sided limits, Delta pi_F >= 0
    at every vertex of every face, Delta pi_F = 0 on the faces of the lines x + y = f and
    x + y = 1 + f, pointwise symmetry at the breakpoints and the closing datum when present.
    """
    complex_ = complex_ if complex_ is not None and complex_.pi is pi else DeltaComplex(pi)
    report = MinimalityReport(violations=_pointwise_violations(pi), faces_checked=len(complex_.faces))
    for found in map_faces(lambda F: _face_violations(complex_, F), complex_.faces, threads):
        report.violations.extend(found)
    logger.debug(f"[minimality] {pi.name or 'function'}: {len(report.violations)} violations over {report.faces_checked} faces")
    return report


def _vertex_level_violations(pi: PiecewiseFunction, perturbation: "CrazyPerturbation", eps: QuadraticElement, complex_: DeltaComplex) -> List[Violation]:
    from src.microperturb import evaluate_crazy

    def h(x: QuadraticElement) -> QuadraticElement:
        return pi(x) + eps * evaluate_crazy(perturbation, x)

    out: List[Violation] = []
    f = pi.f
    for F in complex_.faces:
        for u, v in F.vertices:
            slack = h(u) + h(v) - h(u + v)
            if slack.sign() < 0:
                out.append(Violation(SUBADDITIVITY, f"pointwise at {_point_text(u, v)}", slack))
            elif (u + v == f or u + v == f + 1) and not slack.is_zero():
                out.append(Violation(SYMMETRY, f"pointwise at {_point_text(u, v)}", slack))
    return out


def perturbed_minimality(pi: PiecewiseFunction, perturbation: "CrazyPerturbation", eps: Scalar) -> Tuple[MinimalityReport, MinimalityReport]:
    """
    Re-verify pi + eps*perturbation and pi - eps*perturbation.

    The piecewise linear part goes through minimality_test on the common refinement; the micro
    part is added pointwise at every vertex of that refinement.
    """
    eps = field_element(eps, pi.d)
    reports = []
    for signed in (eps, -eps):
        shifted = add_scaled(pi, perturbation.pwl, signed)
        complex_ = DeltaComplex(shifted)
        report = minimality_test(shifted, complex_)
        report.violations.extend(_vertex_level_violations(shifted, perturbation.without_pwl(), signed, complex_))
        reports.append(report)
    logger.info(f"[minimality] pi +/- {format_element(eps)}*perturbation: {'minimal' if all(r.is_minimal for r in reports) else 'not minimal'}")
    return reports[0], reports[1]
