##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# Finite-dimensional perturbation test. A piecewise linear perturbation over P_B is described    #
# by one slope per covered component and a value plus one-sided limits at every breakpoint. The  #
# tight faces of Delta P, the normalization and symmetry give a homogeneous linear system over   #
# the field; its nullspace is the space of piecewise linear effective perturbations.             #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.complexes import DeltaComplex, Face2D, delta_pi_limit
from src.covering import CoveringProtocol, ComponentSet, generate_covered_components, interval_text
from src.errors import PreconditionError, UnresolvedIntervalsError
from src.exactfield import QuadraticElement, format_element
from src.minimality import minimality_test
from src.pwfunction import BreakpointDatum, PiecewiseFunction, Side
from utils.logs_config import logger

##################################################################################################
#                                        CONFIGURATION                                           #
##################################################################################################

LinearForm = Dict[int, QuadraticElement]

EXTREME = "extreme"
NOT_EXTREME = "not extreme"
INCONCLUSIVE = "inconclusive"

##################################################################################################
#                                        IMPLEMENTATION                                          #
##################################################################################################


def _axpy(target: LinearForm, coef: QuadraticElement, source: LinearForm) -> None:
    """target += coef * source, dropping zero entries."""
    for var, value in source.items():
        updated = target.get(var, QuadraticElement.coerce(0)) + coef * value
        if updated.is_zero():
            target.pop(var, None)
        else:
            target[var] = updated


def _form_text(form: LinearForm, names: Sequence[str]) -> str:
    terms = []
    for var in sorted(form):
        coef = form[var]
        terms.append(f"{names[var]}" if coef == 1 else f"-{names[var]}" if coef == -1 else f"({format_element(coef)})*{names[var]}")
    return " + ".join(terms).replace("+ -", "- ") + " = 0" if terms else "0 = 0"


class SymbolicPerturbation:
    """
    Unknowns of a piecewise linear perturbation over the breakpoints of pi.

    Parameters are the component slopes, one slope per acknowledged uncovered interval, and per
    breakpoint the value and the two one-sided limits. A one-sided limit is identified with the
    value where pi is continuous from that side.
    """

    def __init__(self, pi: PiecewiseFunction, cs: ComponentSet, allow_uncovered: bool = False):
        self.pi = pi
        self.cs = cs
        self.names: List[str] = []
        self.meanings: List[str] = []
        self.slope_equalities: List[Tuple[int, int]] = []
        component_vars = [self._new(f"s{k + 1}", f"slope of component {k + 1}") for k in range(len(cs.components))]
        self.interval_slope: List[int] = []
        unresolved = []
        for i, iv in enumerate(cs.intervals):
            hits = cs.interval_components(i)
            if hits:
                self.interval_slope.append(component_vars[hits[0]])
                self.slope_equalities.extend((component_vars[hits[0]], component_vars[k]) for k in hits[1:])
            elif allow_uncovered:
                self.interval_slope.append(self._new(f"u{i}", f"unknown slope on {interval_text(iv)}"))
            else:
                self.interval_slope.append(-1)
                unresolved.append(iv)
        if unresolved:
            raise UnresolvedIntervalsError("intervals without a covered component: " + ", ".join(interval_text(iv) for iv in unresolved) + "; run the dense move merge or allow unknown slopes")
        self.value_var: List[int] = []
        self.left_var: List[int] = []
        self.right_var: List[int] = []
        for i, x in enumerate(pi.xs):
            v = self._new(f"v{i}", f"value at {format_element(x)}")
            self.value_var.append(v)
            self.left_var.append(v if pi.is_continuous_at(i, Side.LEFT) else self._new(f"l{i}", f"left limit at {format_element(x)}"))
            self.right_var.append(v if pi.is_continuous_at(i, Side.RIGHT) else self._new(f"r{i}", f"right limit at {format_element(x)}"))

    def _new(self, name: str, meaning: str) -> int:
        self.names.append(name)
        self.meanings.append(meaning)
        return len(self.names) - 1

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def parameters(self) -> List[Tuple[str, str]]:
        return list(zip(self.names, self.meanings))

    def form(self, x: QuadraticElement, side: Side = Side.AT) -> LinearForm:
        """Linear form of the perturbation's value or one-sided limit at x."""
        t = x.frac()
        on_breakpoint, i = self.pi.locate(t)
        if on_breakpoint:
            var = self.left_var[i] if side is Side.LEFT else self.right_var[i] if side is Side.RIGHT else self.value_var[i]
            return {var: QuadraticElement.coerce(1)}
        offset = t - self.pi.xs[i]
        return {self.right_var[i]: QuadraticElement.coerce(1), self.interval_slope[i]: offset}

    def delta_form(self, F: Face2D, point: Tuple[QuadraticElement, QuadraticElement]) -> LinearForm:
        """Linear form of Delta pi~_F(u, v), with the one-sided conventions of delta_pi_limit."""
        u, v = point
        out: LinearForm = {}
        for i, t, sign in ((1, u, 1), (2, v, 1), (3, u + v, -1)):
            lo, hi = F.projection(i)
            side = Side.AT if lo == hi else Side.RIGHT if t == lo else Side.LEFT if t == hi else Side.AT
            _axpy(out, QuadraticElement.coerce(sign), self.form(t, side))
        return out


@dataclass
class ConstraintRow:
    coefficients: LinearForm
    provenance: str


@dataclass
class ConstraintSystem:
    """Homogeneous equations over the parameters, kept in incremental reduced row echelon form."""

    symbolic: SymbolicPerturbation
    rows: List[ConstraintRow] = field(default_factory=list)
    pivots: Dict[int, LinearForm] = field(default_factory=dict)
    basis_rows: List[ConstraintRow] = field(default_factory=list)
    _seen: set = field(default_factory=set)

    def add(self, coefficients: LinearForm, provenance: str) -> None:
        if not coefficients:
            return
        lead = coefficients[min(coefficients)]
        normalized = {var: value / lead for var, value in coefficients.items()}
        key = tuple(sorted(normalized.items()))
        if key in self._seen:
            return
        self._seen.add(key)
        row = ConstraintRow(normalized, provenance)
        self.rows.append(row)
        if self._reduce(dict(normalized)):
            self.basis_rows.append(row)

    def _reduce(self, row: LinearForm) -> bool:
        for var in [v for v in row if v in self.pivots]:
            coef = row.get(var)
            if coef is not None:
                _axpy(row, -coef, self.pivots[var])
        if not row:
            return False
        pivot = min(row)
        scale = row[pivot].invert()
        row = {var: value * scale for var, value in row.items()}
        for other in self.pivots.values():
            coef = other.get(pivot)
            if coef is not None:
                _axpy(other, -coef, row)
        self.pivots[pivot] = row
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def lines(self) -> List[str]:
        return [f"{_form_text(row.coefficients, self.symbolic.names)}    [{row.provenance}]" for row in self.rows]

    def satisfied_by(self, vector: Sequence[QuadraticElement]) -> bool:
        return all(sum((coef * vector[var] for var, coef in row.coefficients.items()), QuadraticElement.coerce(0)).is_zero() for row in self.rows)


def build_system(pi: PiecewiseFunction, cs: ComponentSet, complex_: Optional[DeltaComplex] = None, allow_uncovered: bool = False) -> ConstraintSystem:
    """
    Equations forced on piecewise linear effective perturbations.

    Delta pi~_F(u, v) = 0 at every tight (face, vertex); pi~(0) = 0 and pi~(f) = 0; symmetry at
    breakpoints and one-sided limits; slope chaining across every interval with periodic wrap.
    """
    complex_ = complex_ if complex_ is not None and complex_.pi is pi else DeltaComplex(pi)
    sym = SymbolicPerturbation(pi, cs, allow_uncovered)
    system = ConstraintSystem(sym)
    one = QuadraticElement.coerce(1)
    zero = QuadraticElement.coerce(0)
    system.add(sym.form(zero), "normalization pi~(0) = 0")
    system.add(sym.form(pi.f), "normalization pi~(f) = 0")
    for a, b in sym.slope_equalities:
        system.add({a: one, b: -one}, "shared slope")
    for i in range(pi.n):
        lo, hi = pi.interval(i)
        row: LinearForm = {}
        _axpy(row, one, sym.form(hi, Side.LEFT))
        _axpy(row, -one, {sym.right_var[i]: one})
        _axpy(row, -(hi - lo), {sym.interval_slope[i]: one})
        system.add(row, f"slope on {interval_text((lo, hi))}")
    for F, point in complex_.tight_pairs():
        system.add(sym.delta_form(F, point), f"{F} at ({format_element(point[0])}, {format_element(point[1])})")
    for x in pi.xs:
        mirror = pi.f - x
        for side, partner in ((Side.AT, Side.AT), (Side.LEFT, Side.RIGHT), (Side.RIGHT, Side.LEFT)):
            row = dict(sym.form(x, side))
            _axpy(row, one, sym.form(mirror, partner))
            system.add(row, f"symmetry at {format_element(x)} ({side.value})")
    logger.info(f"[system] {sym.size} parameters, {len(system.rows)} equations, rank {system.rank}")
    return system


def nullspace(system: ConstraintSystem) -> List[List[QuadraticElement]]:
    """Basis of the solution space: one vector per free parameter."""
    size = system.symbolic.size
    zero = QuadraticElement.coerce(0)
    free = [var for var in range(size) if var not in system.pivots]
    basis = []
    for j in free:
        vector = [zero] * size
        vector[j] = QuadraticElement.coerce(1)
        for pivot, row in system.pivots.items():
            coef = row.get(j)
            if coef is not None:
                vector[pivot] = -coef
        basis.append(vector)
    return basis


def materialize(symbolic: SymbolicPerturbation, vector: Sequence[QuadraticElement], name: str = "perturbation") -> PiecewiseFunction:
    """The piecewise linear perturbation given by a parameter vector."""
    pi = symbolic.pi
    data = [BreakpointDatum(x, vector[symbolic.value_var[i]], vector[symbolic.left_var[i]], vector[symbolic.right_var[i]]) for i, x in enumerate(pi.xs)]
    return PiecewiseFunction(pi.f, data, name=name, d=pi.d)


def pwl_epsilon(pi: PiecewiseFunction, perturbation: PiecewiseFunction, complex_: Optional[DeltaComplex] = None) -> Optional[QuadraticElement]:
    """
    A step eps > 0 with pi +/- eps*perturbation minimal, or None if no positive step exists.

    eps = m/M with m the least nonzero Delta pi_F and M the largest |Delta perturbation_F| over the
    vertices of the common refinement, further limited so values and limits stay in [0, 1].
    """
    merged = sorted(set(pi.xs) | set(perturbation.xs))
    refined = pi.refine(merged)
    complex_ = complex_ if complex_ is not None and complex_.pi is refined else DeltaComplex(refined)
    moving = perturbation.refine(merged)
    m: Optional[QuadraticElement] = None
    big: Optional[QuadraticElement] = None
    for F in complex_.faces:
        for point, slack in zip(F.vertices, complex_.delta_at_vertices(F)):
            moved = abs(delta_pi_limit(moving, F, point))
            if slack.is_zero():
                if not moved.is_zero():
                    return None
                continue
            m = slack if m is None or slack < m else m
            big = moved if big is None or moved > big else big
    bounds: List[QuadraticElement] = []
    if m is not None and big is not None and not big.is_zero():
        bounds.append(m / big)
    for x in merged:
        for side in (Side.LEFT, Side.AT, Side.RIGHT):
            value, move = pi.limit(x, side), abs(perturbation.limit(x, side))
            if move.is_zero():
                continue
            room = min(value, 1 - value)
            if room.sign() <= 0:
                return None
            bounds.append(room / move)
    return min(bounds) if bounds else None


@dataclass
class ExtremalityReport:
    verdict: str
    dimension: int
    parameters: int
    covering: CoveringProtocol
    system: ConstraintSystem
    perturbations: List[PiecewiseFunction] = field(default_factory=list)
    epsilons: List[Optional[QuadraticElement]] = field(default_factory=list)
    unknown_slopes: int = 0

    @property
    def is_extreme(self) -> bool:
        return self.verdict == EXTREME

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict,
            "dimension": self.dimension,
            "parameters": self.parameters,
            "equations": len(self.system.rows),
            "rank": self.system.rank,
            "unknown_slopes": self.unknown_slopes,
            "covering": self.covering.to_dict(),
            "full_rank_equations": [f"{_form_text(r.coefficients, self.system.symbolic.names)}    [{r.provenance}]" for r in self.system.basis_rows],
            "perturbations": [{"rows": p.to_rows(), "epsilon": None if e is None else format_element(e)} for p, e in zip(self.perturbations, self.epsilons)],
        }


def extremality_test_pwc(pi: PiecewiseFunction, assume_pwc: bool = False, complex_: Optional[DeltaComplex] = None, threads: int = 1) -> ExtremalityReport:
    """
    Extremality relative to piecewise continuous perturbations.

    covering -> (dense merge with assume_pwc) -> build_system -> nullspace. Intervals still
    uncovered get unknown slopes; then a trivial nullspace proves nothing and the verdict is
    inconclusive, while a nontrivial one still exhibits perturbations.
    """
    complex_ = complex_ if complex_ is not None and complex_.pi is pi else DeltaComplex(pi)
    if not minimality_test(pi, complex_, threads).is_minimal:
        raise PreconditionError("extremality test needs a minimal function")
    protocol = generate_covered_components(pi, assume_pwc, complex_)
    unknown = sum(1 for i in range(len(protocol.components.intervals)) if not protocol.components.interval_components(i))
    system = build_system(pi, protocol.components, complex_, allow_uncovered=unknown > 0)
    basis = nullspace(system)
    if basis:
        verdict = NOT_EXTREME
    else:
        verdict = INCONCLUSIVE if unknown else EXTREME
    perturbations = [materialize(system.symbolic, vector, name=f"perturbation {k + 1}") for k, vector in enumerate(basis)]
    epsilons = [pwl_epsilon(pi, p, complex_) for p in perturbations]
    logger.info(f"[system] {pi.name or 'function'}: dimension {len(basis)} -> {verdict}")
    return ExtremalityReport(verdict, len(basis), system.symbolic.size, protocol, system, perturbations, epsilons, unknown)
