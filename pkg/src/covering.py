##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# Covered intervals and connected covered components. Two-dimensional additive faces cover the   #
# interiors of their projections directly; additive edges carry coverage along translations and  #
# reflections until a fixpoint is reached. Under the piecewise-continuity assumption, uncovered   #
# intervals reached by two Q-independent translation differences are merged as one component.    #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.complexes import DeltaComplex, Face2D
from src.errors import InputError, PreconditionError
from src.exactfield import QuadraticElement, format_element, is_rationally_independent
from src.pwfunction import PiecewiseFunction
from utils.logs_config import logger

##################################################################################################
#                                        CONFIGURATION                                           #
##################################################################################################

Interval = Tuple[QuadraticElement, QuadraticElement]

TRANSLATION = "translation"
REFLECTION = "reflection"

DIRECT = "directly covered"
INDIRECT = "indirectly covered"
DENSE = "dense merge"

MAX_SWEEPS = 200
EVIDENCE_CONVERGENTS = 5

##################################################################################################
#                                        IMPLEMENTATION                                          #
##################################################################################################


def interval_text(iv: Interval) -> str:
    return f"({format_element(iv[0])}, {format_element(iv[1])})"


def _normalize(pieces: Sequence[Interval]) -> List[Interval]:
    """Sorted union of open intervals; touching pieces are joined (points carry no coverage)."""
    out: List[Interval] = []
    for lo, hi in sorted(p for p in pieces if p[0] < p[1]):
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out


def _intersect(a: Interval, b: Interval) -> Optional[Interval]:
    lo = max(a[0], b[0])
    hi = min(a[1], b[1])
    return (lo, hi) if lo < hi else None


def _overlaps(pieces: Sequence[Interval], others: Sequence[Interval]) -> bool:
    return any(_intersect(p, q) is not None for p in pieces for q in others)


def _contained(pieces: Sequence[Interval], union: Sequence[Interval]) -> bool:
    return all(any(u[0] <= p[0] and p[1] <= u[1] for u in union) for p in pieces)


def _unit(iv: Interval) -> Interval:
    """Shift an interval of [0, 2] with lo >= 1 back into [0, 1]."""
    lo, hi = iv
    return (lo - 1, hi - 1) if lo >= 1 else iv


@dataclass(frozen=True)
class MoveRecord:
    """A move x -> x + shift (translation) or x -> shift - x (reflection) from domain onto codomain."""

    kind: str
    shift: QuadraticElement
    domain: Interval
    codomain: Interval
    face: str

    def apply(self, x: QuadraticElement) -> QuadraticElement:
        return x + self.shift if self.kind == TRANSLATION else self.shift - x

    def image(self, iv: Interval) -> Interval:
        a, b = self.apply(iv[0]), self.apply(iv[1])
        return (a, b) if a < b else (b, a)

    def inverse(self) -> "MoveRecord":
        if self.kind == TRANSLATION:
            return MoveRecord(TRANSLATION, -self.shift, self.codomain, self.domain, self.face)
        return MoveRecord(REFLECTION, self.shift, self.codomain, self.domain, self.face)

    def describe(self) -> str:
        rule = f"x -> x + {format_element(self.shift)}" if self.kind == TRANSLATION else f"x -> {format_element(self.shift)} - x"
        return f"{self.kind} {rule} from {interval_text(self.domain)} onto {interval_text(self.codomain)}"


def edge_move(F: Face2D) -> MoveRecord:
    """The move between the two proper projections of an edge of Delta P, in [0, 1] coordinates."""
    kind = F.edge_kind
    if kind is None:
        raise InputError(f"{F} is not an edge")
    p1, p2, p3 = (F.projection(i) for i in (1, 2, 3))
    if kind == "horizontal":
        domain, codomain = p1, _unit(p3)
        return MoveRecord(TRANSLATION, codomain[0] - domain[0], domain, codomain, str(F))
    if kind == "vertical":
        domain, codomain = p2, _unit(p3)
        return MoveRecord(TRANSLATION, codomain[0] - domain[0], domain, codomain, str(F))
    return MoveRecord(REFLECTION, p1[0] + p2[1], p1, p2, str(F))


class ComponentSet:
    """
    Connected covered components over the open intervals of P_B.

    Each component is a union of open subintervals of (0, 1) on which every effective perturbation
    is affine with one common slope. Components merge when they overlap in positive length.
    """

    def __init__(self, points: Sequence[QuadraticElement]):
        self.points: List[QuadraticElement] = list(points)
        self.components: List[List[Interval]] = []
        self.moves: List[MoveRecord] = []

    @classmethod
    def for_function(cls, pi: PiecewiseFunction) -> "ComponentSet":
        return cls(list(pi.xs) + [QuadraticElement.coerce(1, pi.d)])

    def copy(self) -> "ComponentSet":
        out = ComponentSet(self.points)
        out.components = [list(c) for c in self.components]
        out.moves = list(self.moves)
        return out

    @property
    def intervals(self) -> List[Interval]:
        return list(zip(self.points, self.points[1:]))

    def add(self, pieces: Sequence[Interval]) -> bool:
        """Add pieces as one connected set; returns True if coverage grew or components merged."""
        pieces = _normalize(pieces)
        if not pieces:
            return False
        touching = [i for i, comp in enumerate(self.components) if _overlaps(pieces, comp)]
        if len(touching) == 1 and _contained(pieces, self.components[touching[0]]):
            return False
        merged = list(pieces)
        for i in touching:
            merged.extend(self.components[i])
        self.components = [c for i, c in enumerate(self.components) if i not in touching]
        self.components.append(_normalize(merged))
        self.components.sort(key=lambda c: c[0][0])
        return True

    def covered_parts(self, iv: Interval) -> List[Tuple[int, Interval]]:
        """(component index, piece) for every positive-length intersection of iv with a component."""
        out = []
        for i, comp in enumerate(self.components):
            for piece in comp:
                hit = _intersect(piece, iv)
                if hit is not None:
                    out.append((i, hit))
        return out

    def apply_move(self, move: MoveRecord) -> bool:
        """Carry coverage across a move in both directions."""
        changed = False
        for mv in (move, move.inverse()):
            snapshot = [(list(self.components[index]), part) for index, part in self.covered_parts(mv.domain)]
            for pieces, part in snapshot:
                changed |= self.add(pieces + [mv.image(part)])
        if changed:
            self.moves.append(move)
        return changed

    def covered_union(self) -> List[Interval]:
        return _normalize([p for comp in self.components for p in comp])

    def uncovered(self) -> List[Interval]:
        """Positive-length gaps of the intervals of P_B not in any component."""
        union = self.covered_union()
        gaps: List[Interval] = []
        for lo, hi in self.intervals:
            cursor = lo
            for a, b in union:
                if b <= cursor or a >= hi:
                    continue
                if a > cursor:
                    gaps.append((cursor, a))
                cursor = max(cursor, b)
                if cursor >= hi:
                    break
            if cursor < hi:
                gaps.append((cursor, hi))
        return gaps

    def interval_components(self, i: int) -> List[int]:
        """Indices of the components meeting P_B interval i."""
        return sorted({index for index, _ in self.covered_parts(self.intervals[i])})

    def fully_covered_intervals(self) -> List[Interval]:
        union = self.covered_union()
        return [iv for iv in self.intervals if _contained([iv], union)]

    def component_intervals(self) -> List[List[Interval]]:
        """Components split at the breakpoints, for display and comparisons."""
        out = []
        for comp in self.components:
            pieces = []
            for iv in self.intervals:
                pieces.extend(hit for piece in comp if (hit := _intersect(piece, iv)) is not None)
            out.append(pieces)
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "components": [[interval_text(p) for p in comp] for comp in self.component_intervals()],
            "uncovered": [interval_text(p) for p in self.uncovered()],
        }


@dataclass
class DenseMergeEvidence:
    """Why an uncovered interval was merged: translations of it whose differences are Q-independent."""

    interval: Interval
    target: Interval
    shifts: List[QuadraticElement]
    generators: List[QuadraticElement]
    independent_pair: Tuple[QuadraticElement, QuadraticElement]
    convergents: List[Tuple[int, int]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "interval": interval_text(self.interval),
            "target": interval_text(self.target),
            "shifts": [format_element(a) for a in self.shifts],
            "generators": [format_element(t) for t in self.generators],
            "independent_pair": [format_element(t) for t in self.independent_pair],
            "convergents": [f"{p}/{q}" for p, q in self.convergents],
        }


@dataclass
class CoveringStep:
    index: int
    kind: str
    source: str
    detail: str

    def line(self) -> str:
        return f"Step {self.index}: {self.kind} via {self.source}; {self.detail}"


@dataclass
class CoveringProtocol:
    components: ComponentSet
    steps: List[CoveringStep] = field(default_factory=list)
    evidence: List[DenseMergeEvidence] = field(default_factory=list)
    uncovered_before_merge: List[Interval] = field(default_factory=list)
    assume_pwc: bool = False

    def lines(self) -> List[str]:
        out = [step.line() for step in self.steps]
        for k, comp in enumerate(self.components.component_intervals()):
            out.append(f"Covered component {k + 1}: " + ", ".join(interval_text(p) for p in comp))
        uncovered = self.components.uncovered()
        out.append("Uncovered intervals: " + (", ".join(interval_text(p) for p in uncovered) if uncovered else "none"))
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "steps": [step.line() for step in self.steps],
            "uncovered_before_merge": [interval_text(p) for p in self.uncovered_before_merge],
            "evidence": [e.to_dict() for e in self.evidence],
            "assume_pwc": self.assume_pwc,
            **self.components.to_dict(),
        }


def _record(protocol: Optional[CoveringProtocol], kind: str, source: str, detail: str) -> None:
    if protocol is not None:
        protocol.steps.append(CoveringStep(len(protocol.steps) + 1, kind, source, detail))


def directly_covered(pi: PiecewiseFunction, complex_: Optional[DeltaComplex] = None, protocol: Optional[CoveringProtocol] = None) -> ComponentSet:
    """Components from the interiors of the projections of the two-dimensional additive faces."""
    complex_ = complex_ if complex_ is not None and complex_.pi is pi else DeltaComplex(pi)
    cs = ComponentSet.for_function(pi)
    for F in complex_.faces_of_dim(2):
        if not complex_.is_additive(F):
            continue
        projections = [F.projection(1), F.projection(2), _unit(F.projection(3))]
        if cs.add(projections):
            _record(protocol, DIRECT, f"2d face {F}", "intervals " + ", ".join(interval_text(p) for p in _normalize(projections)))
    logger.debug(f"[covering] direct: {len(cs.components)} components")
    return cs


def _additive_edge_moves(complex_: DeltaComplex) -> List[Tuple[Face2D, MoveRecord]]:
    return [(F, edge_move(F)) for F in complex_.faces_of_dim(1) if complex_.is_additive(F)]


def extend_by_edges(pi: PiecewiseFunction, cs: ComponentSet, complex_: Optional[DeltaComplex] = None, protocol: Optional[CoveringProtocol] = None) -> ComponentSet:
    """Fixpoint of carrying coverage across additive edges; returns a new ComponentSet."""
    complex_ = complex_ if complex_ is not None and complex_.pi is pi else DeltaComplex(pi)
    out = cs.copy()
    moves = _additive_edge_moves(complex_)
    for sweep in range(MAX_SWEEPS):
        changed = False
        for F, move in moves:
            if out.apply_move(move):
                changed = True
                _record(protocol, INDIRECT, f"edge {F}", move.describe())
        if not changed:
            break
    else:
        logger.warning(f"[covering] edge extension stopped after {MAX_SWEEPS} sweeps without a fixpoint")
    logger.debug(f"[covering] after edges: {len(out.components)} components, {len(out.uncovered())} uncovered pieces")
    return out


def continued_fraction_convergents(x_num: QuadraticElement, x_den: QuadraticElement, count: int) -> List[Tuple[int, int]]:
    """
    First `count` convergents (p, q) of the real number x_num / x_den, computed exactly.

    Raises InputError for a rational ratio, whose expansion is finite.
    """
    if x_den.is_zero():
        raise ZeroDivisionError("x_den must be non-zero")
    alpha = x_num / x_den
    if alpha.is_rational():
        raise InputError(f"ratio {format_element(alpha)} is rational; its continued fraction is finite")
    out: List[Tuple[int, int]] = []
    p_prev, p = 1, alpha.floor()
    q_prev, q = 0, 1
    out.append((p, q))
    rest = alpha - p
    while len(out) < count:
        alpha = rest.invert()
        a = alpha.floor()
        rest = alpha - a
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append((p, q))
    return out[:count]


def _find_independent_pair(generators: Sequence[QuadraticElement]) -> Optional[Tuple[QuadraticElement, QuadraticElement]]:
    for i, s in enumerate(generators):
        for t in generators[i + 1 :]:
            if is_rationally_independent(s, t):
                return s, t
    return None


def _target_interval(cs: ComponentSet, iv: Interval) -> Optional[Interval]:
    for candidate in cs.intervals:
        if _intersect(candidate, iv) is not None:
            return candidate
    return None


def _dense_evidence(cs: ComponentSet, gap: Interval, moves: Sequence[Tuple[Face2D, MoveRecord]]) -> Optional[DenseMergeEvidence]:
    groups: Dict[Interval, set] = {}
    for F, move in moves:
        if move.kind != TRANSLATION or move.shift.is_zero():
            continue
        for mv in (move, move.inverse()):
            part = _intersect(mv.domain, gap)
            if part is None:
                continue
            target = _target_interval(cs, mv.image(part))
            if target is not None:
                groups.setdefault(target, set()).add(mv.shift)
    for target in sorted(groups):
        shifts = sorted(groups[target])
        generators = [s - shifts[0] for s in shifts[1:]]
        pair = _find_independent_pair(generators)
        if pair is None:
            continue
        convergents = continued_fraction_convergents(pair[0], pair[1], EVIDENCE_CONVERGENTS)
        return DenseMergeEvidence(gap, target, shifts, generators, pair, convergents)
    return None


def dense_move_merge(pi: PiecewiseFunction, cs: ComponentSet, complex_: Optional[DeltaComplex] = None, protocol: Optional[CoveringProtocol] = None) -> Tuple[ComponentSet, List[DenseMergeEvidence]]:
    """
    Merge uncovered intervals reached by dense translation moves.

    Valid only for piecewise continuous perturbations: for an uncovered interval, translation
    edges grouped by target interval give differences t_i = a_i - a_0; two Q-independent
    differences generate a dense group, so the perturbation is affine on the whole interval.
    Each merged interval becomes a component and edge extension runs again, which brings in its
    reflection partner. Intervals without such evidence stay uncovered.
    """
    complex_ = complex_ if complex_ is not None and complex_.pi is pi else DeltaComplex(pi)
    if not cs.uncovered():
        raise PreconditionError("dense_move_merge needs uncovered intervals")
    moves = _additive_edge_moves(complex_)
    out = cs.copy()
    evidence: List[DenseMergeEvidence] = []
    refused: set = set()
    while True:
        pending = [gap for gap in out.uncovered() if gap not in refused]
        if not pending:
            break
        gap = pending[0]
        found = _dense_evidence(out, gap, moves)
        if found is None:
            refused.add(gap)
            logger.info(f"[covering] no dense move evidence for {interval_text(gap)}")
            continue
        evidence.append(found)
        out.add([gap])
        _record(protocol, DENSE, f"translations by {', '.join(format_element(a) for a in found.shifts)}", f"interval {interval_text(gap)} is affine (generators {format_element(found.independent_pair[0])}, {format_element(found.independent_pair[1])})")
        out = extend_by_edges(pi, out, complex_, protocol)
    return out, evidence


def generate_covered_components(pi: PiecewiseFunction, assume_pwc: bool = False, complex_: Optional[DeltaComplex] = None) -> CoveringProtocol:
    """Run direct covering, edge extension and, with assume_pwc, the dense merge."""
    complex_ = complex_ if complex_ is not None and complex_.pi is pi else DeltaComplex(pi)
    protocol = CoveringProtocol(components=ComponentSet.for_function(pi), assume_pwc=assume_pwc)
    cs = directly_covered(pi, complex_, protocol)
    cs = extend_by_edges(pi, cs, complex_, protocol)
    protocol.uncovered_before_merge = cs.uncovered()
    if assume_pwc and protocol.uncovered_before_merge:
        cs, protocol.evidence = dense_move_merge(pi, cs, complex_, protocol)
    protocol.components = cs
    logger.info(f"[covering] {pi.name or 'function'}: {len(cs.components)} components, {len(cs.uncovered())} uncovered intervals after {len(protocol.steps)} steps")
    return protocol
