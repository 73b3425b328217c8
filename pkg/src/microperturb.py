##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# Restricted locally quasimicroperiodic perturbations: a piecewise linear part plus, on finitely #
# many open intervals, constant values on finitely many cosets b + T of a finitely generated     #
# dense group T. Verifies that such a certificate is an effective perturbation of a minimal      #
# function with finite checks on the tight faces of Delta P and computes a step eps = m / M_hat. #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from src.complexes import DeltaComplex, Face1D, Face2D, delta_pi_limit, map_faces
from src.errors import InputError, PreconditionError
from src.exactfield import QuadraticElement, Scalar, field_element, format_element, is_rationally_independent
from src.pwfunction import BreakpointDatum, PiecewiseFunction
from utils.logs_config import logger

##################################################################################################
#                                        CONFIGURATION                                           #
##################################################################################################

UNBOUNDED = "unbounded"

Coset = Tuple[QuadraticElement, QuadraticElement]

##################################################################################################
#                                        IMPLEMENTATION                                          #
##################################################################################################


def _egcd(a: int, b: int) -> Tuple[int, int, int]:
    """(g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class DenseGroup:
    """The additive group T generated over Z by finitely many field elements."""

    def __init__(self, generators: Sequence[Scalar], d: Optional[int] = None):
        if not generators:
            raise InputError("a group needs at least one generator")
        elems = [field_element(g) if d is None else field_element(g, d) for g in generators]
        self.generators: Tuple[QuadraticElement, ...] = tuple(elems)
        self.d = next((g.d for g in elems if not g.is_rational()), elems[0].d)
        self._memo: Dict[QuadraticElement, Optional[Tuple[int, ...]]] = {}
        self._scale, self._hnf, self._transform = self._hermite()

    def is_dense(self) -> bool:
        """Two Q-independent generators make T dense in the reals."""
        return any(is_rationally_independent(s, t) for s, t in itertools.combinations(self.generators, 2))

    def _combine(self, cols: List[List[int]], unit: List[List[int]], row: int, pivot: int, k: int) -> None:
        a, b = cols[pivot][row], cols[k][row]
        if b == 0:
            return
        g, x, y = _egcd(a, b)
        pa, pb = a // g, b // g
        for mat in (cols, unit):
            p, q = mat[pivot], mat[k]
            mat[pivot] = [x * s + y * t for s, t in zip(p, q)]
            mat[k] = [-pb * s + pa * t for s, t in zip(p, q)]

    def _hermite(self) -> Tuple[int, List[List[int]], List[List[int]]]:
        """Column-style Hermite form H = M*U of the 2 x n coordinate matrix, U unimodular."""
        scale = 1
        for g in self.generators:
            for part in (g.rat, g.irr):
                scale = scale * part.denominator // math.gcd(scale, part.denominator)
        n = len(self.generators)
        cols = [[int(g.rat * scale), int(g.irr * scale)] for g in self.generators]
        unit = [[1 if i == j else 0 for i in range(n)] for j in range(n)]  # unit[j] is column j of U
        pivot = 0
        for row in (0, 1):
            if pivot >= n:
                break
            for k in range(pivot + 1, n):
                self._combine(cols, unit, row, pivot, k)
            if cols[pivot][row] < 0:
                cols[pivot] = [-v for v in cols[pivot]]
                unit[pivot] = [-v for v in unit[pivot]]
            if cols[pivot][row] != 0:
                pivot += 1
        return scale, cols, unit

    def lattice_basis(self) -> List[QuadraticElement]:
        """Nonzero Hermite columns as field elements; they generate T."""
        out = []
        for a, b in self._hnf:
            if a or b:
                out.append(QuadraticElement.from_parts(Fraction(a, self._scale), Fraction(b, self._scale), self.d))
        return out

    def coefficients(self, t: QuadraticElement) -> Optional[Tuple[int, ...]]:
        """Integer coefficients of t over the generators, or None if t is not in T."""
        if t in self._memo:
            return self._memo[t]
        result = self._solve(t)
        self._memo[t] = result
        return result

    def _solve(self, t: QuadraticElement) -> Optional[Tuple[int, ...]]:
        if not t.is_rational() and t.d != self.d:
            return None
        w_rat, w_irr = t.rat * self._scale, t.irr * self._scale
        if w_rat.denominator != 1 or w_irr.denominator != 1:
            return None
        w = [int(w_rat), int(w_irr)]
        n = len(self.generators)
        h = self._hnf
        mu = [0] * n
        column = 0
        for row in (0, 1):
            if column < n and h[column][row] != 0 and all(h[column][r] == 0 for r in range(row)):
                if w[row] % h[column][row]:
                    return None
                mu[column] = w[row] // h[column][row]
                w = [w[r] - h[column][r] * mu[column] for r in (0, 1)]
                column += 1
            elif w[row] != 0:
                return None
        return tuple(sum(self._transform[j][i] * mu[j] for j in range(n)) for i in range(n))

    def __contains__(self, t: QuadraticElement) -> bool:
        return self.coefficients(t) is not None

    def __repr__(self) -> str:
        return f"<DenseGroup {', '.join(format_element(g) for g in self.generators)}>"


def group_member(t: Scalar, T: DenseGroup) -> Tuple[bool, Optional[Tuple[int, ...]]]:
    """Decide t in <t_1, ..., t_n>_Z; on success also return integer coefficients."""
    coeffs = T.coefficients(field_element(t, T.d))
    return coeffs is not None, coeffs


def lattice_basis(T: DenseGroup) -> List[QuadraticElement]:
    return T.lattice_basis()


@dataclass(frozen=True)
class MicroPiece:
    """Values c_i on the cosets b_i + T inside the open interval (lo, hi), zero elsewhere."""

    lo: QuadraticElement
    hi: QuadraticElement
    cosets: Tuple[Coset, ...]

    @property
    def interval(self) -> Tuple[QuadraticElement, QuadraticElement]:
        return self.lo, self.hi


class CrazyPerturbation:
    """
    pwl part plus micro pieces over one dense group.

    Micro intervals hold no breakpoint of the pwl part, and check_effective requires the same
    for the breakpoints of pi, so micro values vanish at every breakpoint.
    """

    def __init__(self, pwl: PiecewiseFunction, pieces: Sequence[MicroPiece], group: DenseGroup, name: str = ""):
        self.pwl = pwl
        self.pieces: Tuple[MicroPiece, ...] = tuple(sorted(pieces, key=lambda p: p.lo))
        self.group = group
        self.name = name
        self._validate()

    def _validate(self) -> None:
        for piece in self.pieces:
            if not (0 <= piece.lo < piece.hi <= 1):
                raise InputError(f"micro interval ({piece.lo}, {piece.hi}) must be a non-empty subinterval of [0, 1]")
            for b, c in piece.cosets:
                if c.is_zero():
                    raise InputError(f"coset {format_element(b)} + T has value 0")
                if not (piece.lo <= b <= piece.hi):
                    raise InputError(f"coset representative {format_element(b)} is outside ({piece.lo}, {piece.hi})")
            for (b1, _), (b2, _) in itertools.combinations(piece.cosets, 2):
                if (b1 - b2) in self.group:
                    raise InputError(f"cosets {format_element(b1)} + T and {format_element(b2)} + T coincide")
        for first, second in zip(self.pieces, self.pieces[1:]):
            if second.lo < first.hi:
                raise InputError("micro intervals overlap")
        for x in self.pwl.xs:
            if self.piece_at(x) is not None:
                raise InputError(f"breakpoint {format_element(x)} of the pwl part lies inside a micro interval")

    def breakpoints(self) -> List[QuadraticElement]:
        points = set(self.pwl.xs)
        for piece in self.pieces:
            points.update(p.frac() for p in piece.interval)
        return sorted(points)

    def piece_at(self, t: QuadraticElement) -> Optional[MicroPiece]:
        for piece in self.pieces:
            if piece.lo < t < piece.hi:
                return piece
        return None

    def micro_value(self, x: Scalar) -> QuadraticElement:
        t = field_element(x, self.pwl.d).frac()
        piece = self.piece_at(t)
        if piece is not None:
            for b, c in piece.cosets:
                if (t - b) in self.group:
                    return c
        return QuadraticElement.coerce(0)

    def cosets_on(self, lo: QuadraticElement, hi: QuadraticElement) -> List[Coset]:
        """Coset list of the piece containing the open interval (lo, hi) of [0, 1]."""
        for piece in self.pieces:
            if piece.lo <= lo and hi <= piece.hi:
                return list(piece.cosets)
        return []

    def scale(self, factor: Scalar) -> "CrazyPerturbation":
        factor = field_element(factor, self.pwl.d)
        pieces = [MicroPiece(p.lo, p.hi, tuple((b, factor * c) for b, c in p.cosets)) for p in self.pieces]
        if factor.is_zero():
            pieces = []
        return CrazyPerturbation(self.pwl.scale(factor), pieces, self.group, self.name)

    def negate(self) -> "CrazyPerturbation":
        return self.scale(-1)

    def without_pwl(self) -> "CrazyPerturbation":
        zero = QuadraticElement.coerce(0)
        pwl = PiecewiseFunction(self.pwl.f, [BreakpointDatum.continuous(zero, zero)], d=self.pwl.d)
        return CrazyPerturbation(pwl, self.pieces, self.group, self.name)


def evaluate_crazy(p: CrazyPerturbation, x: Scalar) -> QuadraticElement:
    """pwl part plus the micro value; micro parts vanish at breakpoints and off the cosets."""
    return p.pwl(x) + p.micro_value(x)


@dataclass
class EffectivenessReport:
    is_effective: bool
    witness: Optional[Dict[str, str]] = None
    m: Optional[QuadraticElement] = None
    M_hat: Optional[QuadraticElement] = None
    epsilon: Optional[QuadraticElement] = None
    unbounded: bool = False
    faces_checked: int = 0

    def to_dict(self, digits: int = 30) -> Dict[str, Any]:
        def show(x: Optional[QuadraticElement]) -> Optional[Dict[str, str]]:
            return None if x is None else {"exact": format_element(x), "decimal": x.to_decimal(digits)}

        return {
            "is_effective": self.is_effective,
            "witness": self.witness,
            "m": show(self.m),
            "M_hat": show(self.M_hat),
            "epsilon": UNBOUNDED if self.unbounded else show(self.epsilon),
            "faces_checked": self.faces_checked,
        }


@dataclass
class _Setting:
    """pi, the perturbation and their common refinement."""

    pi: PiecewiseFunction
    perturbation: CrazyPerturbation
    complex_: DeltaComplex
    pwl: PiecewiseFunction

    def cosets(self, face: Face1D) -> List[Coset]:
        """Micro cosets on a face of P_B or of its +1 translate, representatives shifted to match."""
        if face.is_vertex():
            return []
        lo, hi = face.lo, face.hi
        shift = 0
        if lo >= 1:
            lo, hi, shift = lo - 1, hi - 1, 1
        return [(b + shift, c) for b, c in self.perturbation.cosets_on(lo, hi)]


def _refined_setting(pi: PiecewiseFunction, p: CrazyPerturbation, complex_: Optional[DeltaComplex]) -> _Setting:
    points = sorted(set(pi.xs) | set(p.breakpoints()))
    refined = pi.refine(points)
    if complex_ is not None and complex_.pi == refined:
        refined = complex_.pi
    else:
        complex_ = DeltaComplex(refined)
    return _Setting(refined, p, complex_, p.pwl.refine(points))


def _point(u: QuadraticElement, v: QuadraticElement) -> str:
    return f"({format_element(u)}, {format_element(v)})"


def _matched(T: DenseGroup, source: List[Coset], target: List[Coset], offset: QuadraticElement, sign: int) -> Optional[str]:
    """
    Every coset b + T of source must meet a coset b' + T of target with b*sign + offset - b' in T
    and equal value (negated for reflections); returns a description of the first failure.
    """
    for b, c in source:
        if not any(((b if sign > 0 else -b) + offset - b2) in T and c2 == (c if sign > 0 else -c) for b2, c2 in target):
            return f"coset {format_element(b)} + T with value {format_element(c)} has no matching coset"
    return None


def _edge_failure(s: _Setting, F: Face2D) -> Optional[str]:
    kind = F.edge_kind
    T = s.perturbation.group
    if kind == "horizontal":
        shift = F.J.lo
        src, dst = s.cosets(F.I), s.cosets(F.K)
        return _matched(T, src, dst, shift, 1) or _matched(T, dst, src, -shift, 1)
    if kind == "vertical":
        shift = F.I.lo
        src, dst = s.cosets(F.J), s.cosets(F.K)
        return _matched(T, src, dst, shift, 1) or _matched(T, dst, src, -shift, 1)
    k = F.K.lo
    left, right = s.cosets(F.I), s.cosets(F.J)
    return _matched(T, left, right, k, -1) or _matched(T, right, left, k, -1)


def _face_witness(s: _Setting, F: Face2D) -> Optional[Dict[str, str]]:
    tight = [p for p, slack in zip(F.vertices, s.complex_.delta_at_vertices(F)) if slack.is_zero()]
    if not tight:
        return None
    if F.dim == 0:
        u, v = F.vertices[0]
        slack = evaluate_crazy(s.perturbation, u) + evaluate_crazy(s.perturbation, v) - evaluate_crazy(s.perturbation, u + v)
        if not slack.is_zero():
            return {"face": str(F), "vertex": _point(u, v), "condition": "vertex additivity", "detail": f"slack {format_element(slack)}"}
        return None
    for u, v in tight:
        slack = delta_pi_limit(s.pwl, F, (u, v))
        if not slack.is_zero():
            return {"face": str(F), "vertex": _point(u, v), "condition": "pwl limit equation", "detail": f"slack {format_element(slack)}"}
    if F.dim == 1:
        failure = _edge_failure(s, F)
        if failure:
            return {"face": str(F), "vertex": _point(*tight[0]), "condition": f"{F.edge_kind} edge coset matching", "detail": failure}
        return None
    for label, face in (("I", F.I), ("J", F.J), ("K", F.K)):
        if s.cosets(face):
            return {"face": str(F), "vertex": _point(*tight[0]), "condition": "2d face micro part", "detail": f"projection {label} = {face} carries cosets"}
    return None


def check_effective(pi: PiecewiseFunction, p: CrazyPerturbation, complex_: Optional[DeltaComplex] = None, threads: int = 1) -> EffectivenessReport:
    """
    Finite verification that p is an effective perturbation of pi.

    For every face with a tight vertex: vertices need pointwise additivity; edges need the pwl
    limit equations and coset matching in both directions (translations for horizontal and
    vertical edges, value-negating reflections for diagonal edges); two-dimensional faces need
    the pwl limit equations and no micro cosets on any projection.
    """
    for x in (0, pi.f):
        if not evaluate_crazy(p, x).is_zero():
            raise PreconditionError(f"perturbation must vanish at {format_element(field_element(x, pi.d))}")
    for x in pi.xs:
        piece = p.piece_at(x)
        if piece is not None:
            raise PreconditionError(f"breakpoint {format_element(x)} lies inside the micro interval ({format_element(piece.lo)}, {format_element(piece.hi)})")
    s = _refined_setting(pi, p, complex_)
    found = map_faces(lambda F: _face_witness(s, F), s.complex_.faces, threads)
    witness = next((w for w in found if w is not None), None)
    if witness:
        logger.info(f"[crazy] not effective: {witness['condition']} on {witness['face']}")
    return EffectivenessReport(is_effective=witness is None, witness=witness, faces_checked=len(s.complex_.faces))


# ------------------------------------------------------------------------------------ epsilon

_OFF = None


def _classes(s: _Setting, F: Face2D, i: int, face: Face1D) -> List[Optional[Coset]]:
    """Possible micro classes of the i-th coordinate over relint(F): exact cosets or off."""
    lo, hi = F.projection(i)
    if lo == hi:
        value = s.perturbation.micro_value(lo)
        return [(lo, value)]
    cosets = s.cosets(face)
    return [*cosets, _OFF]


def _off_allowed(T: DenseGroup, residue: QuadraticElement, cosets: List[Coset]) -> bool:
    return not any((residue - b) in T for b, _ in cosets)


def _micro_bound(s: _Setting, F: Face2D) -> QuadraticElement:
    T = s.perturbation.group
    xs, ys, zs = _classes(s, F, 1, F.I), _classes(s, F, 2, F.J), _classes(s, F, 3, F.K)
    zero = QuadraticElement.coerce(0)
    if all(c is _OFF or c[1].is_zero() for c in (*xs, *ys, *zs)):
        return zero
    x_cosets = [c for c in xs if c is not _OFF]
    y_cosets = [c for c in ys if c is not _OFF]
    z_cosets = [c for c in zs if c is not _OFF]
    best = zero
    for cx, cy, cz in itertools.product(xs, ys, zs):
        exact = [c is not _OFF for c in (cx, cy, cz)]
        if all(exact):
            ok = (cx[0] + cy[0] - cz[0]) in T
        elif exact[0] and exact[1]:
            ok = _off_allowed(T, cx[0] + cy[0], z_cosets)
        elif exact[0] and exact[2]:
            ok = _off_allowed(T, cz[0] - cx[0], y_cosets)
        elif exact[1] and exact[2]:
            ok = _off_allowed(T, cz[0] - cy[0], x_cosets)
        else:
            ok = True
        if not ok:
            continue
        value = abs((cx[1] if cx else zero) + (cy[1] if cy else zero) - (cz[1] if cz else zero))
        if value > best:
            best = value
    return best


def _face_bounds(s: _Setting, F: Face2D) -> Tuple[Optional[QuadraticElement], QuadraticElement]:
    slacks = [x for x in s.complex_.delta_at_vertices(F) if not x.is_zero()]
    least = min(slacks) if slacks else None
    pwl = max((abs(delta_pi_limit(s.pwl, F, p)) for p in F.vertices), default=QuadraticElement.coerce(0))
    return least, pwl + _micro_bound(s, F)


def verify_perturbation(pi: PiecewiseFunction, p: CrazyPerturbation, complex_: Optional[DeltaComplex] = None, threads: int = 1) -> EffectivenessReport:
    """check_effective plus m, M_hat and eps = m / M_hat when the certificate holds."""
    s = _refined_setting(pi, p, complex_)
    report = check_effective(pi, p, s.complex_, threads)
    if not report.is_effective:
        return report
    bounds = map_faces(lambda F: _face_bounds(s, F), s.complex_.faces, threads)
    slacks = [m for m, _ in bounds if m is not None]
    report.m = min(slacks) if slacks else None
    report.M_hat = max((big for _, big in bounds), default=QuadraticElement.coerce(0))
    if report.M_hat.is_zero() or report.m is None:
        report.unbounded = True
    else:
        report.epsilon = report.m / report.M_hat
    logger.info(f"[crazy] effective; m = {report.m}, M_hat = {report.M_hat}, eps = {UNBOUNDED if report.unbounded else report.epsilon.to_decimal(20)}")
    return report


def find_epsilon(pi: PiecewiseFunction, p: CrazyPerturbation, complex_: Optional[DeltaComplex] = None, threads: int = 1) -> Union[QuadraticElement, str, None]:
    """eps = m / M_hat, UNBOUNDED when M_hat = 0, None when p is not effective."""
    report = verify_perturbation(pi, p, complex_, threads)
    if not report.is_effective:
        return None
    return UNBOUNDED if report.unbounded else report.epsilon
