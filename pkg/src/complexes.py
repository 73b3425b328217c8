##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# The two-dimensional polyhedral complex Delta P_B of a piecewise linear function: enumeration   #
# of faces F(I, J, K), their vertices, the limit values Delta pi_F at points of a face and the   #
# additive-face test for discontinuous functions. Coordinates follow the fundamental domain      #
# x, y in [0, 1], x + y in [0, 2].                                                               #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

import bisect
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

from src.errors import DomainError
from src.exactfield import QuadraticElement, format_element
from src.pwfunction import PiecewiseFunction, Side
from utils.logs_config import logger

##################################################################################################
#                                        IMPLEMENTATION                                          #
##################################################################################################

Point = Tuple[QuadraticElement, QuadraticElement]
T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class Face1D:
    """A face of P_B: a breakpoint (lo == hi) or a closed interval between consecutive breakpoints."""

    lo: QuadraticElement
    hi: QuadraticElement

    @property
    def kind(self) -> str:
        return "vertex" if self.lo == self.hi else "interval"

    def is_vertex(self) -> bool:
        return self.lo == self.hi

    def contains(self, t: QuadraticElement) -> bool:
        return self.lo <= t <= self.hi

    def contains_face(self, other: "Face1D") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def interior_contains(self, t: QuadraticElement) -> bool:
        return self.lo < t < self.hi

    def __str__(self) -> str:
        if self.is_vertex():
            return f"{{{format_element(self.lo)}}}"
        return f"[{format_element(self.lo)}, {format_element(self.hi)}]"


@dataclass(frozen=True)
class Face2D:
    """
    Face F(I, J, K) = {(x, y) : x in I, y in J, x + y in K} of Delta P_B.

    I, J, K are the minimal faces of P_B containing the projections p1(F), p2(F), p3(F), so two
    triples describing the same point set produce equal Face2D objects.
    """

    I: Face1D
    J: Face1D
    K: Face1D
    vertices: Tuple[Point, ...] = field(compare=False)

    @property
    def key(self) -> Tuple[Face1D, Face1D, Face1D]:
        return self.I, self.J, self.K

    @property
    def dim(self) -> int:
        return 0 if len(self.vertices) == 1 else 1 if len(self.vertices) == 2 else 2

    def projection(self, i: int) -> Tuple[QuadraticElement, QuadraticElement]:
        """Closed interval p_i(F) as (lo, hi), i in {1, 2, 3}."""
        coords = [_project(i, p) for p in self.vertices]
        return min(coords), max(coords)

    @property
    def edge_kind(self) -> Optional[str]:
        """For one-dimensional faces: 'vertical', 'horizontal' or 'diagonal'."""
        if self.dim != 1:
            return None
        (u0, v0), (u1, v1) = self.vertices
        if u0 == u1:
            return "vertical"
        if v0 == v1:
            return "horizontal"
        return "diagonal"

    def contains_point(self, p: Point) -> bool:
        u, v = p
        return self.I.contains(u) and self.J.contains(v) and self.K.contains(u + v)

    def __str__(self) -> str:
        return f"F({self.I}, {self.J}, {self.K})"


def _project(i: int, p: Point) -> QuadraticElement:
    u, v = p
    return u if i == 1 else v if i == 2 else u + v


def _minimal_face(face: Face1D, lo: QuadraticElement, hi: QuadraticElement) -> Face1D:
    if not face.is_vertex() and lo == hi and (lo == face.lo or lo == face.hi):
        return Face1D(lo, lo)
    return face


def vertices(F: Face2D) -> List[Point]:
    return list(F.vertices)


def polygon_vertices(I: Face1D, J: Face1D, K: Face1D) -> List[Point]:
    """
    Extreme points of {x in I, y in J, x + y in K}.

    Candidates are the intersections of the bounding lines x = lo/hi(I), y = lo/hi(J) and
    x + y = lo/hi(K), filtered by feasibility and deduplicated; the result is sorted.
    """
    a, b, c, e = I.lo, I.hi, J.lo, J.hi
    found = set()
    for x in {a, b}:
        for y in {c, e}:
            if K.contains(x + y):
                found.add((x, y))
    for k in {K.lo, K.hi}:
        for x in {a, b}:
            y = k - x
            if c <= y <= e:
                found.add((x, y))
        for y in {c, e}:
            x = k - y
            if a <= x <= b:
                found.add((x, y))
    return sorted(found)


def _faces_of(points: Sequence[QuadraticElement]) -> List[Face1D]:
    faces = [Face1D(p, p) for p in points]
    faces.extend(Face1D(lo, hi) for lo, hi in zip(points, points[1:]))
    return faces


def map_faces(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """Apply fn to every item, optionally on a thread pool; results keep the input order."""
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


class DeltaComplex:
    """
    The complex Delta P_B of a function with a face index and cached Delta pi_F vertex values.
    """

    def __init__(self, pi: PiecewiseFunction):
        self.pi = pi
        one = QuadraticElement.coerce(1, pi.d)
        self.unit_points: List[QuadraticElement] = list(pi.xs) + [one]
        self.sum_points: List[QuadraticElement] = self.unit_points + [x + 1 for x in self.unit_points[1:]]
        self.unit_faces = _faces_of(self.unit_points)
        self.sum_faces = _faces_of(self.sum_points)
        self.faces: List[Face2D] = self._enumerate()
        self.index: Dict[Tuple[Face1D, Face1D, Face1D], Face2D] = {F.key: F for F in self.faces}
        self._delta: Dict[Tuple[Face1D, Face1D, Face1D], Tuple[QuadraticElement, ...]] = {}
        logger.debug(f"[complex] {len(self.faces)} faces over {pi.n} breakpoints")

    def _sum_candidates(self, lo: QuadraticElement, hi: QuadraticElement) -> List[Face1D]:
        pts = self.sum_points
        start = max(bisect.bisect_left(pts, lo) - 1, 0)
        stop = min(bisect.bisect_right(pts, hi) + 1, len(pts))
        out = [Face1D(p, p) for p in pts[start:stop] if lo <= p <= hi]
        out.extend(Face1D(p, q) for p, q in zip(pts[start:stop], pts[start + 1 : stop]) if p <= hi and q >= lo)
        return out

    def _enumerate(self) -> List[Face2D]:
        seen: Dict[Tuple[Face1D, Face1D, Face1D], Face2D] = {}
        for I in self.unit_faces:
            for J in self.unit_faces:
                for K in self._sum_candidates(I.lo + J.lo, I.hi + J.hi):
                    verts = polygon_vertices(I, J, K)
                    if not verts:
                        continue
                    us = [p[0] for p in verts]
                    vs = [p[1] for p in verts]
                    ws = [p[0] + p[1] for p in verts]
                    key = (_minimal_face(I, min(us), max(us)), _minimal_face(J, min(vs), max(vs)), _minimal_face(K, min(ws), max(ws)))
                    if key not in seen:
                        seen[key] = Face2D(key[0], key[1], key[2], tuple(verts))
        return sorted(seen.values(), key=_face_sort_key)

    # ---------------------------------------------------------------- queries

    def faces_of_dim(self, dim: int) -> List[Face2D]:
        return [F for F in self.faces if F.dim == dim]

    def _enclosing(self, face: Face1D, faces: List[Face1D], points: List[QuadraticElement]) -> List[Face1D]:
        if not face.is_vertex():
            return [face]
        i = bisect.bisect_left(points, face.lo)
        out = [face]
        if i > 0:
            out.append(Face1D(points[i - 1], face.lo))
        if i + 1 < len(points):
            out.append(Face1D(face.lo, points[i + 1]))
        return out

    def containing_faces(self, F: Face2D) -> List[Face2D]:
        """All faces F' of the complex with F contained in F' (F itself included)."""
        out = []
        for I in self._enclosing(F.I, self.unit_faces, self.unit_points):
            for J in self._enclosing(F.J, self.unit_faces, self.unit_points):
                for K in self._enclosing(F.K, self.sum_faces, self.sum_points):
                    G = self.index.get((I, J, K))
                    if G is not None and all(G.contains_point(p) for p in F.vertices):
                        out.append(G)
        return out

    def delta_at_vertices(self, F: Face2D) -> Tuple[QuadraticElement, ...]:
        cached = self._delta.get(F.key)
        if cached is None:
            cached = tuple(delta_pi_limit(self.pi, F, p) for p in F.vertices)
            self._delta[F.key] = cached
        return cached

    def additive_witness(self, F: Face2D) -> Optional[Face2D]:
        """A face F' containing F with Delta pi_F' = 0 at every vertex of F, if any."""
        for G in self.containing_faces(F):
            if G is F or G.key == F.key:
                if all(v.is_zero() for v in self.delta_at_vertices(F)):
                    return G
                continue
            if all(delta_pi_limit(self.pi, G, p).is_zero() for p in F.vertices):
                return G
        return None

    def is_additive(self, F: Face2D) -> bool:
        return self.additive_witness(F) is not None

    def additive_faces(self, dim: Optional[int] = None) -> List[Face2D]:
        faces = self.faces if dim is None else self.faces_of_dim(dim)
        return [F for F in faces if self.is_additive(F)]

    def tight_pairs(self) -> List[Tuple[Face2D, Point]]:
        """All (face, vertex) pairs with Delta pi_F(u, v) = 0."""
        out = []
        for F in self.faces:
            for p, value in zip(F.vertices, self.delta_at_vertices(F)):
                if value.is_zero():
                    out.append((F, p))
        return out


def _face_sort_key(F: Face2D):
    return (F.I.lo, F.I.hi, F.J.lo, F.J.hi, F.K.lo, F.K.hi)


def enumerate_faces(pi: PiecewiseFunction) -> List[Face2D]:
    """All nonempty faces of Delta P_B in canonical order."""
    return DeltaComplex(pi).faces


def delta_pi_limit(pi: PiecewiseFunction, F: Face2D, point: Point) -> QuadraticElement:
    """
    Delta pi_F(u, v): the limit of Delta pi towards (u, v) from the relative interior of F.

    Each of the three terms uses the value of pi when the projection p_i(F) is a singleton, and
    otherwise the one-sided limit at p_i(u, v) approached from inside p_i(F).
    """
    if not F.contains_point(point):
        raise DomainError(f"point ({point[0]}, {point[1]}) is not in {F}")
    terms = []
    for i in (1, 2, 3):
        t = _project(i, point)
        lo, hi = F.projection(i)
        if lo == hi:
            side = Side.AT
        elif t == lo:
            side = Side.RIGHT
        elif t == hi:
            side = Side.LEFT
        else:
            side = Side.AT
        terms.append(pi.limit(t, side))
    return terms[0] + terms[1] - terms[2]


def is_additive_face(pi: PiecewiseFunction, F: Face2D, complex_: Optional[DeltaComplex] = None) -> bool:
    """True iff F lies in a face F' with Delta pi_F' vanishing at all vertices of F."""
    complex_ = complex_ if complex_ is not None and complex_.pi is pi else DeltaComplex(pi)
    if F.key not in complex_.index:
        # a face given from outside the complex, e.g. built by hand
        for G in complex_.faces:
            if all(G.contains_point(p) for p in F.vertices) and all(delta_pi_limit(pi, G, p).is_zero() for p in F.vertices):
                return True
        return False
    return complex_.is_additive(complex_.index[F.key])


def make_face(I: Tuple, J: Tuple, K: Tuple) -> Face2D:
    """Build the face F(I, J, K) from (lo, hi) pairs; raises DomainError if it is empty."""
    fi, fj, fk = (Face1D(QuadraticElement.coerce(lo), QuadraticElement.coerce(hi)) for lo, hi in (I, J, K))
    verts = polygon_vertices(fi, fj, fk)
    if not verts:
        raise DomainError("empty face")
    us = [p[0] for p in verts]
    vs = [p[1] for p in verts]
    ws = [p[0] + p[1] for p in verts]
    return Face2D(_minimal_face(fi, min(us), max(us)), _minimal_face(fj, min(vs), max(vs)), _minimal_face(fk, min(ws), max(ws)), tuple(verts))


def face_document(complex_: DeltaComplex, F: Face2D) -> Dict:
    """JSON-shaped description of a face for show-complex."""
    deltas = complex_.delta_at_vertices(F)
    return {
        "I": str(F.I),
        "J": str(F.J),
        "K": str(F.K),
        "dim": F.dim,
        "vertices": [[format_element(u), format_element(v)] for u, v in F.vertices],
        "delta": [format_element(x) for x in deltas],
        "additive": complex_.is_additive(F),
    }


def additive_polygons_rows(complex_: DeltaComplex, digits: int = 30) -> List[Dict[str, str]]:
    """Plot rows (face id, dimension, vertex order, decimal u, v) for every additive face."""
    rows = []
    face_id = 0
    for F in complex_.faces:
        if not complex_.is_additive(F):
            continue
        ordered = _cyclic_order(F.vertices)
        for k, (u, v) in enumerate(ordered):
            rows.append({"face": str(face_id), "dim": str(F.dim), "vertex": str(k), "u": u.to_decimal(digits), "v": v.to_decimal(digits)})
        face_id += 1
    return rows


def _cyclic_order(points: Sequence[Point]) -> List[Point]:
    """Order polygon vertices counterclockwise (exactly, by comparing cross products)."""
    pts = list(points)
    if len(pts) <= 2:
        return pts
    origin = min(pts)
    rest = [p for p in pts if p != origin]

    def cross(p: Point, q: Point) -> QuadraticElement:
        return (p[0] - origin[0]) * (q[1] - origin[1]) - (p[1] - origin[1]) * (q[0] - origin[0])

    ordered: List[Point] = []
    for p in rest:
        pos = 0
        while pos < len(ordered) and cross(ordered[pos], p).sign() > 0:
            pos += 1
        ordered.insert(pos, p)
    return [origin] + ordered
