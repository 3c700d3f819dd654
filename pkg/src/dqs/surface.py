"""Bipartite quad surfaces with complex weights.

A surface is stored combinatorially: a 2-coloring of the vertices, one
counterclockwise 4-tuple (b-, w-, b+, w+) per quad, and one complex
weight rho per quad with positive real part.  The weight encodes the
oriented ratio of diagonals i*rho = (w+ - w-)/(b+ - b-) of any chart,
so no embedding is stored; geometry enters only through charts.

Medial-graph conventions used by every other module:

* A medial edge is keyed by a quad/corner incidence ``[Q, v]`` and is
  indexed ``4*q + slot`` where slot is the corner position of v in the
  quad tuple (0=b-, 1=w-, 2=b+, 3=w+).
* Its canonical orientation runs from the midpoint of edge (v, prev(v))
  to the midpoint of (v, next(v)); these are exactly the ccw boundary
  orientations of the quad face F_Q.
* The vertex face F_v traverses each incident edge [Q, v] against its
  canonical orientation, in ccw star order around v.
* In the normalized chart the canonical edge vectors are: slot 1 -> 1,
  slot 2 -> i*rho, slot 3 -> -1, slot 0 -> -i*rho.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .errors import (
    AmbiguousGluingError,
    ChartConstructionError,
    MalformedSurfaceError,
    SurfaceError,
)

BLACK = 0
WHITE = 1

# corner slots in the quad tuple
SLOT_BM, SLOT_WM, SLOT_BP, SLOT_WP = 0, 1, 2, 3

# ccw boundary order of the quad face F_Q, by corner slot
FACE_Q_ORDER = (SLOT_WM, SLOT_BP, SLOT_WP, SLOT_BM)

# canonical edge vector of [Q, v] in the normalized chart, as (a, b)
# meaning a + b*rho; slots 1,3 are parallel to the black diagonal,
# slots 2,0 to the white diagonal.
_EDGE_VECTOR = {
    SLOT_WM: (1.0, 0.0),
    SLOT_BP: (0.0, 1j),
    SLOT_WP: (-1.0, 0.0),
    SLOT_BM: (0.0, -1j),
}

# sign of the parallel diagonal induced by the canonical orientation
# (+1 means b- -> b+ resp. w- -> w+)
DIAG_SIGN = {SLOT_WM: 1, SLOT_WP: -1, SLOT_BP: 1, SLOT_BM: -1}


def medial_edge_index(q: int, slot: int) -> int:
    return 4 * q + slot


@dataclass(frozen=True)
class QuadComplex:
    """Immutable bipartite quad decomposition with complex weights."""

    colors: tuple  # color per vertex id, BLACK or WHITE
    quads: tuple   # (bm, wm, bp, wp) per quad id, ccw
    rho: tuple     # complex weight per quad id

    @staticmethod
    def build(colors: Iterable[int], quads, rho) -> "QuadComplex":
        colors = tuple(int(c) for c in colors)
        quads = tuple(tuple(int(v) for v in q) for q in quads)
        rho = tuple(complex(r) for r in rho)
        if len(quads) != len(rho):
            raise SurfaceError("need one rho per quad")
        for q in quads:
            if len(q) != 4:
                raise SurfaceError(f"quad {q} does not have 4 vertices")
            if any(v < 0 or v >= len(colors) for v in q):
                raise SurfaceError(f"quad {q} references unknown vertex")
        return QuadComplex(colors, quads, rho)

    @property
    def nv(self) -> int:
        return len(self.colors)

    @property
    def nq(self) -> int:
        return len(self.quads)

    @property
    def n_medial_edges(self) -> int:
        return 4 * self.nq

    def corner_slot(self, q: int, v: int) -> int:
        return self.quads[q].index(v)

    def corner_next(self, q: int, slot: int) -> int:
        """Vertex following slot in ccw quad order."""
        return self.quads[q][(slot + 1) % 4]

    def corner_prev(self, q: int, slot: int) -> int:
        return self.quads[q][(slot - 1) % 4]

    def black_diagonal(self, q: int):
        t = self.quads[q]
        return t[SLOT_BM], t[SLOT_BP]

    def white_diagonal(self, q: int):
        t = self.quads[q]
        return t[SLOT_WM], t[SLOT_WP]

    # -- derived incidence tables ------------------------------------

    @cached_property
    def incidences(self):
        """Per vertex: list of (quad, slot) incidences, sorted by quad id."""
        inc = [[] for _ in range(self.nv)]
        for q, t in enumerate(self.quads):
            for slot, v in enumerate(t):
                inc[v].append((q, slot))
        return tuple(tuple(sorted(x)) for x in inc)

    @cached_property
    def edge_pairs(self):
        """Undirected vertex pairs of quad boundary edges with directed slots.

        Maps frozenset-like sorted pair -> list of (q, u, w) meaning quad q
        traverses u -> w on its ccw boundary.
        """
        table = {}
        for q, t in enumerate(self.quads):
            for i in range(4):
                u, w = t[i], t[(i + 1) % 4]
                table.setdefault((min(u, w), max(u, w)), []).append((q, u, w))
        return table

    @cached_property
    def has_doubled_edges(self) -> bool:
        return any(len(slots) != 2 for slots in self.edge_pairs.values())

    @cached_property
    def edge_ids(self):
        """Undirected pair -> dense edge id (only meaningful without doubles)."""
        return {pair: i for i, pair in enumerate(sorted(self.edge_pairs))}

    def _other_quad(self, q: int, u: int, w: int) -> int:
        """Quad traversing w -> u, i.e. the neighbor of q across edge {u, w}."""
        entries = self.edge_pairs[(min(u, w), max(u, w))]
        if len(entries) != 2:
            raise AmbiguousGluingError(
                f"edge {{{u}, {w}}} occurs in {len(entries)} quad boundaries; "
                "rotation system is ambiguous"
            )
        for q2, a, b in entries:
            if (a, b) == (w, u):
                return q2
        raise SurfaceError(f"edge {{{u}, {w}}} is not traversed in both directions")

    @cached_property
    def stars(self):
        """Per vertex: incident quads in ccw order, as (quad, slot) pairs.

        Walking ccw around v crosses the edge (v, prev(v)) of the current
        quad.  Raises if the star does not close into a single cycle.
        """
        out = []
        for v in range(self.nv):
            inc = self.incidences[v]
            if not inc:
                out.append(())
                continue
            q0, s0 = inc[0]
            order = [(q0, s0)]
            q, s = q0, s0
            for _ in range(len(inc)):
                p = self.corner_prev(q, s)
                q = self._other_quad(q, p, v)
                s = self.corner_slot(q, v)
                if (q, s) == (q0, s0):
                    break
                order.append((q, s))
            else:
                raise SurfaceError(f"star of vertex {v} does not close")
            if len(order) != len(inc):
                raise SurfaceError(f"link of vertex {v} is not a single cycle")
            out.append(tuple(order))
        return tuple(out)

    # -- medial edge helpers -------------------------------------------------

    def medial_key_vertex(self, e: int) -> int:
        return self.quads[e // 4][e % 4]

    def medial_endpoints(self, e: int):
        """Start/end of the canonical orientation, as undirected vertex pairs."""
        q, slot = divmod(e, 4)
        v = self.quads[q][slot]
        p = self.corner_prev(q, slot)
        n = self.corner_next(q, slot)
        return (min(v, p), max(v, p)), (min(v, n), max(v, n))

    def medial_edge_color(self, e: int) -> int:
        """BLACK if parallel to a black diagonal (key vertex white)."""
        return BLACK if self.colors[self.medial_key_vertex(e)] == WHITE else WHITE

    def edge_vector(self, e: int) -> complex:
        """Canonical edge vector in the normalized chart of its quad."""
        q, slot = divmod(e, 4)
        a, b = _EDGE_VECTOR[slot]
        return a + b * self.rho[q]


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    kind: str
    ids: tuple
    detail: str

    def __str__(self):
        return f"[{self.kind}] {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple

    STRUCTURAL = (
        "quad-vertices",
        "bipartite",
        "closed-surface",
        "vertex-link",
        "connectivity",
        "rho-positivity",
    )

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def surface_ok(self) -> bool:
        """True when only strong-regularity findings (if any) remain."""
        return all(v.kind == "strong-regularity" for v in self.violations)

    def kinds(self):
        return sorted({v.kind for v in self.violations})

    def __str__(self):
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


def validate(cx: QuadComplex) -> ValidationReport:
    """Check every invariant of a compact discrete quad surface.

    The report is empty iff the complex is a closed oriented bipartite
    quad surface, strongly regular, with Re(rho) > 0 everywhere.
    Strong-regularity findings are reported but do not block the rest of
    the library (wrap-around grids of width two violate the letter of
    strong regularity while every computation on them is well defined).
    """
    bad = []

    for q, t in enumerate(cx.quads):
        if len(set(t)) != 4:
            bad.append(Violation("quad-vertices", (q,), f"quad {q} has repeated vertices"))

    for q, t in enumerate(cx.quads):
        cols = tuple(cx.colors[v] for v in t)
        if cols != (BLACK, WHITE, BLACK, WHITE):
            bad.append(Violation(
                "bipartite", (q,),
                f"quad {q} corner colors {cols} are not (b, w, b, w)"))

    for pair, entries in sorted(cx.edge_pairs.items()):
        fwd = sum(1 for (_, a, b) in entries if (a, b) == pair)
        rev = len(entries) - fwd
        if fwd != rev or len(entries) % 2:
            bad.append(Violation(
                "closed-surface", pair,
                f"edge {pair} traversed {fwd}x forward, {rev}x backward"))
        elif len(entries) > 2:
            bad.append(Violation(
                "strong-regularity", pair,
                f"edge {pair} is shared by {len(entries)} quad boundaries"))

    for q, r in enumerate(cx.rho):
        if not (r.real > 0):
            bad.append(Violation(
                "rho-positivity", (q,), f"quad {q} has rho={r} with Re <= 0"))

    structural = [v for v in bad if v.kind in ("quad-vertices", "bipartite", "closed-surface")]
    if not structural:
        if not cx.has_doubled_edges:
            try:
                cx.stars
            except SurfaceError as exc:
                bad.append(Violation("vertex-link", (), str(exc)))
        bad.extend(_connectivity_violations(cx))
        bad.extend(_strong_regularity_violations(cx))

    order = {"quad-vertices": 0, "bipartite": 1, "closed-surface": 2,
             "vertex-link": 3, "connectivity": 4, "rho-positivity": 5,
             "strong-regularity": 6}
    bad.sort(key=lambda v: (order[v.kind], v.ids))
    return ValidationReport(tuple(bad))


def _connectivity_violations(cx):
    if cx.nv == 0:
        return [Violation("connectivity", (), "empty complex")]
    seen = {0}
    stack = [0]
    adj = {}
    for (u, w) in cx.edge_pairs:
        adj.setdefault(u, []).append(w)
        adj.setdefault(w, []).append(u)
    while stack:
        u = stack.pop()
        for w in adj.get(u, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != cx.nv:
        return [Violation("connectivity", (), f"only {len(seen)} of {cx.nv} vertices connected")]
    return []


def _strong_regularity_violations(cx):
    out = []
    shared_edges = {}
    for pair, entries in cx.edge_pairs.items():
        qs = sorted({q for (q, _, _) in entries})
        for i in range(len(qs)):
            for j in range(i + 1, len(qs)):
                shared_edges.setdefault((qs[i], qs[j]), []).append(pair)
        # a doubled edge inside a single quad pair appears with one q twice
        if len(entries) == 2 and entries[0][0] == entries[1][0]:
            q = entries[0][0]
            out.append(Violation(
                "strong-regularity", (q,),
                f"quad {q} is glued to itself along edge {pair}"))
    for (q1, q2), pairs in sorted(shared_edges.items()):
        if len(pairs) > 1:
            out.append(Violation(
                "strong-regularity", (q1, q2),
                f"quads {q1} and {q2} share {len(pairs)} edges"))
    shared_vertices = {}
    for v in range(cx.nv):
        qs = sorted({q for (q, _) in cx.incidences[v]})
        for i in range(len(qs)):
            for j in range(i + 1, len(qs)):
                shared_vertices.setdefault((qs[i], qs[j]), []).append(v)
    for (q1, q2), vs in sorted(shared_vertices.items()):
        if len(vs) < 2 or (q1, q2) in shared_edges:
            continue
        out.append(Violation(
            "strong-regularity", (q1, q2),
            f"quads {q1} and {q2} share vertices {vs} but no edge"))
    return out


def require_surface(cx: QuadComplex):
    """Raise unless the structural surface invariants hold."""
    report = validate(cx)
    if not report.surface_ok:
        msgs = [str(v) for v in report.violations if v.kind != "strong-regularity"]
        raise SurfaceError("not a discrete quad surface:\n" + "\n".join(msgs))
    return report


def genus(cx: QuadComplex) -> int:
    """Genus from the Euler count 2 - 2g = |V| - |F| (edges = 2 faces)."""
    chi = cx.nv - cx.nq
    if chi % 2:
        raise MalformedSurfaceError(f"|V| - |F| = {chi} is odd; not a closed quad surface")
    g = (2 - chi) // 2
    if g < 0:
        raise MalformedSurfaceError(f"negative genus from |V| - |F| = {chi}")
    return g


# ---------------------------------------------------------------------------
# charts


def intersection_angle(rho: complex) -> float:
    """Angle in (0, pi) under which the two diagonal lines cross."""
    return math.acos(max(-1.0, min(1.0, (1j * rho / abs(rho)).real)))


@dataclass(frozen=True)
class QuadChart:
    """Normalized parallelogram chart: black corners at +-1, white at +-i*rho."""

    quad: int
    b_minus: complex
    w_minus: complex
    b_plus: complex
    w_plus: complex
    phi: float

    @property
    def positions(self):
        return (self.b_minus, self.w_minus, self.b_plus, self.w_plus)

    @property
    def diagonal_ratio(self) -> complex:
        return -1j * (self.w_plus - self.w_minus) / (self.b_plus - self.b_minus)


def quad_chart(cx: QuadComplex, q: int) -> QuadChart:
    r = cx.rho[q]
    return QuadChart(q, -1.0 + 0j, -1j * r, 1.0 + 0j, 1j * r, intersection_angle(r))


def varignon_area(rho: complex) -> float:
    """Area of the medial parallelogram F_Q in the normalized chart."""
    return rho.real


@dataclass(frozen=True)
class VertexChart:
    """Planar fan realizing the star of a vertex, center at 0.

    positions[s] holds the images of quad ``quads[s]``'s corners in tuple
    order (b-, w-, b+, w+); cone_angles[s] is the angle of the fan sector.
    """

    vertex: int
    quads: tuple
    positions: tuple
    cone_angles: tuple

    def position_of(self, s: int, v: int, cx: QuadComplex) -> complex:
        return self.positions[s][cx.corner_slot(self.quads[s], v)]


def _arc_ray_point(alpha: float, rho_hat: complex) -> complex:
    """Intersection of the ray t*i*rho_hat with the inscribed-angle arc.

    The arc consists of points above the real axis seeing the segment
    [-1, 1] under the angle alpha; it lies on the circle with center
    i*cot(alpha) and radius 1/sin(alpha).
    """
    u = 1j * rho_hat / abs(rho_hat)
    m = 1.0 / math.tan(alpha)
    t = m * u.imag + math.sqrt((m * u.imag) ** 2 + 1.0)
    return t * u


def _polygon_is_simple_ccw(pts) -> bool:
    n = len(pts)
    area = 0.0
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        area += a.real * b.imag - b.real * a.imag
    if area <= 0:
        return False

    def seg_cross(p, q, r, s):
        d1 = (q - p).real * (r - p).imag - (q - p).imag * (r - p).real
        d2 = (q - p).real * (s - p).imag - (q - p).imag * (s - p).real
        d3 = (s - r).real * (p - r).imag - (s - r).imag * (p - r).real
        d4 = (s - r).real * (q - r).imag - (s - r).imag * (q - r).real
        return d1 * d2 < 0 and d3 * d4 < 0

    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if seg_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]):
                return False
    return True


def vertex_fan(rhos, black: bool):
    """Planar fan of quads around a common corner of the given color.

    rhos lists the weights of the incident quads in ccw order; quad s
    sits between neighbor rays s-1 and s.  Returns (corner_points,
    cone_angles) with corner_points[s] = (center 0, first neighbor,
    opposite corner, second neighbor), ccw, so that the induced oriented
    ratio of diagonals of quad s equals i*rhos[s] exactly.
    """
    k = len(rhos)
    if k < 2:
        raise ChartConstructionError("vertex star needs at least two quads")
    # construction weights: the auxiliary quad below realizes weight
    # rho_hat when read with a white center and 1/rho_hat with a black one
    hats = [(1.0 / r) if black else r for r in rhos]
    phi1 = intersection_angle(hats[0])
    theta = min(phi1, math.pi - phi1) / 2.0
    alpha1 = (math.pi - theta) if k >= 3 else (math.pi + theta)
    alpha_s = (2.0 * math.pi - alpha1) / (k - 1)
    if not 0.0 < alpha_s < math.pi:
        raise ChartConstructionError(f"cone angle {alpha_s:.4f} outside (0, pi)")

    neighbor = [None] * k  # image of the ray-s neighbor
    opposite = [None] * k
    for s in range(1, k):
        x = _arc_ray_point(alpha_s, hats[s])
        a, b, c = -1.0 - x, 1.0 - x, -2j * hats[s]
        lam = (neighbor[s - 1] / a) if s > 1 else cmath.exp(-1j * cmath.phase(a)) / abs(a)
        if s == 1:
            neighbor[0] = lam * a
        neighbor[s] = lam * b
        opposite[s] = lam * c

    # the closing quad: its opposite corner is forced by the diagonal ratio
    w_first, w_last = neighbor[0], neighbor[k - 1]
    if black:
        opposite[0] = (w_first - w_last) / (1j * rhos[0])
    else:
        opposite[0] = -1j * rhos[0] * (w_first - w_last)

    corners = []
    angles = []
    for s in range(k):
        n1 = neighbor[s - 1]  # s=0 wraps to neighbor[k-1]
        n2 = neighbor[s]
        quad_pts = (0j, n1, opposite[s], n2)
        if not _polygon_is_simple_ccw(quad_pts):
            raise ChartConstructionError(
                f"fan quad {s} is not an embedded ccw quadrilateral")
        ang = cmath.phase(n2 / n1) % (2.0 * math.pi)
        corners.append(quad_pts)
        angles.append(ang)
    if abs(sum(angles) - 2.0 * math.pi) > 1e-9:
        raise ChartConstructionError("fan cone angles do not close up to 2*pi")
    return corners, angles


def vertex_chart(cx: QuadComplex, v: int) -> VertexChart:
    """Chart around v: the star realized as a planar quad fan, v at 0.

    Every induced quad chart has oriented diagonal ratio i*rho of that
    quad, and images of shared edges coincide by construction.
    """
    star = cx.stars[v]
    if not star:
        raise SurfaceError(f"vertex {v} has no incident quads")
    black = cx.colors[v] == BLACK
    rhos = [cx.rho[q] for (q, _) in star]
    corners, angles = vertex_fan(rhos, black)

    positions = []
    for s, (q, slot) in enumerate(star):
        pts = corners[s]  # (v, prev-neighbor ray, opposite, next-neighbor ray)
        # fan neighbor rays: n1 = image of corner_next(v) (first edge of the
        # cone, shared with the previous star quad), n2 = corner_prev(v)
        ordered = [0j] * 4
        ordered[slot] = pts[0]
        ordered[(slot + 1) % 4] = pts[1]
        ordered[(slot + 2) % 4] = pts[2]
        ordered[(slot + 3) % 4] = pts[3]
        ratio = -1j * (ordered[SLOT_WP] - ordered[SLOT_WM]) / (ordered[SLOT_BP] - ordered[SLOT_BM])
        if abs(ratio - cx.rho[q]) > 1e-9 * max(1.0, abs(cx.rho[q])):
            raise ChartConstructionError(
                f"fan quad for {q} has ratio {ratio}, expected {cx.rho[q]}")
        positions.append(tuple(ordered))
    return VertexChart(v, tuple(q for (q, _) in star), tuple(positions), tuple(angles))


# ---------------------------------------------------------------------------
# medial graph


@dataclass(frozen=True)
class MedialGraph:
    """Medial graph: vertices are edge midpoints, edges are [Q, v] keys.

    faces_v[v] and faces_q[q] list (edge_index, sign) pairs tracing the
    ccw boundary; sign -1 means against the canonical orientation.
    """

    complex: QuadComplex
    faces_v: tuple
    faces_q: tuple

    @property
    def n_vertices(self) -> int:
        return len(self.complex.edge_pairs)

    @property
    def n_edges(self) -> int:
        return self.complex.n_medial_edges

    @property
    def n_faces(self) -> int:
        return len(self.faces_v) + len(self.faces_q)

    def edge_color(self, e: int) -> int:
        return self.complex.medial_edge_color(e)


def medial_graph(cx: QuadComplex) -> MedialGraph:
    require_surface(cx)
    faces_q = tuple(
        tuple((medial_edge_index(q, slot), 1) for slot in FACE_Q_ORDER)
        for q in range(cx.nq)
    )
    faces_v = tuple(
        tuple((medial_edge_index(q, slot), -1) for (q, slot) in cx.stars[v])
        for v in range(cx.nv)
    )
    return MedialGraph(cx, faces_v, faces_q)


# ---------------------------------------------------------------------------
# rhombic realization


@dataclass(frozen=True)
class RhombicRealization:
    """Per-quad unit rhombi whose gluing realizes the surface polyhedrally."""

    alphas: tuple   # interior angle at black vertices, per quad
    charts: tuple   # (b-, w-, b+, w+) positions of each unit rhombus

    def side_lengths(self, q: int):
        b1, w1, b2, w2 = self.charts[q]
        cyc = (b1, w1, b2, w2, b1)
        return tuple(abs(cyc[i + 1] - cyc[i]) for i in range(4))


@dataclass(frozen=True)
class Obstruction:
    """Certificate that no piecewise planar quad realization exists."""

    certified: bool
    nonreal_quads: tuple
    reason: str


def realize_rhombic(cx: QuadComplex, tol: float = 1e-12):
    """Realize an all-real-weight surface by unit rhombi, or report why not.

    With every rho real, each quad maps to a unit rhombus whose black
    interior angle is 2*arctan(rho); equal side lengths make the gluing
    consistent.  If exactly one weight is non-real, the alternating sum
    of side lengths around quads obstructs any piecewise planar
    realization, so the failure is certified.
    """
    nonreal = tuple(q for q, r in enumerate(cx.rho)
                    if abs(r.imag) > tol * max(1.0, abs(r)))
    if nonreal:
        certified = len(nonreal) == 1
        reason = (
            "exactly one quad has a non-orthogonal diagonal angle; the "
            "alternating edge-length sum over all quads must vanish yet is "
            "nonzero for that quad alone"
            if certified else
            f"{len(nonreal)} quads have non-real weights; no certificate attempted"
        )
        return Obstruction(certified, nonreal, reason)

    alphas = []
    charts = []
    for r in cx.rho:
        a = 2.0 * math.atan(r.real)
        half_b, half_w = math.cos(a / 2.0), math.sin(a / 2.0)
        alphas.append(a)
        charts.append((-half_b + 0j, -1j * half_w, half_b + 0j, 1j * half_w))
    return RhombicRealization(tuple(alphas), tuple(charts))


# ---------------------------------------------------------------------------
# subdivision


def subdivide3(cx: QuadComplex) -> QuadComplex:
    """Split every quad into 3x3 sub-quads; genus is preserved."""
    return subdivide3_with_provenance(cx)[0]


def subdivide3_with_provenance(cx: QuadComplex):
    """3x3 subdivision plus the origin of every new vertex.

    Sub-cells inherit the parallelogram chart of their quad, so cells in
    the corner parity class keep weight rho and the others get 1/rho.
    The provenance list holds ("v", id) for original vertices,
    ("e", u, w, t) for the two interior points of edge {u, w} (t counted
    from min(u, w)), and ("f", q, i, j) for face interior points.
    """
    require_surface(cx)
    if cx.has_doubled_edges:
        raise AmbiguousGluingError("cannot subdivide a complex with doubled edges")

    colors = list(cx.colors)
    provenance = [("v", v) for v in range(cx.nv)]
    point_id = {}

    def vertex_point(v):
        return v

    def edge_point(u, w, t):
        # t in {1, 2} counted from the smaller endpoint id
        a, b = min(u, w), max(u, w)
        key = ("e", a, b, t)
        if key not in point_id:
            point_id[key] = len(colors)
            colors.append(colors[a] if t == 2 else 1 - colors[a])
            provenance.append(key)
        return point_id[key]

    def face_point(q, i, j):
        key = ("f", q, i, j)
        if key not in point_id:
            point_id[key] = len(colors)
            base = cx.colors[cx.quads[q][0]]
            colors.append(base if (i + j) % 2 == 0 else 1 - base)
            provenance.append(key)
        return point_id[key]

    new_quads = []
    new_rho = []
    for q, t in enumerate(cx.quads):
        bm, wm, bp, wp = t

        def grid(i, j):
            # bilinear corner indexing on the 4x4 refinement lattice
            if i == 0 and j == 0:
                return vertex_point(bm)
            if i == 3 and j == 0:
                return vertex_point(wm)
            if i == 3 and j == 3:
                return vertex_point(bp)
            if i == 0 and j == 3:
                return vertex_point(wp)
            if j == 0:
                return edge_point(bm, wm, i if bm < wm else 3 - i)
            if j == 3:
                return edge_point(wp, bp, i if wp < bp else 3 - i)
            if i == 0:
                return edge_point(bm, wp, j if bm < wp else 3 - j)
            if i == 3:
                return edge_point(wm, bp, j if wm < bp else 3 - j)
            return face_point(q, i, j)

        for i in range(3):
            for j in range(3):
                c00, c10, c11, c01 = grid(i, j), grid(i + 1, j), grid(i + 1, j + 1), grid(i, j + 1)
                if (i + j) % 2 == 0:
                    new_quads.append((c00, c10, c11, c01))
                    new_rho.append(cx.rho[q])
                else:
                    new_quads.append((c10, c11, c01, c00))
                    new_rho.append(1.0 / cx.rho[q])

    return QuadComplex.build(colors, new_quads, new_rho), tuple(provenance)


# ---------------------------------------------------------------------------
# type-diamond expansion helpers shared with the calculus module


def expand_diamond(cx: QuadComplex, black: np.ndarray, white: np.ndarray) -> np.ndarray:
    """Values of a diamond form on all 4*nq canonical medial edges."""
    vals = np.empty(cx.n_medial_edges, dtype=complex)
    vals[SLOT_WM::4] = black
    vals[SLOT_BP::4] = white
    vals[SLOT_WP::4] = -black
    vals[SLOT_BM::4] = -white
    return vals
