"""Holomorphic mappings between quad surfaces and branching analysis.

A mapping is given extensionally by a vertex table.  Validity means it
preserves the coloring, maps every quad into the closed star of some
target quad, and on every non-degenerate quad restricts to a vertex
bijection matching the target's weight and orientation.  Branch numbers
count how often a vertex star wraps around its image star; together
with the degenerate (vertex-collapsed) quads they enter the genus
relation g = N(g' - 1) + 1 + b/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DqsError, SurfaceError
from .generators import gen_cube, gen_torus
from .surface import (
    QuadComplex,
    genus,
    require_surface,
    subdivide3_with_provenance,
)


@dataclass(frozen=True)
class CoveringMap:
    source: QuadComplex
    target: QuadComplex
    vertex_map: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertex_map", tuple(int(v) for v in self.vertex_map))
        if len(self.vertex_map) != self.source.nv:
            raise DqsError("vertex map must cover every source vertex")

    def image(self, v: int) -> int:
        return self.vertex_map[v]


def is_biconstant_quad(m: CoveringMap, q: int) -> bool:
    bm, wm, bp, wp = m.source.quads[q]
    return m.image(bm) == m.image(bp) and m.image(wm) == m.image(wp)


def quad_image(m: CoveringMap, q: int):
    """Target quad a non-degenerate quad maps onto, or None if biconstant.

    The image tuple must be a rotation (not a reflection) of the target
    quad with the same weight; anything else is invalid.
    """
    imgs = tuple(m.image(v) for v in m.source.quads[q])
    if is_biconstant_quad(m, q):
        return None
    for q2, t in enumerate(m.target.quads):
        for shift in (0, 2):
            if imgs == tuple(t[(shift + i) % 4] for i in range(4)):
                return q2
    raise DqsError(f"quad {q} image {imgs} is not a rotation of any target quad")


@dataclass(frozen=True)
class MapReport:
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        return "ok" if self.ok else "\n".join(self.violations)


def validate_map(m: CoveringMap, tol: float = 1e-12) -> MapReport:
    """Check color preservation, the star condition, and per-quad rigidity."""
    bad = []
    for v in range(m.source.nv):
        if m.source.colors[v] != m.target.colors[m.image(v)]:
            bad.append(f"vertex {v} maps across colors")
    if bad:
        return MapReport(tuple(bad))
    for q in range(m.source.nq):
        imgs = [m.image(v) for v in m.source.quads[q]]
        common = None
        for q2 in range(m.target.nq):
            t = set(m.target.quads[q2])
            if all(v in t for v in imgs):
                common = q2
                break
        if common is None:
            bad.append(f"quad {q}: images {imgs} share no target quad (star condition)")
            continue
        if is_biconstant_quad(m, q):
            continue
        try:
            q2 = quad_image(m, q)
        except DqsError as exc:
            bad.append(str(exc))
            continue
        if abs(m.source.rho[q] - m.target.rho[q2]) > tol * max(1.0, abs(m.target.rho[q2])):
            bad.append(
                f"quad {q} maps onto {q2} with weight {m.source.rho[q]} != "
                f"{m.target.rho[q2]}")
    return MapReport(tuple(bad))


def branch_vertex(m: CoveringMap, v: int) -> int:
    """Wrap count k of the star of v over the star of its image.

    Quads collapsed to edges do not advance the image walk; the
    non-degenerate quads must march counterclockwise around the image
    star, closing after k full turns.  k = 0 marks a vanishing point,
    k - 1 is the branch number.
    """
    star = m.source.stars[v]
    v2 = m.image(v)
    target_star = [q for (q, _) in m.target.stars[v2]]
    mlen = len(target_star)
    images = []
    for q, _ in star:
        if not is_biconstant_quad(m, q):
            images.append(quad_image(m, q))
    if not images:
        return 0
    if len(images) % mlen:
        raise DqsError(
            f"star of {v}: {len(images)} quad images cannot wrap a star of {mlen}")
    succ = {target_star[i]: target_star[(i + 1) % mlen] for i in range(mlen)}
    for i in range(len(images)):
        if succ[images[i]] != images[(i + 1) % len(images)]:
            raise DqsError(f"star of {v} does not wind monotonically around {v2}")
    return len(images) // mlen


def sheet_count(m: CoveringMap) -> int:
    """Number of sheets: fiber sums of branch orders, checked per fiber.

    Also verified against the count of quads mapping bijectively onto
    each target quad.
    """
    fibers = {}
    for v in range(m.source.nv):
        fibers.setdefault(m.image(v), []).append(v)
    counts = set()
    for v2 in range(m.target.nv):
        total = sum(branch_vertex(m, v) for v in fibers.get(v2, []))
        counts.add(total)
    if len(counts) != 1:
        raise DqsError(f"fiber sums disagree: {sorted(counts)}")
    n = counts.pop()
    quad_counts = np.zeros(m.target.nq, dtype=int)
    for q in range(m.source.nq):
        if not is_biconstant_quad(m, q):
            quad_counts[quad_image(m, q)] += 1
    if set(quad_counts.tolist()) != {n}:
        raise DqsError(
            f"per-quad preimage counts {sorted(set(quad_counts.tolist()))} != sheet count {n}")
    return n


@dataclass(frozen=True)
class BranchReport:
    sheets: int
    vertex_branch_numbers: dict
    quad_branch_numbers: dict
    total_branching: int
    genus_source: int
    genus_target: int

    @property
    def genus_residual(self) -> int:
        return self.genus_source - (self.sheets * (self.genus_target - 1)
                                    + 1 + self.total_branching // 2)


def check_riemann_hurwitz(m: CoveringMap) -> BranchReport:
    """Branch data and the integer genus identity; raises on violation."""
    report = validate_map(m)
    if not report.ok:
        raise DqsError("map invalid:\n" + str(report))
    vb = {}
    for v in range(m.source.nv):
        k = branch_vertex(m, v)
        if k != 1:
            vb[v] = k - 1
    qb = {q: 1 for q in range(m.source.nq) if is_biconstant_quad(m, q)}
    b = sum(vb.values()) + sum(qb.values())
    if b % 2:
        raise DqsError(f"total branching {b} is odd")
    n = sheet_count(m)
    rep = BranchReport(n, vb, qb, b, genus(m.source), genus(m.target))
    if rep.genus_residual != 0:
        raise DqsError(
            f"genus identity fails: {rep.genus_source} != "
            f"{n}*({rep.genus_target}-1)+1+{b}/2")
    return rep


# ---------------------------------------------------------------------------
# generated coverings


def double_cover(base: QuadComplex, flip_edges) -> tuple:
    """Two-sheeted cover flipping across the given undirected edge pairs.

    Cover vertices are the orbits of quad-corner slots under the gluing;
    a base vertex whose sheet monodromy is trivial lifts twice, one with
    swapping monodromy lifts once and becomes a branch point.
    """
    require_surface(base)
    if base.has_doubled_edges:
        raise SurfaceError("double cover construction needs simple edges")
    flip_edges = {(min(u, w), max(u, w)) for (u, w) in flip_edges}

    nq = base.nq
    parent = list(range(2 * 4 * nq))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        parent[find(x)] = find(y)

    def slot_id(q, s, slot):
        return (q * 2 + s) * 4 + slot

    for pair, entries in base.edge_pairs.items():
        (q1, _, _), (q2, _, _) = entries
        f = 1 if pair in flip_edges else 0
        for s in (0, 1):
            s2 = s ^ f
            for v in pair:
                union(slot_id(q1, s, base.quads[q1].index(v)),
                      slot_id(q2, s2, base.quads[q2].index(v)))

    classes = {}
    for q in range(nq):
        for s in (0, 1):
            for slot in range(4):
                r = find(slot_id(q, s, slot))
                if r not in classes:
                    classes[r] = len(classes)

    colors = [0] * len(classes)
    vm = [0] * len(classes)
    quads = []
    rho = []
    for q in range(nq):
        for s in (0, 1):
            t = tuple(classes[find(slot_id(q, s, slot))] for slot in range(4))
            quads.append(t)
            rho.append(base.rho[q])
            for slot in range(4):
                colors[t[slot]] = base.colors[base.quads[q][slot]]
                vm[t[slot]] = base.quads[q][slot]
    total = QuadComplex.build(colors, quads, rho)
    return total, CoveringMap(total, base, vm)


def gen_cube_double_cover():
    """Genus-3 double cover of the subdivided cube, branched at its corners.

    The base is the cube with every face split 3x3 (54 quads).  Sheets
    flip across the subdivided vertical cube edges; the four vertical
    edges form a perfect matching of the corners, so walking around any
    original corner swaps sheets: all eight corners are branch points of
    multiplicity two and the total space has 104 vertices and 108 quads.
    """
    cube = gen_cube()
    base, provenance = subdivide3_with_provenance(cube)
    vertical_pairs = {(0, 4), (1, 5), (2, 6), (3, 7)}

    def on_vertical(v, pair):
        tag = provenance[v]
        if tag[0] == "v":
            return tag[1] in pair
        return tag[0] == "e" and (tag[1], tag[2]) == pair

    flip_edges = set()
    for (u, w) in base.edge_pairs:
        for pair in vertical_pairs:
            if on_vertical(u, pair) and on_vertical(w, pair):
                flip_edges.add((u, w))
                break

    total, cover_map = double_cover(base, flip_edges)
    return total, base, cover_map


def gen_torus_unbranched_cover(m: int, n: int, tau: complex):
    """Degree-two unbranched cover of a flat torus by a doubled grid.

    The source is the 2m x n grid with weights pulled back from the
    m x n target, so the projection (i, j) -> (i mod m, j) is
    holomorphic with no branch points.
    """
    target = gen_torus(m, n, tau)
    src = gen_torus(2 * m, n, tau)  # combinatorics only; weights replaced
    rho = []
    for j in range(n):
        for i in range(2 * m):
            rho.append(target.rho[j * m + (i % m)])
    source = QuadComplex.build(src.colors, src.quads, rho)
    vm = [j * m + (i % m) for j in range(n) for i in range(2 * m)]
    return source, target, CoveringMap(source, target, vm)
