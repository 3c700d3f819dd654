"""Homology bases on the medial graph and period integration.

Cycles are closed walks on the medial graph, stored as signed canonical
edge indices.  Every cycle has black and white shadows: closed walks on
the black and white diagonal graphs obtained by replacing each medial
edge with the parallel diagonal (keyed by the quad, so doubled diagonals
are unproblematic).  Periods of a closed diamond form over a homology
class come in three flavors: the plain medial integral, and twice the
integral over either shadow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DqsError, NotClosedError, SurfaceError
from .calculus import DiamondForm, closedness_residual
from .surface import (
    BLACK,
    DIAG_SIGN,
    SLOT_BM,
    SLOT_BP,
    SLOT_WM,
    SLOT_WP,
    WHITE,
    QuadComplex,
    genus,
    medial_edge_index,
    require_surface,
)


@dataclass(frozen=True)
class Cycle:
    """Closed walk on the medial graph: signed canonical edge indices."""

    edges: tuple  # of (edge_index, sign)
    tag: str = ""

    def reversed(self) -> "Cycle":
        return Cycle(tuple((e, -s) for (e, s) in reversed(self.edges)), f"-{self.tag}")

    def __len__(self):
        return len(self.edges)


def cycle_is_closed_walk(cx: QuadComplex, cycle: Cycle) -> bool:
    """Consecutive edges share medial vertices (identified by vertex pairs)."""
    if not cycle.edges:
        return True
    if cx.has_doubled_edges:
        raise DqsError("walk validation needs unambiguous medial vertices")

    def endpoints(e, s):
        start, end = cx.medial_endpoints(e)
        return (start, end) if s > 0 else (end, start)

    pts = [endpoints(e, s) for (e, s) in cycle.edges]
    n = len(pts)
    return all(pts[i][1] == pts[(i + 1) % n][0] for i in range(n))


@dataclass(frozen=True)
class BlackWhiteChains:
    """Diagonal shadows of a medial cycle: signed (quad, direction) lists.

    Direction +1 means b- -> b+ (black) or w- -> w+ (white).
    """

    black: tuple
    white: tuple

    def black_multiplicity(self, nq: int) -> np.ndarray:
        out = np.zeros(nq, dtype=int)
        for q, s in self.black:
            out[q] += s
        return out

    def white_multiplicity(self, nq: int) -> np.ndarray:
        out = np.zeros(nq, dtype=int)
        for q, s in self.white:
            out[q] += s
        return out


def black_white(cx: QuadComplex, cycle: Cycle) -> BlackWhiteChains:
    """Shadows on the diagonal graphs, homotopic to the cycle.

    A medial edge keyed by a white vertex is parallel to the black
    diagonal of its quad and contributes it (and vice versa), with the
    orientation induced by the traversal.
    """
    blacks, whites = [], []
    for e, s in cycle.edges:
        q, slot = divmod(e, 4)
        step = (q, s * DIAG_SIGN[slot])
        if cx.colors[cx.quads[q][slot]] == WHITE:
            blacks.append(step)
        else:
            whites.append(step)
    return BlackWhiteChains(tuple(blacks), tuple(whites))


def chain_is_closed(cx: QuadComplex, chain, color: int) -> bool:
    """Net vertex boundary of a signed diagonal chain vanishes."""
    boundary = {}
    for q, s in chain:
        a, b = (cx.black_diagonal(q) if color == BLACK else cx.white_diagonal(q))
        if s < 0:
            a, b = b, a
        boundary[a] = boundary.get(a, 0) - 1
        boundary[b] = boundary.get(b, 0) + 1
    return all(v == 0 for v in boundary.values())


# ---------------------------------------------------------------------------
# integration


def integrate_cycle(cx: QuadComplex, omega, cycle: Cycle) -> complex:
    if isinstance(omega, DiamondForm):
        omega = omega.expand(cx)
    return complex(sum(s * omega.values[e] for (e, s) in cycle.edges))


def integrate_black_chain(cx: QuadComplex, omega: DiamondForm, chain) -> complex:
    """Integral over a black diagonal chain (single, not doubled)."""
    return complex(sum(s * omega.black[q] for (q, s) in chain))


def integrate_white_chain(cx: QuadComplex, omega: DiamondForm, chain) -> complex:
    return complex(sum(s * omega.white[q] for (q, s) in chain))


@dataclass(frozen=True)
class GraphPath:
    """Walk on one diagonal graph: signed (quad, direction) steps plus color."""

    color: int
    steps: tuple


def integrate_graph_path(cx: QuadComplex, omega: DiamondForm, path: GraphPath) -> complex:
    """Doubled integral along a diagonal-graph path (the graph convention)."""
    if path.color == BLACK:
        return 2.0 * integrate_black_chain(cx, omega, path.steps)
    if path.color == WHITE:
        return 2.0 * integrate_white_chain(cx, omega, path.steps)
    raise DqsError("path must live on a single color class")


def graph_path(cx: QuadComplex, color: int, start: int, goal: int,
               forbidden_quads=()) -> GraphPath:
    """BFS path between same-color vertices along diagonals of that color."""
    if cx.colors[start] != color or cx.colors[goal] != color:
        raise DqsError("endpoints must both carry the path color")
    adj = {}
    for q in range(cx.nq):
        a, b = cx.black_diagonal(q) if color == BLACK else cx.white_diagonal(q)
        if q in forbidden_quads:
            continue
        adj.setdefault(a, []).append((b, q, 1))
        adj.setdefault(b, []).append((a, q, -1))
    prev = {start: None}
    queue = [start]
    while queue:
        nxt = []
        for u in queue:
            for (w, q, s) in sorted(adj.get(u, ())):
                if w not in prev:
                    prev[w] = (u, q, s)
                    nxt.append(w)
        queue = nxt
        if goal in prev:
            break
    if goal not in prev:
        raise DqsError(f"no {('black', 'white')[color]} path from {start} to {goal}")
    steps = []
    v = goal
    while prev[v] is not None:
        u, q, s = prev[v]
        steps.append((q, s))
        v = u
    return GraphPath(color, tuple(reversed(steps)))


# ---------------------------------------------------------------------------
# periods


@dataclass(frozen=True)
class PeriodReport:
    """All six period families of a closed diamond form."""

    A: np.ndarray
    B: np.ndarray
    A_black: np.ndarray
    A_white: np.ndarray
    B_black: np.ndarray
    B_white: np.ndarray


@dataclass(frozen=True)
class HomologyBasis:
    """Canonical basis: cycles a_1..a_g, b_1..b_g with diagonal shadows."""

    a: tuple          # of Cycle
    b: tuple
    a_chains: tuple   # of BlackWhiteChains
    b_chains: tuple
    intersection: np.ndarray  # 2g x 2g in (a..., b...) order

    @property
    def g(self) -> int:
        return len(self.a)

    def all_cycles(self):
        return list(self.a) + list(self.b)

    def all_chains(self):
        return list(self.a_chains) + list(self.b_chains)


def build_basis(cx: QuadComplex, a_cycles, b_cycles) -> HomologyBasis:
    a_ch = tuple(black_white(cx, c) for c in a_cycles)
    b_ch = tuple(black_white(cx, c) for c in b_cycles)
    inter = intersection_matrix(cx, list(a_cycles) + list(b_cycles))
    return HomologyBasis(tuple(a_cycles), tuple(b_cycles), a_ch, b_ch, inter)


def periods(cx: QuadComplex, omega: DiamondForm, basis: HomologyBasis,
            tol: float = 1e-9) -> PeriodReport:
    """Period report of a closed form; raises if the form is not closed."""
    res = closedness_residual(cx, omega)
    scale = max(1.0, omega.norm())
    if res > tol * scale:
        raise NotClosedError(res)
    g = basis.g
    A = np.array([integrate_cycle(cx, omega, c) for c in basis.a])
    B = np.array([integrate_cycle(cx, omega, c) for c in basis.b])
    AB = np.array([2.0 * integrate_black_chain(cx, omega, ch.black) for ch in basis.a_chains])
    AW = np.array([2.0 * integrate_white_chain(cx, omega, ch.white) for ch in basis.a_chains])
    BB = np.array([2.0 * integrate_black_chain(cx, omega, ch.black) for ch in basis.b_chains])
    BW = np.array([2.0 * integrate_white_chain(cx, omega, ch.white) for ch in basis.b_chains])
    return PeriodReport(A.reshape(g), B.reshape(g), AB.reshape(g), AW.reshape(g),
                        BB.reshape(g), BW.reshape(g))


def verify_rbi(cx: QuadComplex, omega: DiamondForm, other: DiamondForm,
               basis: HomologyBasis, tol: float = 1e-9) -> float:
    """Residual of the bilinear identity relating the wedge integral to periods."""
    from .calculus import wedge
    p1 = periods(cx, omega, basis, tol)
    p2 = periods(cx, other, basis, tol)
    total = wedge(cx, omega, other).total()
    rhs = 0.5 * np.sum(p1.A_black * p2.B_white - p1.B_black * p2.A_white) \
        + 0.5 * np.sum(p1.A_white * p2.B_black - p1.B_white * p2.A_black)
    return abs(total - rhs)


# ---------------------------------------------------------------------------
# intersection numbers


def intersection_number(cx: QuadComplex, c1: Cycle, c2: Cycle) -> int:
    """Algebraic intersection of two medial cycles.

    The black shadow of the first and the white shadow of the second
    cross only inside quads, transversally, each crossing counting the
    product of diagonal directions (the black-then-white frame is
    positively oriented in every chart).
    """
    ch1 = black_white(cx, c1)
    ch2 = black_white(cx, c2)
    b = ch1.black_multiplicity(cx.nq)
    w = ch2.white_multiplicity(cx.nq)
    return int(np.dot(b, w))


def intersection_matrix(cx: QuadComplex, cycles) -> np.ndarray:
    n = len(cycles)
    M = np.zeros((n, n), dtype=int)
    for i in range(n):
        for j in range(n):
            if i != j:
                M[i, j] = intersection_number(cx, cycles[i], cycles[j])
    return M


# ---------------------------------------------------------------------------
# lifting diagonal walks to the medial graph


def _lift_step_edge(cx: QuadComplex, q: int, direction: int, color: int):
    """Medial edge parallel to the (q, direction) diagonal of given color."""
    if color == BLACK:
        slot = SLOT_WM if direction > 0 else SLOT_WP
    else:
        slot = SLOT_BP if direction > 0 else SLOT_BM
    return medial_edge_index(q, slot), 1


def _medial_vertex_of(cx: QuadComplex, e: int, s: int, end: bool):
    a, b = cx.medial_endpoints(e)
    if s < 0:
        a, b = b, a
    return b if end else a


def lift_diagonal_walk(cx: QuadComplex, walk, color: int) -> Cycle:
    """Closed medial walk tracing a closed walk on one diagonal graph.

    walk is a list of (quad, direction) steps whose diagonals chain into
    a closed walk on the color graph.  Each step contributes the
    parallel medial edge; consecutive steps are joined by arcs of the
    vertex face at the shared vertex, walked in ccw face order.
    """
    if not walk:
        return Cycle(())
    steps = [_lift_step_edge(cx, q, d, color) for (q, d) in walk]
    out = []
    n = len(walk)
    for i in range(n):
        e, s = steps[i]
        out.append((e, s))
        q, d = walk[i]
        a, b = cx.black_diagonal(q) if color == BLACK else cx.white_diagonal(q)
        v = b if d > 0 else a  # vertex the step arrives at
        e2, s2 = steps[(i + 1) % n]
        pos = _medial_vertex_of(cx, e, s, end=True)
        target = _medial_vertex_of(cx, e2, s2, end=False)
        cur = q
        guard = 0
        while pos != target:
            slot = cx.corner_slot(cur, v)
            p = cx.corner_prev(cur, slot)
            cur = cx._other_quad(cur, p, v)
            slot = cx.corner_slot(cur, v)
            out.append((medial_edge_index(cur, slot), -1))
            pv = cx.corner_prev(cur, slot)
            pos = (min(v, pv), max(v, pv))
            guard += 1
            if guard > len(cx.incidences[v]) + 1:
                raise SurfaceError(f"stuck connecting walk steps at vertex {v}")
    return Cycle(tuple(out))


# ---------------------------------------------------------------------------
# tree-cotree homology basis


def _symplectic_reduce(M: np.ndarray):
    """Unimodular U with U M U^T in a-then-b order equal to [[0, I], [-I, 0]].

    M must be the skew unimodular intersection matrix of a cycle basis.
    """
    M = M.copy()
    n = M.shape[0]
    U = np.eye(n, dtype=np.int64)

    def rowcol_op(dst, src, factor):
        M[dst, :] += factor * M[src, :]
        M[:, dst] += factor * M[:, src]
        U[dst, :] += factor * U[src, :]

    def swap(i, j):
        M[[i, j], :] = M[[j, i], :]
        M[:, [i, j]] = M[:, [j, i]]
        U[[i, j], :] = U[[j, i], :]

    for k in range(0, n, 2):
        while True:
            sub = M[k:, k:]
            nz = np.argwhere(sub != 0)
            if len(nz) == 0:
                raise DqsError("intersection matrix is degenerate")
            i, j = min(((i0 + k, j0 + k) for (i0, j0) in nz if i0 < j0),
                       key=lambda ij: (abs(M[ij[0], ij[1]]), ij))
            if i != k:
                swap(k, i)
                continue
            if j != k + 1:
                swap(k + 1, j)
                continue
            piv = M[k, k + 1]
            for t in range(k + 2, n):
                if M[k, t] != 0:
                    rowcol_op(t, k + 1, -(M[k, t] // piv))
                if M[k + 1, t] != 0:
                    rowcol_op(t, k, M[k + 1, t] // piv)
            if all(M[k, t] == 0 and M[k + 1, t] == 0 for t in range(k + 2, n)):
                break
        if M[k, k + 1] < 0:
            swap(k, k + 1)
        if M[k, k + 1] != 1:
            raise DqsError(f"intersection form pivot {M[k, k+1]} != 1; not unimodular")
    # reorder pairs (a1, b1, a2, b2, ...) into (a..., b...)
    order = list(range(0, n, 2)) + list(range(1, n, 2))
    return U[order, :]


def _concatenate_walks(walks_with_mult):
    out = []
    for walk, mult in walks_with_mult:
        if mult == 0:
            continue
        piece = walk if mult > 0 else [(q, -d) for (q, d) in reversed(walk)]
        for _ in range(abs(mult)):
            out.extend(piece)
    return out


def homology_basis(cx: QuadComplex) -> HomologyBasis:
    """Canonical homology basis from a tree-cotree split of the black graph.

    Quads outside a spanning tree of the black diagonal graph and a
    spanning cotree of the white one yield 2g independent cycles; an
    integer symplectic reduction of their intersection matrix produces
    cycles with the standard pairing, which are then rerouted onto the
    medial graph.
    """
    require_surface(cx)
    g = genus(cx)
    if g == 0:
        return HomologyBasis((), (), (), (), np.zeros((0, 0), dtype=int))

    blacks = sorted(v for v in range(cx.nv) if cx.colors[v] == BLACK)
    whites = sorted(v for v in range(cx.nv) if cx.colors[v] == WHITE)
    root = blacks[0]

    # spanning tree of the black graph (parent pointers over quads)
    tree_quads = set()
    parent = {root: None}
    queue = [root]
    while queue:
        nxt = []
        for u in queue:
            for q in range(cx.nq):
                a, b = cx.black_diagonal(q)
                w = b if a == u else (a if b == u else None)
                if w is None or w in parent:
                    continue
                parent[w] = (u, q, 1 if a == u else -1)
                tree_quads.add(q)
                nxt.append(w)
        queue = sorted(nxt)
    if len(parent) != len(blacks):
        raise SurfaceError("black diagonal graph is not connected")

    # spanning cotree of the white graph avoiding tree quads
    cotree_quads = set()
    wparent = {whites[0]: None}
    queue = [whites[0]]
    while queue:
        nxt = []
        for u in queue:
            for q in range(cx.nq):
                if q in tree_quads:
                    continue
                a, b = cx.white_diagonal(q)
                w = b if a == u else (a if b == u else None)
                if w is None or w in wparent:
                    continue
                wparent[w] = (u, q)
                cotree_quads.add(q)
                nxt.append(w)
        queue = sorted(nxt)
    if len(wparent) != len(whites):
        raise SurfaceError("white diagonal graph is not connected")

    extra = sorted(set(range(cx.nq)) - tree_quads - cotree_quads)
    if len(extra) != 2 * g:
        raise SurfaceError(
            f"tree-cotree split left {len(extra)} quads, expected {2 * g}")

    def tree_walk_to_root(v):
        steps = []
        while parent[v] is not None:
            u, q, d = parent[v]
            steps.append((q, -d))  # traversed from child v toward parent u
            v = u
        return steps

    fundamental = []
    for q in extra:
        a, b = cx.black_diagonal(q)
        walk = [(qq, -d) for (qq, d) in reversed(tree_walk_to_root(a))]
        walk.append((q, 1))
        walk.extend(tree_walk_to_root(b))
        fundamental.append(walk)

    lifts = [lift_diagonal_walk(cx, w, BLACK) for w in fundamental]
    M = intersection_matrix(cx, [Cycle(l.edges) for l in lifts])
    if np.any(M + M.T != 0):
        raise DqsError("intersection matrix of fundamental cycles is not skew")
    U = _symplectic_reduce(M)

    combined = []
    for row in U:
        walk = _concatenate_walks(list(zip(fundamental, row)))
        combined.append(lift_diagonal_walk(cx, walk, BLACK))

    a_cycles = tuple(Cycle(combined[k].edges, f"a{k+1}") for k in range(g))
    b_cycles = tuple(Cycle(combined[g + k].edges, f"b{k+1}") for k in range(g))
    basis = build_basis(cx, a_cycles, b_cycles)
    expected = np.block([
        [np.zeros((g, g), int), np.eye(g, dtype=int)],
        [-np.eye(g, dtype=int), np.zeros((g, g), int)],
    ])
    if not np.array_equal(basis.intersection, expected):
        raise DqsError("constructed basis does not have the standard pairing")
    return basis


# ---------------------------------------------------------------------------
# explicit bases on generated tori


def standard_torus_basis(cx: QuadComplex, m: int, n: int) -> HomologyBasis:
    """Meridian/longitude basis on a gen_torus grid (ids j*m + i).

    The a-cycle crosses the bottom row of cells left to right, the
    b-cycle the left column bottom to top; their pairing is +1.
    """
    def vid(i, j):
        return (j % n) * m + (i % m)

    def qid(i, j):
        return (j % n) * m + (i % m)

    a_edges = []
    for i in range(m):
        q = qid(i, 0)
        t = cx.quads[q]
        # the two boundary edges keyed by the bottom corners of the cell
        for v in (vid(i, 0), vid(i + 1, 0)):
            slot = t.index(v)
            # traverse left to right: slot order around the bottom
            a_edges.append((medial_edge_index(q, slot), 0))
    # fix orientations by chaining: start at midpoint of left edge of cell 0
    a_cycle = _orient_chain(cx, [e for (e, _) in a_edges],
                            start_pair=(min(vid(0, 0), vid(0, 1)), max(vid(0, 0), vid(0, 1))))
    b_edges = []
    for j in range(n):
        q = qid(0, j)
        t = cx.quads[q]
        for v in (vid(0, j), vid(0, j + 1)):
            slot = t.index(v)
            b_edges.append((medial_edge_index(q, slot), 0))
    b_cycle = _orient_chain(cx, [e for (e, _) in b_edges],
                            start_pair=(min(vid(0, 0), vid(1, 0)), max(vid(0, 0), vid(1, 0))))
    a = Cycle(a_cycle, "a1")
    b = Cycle(b_cycle, "b1")
    if intersection_number(cx, a, b) != 1:
        raise DqsError("grid cycles do not pair to +1; orientation convention broken")
    basis = build_basis(cx, (a,), (b,))
    expected = np.array([[0, 1], [-1, 0]])
    if not np.array_equal(basis.intersection, expected):
        raise DqsError("torus basis does not have the standard pairing")
    return basis


def _orient_chain(cx: QuadComplex, edges, start_pair):
    """Orient an unordered chain of medial edges into a closed walk.

    Uses vertex-pair endpoints; on doubled-edge grids pairs may repeat,
    but the cells visited are distinct so chaining by pairs stays valid.
    """
    remaining = list(edges)
    out = []
    pos = start_pair
    guard = 0
    while remaining:
        guard += 1
        if guard > len(edges) + 2:
            raise DqsError("could not orient cycle edges into a walk")
        for idx, e in enumerate(remaining):
            a, b = cx.medial_endpoints(e)
            if a == pos:
                out.append((e, 1))
                pos = b
                remaining.pop(idx)
                break
            if b == pos:
                out.append((e, -1))
                pos = a
                remaining.pop(idx)
                break
        else:
            raise DqsError("cycle edges do not chain")
    if pos != start_pair:
        raise DqsError("cycle edges do not close up")
    return tuple(out)
