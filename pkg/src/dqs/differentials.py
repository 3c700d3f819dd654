"""Harmonic and holomorphic differentials, period matrices, Abelian forms.

All solvers work in the per-quad unknowns of a diamond form.  A general
form has two complex unknowns per quad (its black and white values); a
form without antiholomorphic part has one (the dz coefficient p, whose
black value is p and white value i*rho*p).  Closedness at a vertex is
one linear equation in the incident quads' values, and periods are
linear functionals over the stored basis chains, so existence and
uniqueness theorems turn into small dense least-squares problems whose
residuals we check explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguityError, DqsError, SolveError
from .calculus import DiamondForm, decompose_all, from_coefficients
from .homology import (
    HomologyBasis,
    integrate_black_chain,
    integrate_cycle,
    integrate_white_chain,
)
from .surface import BLACK, WHITE, QuadComplex, varignon_area


def _closedness_rows_full(cx: QuadComplex):
    """Closedness of a general diamond form: one row per vertex.

    Unknown layout: black values 0..nq-1, white values nq..2nq-1.
    Around a black vertex only white values enter and vice versa.
    """
    rows = np.zeros((cx.nv, 2 * cx.nq), dtype=complex)
    for q, t in enumerate(cx.quads):
        bm, wm, bp, wp = t
        rows[bp, cx.nq + q] -= 1.0
        rows[bm, cx.nq + q] += 1.0
        rows[wm, q] -= 1.0
        rows[wp, q] += 1.0
    return rows


def _star_matrix(cx: QuadComplex):
    """Per-quad 2x2 blocks of the Hodge star in (black, white) values."""
    rho = np.asarray(cx.rho)
    re, im, a2 = rho.real, rho.imag, np.abs(rho) ** 2
    return (-im / re, -1.0 / re, a2 / re, im / re)  # bb, bw, wb, ww


def _chain_row_black(cx: QuadComplex, chain, row, offset=0, factor=2.0):
    for q, s in chain:
        row[offset + q] += factor * s


def _chain_row_white(cx: QuadComplex, chain, row, offset, factor=2.0):
    for q, s in chain:
        row[offset + q] += factor * s


def harmonic_with_periods(cx: QuadComplex, basis: HomologyBasis, targets,
                          tol: float = 1e-9) -> DiamondForm:
    """The unique closed and co-closed form with prescribed shadow periods.

    targets holds (A_black, A_white, B_black, B_white) stacked as four
    length-g blocks.
    """
    g = basis.g
    targets = np.asarray(targets, dtype=complex).reshape(4 * g)
    nq = cx.nq
    closed = _closedness_rows_full(cx)
    sbb, sbw, swb, sww = _star_matrix(cx)
    costar = np.zeros((cx.nv, 2 * nq), dtype=complex)
    # co-closedness: closedness of the starred form
    for q, t in enumerate(cx.quads):
        bm, wm, bp, wp = t
        costar[bp, q] -= swb[q]
        costar[bp, nq + q] -= sww[q]
        costar[bm, q] += swb[q]
        costar[bm, nq + q] += sww[q]
        costar[wm, q] -= sbb[q]
        costar[wm, nq + q] -= sbw[q]
        costar[wp, q] += sbb[q]
        costar[wp, nq + q] += sbw[q]

    period_rows = np.zeros((4 * g, 2 * nq), dtype=complex)
    for k in range(g):
        _chain_row_black(cx, basis.a_chains[k].black, period_rows[k])
        _chain_row_white(cx, basis.a_chains[k].white, period_rows[g + k], nq)
        _chain_row_black(cx, basis.b_chains[k].black, period_rows[2 * g + k])
        _chain_row_white(cx, basis.b_chains[k].white, period_rows[3 * g + k], nq)

    A = np.vstack([closed, costar, period_rows])
    rhs = np.concatenate([np.zeros(2 * cx.nv, complex), targets])
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    res = np.abs(A @ sol - rhs).max()
    if res > tol * max(1.0, np.abs(targets).max(initial=0.0)):
        raise SolveError(f"harmonic system residual {res:.3e} exceeds tolerance")
    return DiamondForm(sol[:nq], sol[nq:])


def nullity_harmonic(cx: QuadComplex, cutoff: float = 1e-9) -> int:
    """Dimension of the space of harmonic forms (expected 4g)."""
    closed = _closedness_rows_full(cx)
    nq = cx.nq
    sbb, sbw, swb, sww = _star_matrix(cx)
    costar = np.zeros((cx.nv, 2 * nq), dtype=complex)
    for q, t in enumerate(cx.quads):
        bm, wm, bp, wp = t
        costar[bp, q] -= swb[q]
        costar[bp, nq + q] -= sww[q]
        costar[bm, q] += swb[q]
        costar[bm, nq + q] += sww[q]
        costar[wm, q] -= sbb[q]
        costar[wm, nq + q] -= sbw[q]
        costar[wp, q] += sbb[q]
        costar[wp, nq + q] += sbw[q]
    return _nullity(np.vstack([closed, costar]), cutoff)


def _nullity(A: np.ndarray, cutoff: float = 1e-9) -> int:
    if A.shape[0] == 0:
        return A.shape[1]
    s = np.linalg.svd(A, compute_uv=False)
    smax = s.max(initial=0.0)
    if smax == 0.0:
        return A.shape[1]
    rank = int(np.sum(s > cutoff * smax))
    return A.shape[1] - rank


def _holomorphic_closedness(cx: QuadComplex):
    """Closedness rows for pure-dz forms in the unknowns p per quad."""
    rho = np.asarray(cx.rho)
    rows = np.zeros((cx.nv, cx.nq), dtype=complex)
    for q, t in enumerate(cx.quads):
        bm, wm, bp, wp = t
        rows[bp, q] -= 1j * rho[q]
        rows[bm, q] += 1j * rho[q]
        rows[wm, q] -= 1.0
        rows[wp, q] += 1.0
    return rows


def nullity_holomorphic(cx: QuadComplex, cutoff: float = 1e-9) -> int:
    """Dimension of the space of holomorphic forms (expected 2g)."""
    return _nullity(_holomorphic_closedness(cx), cutoff)


def holomorphic_with_a_periods(cx: QuadComplex, basis: HomologyBasis, targets,
                               tol: float = 1e-9) -> DiamondForm:
    """The unique holomorphic form with prescribed black/white a-periods.

    targets holds (A_black_1..g, A_white_1..g).
    """
    g = basis.g
    targets = np.asarray(targets, dtype=complex).reshape(2 * g)
    rho = np.asarray(cx.rho)
    closed = _holomorphic_closedness(cx)
    period_rows = np.zeros((2 * g, cx.nq), dtype=complex)
    for k in range(g):
        _chain_row_black(cx, basis.a_chains[k].black, period_rows[k])
        for q, s in basis.a_chains[k].white:
            period_rows[g + k, q] += 2.0 * s * 1j * rho[q]
    A = np.vstack([closed, period_rows])
    rhs = np.concatenate([np.zeros(cx.nv, complex), targets])
    sol, _, rank, _ = np.linalg.lstsq(A, rhs, rcond=None)
    if rank < cx.nq:
        raise SolveError(
            f"holomorphic system rank {rank} < {cx.nq}; a-periods do not "
            "determine the form")
    res = np.abs(A @ sol - rhs).max()
    if res > tol * max(1.0, np.abs(targets).max(initial=0.0)):
        raise SolveError(f"holomorphic system residual {res:.3e} exceeds tolerance")
    return from_coefficients(cx, sol)


@dataclass(frozen=True)
class HolomorphicBasis:
    """Canonical basis and canonical set of holomorphic differentials.

    omega_black[k] has black a_j-period delta_jk and zero white
    a-periods; omega_white[k] mirrors it; omega[k] is their sum, the
    form with both a_j-period families equal to delta_jk.
    """

    omega_black: tuple
    omega_white: tuple
    omega: tuple

    @property
    def g(self) -> int:
        return len(self.omega)


def canonical_bases(cx: QuadComplex, basis: HomologyBasis, tol: float = 1e-9) -> HolomorphicBasis:
    g = basis.g
    ob, ow, o = [], [], []
    for k in range(g):
        tb = np.zeros(2 * g, complex)
        tb[k] = 1.0
        tw = np.zeros(2 * g, complex)
        tw[g + k] = 1.0
        fb = holomorphic_with_a_periods(cx, basis, tb, tol)
        fw = holomorphic_with_a_periods(cx, basis, tw, tol)
        ob.append(fb)
        ow.append(fw)
        o.append(fb + fw)
    return HolomorphicBasis(tuple(ob), tuple(ow), tuple(o))


@dataclass(frozen=True)
class PeriodMatrices:
    """Discrete period matrices of a surface with a given basis.

    Pi is g x g; Pi_full is the 2g x 2g block matrix
    [[BW, BB], [WW, WB]] (rows: black then white b-shadows; columns:
    white-normalized then black-normalized basis forms); Pi_black and
    Pi_white are the shadow b-periods of the canonical set.
    """

    Pi: np.ndarray
    Pi_full: np.ndarray
    Pi_black: np.ndarray
    Pi_white: np.ndarray
    BB: np.ndarray
    BW: np.ndarray
    WB: np.ndarray
    WW: np.ndarray

    @property
    def g(self) -> int:
        return self.Pi.shape[0]


def period_matrices(cx: QuadComplex, basis: HomologyBasis,
                    hb: HolomorphicBasis = None, tol: float = 1e-8) -> PeriodMatrices:
    """All period matrices; raises if symmetry or positivity fails."""
    if hb is None:
        hb = canonical_bases(cx, basis)
    g = basis.g
    BB = np.zeros((g, g), complex)
    BW = np.zeros((g, g), complex)
    WB = np.zeros((g, g), complex)
    WW = np.zeros((g, g), complex)
    Pi = np.zeros((g, g), complex)
    for j in range(g):
        bj = basis.b_chains[j]
        for k in range(g):
            BB[j, k] = 2.0 * integrate_black_chain(cx, hb.omega_black[k], bj.black)
            BW[j, k] = 2.0 * integrate_black_chain(cx, hb.omega_white[k], bj.black)
            WB[j, k] = 2.0 * integrate_white_chain(cx, hb.omega_black[k], bj.white)
            WW[j, k] = 2.0 * integrate_white_chain(cx, hb.omega_white[k], bj.white)
            Pi[j, k] = integrate_cycle(cx, hb.omega[k], basis.b[j])
    Pi_full = np.block([[BW, BB], [WW, WB]])
    Pi_black = BW + BB
    Pi_white = WW + WB
    if g:
        avg = (BW + BB + WW + WB) / 2.0
        checks = [
            ("Pi vs shadow average", np.abs(Pi - avg).max()),
            ("Pi symmetry", np.abs(Pi - Pi.T).max()),
            ("Pi_full symmetry", np.abs(Pi_full - Pi_full.T).max()),
            ("BB^T = WW", np.abs(BB.T - WW).max()),
        ]
        for name, err in checks:
            if err > tol:
                raise SolveError(f"period matrix inconsistency ({name}): {err:.3e}")
        for name, mat in (("Im Pi", Pi), ("Im Pi_full", Pi_full)):
            eigs = np.linalg.eigvalsh((mat.imag + mat.imag.T) / 2.0)
            if eigs.min() <= -tol:
                raise SolveError(f"{name} not positive definite (min eig {eigs.min():.3e})")
    return PeriodMatrices(Pi, Pi_full, Pi_black, Pi_white, BB, BW, WB, WW)


def transform_periods(Pi_full: np.ndarray, A, B, C, D) -> np.ndarray:
    """Complete period matrix after an integer symplectic change of basis.

    (A B; C D) maps (a, b) to (a', b') = (A a + B b, C a + D b).  The
    doubled-block fractional transformation acts in the row convention
    (white shadows first); our storage interleaves black and white
    shadow rows, so we conjugate by the block swap before and after.
    """
    A, B, C, D = (np.asarray(M, dtype=float) for M in (A, B, C, D))
    g = A.shape[0]
    S = np.block([[A, B], [C, D]])
    J = np.block([[np.zeros((g, g)), np.eye(g)], [-np.eye(g), np.zeros((g, g))]])
    if not np.allclose(S @ J @ S.T, J, atol=1e-12):
        raise DqsError("(A B; C D) is not symplectic")
    P = np.block([[np.zeros((g, g)), np.eye(g)], [np.eye(g), np.zeros((g, g))]])
    dbl = lambda M: np.block([[M, np.zeros((g, g))], [np.zeros((g, g)), M]])
    Pi_hat = P @ np.asarray(Pi_full, dtype=complex)
    num = dbl(C) + dbl(D) @ Pi_hat
    den = dbl(A) + dbl(B) @ Pi_hat
    if abs(np.linalg.det(den)) < 1e-14:
        raise DqsError("transformation denominator is singular")
    return P @ (num @ np.linalg.inv(den))


# ---------------------------------------------------------------------------
# residues and Abelian differentials


def residues(cx: QuadComplex, omega: DiamondForm) -> np.ndarray:
    """Residue at every vertex: boundary integral of F_v over 2*pi*i."""
    out = np.zeros(cx.nv, dtype=complex)
    for q, t in enumerate(cx.quads):
        bm, wm, bp, wp = t
        out[wm] -= omega.black[q]
        out[wp] += omega.black[q]
        out[bp] -= omega.white[q]
        out[bm] += omega.white[q]
    return out / (2j * math.pi)


def residue(cx: QuadComplex, omega: DiamondForm, v: int) -> complex:
    return complex(residues(cx, omega)[v])


@dataclass(frozen=True)
class AbelianDifferential:
    """A diamond form with recorded pole data.

    kind is "first", "second", or "third"; dzbar_defect maps quads with
    a double pole to their dzbar coefficient in the normalized chart;
    prescribed_residues maps simple-pole vertices to their residues.
    """

    form: DiamondForm
    kind: str
    prescribed_residues: dict = field(default_factory=dict)
    dzbar_defect: dict = field(default_factory=dict)

    def p_coefficient(self, cx: QuadComplex, q: int) -> complex:
        p, _ = decompose_all(cx, self.form)
        return complex(p[q])


def _residue_rows_pure(cx: QuadComplex):
    """Residues of p dz forms: rows in the unknowns p (factor 2*pi*i kept)."""
    rho = np.asarray(cx.rho)
    rows = np.zeros((cx.nv, cx.nq), dtype=complex)
    for q, t in enumerate(cx.quads):
        bm, wm, bp, wp = t
        rows[wm, q] -= 1.0
        rows[wp, q] += 1.0
        rows[bp, q] -= 1j * rho[q]
        rows[bm, q] += 1j * rho[q]
    return rows


def _cycle_rows_pure(cx: QuadComplex, cycles):
    """Plain medial integrals of p dz forms over explicit cycles."""
    from .surface import SLOT_BP, SLOT_WM, SLOT_WP

    rho = np.asarray(cx.rho)
    rows = np.zeros((len(cycles), cx.nq), dtype=complex)
    for i, c in enumerate(cycles):
        for e, s in c.edges:
            q, slot = divmod(e, 4)
            if slot == SLOT_WM:
                rows[i, q] += s
            elif slot == SLOT_WP:
                rows[i, q] -= s
            elif slot == SLOT_BP:
                rows[i, q] += s * 1j * rho[q]
            else:
                rows[i, q] -= s * 1j * rho[q]
    return rows


def _a_period_rows_pure(cx: QuadComplex, basis: HomologyBasis) -> np.ndarray:
    """Black and white a-period functionals of p dz forms (doubled chains)."""
    g = basis.g
    rho = np.asarray(cx.rho)
    rows = np.zeros((2 * g, cx.nq), dtype=complex)
    for k in range(g):
        _chain_row_black(cx, basis.a_chains[k].black, rows[k])
        for q, s in basis.a_chains[k].white:
            rows[g + k, q] += 2.0 * s * 1j * rho[q]
    return rows


def abelian_third(cx: QuadComplex, basis: HomologyBasis, v: int, v2: int,
                  tol: float = 1e-9) -> AbelianDifferential:
    """Normalized third-kind differential: residues +1 at v, -1 at v2.

    Both poles must share a color.  No double poles are allowed, and the
    black and white a-periods over the stored basis chains vanish, the
    same normalization the second kind uses; a holomorphic form with
    vanishing black and white a-periods is zero, so the result is
    unique.  (Normalizing the plain medial integrals instead is singular
    on every parallelogram-grid torus, where the two checkerboard weight
    classes multiply to one and plain periods cannot separate the
    holomorphic forms.)
    """
    if v == v2 or cx.colors[v] != cx.colors[v2]:
        raise DqsError("poles must be two distinct vertices of the same color")
    res_rows = _residue_rows_pure(cx)
    target = np.zeros(cx.nv, complex)
    target[v] = 1.0
    target[v2] = -1.0
    A = np.vstack([res_rows, _a_period_rows_pure(cx, basis)])
    rhs = np.concatenate([2j * math.pi * target, np.zeros(2 * basis.g, complex)])
    sol, _, rank, _ = np.linalg.lstsq(A, rhs, rcond=None)
    if rank < cx.nq:
        raise AmbiguityError(
            "third-kind normalization system is singular; the result "
            "would not be unique")
    res = np.abs(A @ sol - rhs).max()
    if res > tol * max(1.0, np.abs(rhs).max()):
        raise SolveError(f"third-kind system residual {res:.3e}")
    return AbelianDifferential(from_coefficients(cx, sol), "third",
                               {v: 1.0, v2: -1.0}, {})


def b_period_average(cx: QuadComplex, omega: DiamondForm, basis: HomologyBasis,
                     k: int) -> complex:
    """Average of the shadow b_k-periods over the stored representatives.

    For closed forms this is the plain b_k-period; for differentials
    with simple poles it is the quantity entering the third-kind
    b-period law.
    """
    ch = basis.b_chains[k]
    return complex(integrate_black_chain(cx, omega, ch.black)
                   + integrate_white_chain(cx, omega, ch.white))


def abelian_second(cx: QuadComplex, basis: HomologyBasis, q0: int,
                   tol: float = 1e-9) -> AbelianDifferential:
    """Second-kind differential: one double pole at q0, no residues.

    In the normalized chart of q0 the dzbar coefficient is pinned to
    -pi / (2 * area of the medial parallelogram); all black and white
    a-periods vanish.
    """
    qbar = -math.pi / (2.0 * varignon_area(cx.rho[q0]))
    defect = np.zeros(cx.nq, complex)
    defect[q0] = qbar
    defect_form = from_coefficients(cx, np.zeros(cx.nq, complex), defect)

    res_rows = _residue_rows_pure(cx)
    g = basis.g
    A = np.vstack([res_rows, _a_period_rows_pure(cx, basis)])

    # the fixed dzbar part contributes to residues and periods
    rhs_res = -2j * math.pi * residues(cx, defect_form)
    rhs_per = np.zeros(2 * g, complex)
    for k in range(g):
        rhs_per[k] = -2.0 * integrate_black_chain(cx, defect_form, basis.a_chains[k].black)
        rhs_per[g + k] = -2.0 * integrate_white_chain(cx, defect_form, basis.a_chains[k].white)
    rhs = np.concatenate([rhs_res, rhs_per])
    sol, _, rank, _ = np.linalg.lstsq(A, rhs, rcond=None)
    if rank < cx.nq:
        raise SolveError("second-kind system is rank deficient")
    res = np.abs(A @ sol - rhs).max()
    if res > tol * max(1.0, np.abs(rhs).max()):
        raise SolveError(f"second-kind system residual {res:.3e}")
    form = from_coefficients(cx, sol) + defect_form
    return AbelianDifferential(form, "second", {}, {q0: complex(qbar)})


def abelian_basis(cx: QuadComplex, basis: HomologyBasis, b0: int, w0: int,
                  hb: HolomorphicBasis = None):
    """The spanning family: first, second, and third kind differentials.

    Returns 2g + nq + nv - 2 differentials: the canonical basis, one
    second-kind form per quad, and third-kind forms pairing b0 and w0
    with every other vertex of their color.  Their value vectors span
    the full 2*nq-dimensional space of diamond forms.
    """
    if cx.colors[b0] != BLACK or cx.colors[w0] != WHITE:
        raise DqsError("base points must be one black and one white vertex")
    if hb is None:
        hb = canonical_bases(cx, basis)
    out = []
    for k in range(basis.g):
        out.append(AbelianDifferential(hb.omega_black[k], "first"))
        out.append(AbelianDifferential(hb.omega_white[k], "first"))
    for q in range(cx.nq):
        out.append(abelian_second(cx, basis, q))
    for v in range(cx.nv):
        if v in (b0, w0):
            continue
        base = b0 if cx.colors[v] == BLACK else w0
        out.append(abelian_third(cx, basis, base, v))
    return out
