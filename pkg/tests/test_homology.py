import numpy as np
import pytest

from dqs import (
    BLACK,
    WHITE,
    Cycle,
    DiamondForm,
    black_white,
    d_function,
    gen_torus,
    graph_path,
    homology_basis,
    integrate_cycle,
    integrate_graph_path,
    intersection_number,
    periods,
    standard_torus_basis,
    verify_rbi,
)
from dqs.errors import NotClosedError
from dqs.homology import (
    GraphPath,
    chain_is_closed,
    cycle_is_closed_walk,
    lift_diagonal_walk,
)
from dqs.surface import FACE_Q_ORDER, medial_edge_index


def torus_dz(cx, m, n, tau):
    """The globally defined coordinate differential of a flat grid torus."""
    u, w = 1.0 / m, tau / n
    black = np.zeros(cx.nq, complex)
    white = np.zeros(cx.nq, complex)
    for j in range(n):
        for i in range(m):
            q = j * m + i
            if (i + j) % 2 == 0:
                black[q], white[q] = (u + w) / 2, (w - u) / 2
            else:
                black[q], white[q] = (w - u) / 2, -(u + w) / 2
    return DiamondForm(black, white)


def random_closed(cx, basis, hb, rng):
    from dqs import canonical_bases, d_function

    f = rng.normal(size=cx.nv) + 1j * rng.normal(size=cx.nv)
    omega = d_function(cx, f)
    for k in range(basis.g):
        c = rng.normal(size=4) + 1j * rng.normal(size=4)
        omega = omega + c[0] * hb.omega_black[k] + c[1] * hb.omega_white[k] \
            + c[2] * hb.omega_black[k].conjugate() + c[3] * hb.omega_white[k].conjugate()
    return omega


class TestBasisConstruction:
    def test_cube_empty(self, cube):
        basis = homology_basis(cube)
        assert basis.g == 0
        assert basis.intersection.shape == (0, 0)

    def test_torus_standard(self, torus44):
        basis = standard_torus_basis(torus44, 4, 4)
        assert basis.g == 1
        assert basis.intersection.tolist() == [[0, 1], [-1, 0]]
        assert cycle_is_closed_walk(torus44, basis.a[0])
        assert cycle_is_closed_walk(torus44, basis.b[0])

    def test_torus_generic(self, torus44):
        basis = homology_basis(torus44)
        assert basis.intersection.tolist() == [[0, 1], [-1, 0]]
        for c in basis.all_cycles():
            assert cycle_is_closed_walk(torus44, c)

    def test_genus3(self, cube_cover):
        total, _, _ = cube_cover
        basis = homology_basis(total)
        assert basis.g == 3
        J = np.block([[np.zeros((3, 3), int), np.eye(3, dtype=int)],
                      [-np.eye(3, dtype=int), np.zeros((3, 3), int)]])
        assert np.array_equal(basis.intersection, J)
        # recompute every crossing from scratch
        cycles = basis.all_cycles()
        for i in range(6):
            for j in range(6):
                if i != j:
                    assert intersection_number(total, cycles[i], cycles[j]) \
                        == basis.intersection[i, j]


class TestBlackWhite:
    def test_quad_face_shadows_cancel(self, torus44):
        face = Cycle(tuple((medial_edge_index(5, s), 1) for s in FACE_Q_ORDER))
        ch = black_white(torus44, face)
        assert ch.black_multiplicity(16).tolist() == [0] * 16
        assert ch.white_multiplicity(16).tolist() == [0] * 16
        # the two black edges traverse the diagonal forth and back
        assert sorted(s for (_, s) in ch.black) == [-1, 1]
        assert sorted(s for (_, s) in ch.white) == [-1, 1]

    def test_meridian_black_shadow(self, torus44):
        basis = standard_torus_basis(torus44, 4, 4)
        ch = basis.a_chains[0]
        # the horizontal cycle crosses the four bottom-row quads once each
        assert sorted(q for (q, _) in ch.black) == [0, 1, 2, 3]
        assert chain_is_closed(torus44, ch.black, BLACK)
        assert chain_is_closed(torus44, ch.white, WHITE)

    def test_random_cycle_shadows_closed(self, torus46, rng):
        # random closed medial walks from the vertex-face boundaries and
        # basis cycles combined
        basis = standard_torus_basis(torus46, 4, 6)
        for rep in range(50):
            base = basis.a[0] if rep % 2 else basis.b[0]
            v = int(rng.integers(torus46.nv))
            detour = tuple((medial_edge_index(q, slot), -1)
                           for (q, slot) in torus46.stars[v])
            cyc = Cycle(base.edges + detour)
            ch = black_white(torus46, cyc)
            assert chain_is_closed(torus46, ch.black, BLACK)
            assert chain_is_closed(torus46, ch.white, WHITE)


class TestPeriods:
    def test_exact_forms_have_zero_periods(self, torus46, rng):
        basis = standard_torus_basis(torus46, 4, 6)
        f = rng.normal(size=torus46.nv) + 1j * rng.normal(size=torus46.nv)
        rep = periods(torus46, d_function(torus46, f), basis)
        for arr in (rep.A, rep.B, rep.A_black, rep.A_white, rep.B_black, rep.B_white):
            assert np.abs(arr).max() < 1e-12

    def test_torus_coordinate_periods(self, torus44, torus46):
        for cx, m, n, tau in ((torus44, 4, 4, 1j), (torus46, 4, 6, 0.3 + 1.2j)):
            basis = standard_torus_basis(cx, m, n)
            rep = periods(cx, torus_dz(cx, m, n, tau), basis)
            assert abs(rep.A[0] - 1) < 1e-12
            assert abs(rep.B[0] - tau) < 1e-12

    def test_shadow_average(self, torus46, rng):
        from dqs import canonical_bases

        basis = standard_torus_basis(torus46, 4, 6)
        hb = canonical_bases(torus46, basis)
        for _ in range(10):
            omega = random_closed(torus46, basis, hb, rng)
            rep = periods(torus46, omega, basis)
            assert np.abs(2 * rep.A - rep.A_black - rep.A_white).max() < 1e-10
            assert np.abs(2 * rep.B - rep.B_black - rep.B_white).max() < 1e-10

    def test_not_closed_rejected(self, torus44, rng):
        basis = standard_torus_basis(torus44, 4, 4)
        omega = DiamondForm(rng.normal(size=16), rng.normal(size=16))
        with pytest.raises(NotClosedError):
            periods(torus44, omega, basis)

    def test_reroute_invariance(self, torus46, rng):
        from dqs import canonical_bases

        basis = standard_torus_basis(torus46, 4, 6)
        hb = canonical_bases(torus46, basis)
        omega = random_closed(torus46, basis, hb, rng)
        for cyc in (basis.a[0], basis.b[0]):
            base_val = integrate_cycle(torus46, omega, cyc)
            for rep in range(3):
                v = int(rng.integers(torus46.nv))
                detour = tuple((medial_edge_index(q, slot), -1)
                               for (q, slot) in torus46.stars[v])
                rerouted = Cycle(cyc.edges + detour)
                assert abs(integrate_cycle(torus46, omega, rerouted) - base_val) < 1e-12


class TestRBI:
    def test_sphere_wedge_vanishes(self, cube, rng):
        from dqs import wedge

        basis = homology_basis(cube)
        for _ in range(10):
            f1 = rng.normal(size=cube.nv) + 1j * rng.normal(size=cube.nv)
            f2 = rng.normal(size=cube.nv) + 1j * rng.normal(size=cube.nv)
            w1, w2 = d_function(cube, f1), d_function(cube, f2)
            assert abs(wedge(cube, w1, w2).total()) < 1e-12
            assert verify_rbi(cube, w1, w2, basis) < 1e-12

    def test_random_closed_forms(self, torus44, rng):
        from dqs import canonical_bases

        basis = standard_torus_basis(torus44, 4, 4)
        hb = canonical_bases(torus44, basis)
        for _ in range(20):
            w1 = random_closed(torus44, basis, hb, rng)
            w2 = random_closed(torus44, basis, hb, rng)
            assert verify_rbi(torus44, w1, w2, basis) < 1e-9

    def test_self_pairing_imaginary(self, torus44, rng):
        from dqs import canonical_bases, wedge

        basis = standard_torus_basis(torus44, 4, 4)
        hb = canonical_bases(torus44, basis)
        omega = random_closed(torus44, basis, hb, rng)
        assert verify_rbi(torus44, omega, omega, basis) < 1e-9
        assert abs(wedge(torus44, omega, omega).total()) < 1e-10


class TestGraphPaths:
    def test_empty_path(self, torus44):
        omega = torus_dz(torus44, 4, 4, 1j)
        assert integrate_graph_path(torus44, omega, GraphPath(BLACK, ())) == 0

    def test_single_diagonal(self, torus44, rng):
        omega = DiamondForm(rng.normal(size=16) + 1j * rng.normal(size=16),
                            rng.normal(size=16) + 1j * rng.normal(size=16))
        path = GraphPath(BLACK, ((5, 1),))
        assert integrate_graph_path(torus44, omega, path) == pytest.approx(2 * omega.black[5])

    def test_path_independence_for_closed(self):
        # two routes between black vertices inside a simply connected patch
        # (forbidding one row and one column of quads cuts both handles)
        cx = gen_torus(6, 6, 0.5 + 0.9j)
        omega = torus_dz(cx, 6, 6, 0.5 + 0.9j)
        cut = {j * 6 + i for j in range(6) for i in range(6) if i == 0 or j == 0}
        p1 = graph_path(cx, BLACK, 7, 21, forbidden_quads=cut)
        p2 = graph_path(cx, BLACK, 7, 21,
                        forbidden_quads=cut | {p1.steps[1][0]})
        assert p1.steps != p2.steps
        v1 = integrate_graph_path(cx, omega, p1)
        v2 = integrate_graph_path(cx, omega, p2)
        assert abs(v1 - v2) < 1e-12


class TestLift:
    def test_lift_is_closed_walk(self, torus46):
        # lift the black shadow of a tree-cotree fundamental cycle
        basis = homology_basis(torus46)
        for cyc in basis.all_cycles():
            assert cycle_is_closed_walk(torus46, cyc)

    def test_lift_preserves_black_shadow(self, torus44):
        walk = [(0, 1), (1, -1), (2, 1), (3, -1)]  # horizontal black loop
        lifted = lift_diagonal_walk(torus44, walk, BLACK)
        ch = black_white(torus44, Cycle(lifted.edges))
        mult = ch.black_multiplicity(16)
        expected = np.zeros(16, int)
        for q, s in walk:
            expected[q] += s
        assert mult.tolist() == expected.tolist()
