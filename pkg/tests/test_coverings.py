import numpy as np
import pytest

from dqs import (
    CoveringMap,
    branch_vertex,
    check_riemann_hurwitz,
    gen_cube_double_cover,
    gen_torus,
    gen_torus_unbranched_cover,
    genus,
    sheet_count,
    validate,
    validate_map,
)
from dqs.coverings import is_biconstant_quad


@pytest.fixture(scope="module")
def cover():
    return gen_cube_double_cover()


class TestValidateMap:
    def test_identity(self, torus44):
        m = CoveringMap(torus44, torus44, range(16))
        assert validate_map(m).ok

    def test_cube_cover(self, cover):
        total, base, cmap = cover
        assert validate(total).ok and validate(base).ok
        assert validate_map(cmap).ok

    def test_color_break_detected(self, torus44):
        vm = list(range(16))
        vm[0] = 1  # black onto white
        rep = validate_map(CoveringMap(torus44, torus44, vm))
        assert not rep.ok

    def test_star_condition_violation(self, torus44):
        vm = list(range(16))
        vm[0] = 10  # tears quad corners apart
        rep = validate_map(CoveringMap(torus44, torus44, vm))
        assert not rep.ok


class TestBranchVertex:
    def test_regular_points(self, torus44):
        m = CoveringMap(torus44, torus44, range(16))
        assert all(branch_vertex(m, v) == 1 for v in range(16))

    def test_cover_branch_points(self, cover):
        total, base, cmap = cover
        ks = [branch_vertex(cmap, v) for v in range(total.nv)]
        assert sorted(ks)[-8:] == [2] * 8
        assert sorted(ks)[:-8] == [1] * (total.nv - 8)
        # every branch point sits over an original cube corner
        for v in range(total.nv):
            if branch_vertex(cmap, v) == 2:
                assert cmap.image(v) < 8

    def test_biconstant_everywhere_gives_zero(self, torus44):
        vm = [0 if torus44.colors[v] == 0 else 1 for v in range(16)]
        m = CoveringMap(torus44, torus44, vm)
        assert all(is_biconstant_quad(m, q) for q in range(16))
        assert branch_vertex(m, 0) == 0


class TestSheetCount:
    def test_identity(self, torus44):
        assert sheet_count(CoveringMap(torus44, torus44, range(16))) == 1

    def test_cube_cover(self, cover):
        _, _, cmap = cover
        assert sheet_count(cmap) == 2

    def test_per_quad_counts_match(self, cover):
        # every base quad has exactly two bijective preimages
        from dqs.coverings import quad_image

        total, base, cmap = cover
        counts = np.zeros(base.nq, int)
        for q in range(total.nq):
            counts[quad_image(cmap, q)] += 1
        assert set(counts.tolist()) == {2}


class TestRiemannHurwitz:
    def test_identity_torus(self, torus44):
        rep = check_riemann_hurwitz(CoveringMap(torus44, torus44, range(16)))
        assert rep.sheets == 1
        assert rep.total_branching == 0
        assert rep.genus_residual == 0

    def test_cube_cover_integers(self, cover):
        _, _, cmap = cover
        rep = check_riemann_hurwitz(cmap)
        assert (rep.genus_source, rep.genus_target) == (3, 0)
        assert rep.sheets == 2
        assert rep.total_branching == 8
        assert rep.genus_source == rep.sheets * (rep.genus_target - 1) + 1 \
            + rep.total_branching // 2
        assert rep.quad_branch_numbers == {}

    def test_unbranched_torus_cover(self):
        src, tgt, cmap = gen_torus_unbranched_cover(4, 4, 0.3 + 1.2j)
        assert validate_map(cmap).ok
        rep = check_riemann_hurwitz(cmap)
        assert rep.sheets == 2
        assert rep.total_branching == 0
        assert genus(src) == 1 == genus(tgt)
        assert rep.genus_residual == 0

    def test_surjectivity_of_cover(self, cover):
        total, base, cmap = cover
        assert set(cmap.vertex_map) == set(range(base.nv))


class TestGenerators:
    def test_cover_shape(self, cover):
        total, base, cmap = cover
        assert (base.nv, base.nq) == (56, 54)
        assert (total.nv, total.nq) == (104, 108)
        assert genus(base) == 0 and genus(total) == 3
        assert all(r == 1 for r in base.rho)
