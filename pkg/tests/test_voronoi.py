import random
from fractions import Fraction

import pytest

from siegel.errors import PreconditionError
from siegel.exact import random_unimodular
from siegel.voronoi import (
    Cone3,
    Sym2Lattice,
    SymForm,
    detect_twist,
    gl2_translate,
    is_basic,
    principal_cone,
    smoothness_report,
)


class TestPrincipalCone:
    def test_generators_are_rank_one_psd(self):
        for g in principal_cone().generators:
            assert g.is_psd()
            assert g.rank() == 1
            assert g.det() == 0

    def test_generator_matrix_unimodular(self):
        _, det = is_basic(principal_cone(), Sym2Lattice.standard())
        assert det == 1

    def test_interior_point_positive_definite(self):
        gens = principal_cone().generators
        total = SymForm(
            sum(g.a for g in gens), sum(g.b for g in gens), sum(g.c for g in gens)
        )
        assert total.triple() == (2, -1, 2)
        assert total.det() > 0 and total.a > 0

    def test_two_generator_faces_degenerate_only_on_rays(self):
        # symbolic check on the quadratic form b(s)^2 - a(s) c(s) of a conic
        # combination s = x g_i + y g_j: the pure-square coefficients vanish
        # and the cross coefficient is strictly negative
        gens = principal_cone().generators
        for i in range(3):
            for j in range(i + 1, 3):
                gi, gj = gens[i], gens[j]
                coeff_x2 = gi.b * gi.b - gi.a * gi.c
                coeff_y2 = gj.b * gj.b - gj.a * gj.c
                coeff_xy = 2 * gi.b * gj.b - gi.a * gj.c - gj.a * gi.c
                assert coeff_x2 == 0 and coeff_y2 == 0
                assert coeff_xy < 0


class TestTranslate:
    def test_identity(self):
        pc = principal_cone()
        assert gl2_translate(pc, [[1, 0], [0, 1]]) == pc

    def test_shear_example(self):
        moved = gl2_translate(principal_cone(), [[1, 1], [0, 1]])
        triples = [g.triple() for g in moved.generators]
        assert triples[0] == (1, 0, 0)       # x^2 fixed
        assert triples[1] == (1, 1, 1)       # y^2 -> (x+y)^2
        assert triples[2] == (0, 0, 1)       # (x-y)^2 -> y^2

    def test_rejects_non_unimodular(self):
        with pytest.raises(PreconditionError):
            gl2_translate(principal_cone(), [[2, 0], [0, 1]])

    def test_preserves_basicness_vs_standard_lattice(self):
        rng = random.Random(4)
        lattice = Sym2Lattice.standard()
        for _ in range(25):
            u = random_unimodular(2, rng)
            moved = gl2_translate(principal_cone(), u)
            ok, _ = is_basic(moved, lattice)
            assert ok


class TestIsBasic:
    def test_standard_lattice(self):
        ok, det = is_basic(principal_cone(), Sym2Lattice.standard())
        assert ok and det == 1

    def test_scaled_lattices(self):
        for n in range(1, 7):
            ok, det = is_basic(principal_cone(), Sym2Lattice.standard(n))
            assert ok and abs(det) == 1

    def test_d2_plane_lattice_ray_points_are_a_basis(self):
        # The primitive lattice points on the three rays are (1,0,0), (0,0,2)
        # and (2,-2,2); since 2*(1,0,0) + (0,0,2) - (2,-2,2) = (0,2,0) they
        # generate {s1 in Z, s2 in 2Z, s3 in 2Z}, so the verdict is basic.
        lat = Sym2Lattice.from_triples([(1, 0, 0), (0, 2, 0), (0, 0, 2)])
        ok, det = is_basic(principal_cone(), lat)
        assert ok and det == 1

    def test_translated_cone_nonbasic_for_d3_lattice(self):
        # the singularity mechanism: a translate of the principal cone whose
        # three rays all need scaling by 3 to land in {Z, 3Z, 3Z}
        lat = Sym2Lattice.from_triples([(1, 0, 0), (0, 3, 0), (0, 0, 3)])
        moved = gl2_translate(principal_cone(), [[1, 1], [1, 2]])
        ok, det = is_basic(moved, lat)
        assert not ok and abs(det) == 3

    def test_scale_invariance(self):
        rng = random.Random(17)
        for n in range(1, 7):
            for _ in range(5):
                u = random_unimodular(2, rng)
                moved = gl2_translate(principal_cone(), u)
                lat = Sym2Lattice.from_triples([(1, 0, 0), (0, 2, 0), (0, 0, 2)])
                scaled = Sym2Lattice.from_triples(
                    [(n, 0, 0), (0, 2 * n, 0), (0, 0, 2 * n)]
                )
                assert is_basic(moved, lat)[0] == is_basic(moved, scaled)[0]

    def test_equivariance_and_basis_change(self):
        def substitute(f, u):
            (p, q), (r, s) = (tuple(u[0]), tuple(u[1]))
            return SymForm(
                f.a * p * p + 2 * f.b * p * q + f.c * q * q,
                f.a * p * r + f.b * (p * s + q * r) + f.c * q * s,
                f.a * r * r + 2 * f.b * r * s + f.c * s * s,
            )

        rng = random.Random(23)
        base_lat = Sym2Lattice.from_triples([(1, 0, 0), (0, 2, 0), (0, 0, 4)])
        for _ in range(50):
            u = random_unimodular(2, rng)
            cone = gl2_translate(principal_cone(), random_unimodular(2, rng))
            verdict, _ = is_basic(cone, base_lat)
            # simultaneous GL2 substitution of cone and lattice
            moved_cone = gl2_translate(cone, u)
            moved_lat = Sym2Lattice(tuple(substitute(f, u) for f in base_lat.basis))
            assert is_basic(moved_cone, moved_lat)[0] == verdict
            # unimodular change of the lattice basis
            v = random_unimodular(3, rng)
            new_rows = [
                tuple(
                    sum(Fraction(v[i][k]) * base_lat.basis[k].triple()[t] for k in range(3))
                    for t in range(3)
                )
                for i in range(3)
            ]
            renamed = Sym2Lattice.from_triples(new_rows)
            assert is_basic(cone, renamed)[0] == verdict


class TestTwistDetection:
    def test_uniform(self):
        lat = Sym2Lattice.standard(5)
        assert detect_twist(lat, 3) == (1, 5)

    def test_geometric(self):
        lat = Sym2Lattice.from_triples([(4, 0, 0), (0, 12, 0), (0, 0, 36)])
        assert detect_twist(lat, 3) == (3, 4)

    def test_none(self):
        lat = Sym2Lattice.from_triples([(1, 0, 0), (0, 2, 0), (0, 0, 2)])
        assert detect_twist(lat, 3) is None


class TestSmoothness:
    @pytest.mark.parametrize("p,n", [(3, 4), (3, 5), (5, 4)])
    def test_lev_boundary_is_smooth(self, p, n):
        rep = smoothness_report(p, n)
        assert rep["smooth"]
        assert rep["plane_types"]
        for plane in rep["plane_types"]:
            assert plane["level_lattice_is_n_times_level_one"]
            assert all(v["basic"] for v in plane["cone_verdicts"])

    def test_rejects_bad_inputs(self):
        with pytest.raises(PreconditionError):
            smoothness_report(4, 5)
        with pytest.raises(PreconditionError):
            smoothness_report(3, 6)
