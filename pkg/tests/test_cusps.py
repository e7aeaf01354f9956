import itertools
import random
from fractions import Fraction

import pytest
from mpmath import mpc, workdps

from siegel.cusps import (
    IsotropicLine,
    IsotropicPlane,
    embed_gamma1_prime,
    frame_for_line,
    frame_for_plane,
    line_stabilizer,
    p_l0_generators,
    plane_stabilizer,
    tits_counts,
    verify_cusp_coordinates,
)
from siegel.errors import PreconditionError
from siegel.exact import RationalMatrix, hnf, is_symplectic, standard_j
from siegel.groups import GroupSpec, SiegelPoint, is_member, sample_members

J = standard_j()
H0 = IsotropicPlane.from_vectors([0, 0, 1, 0], [0, 0, 0, 1])
L0 = IsotropicLine.from_vector([0, 0, 1, 0])


def upper_unipotent(s1, s2, s3):
    return RationalMatrix.from_rows(
        [[1, 0, s1, s2], [0, 1, s2, s3], [0, 0, 1, 0], [0, 0, 0, 1]]
    )


class TestGeometryTypes:
    def test_line_normalization(self):
        assert IsotropicLine.from_vector([0, -2, -4, 6]).vector == (0, 1, 2, -3)

    def test_zero_vector_rejected(self):
        with pytest.raises(PreconditionError):
            IsotropicLine.from_vector([0, 0, 0, 0])

    def test_plane_saturation(self):
        # (1,0,0,0) and (1,2,0,0) span index 2 inside the saturated lattice
        h = IsotropicPlane.from_vectors([1, 0, 0, 0], [1, 2, 0, 0])
        assert h == IsotropicPlane.from_vectors([1, 0, 0, 0], [0, 1, 0, 0])

    def test_dependent_rejected(self):
        with pytest.raises(PreconditionError):
            IsotropicPlane.from_vectors([1, 0, 0, 0], [2, 0, 0, 0])

    def test_pairing(self):
        assert H0.pairing(J) == 0
        bad = IsotropicPlane.from_vectors([1, 0, 0, 0], [0, 0, 1, 0])
        assert bad.pairing(J) != 0


class TestFrames:
    def test_reference_line_uses_identity(self):
        frame, b_zero = frame_for_line(L0)
        assert frame == RationalMatrix.identity(4)
        assert b_zero

    def test_first_axis_uses_involution_type(self):
        frame, b_zero = frame_for_line(IsotropicLine.from_vector([1, 0, 0, 0]))
        assert not b_zero
        assert tuple(int(x) for x in frame.row(2)) in ((1, 0, 0, 0), (-1, 0, 0, 0))
        assert is_symplectic(frame, J)

    def test_imprimitive_tail_vector(self):
        line = IsotropicLine.from_vector([1, 0, 2, 0])
        frame, b_zero = frame_for_line(line)
        assert not b_zero
        assert tuple(int(x) for x in frame.row(2)) in (line.vector,
                                                       tuple(-x for x in line.vector))
        assert is_symplectic(frame, J)

    def test_b_block_zero_when_tail_coprime(self):
        line = IsotropicLine.from_vector([3, 1, 2, 5])
        frame, b_zero = frame_for_line(line)
        assert b_zero
        assert all(frame[i, j] == 0 for i in (0, 1) for j in (2, 3))
        assert is_symplectic(frame, J)

    def test_random_lines(self):
        rng = random.Random(3)
        for _ in range(30):
            vec = [rng.randint(-6, 6) for _ in range(4)]
            if not any(vec):
                continue
            line = IsotropicLine.from_vector(vec)
            frame, _ = frame_for_line(line)
            assert is_symplectic(frame, J)
            assert tuple(int(x) for x in frame.row(2)) in (line.vector,
                                                           tuple(-x for x in line.vector))

    def test_plane_frames(self):
        rng = random.Random(8)
        mats = sample_members(GroupSpec(1), 20, seed=77)
        for m in mats:
            rows = m.to_int_rows()
            h = IsotropicPlane.from_vectors(rows[2], rows[3])
            frame = frame_for_plane(h)
            assert is_symplectic(frame, J)
            got = IsotropicPlane.from_vectors(
                [int(x) for x in frame.row(2)], [int(x) for x in frame.row(3)]
            )
            assert got == h
        del rng


class TestLineStabilizer:
    def test_reference_line_principal(self):
        rep = line_stabilizer(L0, GroupSpec(1))
        assert rep.rank == 1 and rep.basis == (Fraction(1),)
        assert rep.elementary_divisors_vs_reference == (Fraction(1),)

    def test_reference_line_d2(self):
        rep = line_stabilizer(L0, GroupSpec(2))
        assert rep.basis == (Fraction(1),)

    def test_divisor_bound_on_seeded_lines(self):
        mats = sample_members(GroupSpec(1), 12, seed=5)
        for d in (2, 3, 4, 6):
            for m in mats:
                line = IsotropicLine.from_vector(m.to_int_rows()[2])
                rep = line_stabilizer(line, GroupSpec(d))
                (div,) = rep.elementary_divisors_vs_reference
                if div.denominator == 1:
                    assert d % int(div) == 0
                else:
                    assert div.numerator == 1 and d % div.denominator == 0

    def test_level_lattice_is_n_times(self):
        mats = sample_members(GroupSpec(1), 6, seed=9)
        for d, n in ((2, 5), (3, 4)):
            for m in mats[:3]:
                line = IsotropicLine.from_vector(m.to_int_rows()[2])
                r1 = line_stabilizer(line, GroupSpec(d, 1, "plain"))
                rn = line_stabilizer(line, GroupSpec(d, n, "level_n"))
                assert rn.basis[0] == n * r1.basis[0]


def brute_force_plane_lattice(h, spec, box):
    """Independent oracle: raw membership scan over numerators in a box."""
    from siegel.cusps import frame_for_plane as ffp

    frame = ffp(h)
    finv = frame.inverse()
    d = spec.d
    hits = []
    for q1, q2, q3 in itertools.product(range(-box, box + 1), repeat=3):
        s = (Fraction(q1, d), Fraction(q2, d), Fraction(q3, d))
        g = finv @ upper_unipotent(*s) @ frame
        if is_member(g, spec):
            hits.append((q1, q2, q3))
    cols = [list(hit) for hit in zip(*hits)]
    h_form, _ = hnf(cols)
    basis = [tuple(h_form[i][j] for i in range(3)) for j in range(3)]
    return sorted(tuple(Fraction(q, d) for q in row) for row in basis)


class TestPlaneStabilizer:
    def test_reference_plane_principal(self):
        rep = plane_stabilizer(H0, GroupSpec(1))
        assert rep.basis == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
        assert rep.elementary_divisors_vs_reference == (1, 1, 1)
        assert rep.direction == "coarser"

    def test_reference_plane_d2(self):
        rep = plane_stabilizer(H0, GroupSpec(2))
        assert rep.basis == ((1, 0, 0), (0, 2, 0), (0, 0, 2))
        assert rep.elementary_divisors_vs_reference == (1, 2, 2)
        assert rep.direction == "coarser"

    def test_lev_tightens_corner(self):
        rep = plane_stabilizer(H0, GroupSpec(2, flavor="lev"))
        assert rep.basis == ((1, 0, 0), (0, 2, 0), (0, 0, 4))

    def test_opposite_plane_goes_finer(self):
        h = IsotropicPlane.from_vectors([0, 1, 0, 0], [0, 0, 1, 0])
        rep = plane_stabilizer(h, GroupSpec(3))
        assert rep.direction == "finer"
        assert rep.elementary_divisors_vs_reference == (Fraction(1, 3), 1, 1)

    def test_rejects_non_isotropic(self):
        bad = IsotropicPlane.from_vectors([1, 0, 0, 0], [0, 0, 1, 0])
        with pytest.raises(PreconditionError):
            plane_stabilizer(bad, GroupSpec(2))

    def test_matches_brute_force_oracle(self):
        mats = sample_members(GroupSpec(1), 4, seed=21)
        for d in (2, 3):
            spec = GroupSpec(d)
            for m in mats[:2]:
                rows = m.to_int_rows()
                h = IsotropicPlane.from_vectors(rows[2], rows[3])
                fast = sorted(plane_stabilizer(h, spec).basis)
                slow = brute_force_plane_lattice(h, spec, d * d)
                assert fast == slow

    def test_divisor_bound_on_seeded_planes(self):
        mats = sample_members(GroupSpec(1), 10, seed=13)
        for d in (2, 3, 4, 6):
            for m in mats:
                rows = m.to_int_rows()
                h = IsotropicPlane.from_vectors(rows[2], rows[3])
                rep = plane_stabilizer(h, GroupSpec(d))
                for div in rep.elementary_divisors_vs_reference:
                    if div.denominator == 1:
                        assert d % int(div) == 0
                    else:
                        assert div.numerator == 1 and d % div.denominator == 0

    def test_level_lattice_is_n_times(self):
        mats = sample_members(GroupSpec(1), 6, seed=33)
        for d, n in ((2, 5), (3, 4), (4, 5)):
            for m in mats[:3]:
                rows = m.to_int_rows()
                h = IsotropicPlane.from_vectors(rows[2], rows[3])
                r1 = plane_stabilizer(h, GroupSpec(d, 1, "plain"))
                rn = plane_stabilizer(h, GroupSpec(d, n, "level_n"))
                scaled = tuple(tuple(n * x for x in row) for row in r1.basis)
                assert scaled == rn.basis

    def test_integral_coordinates_input(self):
        from siegel.groups import lambda_matrix

        d = 2
        h_int = IsotropicPlane.from_vectors([0, 0, 1, 0], [0, 0, 0, 1])
        assert h_int.pairing(lambda_matrix(d)) == 0
        rep = plane_stabilizer(h_int, GroupSpec(d, coordinates="integral"))
        assert rep.basis == ((1, 0, 0), (0, 2, 0), (0, 0, 2))


class TestCentralLineGenerators:
    def test_members(self):
        for p, n in ((3, 5), (5, 4), (3, 4)):
            gens = p_l0_generators(p, n)
            spec = GroupSpec(p, n, "lev_level_n")
            assert all(is_member(g, spec) for g in gens)

    def test_translation_and_shears(self):
        gens = p_l0_generators(3, 5)
        assert gens[0][0, 2] == 5          # s = n
        assert gens[1][0, 1] == 5          # k = n
        assert gens[2][0, 3] == 15         # m = p n
        assert gens[3][1, 3] == 45         # b = n p^2

    def test_requires_coprime(self):
        with pytest.raises(PreconditionError):
            p_l0_generators(3, 6)

    def test_embedded_block_congruences(self):
        with pytest.raises(PreconditionError):
            embed_gamma1_prime(1, 5, 0, 1, 3, 5)  # b must be 0 mod n p^2


class TestTitsCounts:
    @pytest.mark.parametrize(
        "p,expected",
        [
            (3, (1, 4, 4)),
            (5, (1, 12, 6)),
            (7, (1, 24, 8)),
            (11, (1, 60, 12)),
        ],
    )
    def test_closed_form(self, p, expected):
        counts = tits_counts(p)
        assert (counts["central_lines"], counts["peripheral_lines"], counts["planes"]) == expected

    def test_rejects_non_prime(self):
        for bad in (1, 2, 9, 15):
            with pytest.raises(PreconditionError):
                tits_counts(bad)


class TestCuspCoordinates:
    def test_identity_residual_zero(self):
        with workdps(30):
            tau = SiegelPoint(mpc(0.1, 1.2), mpc(0.2, 0.3), mpc(-0.1, 1.5))
            assert verify_cusp_coordinates(3, 5, RationalMatrix.identity(4), tau) < 1e-25

    def test_all_generator_types(self):
        with workdps(30):
            tau = SiegelPoint(mpc(0.17, 1.2), mpc(0.21, 0.31), mpc(-0.12, 1.5))
            for p, n in ((3, 5), (5, 4), (3, 4)):
                gens = p_l0_generators(p, n)
                for g in gens:
                    assert verify_cusp_coordinates(p, n, g, tau) < 1e-10

    def test_hundred_random_pairs(self):
        for p, n in ((3, 5), (5, 4), (3, 4)):
            rng = random.Random(100 * p + n)
            gens = p_l0_generators(p, n)
            composite = gens[3] @ gens[4]  # embedded type with c != 0
            pool = gens + [composite]
            with workdps(30):
                for _ in range(100):
                    tau = SiegelPoint(
                        mpc(rng.uniform(-0.4, 0.4), rng.uniform(0.9, 1.4)),
                        mpc(rng.uniform(-0.3, 0.3), rng.uniform(0.1, 0.4)),
                        mpc(rng.uniform(-0.4, 0.4), rng.uniform(1.0, 1.6)),
                    )
                    element = rng.choice(pool)
                    assert verify_cusp_coordinates(p, n, element, tau) < 1e-9

    def test_rejects_unrecognized_shape(self):
        with workdps(30):
            tau = SiegelPoint(mpc(0, 1.2), mpc(0.1, 0.2), mpc(0, 1.5))
            stranger = RationalMatrix.from_rows(
                [[1, 0, 0, 0], [0, 1, 0, 0], [1, 0, 1, 0], [0, 0, 0, 1]]
            )
            with pytest.raises(PreconditionError):
                verify_cusp_coordinates(3, 5, stranger, tau)
