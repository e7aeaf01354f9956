"""Isotropic lines and planes, their stabilizer lattices, and cusp coordinates.

Vectors are acted on as row vectors (``x -> x @ m``), matching the group
conventions in :mod:`siegel.groups`: the unipotents ``u(S)`` fix the plane
spanned by e3, e4 pointwise, and the translation lattice attached to a line
``l`` (resp. plane ``h``) is computed by conjugating with an integer
symplectic frame whose third row (resp. rows 3 and 4) spans ``l`` (resp.
``h``).

Stabilizer lattices are found by bounded membership scanning over
``S in (1/d) Sym2(Z)``: the candidate set is a box of numerators organised
in Hermite-form layers, whose size is justified by the divisibility bound
on the cokernel together with the (1/d)-floor of the congruence pattern.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np
from mpmath import exp, mpc, mpf, pi, workdps

from .errors import InternalCheckError, PreconditionError
from .exact import RationalMatrix, hnf, integer_solve, snf, standard_j
from .groups import GroupSpec, SiegelPoint, act, is_member, r_matrix

# ---------------------------------------------------------------------------
# Isotropic lines and planes
# ---------------------------------------------------------------------------


def _primitive(vec):
    g = 0
    for x in vec:
        g = gcd(g, x)
    if g == 0:
        raise PreconditionError("zero vector cannot span a line")
    v = [x // g for x in vec]
    lead = next(x for x in v if x != 0)
    if lead < 0:
        v = [-x for x in v]
    return tuple(v)


@dataclass(frozen=True)
class IsotropicLine:
    """Primitive integer 4-vector, first nonzero entry positive."""

    vector: tuple

    @classmethod
    def from_vector(cls, vec) -> "IsotropicLine":
        vec = [int(x) for x in vec]
        if len(vec) != 4:
            raise PreconditionError("line vector must have 4 entries")
        return cls(_primitive(vec))


def _saturate_rows(rows):
    """Basis of (Q-span of rows) intersected with Z^4, as rows."""
    dec = snf(rows)
    rank = sum(1 for x in dec.diagonal if x != 0)
    if rank != len(rows):
        raise PreconditionError("plane basis is linearly dependent")
    rinv = dec.right_matrix().inverse().to_int_rows()
    return [tuple(rinv[i]) for i in range(rank)]


@dataclass(frozen=True)
class IsotropicPlane:
    """Two integer 4-vectors spanning a saturated rank-2 lattice, normalized
    by the column Hermite form of the 4x2 basis matrix."""

    basis: tuple

    @classmethod
    def from_vectors(cls, v, w) -> "IsotropicPlane":
        v = [int(x) for x in v]
        w = [int(x) for x in w]
        if len(v) != 4 or len(w) != 4:
            raise PreconditionError("plane basis vectors must have 4 entries")
        sat = _saturate_rows([v, w])
        cols = [[sat[0][i], sat[1][i]] for i in range(4)]  # 4x2, basis as columns
        h, _ = hnf(cols)
        b1 = tuple(h[i][0] for i in range(4))
        b2 = tuple(h[i][1] for i in range(4))
        if all(x == 0 for x in b1) or all(x == 0 for x in b2):
            raise PreconditionError("plane basis is linearly dependent")
        return cls((b1, b2))

    def pairing(self, form: RationalMatrix) -> Fraction:
        v, w = self.basis
        total = Fraction(0)
        for i in range(4):
            for j in range(4):
                total += v[i] * form[i, j] * w[j]
        return total


def _pair(u, v, form: RationalMatrix) -> Fraction:
    return sum(u[i] * form[i, j] * v[j] for i in range(4) for j in range(4))


# ---------------------------------------------------------------------------
# Symplectic frames
# ---------------------------------------------------------------------------


def _solve_dot_one(w):
    """Integer vector x with x . w = 1 (w must be primitive)."""
    n = len(w)
    g = 0
    coeffs = [0] * n
    for i, wi in enumerate(w):
        if wi == 0:
            continue
        if g == 0:
            g = abs(wi)
            coeffs = [0] * n
            coeffs[i] = 1 if wi > 0 else -1
        else:
            # extended gcd of the running gcd with the next entry
            a, b = g, wi
            old_r, r = a, b
            old_s, s = 1, 0
            old_t, t = 0, 1
            while r:
                q = old_r // r
                old_r, r = r, old_r - q * r
                old_s, s = s, old_s - q * s
                old_t, t = t, old_t - q * t
            if old_r < 0:
                old_r, old_s, old_t = -old_r, -old_s, -old_t
            coeffs = [old_s * c for c in coeffs]
            coeffs[i] += old_t
            g = old_r
    if g != 1:
        raise PreconditionError("vector is not primitive")
    return coeffs


def _integer_kernel(rows):
    """Basis (as rows) of the integer kernel of a small integer matrix."""
    dec = snf(rows)
    n_cols = len(rows[0])
    rank = sum(1 for x in dec.diagonal if x != 0)
    right = dec.right_matrix()
    return [tuple(int(right[i, j]) for i in range(n_cols)) for j in range(rank, n_cols)]


def frame_for_line(l: IsotropicLine):
    """Integer symplectic frame with third row = +-l.

    Returns ``(frame, b_block_zero)``; a frame with vanishing upper-right
    block exists exactly when gcd(l3, l4) = 1 (in particular for lines
    supported on the last two coordinates), otherwise a general symplectic
    completion is used.
    """
    v = l.vector
    j = standard_j()
    if gcd(v[2], v[3]) == 1:
        # D-row (l3, l4) completes to a determinant-1 block
        a, b = v[2], v[3]
        g, x, y = _ext_gcd(a, b)
        w, yy = x, -y  # a*w - b*yy = 1
        dmat = [[a, b], [yy, w]]
        assert dmat[0][0] * dmat[1][1] - dmat[0][1] * dmat[1][0] == 1
        amat = [[w, -yy], [-b, a]]  # inverse transpose of dmat
        # C-row (l1, l2); the second C-row keeps A^T C symmetric
        c1, c2 = v[0], v[1]
        # condition: a11*c12 + a21*c4 == a12*c11 + a22*c3 for symmetry of A^T C
        a11, a12 = amat[0]
        a21, a22 = amat[1]
        rhs = a12 * c1 - a11 * c2
        # solve a21*c4 - a22*c3 = rhs; gcd(a21, a22) divides det A = 1
        g2, xx, yy2 = _ext_gcd(a21, -a22)
        c4, c3 = xx * rhs, yy2 * rhs
        frame = RationalMatrix.from_rows(
            [
                [amat[0][0], amat[0][1], 0, 0],
                [amat[1][0], amat[1][1], 0, 0],
                [c1, c2, dmat[0][0], dmat[0][1]],
                [c3, c4, dmat[1][0], dmat[1][1]],
            ]
        )
        b_zero = True
    else:
        frame = _completion_frame([v])
        b_zero = False
    row3 = frame.row(2)
    if tuple(int(x) for x in row3) not in (v, tuple(-x for x in v)):
        raise InternalCheckError("frame does not carry the requested line")
    if frame.transpose() @ j @ frame != j:
        raise InternalCheckError("frame is not symplectic")
    return frame, b_zero


def _ext_gcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _completion_frame(target_rows):
    """Symplectic completion: frame whose rows 3 (and 4) are the targets.

    Builds a symplectic basis by columns and transposes.  ``target_rows`` is
    ``[l]`` for a line or ``[v, w]`` for a saturated isotropic pair.
    """
    j = standard_j()
    if len(target_rows) == 1:
        l = target_rows[0]
        w = [sum(j[i, k] * l[k] for k in range(4)) for i in range(4)]  # J l, as x . w = <x, l>
        w = [int(Fraction(x)) for x in w]
        c1 = _solve_dot_one(w)
        jc1 = [int(sum(j[i, k] * c1[k] for k in range(4))) for i in range(4)]
        ker = _integer_kernel([w, jc1])
        if len(ker) != 2:
            raise InternalCheckError("kernel complement has wrong rank")
        u, vv = ker
        eps = _pair(u, vv, j)
        if abs(eps) != 1:
            raise InternalCheckError("complement pairing is not unimodular")
        if eps == -1:
            u, vv = vv, u
        cols = [c1, list(u), list(l), list(vv)]
    else:
        v, w = target_rows
        a_rows = [
            [int(sum(j[i, k] * v[k] for k in range(4))) for i in range(4)],
            [int(sum(j[i, k] * w[k] for k in range(4))) for i in range(4)],
        ]
        c1 = integer_solve(a_rows, [1, 0])
        c2 = integer_solve(a_rows, [0, 1])
        if c1 is None or c2 is None:
            raise PreconditionError("plane is not saturated or not primitive")
        t = _pair(c1, c2, j)
        c2 = [c2[i] - int(t) * v[i] for i in range(4)]
        cols = [c1, c2, list(v), list(w)]
    n = RationalMatrix.from_rows([[cols[c][r] for c in range(4)] for r in range(4)])
    if n.transpose() @ j @ n != j:
        raise InternalCheckError("completion failed to be symplectic")
    return n.transpose()


def frame_for_plane(h: IsotropicPlane):
    """Integer symplectic frame whose rows 3 and 4 span the plane."""
    j = standard_j()
    if h.pairing(j) != 0:
        raise PreconditionError("plane is not isotropic for the standard form")
    return _completion_frame([list(h.basis[0]), list(h.basis[1])])


# ---------------------------------------------------------------------------
# Stabilizer lattices
# ---------------------------------------------------------------------------


def _upper_block(bmat):
    rows = [
        [0, 0, bmat[0][0], bmat[0][1]],
        [0, 0, bmat[1][0], bmat[1][1]],
        [0, 0, 0, 0],
        [0, 0, 0, 0],
    ]
    return RationalMatrix.from_rows(rows)


_S_BLOCKS = (
    [[1, 0], [0, 0]],
    [[0, 1], [1, 0]],
    [[0, 0], [0, 1]],
)


def _membership_congruences(frame: RationalMatrix, spec: GroupSpec, blocks):
    """Linear congruences on numerators q (S = Q/d) equivalent to membership
    of frame^-1 u(S) frame in the group."""
    d = spec.d
    n = spec.n if spec.has_level else 1
    finv = frame.inverse()
    gs = []
    for b in blocks:
        g = (finv @ _upper_block(b) @ frame).to_int_rows()
        gs.append(g)
    r = (1, 1, 1, d)
    conds = []
    for i in range(4):
        for j in range(4):
            c = tuple(g[i][j] for g in gs)
            if not any(c):
                continue
            m0 = d * r[j] // r[i] if (d * r[j]) % r[i] == 0 else None
            if m0 is None:
                raise InternalCheckError("non-integral base modulus")
            m = n * m0
            if m > 1:
                conds.append((c, m))
    if spec.has_dual_condition:
        duals = {(1, 1): d * d, (1, 3): d**3, (3, 1): d, (3, 3): d * d}
        for (i, j), m in duals.items():
            c = tuple(g[i][j] for g in gs)
            if any(c) and m > 1:
                conds.append((c, m))
    return conds


def _divisors(n: int):
    out = [k for k in range(1, n + 1) if n % k == 0]
    return out


def _scan_rank1(conds, period: int) -> int:
    def ok(q):
        return all((c[0] * q) % m == 0 for c, m in conds)

    for t in _divisors(period):
        if ok(t):
            return t
    raise InternalCheckError("line scan found no generator within the period")


def _scan_rank3(conds, period: int):
    """Hermite-form basis rows of the congruence lattice, in q-coordinates."""

    def ok(q1, q2, q3):
        return all((c[0] * q1 + c[1] * q2 + c[2] * q3) % m == 0 for c, m in conds)

    divs = _divisors(period)
    t1 = next((t for t in divs if ok(t, 0, 0)), None)
    if t1 is None:
        raise InternalCheckError("plane scan: no first pivot within the period")
    g2 = None
    for cand in divs:
        for q1 in range(t1):
            if ok(q1, cand, 0):
                g2 = (q1, cand, 0)
                break
        if g2:
            break
    if g2 is None:
        raise InternalCheckError("plane scan: no second pivot within the period")
    t2 = g2[1]
    q1g, q2g = np.meshgrid(np.arange(t1, dtype=np.int64), np.arange(t2, dtype=np.int64),
                           indexing="ij")
    g3 = None
    for cand in divs:
        mask = np.ones(q1g.shape, dtype=bool)
        for c, m in conds:
            mask &= (c[0] * q1g + c[1] * q2g + c[2] * cand) % m == 0
            if not mask.any():
                break
        hits = np.argwhere(mask)
        if hits.size:
            q1h, q2h = (int(x) for x in hits[0])
            g3 = (q1h, q2h, cand)
            break
    if g3 is None:
        raise InternalCheckError("plane scan: no third pivot within the period")
    return [(t1, 0, 0), g2, g3]


@dataclass(frozen=True)
class StabilizerLatticeReport:
    """Lattice part of the stabilizer of a line or plane in the chosen group."""

    rank: int
    basis: tuple  # rank 1: (Fraction,); rank 3: tuple of (s1, s2, s3) Fractions
    elementary_divisors_vs_reference: tuple
    direction: str  # 'coarser': lattice inside reference; 'finer': reference inside lattice
    frame_b_block_zero: bool

    def to_json_obj(self) -> dict:
        if self.rank == 1:
            basis = [str(self.basis[0])]
        else:
            basis = [[str(x) for x in row] for row in self.basis]
        return {
            "rank": self.rank,
            "basis": basis,
            "elementary_divisors_vs_reference": [
                str(x) for x in self.elementary_divisors_vs_reference
            ],
            "direction": self.direction,
            "frame_b_block_zero": self.frame_b_block_zero,
        }


def _direction_of(divs):
    if all(x.denominator == 1 for x in divs):
        return "coarser"
    if all(x.numerator == 1 for x in divs):
        return "finer"
    return "incomparable"


def _reference_scale(spec: GroupSpec) -> int:
    return spec.n if spec.has_level else 1


def _to_rational_coords_line(l: IsotropicLine, spec: GroupSpec) -> IsotropicLine:
    if spec.coordinates == "rational":
        return l
    v = l.vector
    return IsotropicLine.from_vector([v[0], v[1], v[2], v[3] * spec.d])


def _to_rational_coords_plane(h: IsotropicPlane, spec: GroupSpec) -> IsotropicPlane:
    if spec.coordinates == "rational":
        return h
    rows = []
    for v in h.basis:
        rows.append([v[0], v[1], v[2], v[3] * spec.d])
    return IsotropicPlane.from_vectors(*rows)


def line_stabilizer(l: IsotropicLine, spec: GroupSpec) -> StabilizerLatticeReport:
    """Minimal positive translation s0 with u(s0 E11) conjugate in the group.

    The scan runs over s in (1/d)Z; for level flavors the reference lattice
    is n Z instead of Z.
    """
    l = _to_rational_coords_line(l, spec)
    frame, b_zero = frame_for_line(l)
    conds = _membership_congruences(frame, spec, _S_BLOCKS[:1])
    period = (spec.n if spec.has_level else 1) * spec.d**3
    q0 = _scan_rank1(conds, period)
    s0 = Fraction(q0, spec.d)
    _certify_members(frame, [(s0, Fraction(0), Fraction(0))], spec)
    ref = _reference_scale(spec)
    div = s0 / ref
    return StabilizerLatticeReport(
        rank=1,
        basis=(s0,),
        elementary_divisors_vs_reference=(div,),
        direction=_direction_of([div]),
        frame_b_block_zero=b_zero,
    )


def plane_stabilizer(h: IsotropicPlane, spec: GroupSpec) -> StabilizerLatticeReport:
    """Rank-3 lattice {S symmetric : conjugated u(S) in the group}."""
    form = standard_j() if spec.coordinates == "rational" else _lambda_form(spec.d)
    if h.pairing(form) != 0:
        raise PreconditionError("plane is not isotropic for the relevant form")
    h = _to_rational_coords_plane(h, spec)
    frame = frame_for_plane(h)
    conds = _membership_congruences(frame, spec, _S_BLOCKS)
    period = (spec.n if spec.has_level else 1) * spec.d**3
    rows_q = _scan_rank3(conds, period)
    basis = tuple(
        tuple(Fraction(q, spec.d) for q in row) for row in rows_q
    )
    _certify_members(frame, basis, spec)
    ref = _reference_scale(spec)
    divs = _elementary_divisors(basis, ref)
    return StabilizerLatticeReport(
        rank=3,
        basis=basis,
        elementary_divisors_vs_reference=divs,
        direction=_direction_of(divs),
        frame_b_block_zero=all(frame[i, j] == 0 for i in (0, 1) for j in (2, 3)),
    )


def _lambda_form(d: int) -> RationalMatrix:
    from .groups import lambda_matrix

    return lambda_matrix(d)


def _certify_members(frame: RationalMatrix, basis, spec: GroupSpec):
    """Every reported basis element must pass the real membership predicate."""
    finv = frame.inverse()
    rat_spec = GroupSpec(spec.d, spec.n, spec.flavor, "rational")
    for s in basis:
        smat = [[s[0], s[1]], [s[1], s[2]]]
        g = finv @ _upper_symmetric(smat) @ frame
        if not is_member(g, rat_spec):
            raise InternalCheckError("scan produced a lattice vector outside the group")


def _upper_symmetric(smat) -> RationalMatrix:
    return RationalMatrix.from_rows(
        [
            [1, 0, smat[0][0], smat[0][1]],
            [0, 1, smat[1][0], smat[1][1]],
            [0, 0, 1, 0],
            [0, 0, 0, 1],
        ]
    )


def _elementary_divisors(basis, ref: int):
    """Invariant factors of the basis matrix in units of the reference lattice."""
    rows = [[Fraction(x) / ref for x in row] for row in basis]
    denom = 1
    for row in rows:
        for x in row:
            denom = denom * x.denominator // gcd(denom, x.denominator)
    scaled = [[int(x * denom) for x in row] for row in rows]
    diag = snf(scaled).diagonal
    return tuple(Fraction(e, denom) for e in diag)


# ---------------------------------------------------------------------------
# The explicit line-stabilizer generators at level structure (p, n)
# ---------------------------------------------------------------------------


def p_l0_generators(p: int, n: int):
    """Generators of the lattice-and-shear part of the stabilizer of the
    central line, for the lev flavor at d = p with level n, gcd(p, n) = 1.

    Returned in rational coordinates: the translation (s = n), the two shears
    (k = n and m = p n), and two embedded generators of the congruence group
    {a, d = 1 mod np, c = 0 mod n, b = 0 mod n p^2}.
    """
    if gcd(p, n) != 1:
        raise PreconditionError("requires gcd(p, n) = 1")
    mats = [
        # translation s = n
        RationalMatrix.from_rows(
            [[1, 0, n, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
        ),
        # k-shear, k = n
        RationalMatrix.from_rows(
            [[1, n, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, -n, 1]]
        ),
        # m-shear, m = p n
        RationalMatrix.from_rows(
            [[1, 0, 0, p * n], [0, 1, p * n, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
        ),
        # embedded (1, n p^2, 0, 1)
        embed_gamma1_prime(1, n * p * p, 0, 1, p, n),
        # embedded (1, 0, n, 1)
        embed_gamma1_prime(1, 0, n, 1, p, n),
    ]
    spec = GroupSpec(p, n, "lev_level_n", "rational")
    for m in mats:
        if not is_member(m, spec):
            raise InternalCheckError("stabilizer generator failed membership")
    return mats


def embed_gamma1_prime(a: int, b: int, c: int, e: int, p: int, n: int) -> RationalMatrix:
    """Embed an element of the congruence group into the line stabilizer."""
    if a * e - b * c != 1:
        raise PreconditionError("determinant must be 1")
    if (a - 1) % (n * p) or (e - 1) % (n * p) or c % n or b % (n * p * p):
        raise PreconditionError("entries violate the congruence conditions")
    return RationalMatrix.from_rows(
        [[1, 0, 0, 0], [0, a, 0, b], [0, 0, 1, 0], [0, c, 0, e]]
    )


def _is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def tits_counts(p: int) -> dict:
    """Cusp counts of the lev flavor at an odd prime p:
    one central line, (p^2 - 1)/2 peripheral lines, p + 1 isotropic planes."""
    if not _is_odd_prime(p):
        raise PreconditionError("p must be an odd prime")
    return {
        "central_lines": 1,
        "peripheral_lines": (p * p - 1) // 2,
        "planes": p + 1,
    }


# ---------------------------------------------------------------------------
# Boundary coordinate verification
# ---------------------------------------------------------------------------


def _entries_int(m: RationalMatrix):
    if not m.is_integral():
        raise PreconditionError("element must be integral in rational coordinates")
    return m.to_int_rows()


def verify_cusp_coordinates(p: int, n: int, element: RationalMatrix, tau: SiegelPoint,
                            dps: int = 30) -> float:
    """Residual |t1' / (t1 * predicted factor) - 1| for the partial quotient
    t1 = exp(2 pi i tau1 / n) under a recognized stabilizer element.

    Recognized shapes: the (k, m)-shear (with optional translation s) and the
    embedded congruence-group type; anything else raises.
    """
    if gcd(p, n) != 1:
        raise PreconditionError("requires gcd(p, n) = 1")
    g = _entries_int(element)
    ident_rows = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    if g[2] != [0, 0, 1, 0]:
        raise PreconditionError("element does not stabilize the central line")
    with workdps(dps):
        t1c, t2c, t3c = tau.tau1, tau.tau2, tau.tau3
        if (
            g[1][0] == 0 and g[1][1] == 1 and g[1][3] == 0
            and g[3][0] == 0 and g[3][1] == 0 and g[3][3] == 1
            and g[0][0] == 1 and g[0][3] == g[1][2] and g[3][2] == -g[0][1]
        ):
            k, s, m = g[0][1], g[0][2], g[0][3]
            if k % n or s % n or m % (p * n):
                raise PreconditionError("shear entries violate the lattice conditions")
            exponent = (k * k * t3c + 2 * k * t2c + k * m + s) / n
        elif (
            g[0] == ident_rows[0]
            and g[1][0] == 0 and g[1][2] == 0
            and g[3][0] == 0 and g[3][2] == 0
        ):
            a, b, c, e = g[1][1], g[1][3], g[3][1], g[3][3]
            if a * e - b * c != 1:
                raise PreconditionError("embedded block must have determinant 1")
            if (a - 1) % (n * p) or (e - 1) % (n * p) or c % n or b % (n * p * p):
                raise PreconditionError("embedded block violates the congruence conditions")
            exponent = (-c * t2c * t2c / (c * t3c + e)) / n
        else:
            raise PreconditionError("element not of recognized type")
        moved = act(element, tau)
        two_pi_i = 2 * pi * mpc(0, 1)
        lhs = exp(two_pi_i * moved.tau1 / n)
        rhs = exp(two_pi_i * t1c / n) * exp(two_pi_i * exponent)
        return float(abs(lhs / rhs - 1))
