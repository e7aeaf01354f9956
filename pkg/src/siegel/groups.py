"""Paramodular groups of type (1, d), their level subgroups, and coset machinery.

Two coordinate systems are used throughout:

* *integral* coordinates: integer matrices preserving the alternating form
  ``lambda_matrix(d)`` on the lattice ``Z^4``.  The form pairs ``e1`` with
  ``e3`` with value 1 and ``e2`` with ``e4`` with value d, and vectors are
  acted on as row vectors (``x -> x @ m``); equivalently a member ``m``
  satisfies ``m @ lambda_matrix(d) @ m.T == lambda_matrix(d)``.
* *rational* coordinates: the conjugate ``r_d^-1 m r_d`` with
  ``r_d = diag(1,1,1,d)``, a subgroup of the rational symplectic group for
  the standard form ``J``, acting on the Siegel space in the usual way.

Membership for the four flavors:

* ``plain``        -- integral coordinates image is integer and preserves the form;
* ``lev``          -- additionally acts trivially on the dual quotient
  ``L^v/L ~ (Z/d)^2`` (generated by ``e2/d`` and ``e4/d``);
* ``level_n``      -- additionally congruent to 1 mod n in integral coordinates;
* ``lev_level_n``  -- both restrictions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from mpmath import mp, mpc, mpf

from .errors import ConditioningError, InternalCheckError, PreconditionError
from .exact import RationalMatrix, standard_j

FLAVORS = ("plain", "lev", "level_n", "lev_level_n")
COORDS = ("integral", "rational")

# relative determinant floor for inverting C*tau + D
_COND_EPS = 1e-12


@dataclass(frozen=True)
class GroupSpec:
    """Selects one group: polarization type (1, d), level n, flavor, coordinates."""

    d: int
    n: int = 1
    flavor: str = "plain"
    coordinates: str = "rational"

    def __post_init__(self):
        if self.d < 1 or self.n < 1:
            raise PreconditionError("d and n must be positive")
        if self.flavor not in FLAVORS:
            raise PreconditionError(f"flavor must be one of {FLAVORS}")
        if self.coordinates not in COORDS:
            raise PreconditionError(f"coordinates must be one of {COORDS}")

    @property
    def has_level(self) -> bool:
        return self.flavor in ("level_n", "lev_level_n")

    @property
    def has_dual_condition(self) -> bool:
        return self.flavor in ("lev", "lev_level_n")


def lambda_matrix(d: int) -> RationalMatrix:
    """The alternating form [[0, E_d], [-E_d, 0]] with E_d = diag(1, d)."""
    if d < 1:
        raise PreconditionError("d must be >= 1")
    return RationalMatrix.from_rows(
        [
            [0, 0, 1, 0],
            [0, 0, 0, d],
            [-1, 0, 0, 0],
            [0, -d, 0, 0],
        ]
    )


def r_matrix(d: int) -> RationalMatrix:
    return RationalMatrix.diagonal([1, 1, 1, d])


def to_integral(m: RationalMatrix, d: int) -> RationalMatrix:
    """Conjugate from rational to integral coordinates (r_d m r_d^-1)."""
    if m.rows != 4 or m.cols != 4:
        raise PreconditionError("expected a 4x4 matrix")
    r = r_matrix(d)
    return r @ m @ r.inverse()


def to_rational(m: RationalMatrix, d: int) -> RationalMatrix:
    """Conjugate from integral to rational coordinates (r_d^-1 m r_d)."""
    if m.rows != 4 or m.cols != 4:
        raise PreconditionError("expected a 4x4 matrix")
    r = r_matrix(d)
    return r.inverse() @ m @ r


def preserves_lambda_form(mt: RationalMatrix, d: int) -> bool:
    """Row-vector symplectic test: ``mt @ lambda_matrix(d) @ mt.T == lambda_matrix(d)``."""
    lam = lambda_matrix(d)
    return mt @ lam @ mt.transpose() == lam


@dataclass(frozen=True)
class DualAction:
    """Action on the dual quotient ``L^v/L`` in the basis (e2/d, e4/d), mod d."""

    d: int
    matrix: tuple  # ((a, b), (c, e)) reduced into [0, d)

    def __post_init__(self):
        (a, b), (c, e) = self.matrix
        if self.d >= 1 and (a * e - b * c - 1) % self.d != 0:
            raise InternalCheckError("dual action determinant is not 1 mod d")

    @classmethod
    def from_entries(cls, d: int, a: int, b: int, c: int, e: int) -> "DualAction":
        if d == 1:
            return cls(1, ((0, 0), (0, 0)))
        return cls(d, ((a % d, b % d), (c % d, e % d)))

    def is_identity(self) -> bool:
        if self.d == 1:
            return True
        (a, b), (c, e) = self.matrix
        return a == 1 and e == 1 and b == 0 and c == 0

    def compose(self, other: "DualAction") -> "DualAction":
        if self.d != other.d:
            raise PreconditionError("dual actions live mod different d")
        (a, b), (c, e) = self.matrix
        (a2, b2), (c2, e2) = other.matrix
        return DualAction.from_entries(
            self.d,
            a * a2 + b * c2,
            a * b2 + b * e2,
            c * a2 + e * c2,
            c * b2 + e * e2,
        )

    def to_lists(self) -> list:
        return [list(self.matrix[0]), list(self.matrix[1])]


def dual_quotient_action(mt: RationalMatrix, d: int) -> DualAction:
    """Action of an integral-coordinates member on ``L^v/L``.

    In the row-vector convention the images of the generators e2/d and e4/d
    are read off rows 2 and 4, so the result is the (2,4)x(2,4) submatrix
    mod d.
    """
    if not mt.is_integral():
        raise PreconditionError("dual action requires an integer matrix")
    if not preserves_lambda_form(mt, d):
        raise PreconditionError("dual action requires a form-preserving matrix")
    m = mt.to_int_rows()
    return DualAction.from_entries(d, m[1][1], m[1][3], m[3][1], m[3][3])


def congruence_pattern_holds(m: RationalMatrix, d: int) -> bool:
    """Necessary congruence pattern for rational-coordinates members.

    ``m - 1`` must lie entrywise in
    ``[[Z, Z, Z, dZ], [dZ, Z, dZ, dZ], [Z, Z, Z, dZ], [Z, (1/d)Z, Z, Z]]``.
    This is weaker than membership; see :func:`is_member`.
    """
    if m.rows != 4 or m.cols != 4:
        raise PreconditionError("expected a 4x4 matrix")
    kinds = [
        ["Z", "Z", "Z", "dZ"],
        ["dZ", "Z", "dZ", "dZ"],
        ["Z", "Z", "Z", "dZ"],
        ["Z", "d1Z", "Z", "Z"],
    ]
    g = m - RationalMatrix.identity(4)
    for i in range(4):
        for j in range(4):
            x = g[i, j]
            kind = kinds[i][j]
            if kind == "Z":
                if x.denominator != 1:
                    return False
            elif kind == "dZ":
                if x.denominator != 1 or x.numerator % d != 0:
                    return False
            else:  # (1/d) Z
                if (d * x).denominator != 1:
                    return False
    return True


def is_member(m: RationalMatrix, spec: GroupSpec) -> bool:
    """Exact membership test for the group selected by ``spec``."""
    if m.rows != 4 or m.cols != 4:
        raise PreconditionError("expected a 4x4 matrix")
    mt = to_integral(m, spec.d) if spec.coordinates == "rational" else m
    if not mt.is_integral():
        return False
    if not preserves_lambda_form(mt, spec.d):
        return False
    if spec.has_level:
        diff = mt - RationalMatrix.identity(4)
        if any(e.numerator % spec.n != 0 for e in diff.entries):
            return False
    if spec.has_dual_condition:
        if not dual_quotient_action(mt, spec.d).is_identity():
            return False
    return True


# ---------------------------------------------------------------------------
# Siegel space and the action on it
# ---------------------------------------------------------------------------


class SiegelPoint:
    """Symmetric complex 2x2 matrix tau with positive-definite imaginary part."""

    __slots__ = ("tau1", "tau2", "tau3")

    def __init__(self, tau1, tau2, tau3):
        self.tau1 = mpc(tau1)
        self.tau2 = mpc(tau2)
        self.tau3 = mpc(tau3)
        y1, y2, y3 = self.tau1.imag, self.tau2.imag, self.tau3.imag
        if not (y1 > 0 and y1 * y3 - y2 * y2 > 0):
            raise PreconditionError("imaginary part is not positive definite")

    def imag_min_eig(self):
        """Smallest eigenvalue of Im tau."""
        y1, y2, y3 = self.tau1.imag, self.tau2.imag, self.tau3.imag
        tr = y1 + y3
        det = y1 * y3 - y2 * y2
        from mpmath import sqrt

        return (tr - sqrt(tr * tr - 4 * det)) / 2

    def approx_eq(self, other: "SiegelPoint", tol=1e-10) -> bool:
        return (
            abs(self.tau1 - other.tau1) <= tol
            and abs(self.tau2 - other.tau2) <= tol
            and abs(self.tau3 - other.tau3) <= tol
        )

    def __repr__(self):
        return f"SiegelPoint({self.tau1}, {self.tau2}, {self.tau3})"


def _frac_to_mp(x: Fraction):
    return mpf(x.numerator) / mpf(x.denominator)


def act(m: RationalMatrix, tau: SiegelPoint, coordinates: str = "rational", d: int = 1) -> SiegelPoint:
    """Fractional-linear action of ``m`` on the Siegel space.

    In rational coordinates ``tau -> (A tau + B)(C tau + D)^-1``; in integral
    coordinates ``tau -> (A tau + B E_d)(C tau + D E_d)^-1 E_d``.  Raises
    :class:`ConditioningError` when ``C tau + D`` is numerically singular.
    """
    if m.rows != 4 or m.cols != 4:
        raise PreconditionError("expected a 4x4 matrix")
    if coordinates not in COORDS:
        raise PreconditionError(f"coordinates must be one of {COORDS}")
    a = m.block(0, 0, 2, 2)
    b = m.block(0, 2, 2, 2)
    c = m.block(2, 0, 2, 2)
    dd = m.block(2, 2, 2, 2)
    if coordinates == "integral":
        e = RationalMatrix.diagonal([1, d])
        b = b @ e
        dd = dd @ e

    t = (tau.tau1, tau.tau2, tau.tau2, tau.tau3)  # row-major 2x2

    def affine(p: RationalMatrix, q: RationalMatrix):
        # p @ tau + q with exact rational blocks and mpc tau
        pe = [_frac_to_mp(x) for x in p.entries]
        qe = [_frac_to_mp(x) for x in q.entries]
        return (
            pe[0] * t[0] + pe[1] * t[2] + qe[0],
            pe[0] * t[1] + pe[1] * t[3] + qe[1],
            pe[2] * t[0] + pe[3] * t[2] + qe[2],
            pe[2] * t[1] + pe[3] * t[3] + qe[3],
        )

    num = affine(a, b)
    den = affine(c, dd)
    det = den[0] * den[3] - den[1] * den[2]
    scale = max(abs(den[0]), abs(den[1]), abs(den[2]), abs(den[3]), mpf(1))
    if abs(det) <= _COND_EPS * scale * scale:
        raise ConditioningError("C*tau + D is numerically singular")
    inv = (den[3] / det, -den[1] / det, -den[2] / det, den[0] / det)
    out = (
        num[0] * inv[0] + num[1] * inv[2],
        num[0] * inv[1] + num[1] * inv[3],
        num[2] * inv[0] + num[3] * inv[2],
        num[2] * inv[1] + num[3] * inv[3],
    )
    if coordinates == "integral":
        out = (out[0], out[1] * d, out[2], out[3] * d)
    return SiegelPoint(out[0], (out[1] + out[2]) / 2, out[3])


# ---------------------------------------------------------------------------
# SL(2) embedding and coset representatives
# ---------------------------------------------------------------------------


def embed_sl2(gamma, d: int) -> RationalMatrix:
    """Embed a determinant-1 integer 2x2 matrix, acting on span(e2, e4).

    Returns an integral-coordinates member of the plain group whose dual
    quotient action is ``gamma`` mod d, acting trivially on span(e1, e3).
    """
    (a, b), (c, e) = (tuple(gamma[0]), tuple(gamma[1]))
    if a * e - b * c != 1:
        raise PreconditionError("embedded matrix must have determinant 1")
    m = RationalMatrix.from_rows(
        [
            [1, 0, 0, 0],
            [0, a, 0, b],
            [0, 0, 1, 0],
            [0, c, 0, e],
        ]
    )
    if not preserves_lambda_form(m, d):
        raise InternalCheckError("embedded SL2 element failed the form check")
    return m


def sl2_lift(a: int, b: int, c: int, e: int, d: int):
    """Lift a determinant-1 class mod d to an honest SL(2, Z) matrix."""
    if d == 1:
        return [[1, 0], [0, 1]]
    if (a * e - b * c) % d != 1 % d:
        raise PreconditionError("not a determinant-1 class mod d")
    c0, e0 = c % d, e % d
    # adjust the bottom row to be coprime
    cc, ee = c0, e0
    if cc == 0 and ee == 0:
        raise PreconditionError("bottom row vanishes mod d")
    if cc == 0:
        cc = d
    k = 0
    while gcd(cc, ee) != 1:
        k += 1
        ee = e0 + k * d
        if k > 4 * d + 4:
            raise InternalCheckError("failed to make the bottom row coprime")
    # base matrix with that bottom row
    g, x, y = _ext_gcd(ee, cc)
    if g != 1:
        raise InternalCheckError("bottom row is not coprime")
    # x*ee - (-y)*cc = 1: top row (x, -y) gives determinant 1
    top = (x, -y)
    base = [[top[0], top[1]], [cc, ee]]
    assert base[0][0] * base[1][1] - base[0][1] * base[1][0] == 1
    # slide the top row by multiples of the bottom row to hit (a, b) mod d
    for tshift in range(d):
        ta = (base[0][0] + tshift * cc) % d
        tb = (base[0][1] + tshift * ee) % d
        if ta == a % d and tb == b % d:
            return [
                [base[0][0] + tshift * cc, base[0][1] + tshift * ee],
                [cc, ee],
            ]
    raise InternalCheckError("no top-row shift matched the requested class")


def _ext_gcd(a: int, b: int):
    """g, x, y with a*x + b*y = g = gcd(a, b)."""
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


def psl2_classes(d: int):
    """Canonical representatives of SL(2, Z/d) modulo +-1, lexicographically sorted."""
    if d == 1:
        return [((1, 0), (0, 1))]
    seen = {}
    for a in range(d):
        for b in range(d):
            for c in range(d):
                for e in range(d):
                    if (a * e - b * c) % d == 1 % d:
                        neg = ((-a) % d, (-b) % d, (-c) % d, (-e) % d)
                        key = min((a, b, c, e), neg)
                        seen.setdefault(key, ((key[0], key[1]), (key[2], key[3])))
    return [seen[k] for k in sorted(seen)]


def coset_reps_psl2(d: int):
    """Rational-coordinates members whose dual actions hit each class of
    SL(2, Z/d)/{+-1} exactly once."""
    reps = []
    for (a, b), (c, e) in psl2_classes(d):
        lift = sl2_lift(a, b, c, e, d)
        reps.append(to_rational(embed_sl2(lift, d), d))
    return reps


# ---------------------------------------------------------------------------
# Seeded member sampling
# ---------------------------------------------------------------------------


def _upper_unipotent(s1, s2, s3) -> RationalMatrix:
    return RationalMatrix.from_rows(
        [
            [1, 0, s1, s2],
            [0, 1, s2, s3],
            [0, 0, 1, 0],
            [0, 0, 0, 1],
        ]
    )


def _lower_unipotent(t1, t2, t3) -> RationalMatrix:
    return RationalMatrix.from_rows(
        [
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [t1, t2, 1, 0],
            [t2, t3, 0, 1],
        ]
    )


def upper_lattice_basis(spec: GroupSpec):
    """Basis scales (s1, s2, s3) of the plane-stabilizer lattice of the flavor,
    in rational coordinates: plain (1, d, d); lev (1, d, d^2); times n with level."""
    d, n = spec.d, spec.n if spec.has_level else 1
    if spec.has_dual_condition:
        return (n, n * d, n * d * d)
    return (n, n * d, n * d)


def generator_pool(spec: GroupSpec):
    """Small verified generators of the selected group, rational coordinates."""
    d = spec.d
    n = spec.n if spec.has_level else 1
    s1, s2, s3 = upper_lattice_basis(spec)
    gens = [
        _upper_unipotent(s1, 0, 0),
        _upper_unipotent(0, s2, 0),
        _upper_unipotent(0, 0, s3),
        _upper_unipotent(s1, s2, s3),
    ]
    # lower unipotents: plain allows denominator d in the (4,2) slot
    if spec.flavor == "plain":
        lowers = [(1, 0, 0), (0, 1, 0), (0, 0, Fraction(1, d)), (1, 1, Fraction(1, d))]
    elif spec.flavor == "lev":
        lowers = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)]
    elif spec.flavor == "level_n":
        lowers = [(n, 0, 0), (0, n, 0), (0, 0, Fraction(n, d)), (n, n, Fraction(n, d))]
    else:
        lowers = [(n, 0, 0), (0, n, 0), (0, 0, n), (n, n, n)]
    gens.extend(_lower_unipotent(*t) for t in lowers)
    # SL2 part acting on the dual quotient
    if spec.flavor == "plain":
        L = 1
    elif spec.flavor == "lev":
        L = d
    elif spec.flavor == "level_n":
        L = n
    else:
        L = d * n
    if L == 1:
        sl2 = [[[1, 1], [0, 1]], [[0, -1], [1, 0]]]
    else:
        sl2 = [[[1, L], [0, 1]], [[1, 0], [L, 1]]]
    gens.extend(to_rational(embed_sl2(g, d), d) for g in sl2)
    if spec.flavor == "plain":
        gens.append(to_rational(standard_j(), d))
    for g in gens:
        if not is_member(g, GroupSpec(spec.d, spec.n, spec.flavor, "rational")):
            raise InternalCheckError("generator pool produced a non-member")
    return gens


def sample_members(spec: GroupSpec, count: int, seed: int):
    """Deterministic list of verified members, as bounded-length words in the
    generator pool (word length <= 8)."""
    if count < 1:
        raise PreconditionError("count must be >= 1")
    rat_spec = GroupSpec(spec.d, spec.n, spec.flavor, "rational")
    pool = generator_pool(rat_spec)
    inverses = [g.inverse() for g in pool]
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        length = rng.randint(1, 8)
        m = RationalMatrix.identity(4)
        for _ in range(length):
            k = rng.randrange(len(pool))
            m = m @ (inverses[k] if rng.random() < 0.5 else pool[k])
        if not is_member(m, rat_spec):
            raise InternalCheckError("sampled word left the group")
        if spec.coordinates == "integral":
            m = to_integral(m, spec.d)
        out.append(m)
    return out
