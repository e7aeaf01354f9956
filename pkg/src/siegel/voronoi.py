"""Genus-2 Voronoi cones in the space of symmetric 2x2 forms, and basicness.

Forms are written (a, b, c) for [[a, b], [b, c]].  The top-dimensional cone
used throughout is the principal one, spanned by the rank-1 forms
x^2 = (1, 0, 0), y^2 = (0, 0, 1) and (x - y)^2 = (1, -1, 1); every other
top cone of the decomposition is a GL(2, Z)-translate of it.

A cone is *basic* with respect to a rank-3 lattice of forms when the
primitive lattice points on its three rays form a Z-basis of the lattice,
i.e. the coordinate matrix with respect to the lattice basis has
determinant +-1.  That is exactly the smoothness criterion for the
associated toric chart.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import PreconditionError
from .exact import RationalMatrix

__all__ = [
    "SymForm",
    "Cone3",
    "Sym2Lattice",
    "principal_cone",
    "gl2_translate",
    "is_basic",
    "smoothness_report",
]


@dataclass(frozen=True)
class SymForm:
    """Symmetric 2x2 rational form [[a, b], [b, c]]."""

    a: Fraction
    b: Fraction
    c: Fraction

    @classmethod
    def of(cls, a, b, c) -> "SymForm":
        return cls(Fraction(a), Fraction(b), Fraction(c))

    def det(self) -> Fraction:
        return self.a * self.c - self.b * self.b

    def is_psd(self) -> bool:
        return self.a >= 0 and self.c >= 0 and self.det() >= 0

    def rank(self) -> int:
        if self.a == self.b == self.c == 0:
            return 0
        return 1 if self.det() == 0 else 2

    def triple(self):
        return (self.a, self.b, self.c)

    def to_json_obj(self):
        return [str(self.a), str(self.b), str(self.c)]


@dataclass(frozen=True)
class Cone3:
    """Three-generator cone of positive semidefinite forms."""

    generators: tuple

    def __post_init__(self):
        if len(self.generators) != 3:
            raise PreconditionError("a top cone needs exactly 3 generators")
        if any(not g.is_psd() for g in self.generators):
            raise PreconditionError("cone generators must be positive semidefinite")
        if _gram_det(self.generators) == 0:
            raise PreconditionError("cone generators must be linearly independent")


def _gram_det(forms) -> Fraction:
    m = RationalMatrix.from_rows([[f.a, f.b, f.c] for f in forms])
    return m.det()


@dataclass(frozen=True)
class Sym2Lattice:
    """Rank-3 lattice of symmetric forms, given by a basis."""

    basis: tuple

    def __post_init__(self):
        if len(self.basis) != 3:
            raise PreconditionError("lattice basis needs exactly 3 forms")
        if _gram_det(self.basis) == 0:
            raise PreconditionError("lattice basis must be linearly independent")

    @classmethod
    def standard(cls, scale=1) -> "Sym2Lattice":
        """scale * Sym2(Z), basis x^2, xy, y^2."""
        return cls(
            (
                SymForm.of(scale, 0, 0),
                SymForm.of(0, scale, 0),
                SymForm.of(0, 0, scale),
            )
        )

    @classmethod
    def from_triples(cls, rows) -> "Sym2Lattice":
        return cls(tuple(SymForm.of(*row) for row in rows))

    def basis_matrix(self) -> RationalMatrix:
        return RationalMatrix.from_rows([[f.a, f.b, f.c] for f in self.basis])


def principal_cone() -> Cone3:
    return Cone3((SymForm.of(1, 0, 0), SymForm.of(0, 0, 1), SymForm.of(1, -1, 1)))


def gl2_translate(cone: Cone3, u) -> Cone3:
    """Transform each generator q by the unimodular substitution q -> u q u^T."""
    (p, q), (r, s) = (tuple(u[0]), tuple(u[1]))
    if abs(p * s - q * r) != 1:
        raise PreconditionError("translate matrix must be unimodular")
    out = []
    for g in cone.generators:
        # u [[a,b],[b,c]] u^T, expanded
        a, b, c = g.a, g.b, g.c
        na = a * p * p + 2 * b * p * q + c * q * q
        nb = a * p * r + b * (p * s + q * r) + c * q * s
        nc = a * r * r + 2 * b * r * s + c * s * s
        nf = SymForm(na, nb, nc)
        if g.rank() == 1 and nf.rank() != 1:
            raise PreconditionError("translate destroyed a rank-1 generator")
        out.append(nf)
    return Cone3(tuple(out))


def _primitive_ray_point(gen: SymForm, lattice: Sym2Lattice):
    """Coordinates (w.r.t. the lattice basis) of the primitive lattice point
    on the ray through ``gen``."""
    bmat = lattice.basis_matrix()
    try:
        coords = RationalMatrix.from_rows([[gen.a, gen.b, gen.c]]) @ bmat.inverse()
    except PreconditionError:
        raise PreconditionError("generator is not in the rational span of the lattice")
    xs = [coords[0, j] for j in range(3)]
    denom = 1
    for x in xs:
        denom = denom * x.denominator // gcd(denom, x.denominator)
    ints = [int(x * denom) for x in xs]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        raise PreconditionError("zero generator has no primitive ray point")
    return [x // g for x in ints]


def is_basic(cone: Cone3, lattice: Sym2Lattice):
    """Whether the primitive lattice points on the three rays form a basis.

    Returns ``(verdict, det)`` where ``det`` is the exact determinant of the
    coordinate matrix with respect to the lattice basis.
    """
    rows = [_primitive_ray_point(g, lattice) for g in cone.generators]
    det = (
        rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
        - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
        + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0])
    )
    return abs(det) == 1, det


def _translate_words(max_len: int = 3):
    """Deterministic list of unimodular matrices, as short words in the
    standard generators."""
    gens = [
        ((1, 1), (0, 1)),
        ((1, 0), (1, 1)),
        ((0, 1), (-1, 0)),
    ]
    words = [((1, 0), (0, 1))]
    frontier = [((1, 0), (0, 1))]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for g in gens:
                prod = _mat2_mul(w, g)
                if prod not in words:
                    words.append(prod)
                    nxt.append(prod)
        frontier = nxt
    return words


def _mat2_mul(x, y):
    return (
        (
            x[0][0] * y[0][0] + x[0][1] * y[1][0],
            x[0][0] * y[0][1] + x[0][1] * y[1][1],
        ),
        (
            x[1][0] * y[0][0] + x[1][1] * y[1][0],
            x[1][0] * y[0][1] + x[1][1] * y[1][1],
        ),
    )


def _scaled_twist(lattice: Sym2Lattice, t: Fraction):
    """Coordinate twist (a, b, c) -> (a, b/t, c/t^2) applied to a lattice."""
    return Sym2Lattice(
        tuple(SymForm(f.a, f.b / t, f.c / (t * t)) for f in lattice.basis)
    )


def _hnf_diagonal_scale(lattice: Sym2Lattice):
    """If the lattice is rho * Sym2(Z), return rho, else None."""
    rows = [[f.a, f.b, f.c] for f in lattice.basis]
    denom = 1
    for row in rows:
        for x in row:
            denom = denom * x.denominator // gcd(denom, x.denominator)
    ints = [[int(x * denom) for x in row] for row in rows]
    from .exact import hnf as _hnf

    h, _ = _hnf([[ints[r][c] for r in range(3)] for c in range(3)])
    # h has the basis as columns in Hermite form
    rho = h[0][0]
    if all(h[i][j] == (rho if i == j else 0) for i in range(3) for j in range(3)):
        return Fraction(rho, denom)
    return None


def detect_twist(lattice: Sym2Lattice, p: int):
    """Find t = p^e (|e| <= 2) such that the twisted lattice is a uniform
    scaling of Sym2(Z); returns (t, rho) or None.

    The twist mirrors the torus-coordinate rescaling used at each boundary
    stratum, where the three coordinates carry weights (1, t, t^2).
    """
    for e in (0, 1, 2, -1, -2):
        t = Fraction(p) ** e
        rho = _hnf_diagonal_scale(_scaled_twist(lattice, t))
        if rho is not None:
            return t, rho
    return None


def smoothness_report(p: int, n: int) -> dict:
    """Basicness verdicts for the boundary charts of the lev flavor at d = p
    with level n.

    For each inequivalent plane type, the stabilizer lattice for level n is
    checked to be exactly n times the level-1 lattice, the cusp's coordinate
    twist is detected, and the principal cone plus a fixed sample of its
    GL(2, Z)-translates (word length <= 3) are tested for basicness against
    the twisted lattice.  The boundary is smooth iff every verdict is true.
    """
    from .cusps import IsotropicPlane, plane_stabilizer
    from .groups import GroupSpec

    if not _is_odd_prime(p):
        raise PreconditionError("p must be an odd prime")
    if gcd(p, n) != 1:
        raise PreconditionError("requires gcd(p, n) = 1")
    plane_vectors = [
        ((0, 0, 1, 0), (0, 0, 0, 1)),  # upper-unipotent type
        ((1, 0, 0, 0), (0, 1, 0, 0)),  # lower-unipotent type
        ((0, 1, 0, 0), (0, 0, 1, 0)),  # mixed type
        ((1, 0, 0, 0), (0, 0, 0, 1)),  # mixed type
    ]
    spec_n = GroupSpec(p, n, "lev_level_n", "rational")
    spec_1 = GroupSpec(p, 1, "lev", "rational")
    cones = [gl2_translate(principal_cone(), u) for u in _translate_words(3)]
    seen = set()
    planes = []
    for vecs in plane_vectors:
        h = IsotropicPlane.from_vectors(*vecs)
        rep_n = plane_stabilizer(h, spec_n)
        rep_1 = plane_stabilizer(h, spec_1)
        scaled = tuple(tuple(n * x for x in row) for row in rep_1.basis)
        n_times = scaled == rep_n.basis
        signature = rep_n.basis
        if signature in seen:
            continue
        seen.add(signature)
        lattice = Sym2Lattice.from_triples(rep_n.basis)
        twist = detect_twist(lattice, p)
        test_lattice = _scaled_twist(lattice, twist[0]) if twist else lattice
        verdicts = []
        for cone in cones:
            ok, det = is_basic(cone, test_lattice)
            verdicts.append({"basic": ok, "det": str(det)})
        planes.append(
            {
                "plane": [list(v) for v in h.basis],
                "lattice_basis": [[str(x) for x in row] for row in rep_n.basis],
                "level_lattice_is_n_times_level_one": n_times,
                "twist": str(twist[0]) if twist else None,
                "cone_verdicts": verdicts,
                "smooth": n_times and all(v["basic"] for v in verdicts),
            }
        )
    return {
        "p": p,
        "n": n,
        "plane_types": planes,
        "smooth": all(pl["smooth"] for pl in planes),
    }


def _is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True
