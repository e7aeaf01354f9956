"""Closed-form arithmetic invariants and the modular-surface intersection calculus.

Everything in this module is exact rational arithmetic; there are no
tolerances anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InternalCheckError, PreconditionError


def _prime_factors(n: int):
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return out


def mu(d: int) -> int:
    """Half the order of SL(2, Z/d) for d >= 3; 6 for d = 2; 1 for d = 1."""
    if d < 1:
        raise PreconditionError("d must be >= 1")
    if d == 1:
        return 1
    if d == 2:
        return 6
    val = Fraction(d**3, 2)
    for p in _prime_factors(d):
        val *= 1 - Fraction(1, p * p)
    if val.denominator != 1:
        raise InternalCheckError("mu(d) did not come out integral")
    return int(val)


def cusp_number_t(k: int) -> int:
    """Number of cusps of the level-k modular curve, k >= 3."""
    if k < 3:
        raise PreconditionError("the cusp count formula is used for k >= 3 only")
    val = Fraction(k * k, 2)
    for p in _prime_factors(k):
        val *= 1 - Fraction(1, p * p)
    if val.denominator != 1:
        raise InternalCheckError("t(k) did not come out integral")
    return int(val)


def genus_x(k: int) -> int:
    """Genus of the level-k modular curve: 1 + (k-6) t(k) / 12."""
    g = 1 + Fraction((k - 6) * cusp_number_t(k), 12)
    if g.denominator != 1:
        raise InternalCheckError("genus did not come out integral")
    return int(g)


def deg_l_x(k: int) -> Fraction:
    """Degree of the weight-1 modular line bundle on the level-k curve: k t(k) / 12."""
    return Fraction(k * cusp_number_t(k), 12)


# ---------------------------------------------------------------------------
# Divisor classes on the level-k elliptic modular surface
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShiodaClass:
    """Formal rational combination of {F, L_X, L_ij} on the level-k surface.

    F is a general fibre, L_X the pullback of the weight-1 bundle on the base
    and L_ij the k^2 torsion sections indexed by (i, j) in (Z/k)^2.
    """

    k: int
    coeff_f: Fraction = Fraction(0)
    coeff_lx: Fraction = Fraction(0)
    coeff_sections: tuple = ()  # sorted tuple of ((i, j), Fraction)

    def __post_init__(self):
        if self.k < 3:
            raise PreconditionError("level must be >= 3")

    @classmethod
    def build(cls, k, coeff_f=0, coeff_lx=0, sections=None) -> "ShiodaClass":
        sec = tuple(
            sorted(((i % k, j % k), Fraction(c)) for (i, j), c in (sections or {}).items() if c)
        )
        return cls(k, Fraction(coeff_f), Fraction(coeff_lx), sec)

    def section_map(self) -> dict:
        return dict(self.coeff_sections)


def fibre_class(k: int) -> ShiodaClass:
    return ShiodaClass.build(k, coeff_f=1)


def zero_section_class(k: int) -> ShiodaClass:
    return ShiodaClass.build(k, sections={(0, 0): 1})


def canonical_class_s(k: int) -> ShiodaClass:
    """Canonical class of the level-k surface: ((k-4)/4) t(k) F."""
    return ShiodaClass.build(k, coeff_f=Fraction((k - 4) * cusp_number_t(k), 4))


def intersect(a: ShiodaClass, b: ShiodaClass) -> Fraction:
    """Bilinear intersection pairing.

    F.F = 0, F.L_ij = 1, F.L_X = 0, L_X.L_X = 0, L_X.L_ij = k t(k)/12,
    L_ij.L_ij = -k t(k)/12, distinct sections are disjoint.
    """
    if a.k != b.k:
        raise PreconditionError("classes live on surfaces of different level")
    k = a.k
    deg = deg_l_x(k)  # = k t(k) / 12
    sa, sb = a.section_map(), b.section_map()
    total_a = sum(sa.values(), Fraction(0))
    total_b = sum(sb.values(), Fraction(0))
    val = Fraction(0)
    val += a.coeff_f * total_b + b.coeff_f * total_a          # F . L_ij = 1
    val += (a.coeff_lx * total_b + b.coeff_lx * total_a) * deg  # L_X . L_ij
    for key, ca in sa.items():
        cb = sb.get(key)
        if cb:
            val += ca * cb * (-deg)                            # L_ij . L_ij
    return val


def normal_bundle_class(kind: str, n: int, p: int = 0) -> ShiodaClass:
    """Normal bundle class of a boundary surface.

    ``kind='central'`` uses level k = n*p (gcd(n, p) = 1 required);
    ``kind='peripheral'`` uses level k = n.  Both equal
    ``-(2/k) L_X - (2/k) sum_ij L_ij``.
    """
    if kind == "central":
        from math import gcd

        if gcd(n, p) != 1:
            raise PreconditionError("central type requires gcd(n, p) = 1")
        k = n * p
    elif kind == "peripheral":
        k = n
    else:
        raise PreconditionError("kind must be 'central' or 'peripheral'")
    if k < 3:
        raise PreconditionError("level must be >= 3")
    c = Fraction(-2, k)
    sections = {(i, j): c for i in range(k) for j in range(k)}
    return ShiodaClass.build(k, coeff_lx=c, sections=sections)


def verify_prop22(n: int, p: int) -> dict:
    """Exact degree checks for the normal bundle of a central boundary surface."""
    from math import gcd

    if gcd(n, p) != 1:
        raise PreconditionError("requires gcd(n, p) = 1")
    k = n * p
    if k < 3:
        raise PreconditionError("requires n*p >= 3")
    nc = normal_bundle_class("central", n, p)
    f = fibre_class(k)
    l00 = zero_section_class(k)
    deg_on_fibre = intersect(nc, f)
    deg_on_section = intersect(nc, l00)
    adjunction_lhs = Fraction((k - 6) * cusp_number_t(k), 6)
    adjunction_rhs = 2 * genus_x(k) - 2
    checks = {
        "normal_degree_on_fibre": {
            "expected": str(-2 * k),
            "got": str(deg_on_fibre),
            "pass": deg_on_fibre == -2 * k,
        },
        "normal_degree_on_zero_section": {
            "expected": "0",
            "got": str(deg_on_section),
            "pass": deg_on_section == 0,
        },
        "adjunction_degree": {
            "expected": str(adjunction_rhs),
            "got": str(adjunction_lhs),
            "pass": adjunction_lhs == adjunction_rhs,
        },
    }
    return {
        "n": n,
        "p": p,
        "k": k,
        "checks": checks,
        "pass": all(c["pass"] for c in checks.values()),
    }


def kc_diagonal_curve(n: int) -> Fraction:
    """Degree of the canonical class on the diagonal base curve: (n/4 - 1) t(n)."""
    if n < 3:
        raise PreconditionError("n must be >= 3")
    return (Fraction(n, 4) - 1) * cusp_number_t(n)


def boundary_positivity(k: int) -> Fraction:
    """The boundary-restriction degree (k/4 - 1) t(k)."""
    if k < 3:
        raise PreconditionError("k must be >= 3")
    return (Fraction(k, 4) - 1) * cusp_number_t(k)


# ---------------------------------------------------------------------------
# Formal divisor bookkeeping on the compactified moduli space
# ---------------------------------------------------------------------------

_SYMBOLS = ("L", "D", "D_eff", "K")


@dataclass(frozen=True)
class FormalDivisorExpr:
    """Exact rational coefficients over the symbol basis {L, D, D_eff, K}."""

    coefficients: tuple  # tuple of (symbol, Fraction), sorted by symbol

    @classmethod
    def build(cls, **coeffs) -> "FormalDivisorExpr":
        for s in coeffs:
            if s not in _SYMBOLS:
                raise PreconditionError(f"unknown divisor symbol {s!r}")
        items = tuple(sorted((s, Fraction(c)) for s, c in coeffs.items() if c))
        return cls(items)

    def coefficient(self, symbol: str) -> Fraction:
        for s, c in self.coefficients:
            if s == symbol:
                return c
        return Fraction(0)

    def to_dict(self) -> dict:
        return {s: str(c) for s, c in self.coefficients}


def k_decomposition(n: int, d: int) -> FormalDivisorExpr:
    """Express the canonical symbol through L and an effective part.

    Substituting D = (10/n) L - (1/(n mu(d))) D_eff into K = 3L - D gives
    K = (3 - 10/n) L + (1/(n mu(d))) D_eff.  The L coefficient is positive
    exactly when n >= 4.
    """
    if n < 1 or d < 1:
        raise PreconditionError("n and d must be positive")
    return FormalDivisorExpr.build(
        L=Fraction(3) - Fraction(10, n),
        D_eff=Fraction(1, n * mu(d)),
    )


@dataclass(frozen=True)
class DiscrepancyCheck:
    """Inputs for the exceptional-coefficient positivity test.

    ``alpha_lower_bound`` is the exclusive lower bound on the discrepancy of
    an exceptional divisor over a log-terminal singularity (default -1).
    """

    n: int
    d: int
    alpha_lower_bound: Fraction = Fraction(-1)

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise PreconditionError("n and d must be positive")


def discrepancy_ok(check: DiscrepancyCheck) -> bool:
    """True iff mu(d) (3n - 10) >= 1, which forces
    mu(d)(3n - 10) + alpha > 0 for every alpha above the lower bound."""
    return mu(check.d) * (3 * check.n - 10) >= 1


def weissauer_margin(n: int, eps: Fraction) -> bool:
    """True iff 3 - (12 + eps)/n > 0, the low-order cusp-form margin."""
    if n < 1:
        raise PreconditionError("n must be positive")
    eps = Fraction(eps)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    return 3 - Fraction(12 + eps, n) > 0


def invariant_table(k_min: int = 3, k_max: int = 60) -> list:
    """Rows (k, t, genus, deg L) for k in [k_min, k_max]."""
    if k_min < 3 or k_max < k_min:
        raise PreconditionError("need 3 <= k_min <= k_max")
    return [
        {
            "k": k,
            "t": cusp_number_t(k),
            "genus": genus_x(k),
            "deg_l": str(deg_l_x(k)),
        }
        for k in range(k_min, k_max + 1)
    ]
