"""Theta constants, the Igusa weight-10 cusp form, and its symmetrization.

Series conventions
------------------
Genus-2 theta constant with half-integral characteristic (a, b),
a, b in {0, 1/2}^2::

    theta_{a,b}(tau) = sum_{n in Z^2} exp(pi*i*(n+a)^T tau (n+a) + 2*pi*i*(n+a)^T b)

A characteristic is even when 4 a.b is even; exactly 10 of the 16 are even,
and the odd ones vanish identically (the n -> -n-2a involution flips the
sign of every term).  The weight-10 cusp form is the product of the squares
of the 10 even constants.

All evaluation is done with mpmath at a configurable working precision
(default ~30 significant digits) and a fixed summation order, so results
are bit-identical across runs.  Each truncated sum carries a certified
Gaussian tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import exp, gamma, mp, mpc, mpf, pi, sqrt, workdps

from .errors import ConditioningError, EstimationError, PreconditionError
from .exact import RationalMatrix
from .groups import SiegelPoint, act, coset_reps_psl2
from .invariants import mu

# evaluation refuses tau whose imaginary part has an eigenvalue below this
MIN_IMAG_EIG = 1e-3

DEFAULT_DPS = 30


@dataclass(frozen=True)
class ThetaChar:
    """Half-integral characteristic; bits are twice the entries of (a, b)."""

    a1: int
    a2: int
    b1: int
    b2: int

    def __post_init__(self):
        if any(x not in (0, 1) for x in (self.a1, self.a2, self.b1, self.b2)):
            raise PreconditionError("characteristic bits must be 0 or 1")

    @property
    def parity(self) -> int:
        return (self.a1 * self.b1 + self.a2 * self.b2) % 2

    def is_even(self) -> bool:
        return self.parity == 0

    def halves(self):
        return (
            Fraction(self.a1, 2),
            Fraction(self.a2, 2),
            Fraction(self.b1, 2),
            Fraction(self.b2, 2),
        )

    def bits(self):
        return (self.a1, self.a2, self.b1, self.b2)


def all_characteristics():
    return [
        ThetaChar(a1, a2, b1, b2)
        for a1 in (0, 1)
        for a2 in (0, 1)
        for b1 in (0, 1)
        for b2 in (0, 1)
    ]


def even_characteristics():
    return [c for c in all_characteristics() if c.is_even()]


@dataclass(frozen=True)
class EvalResult:
    """Truncated series value with a certified truncation bound."""

    value: object  # mpc
    tail_bound: object  # mpf
    terms_used: int

    def as_complex(self) -> complex:
        return complex(self.value)


def _imag_min_eig(tau: SiegelPoint):
    lam = tau.imag_min_eig()
    if lam < MIN_IMAG_EIG:
        raise ConditioningError(
            f"smallest eigenvalue of Im tau is {float(lam):.3g}, below the floor {MIN_IMAG_EIG}"
        )
    return lam


def _tail_bound_2d(lam, n_terms: int):
    """Bound for dropping all lattice points with max-norm above ``n_terms``.

    Any dropped point has ||n + a||^2 >= (k - 1/2)^2 with k = max|n_i| > n_terms,
    and there are 8k points on that shell.
    """
    total = mpf(0)
    k = n_terms + 1
    while True:
        term = 8 * k * exp(-pi * lam * (k - mpf(1) / 2) ** 2)
        total += term
        if term < total * mpf(10) ** (-mp.dps) or k > n_terms + 400:
            break
        k += 1
    return total


def _truncation_radius(tau: SiegelPoint, tol: float):
    lam = _imag_min_eig(tau)
    flam = float(lam)
    # initial radius from the Gaussian decay, then enlarge until certified
    n = max(2, math.isqrt(int(math.log(64.0 / (tol * flam)) / (math.pi * flam))) + 2)
    while True:
        tail = _tail_bound_2d(lam, n)
        if tail < tol:
            return n, tail
        n += 2
        if n > 4000:
            raise ConditioningError("truncation radius exploded; tau too degenerate")


def _quarter_period_caches(tau: SiegelPoint, n: int):
    """Powers of the quarter-period units exp(pi*i*tau1/4), exp(pi*i*tau2/2),
    exp(pi*i*tau3/4) up to the largest exponent used at radius ``n``.

    With half-integral characteristics every series term is
    A^(u^2) * B^(u v) * C^(v^2) * i^(u b1 + v b2) for integers
    u = 2 m1 + a1, v = 2 m2 + a2, so one cache serves all 16 characteristics.
    """
    kmax = (2 * n + 1) ** 2
    pi_i = pi * mpc(0, 1)
    a = exp(pi_i * tau.tau1 / 4)
    b = exp(pi_i * tau.tau2 / 2)
    c = exp(pi_i * tau.tau3 / 4)

    def powers(base):
        out = [mpc(1)]
        acc = mpc(1)
        for _ in range(kmax):
            acc = acc * base
            out.append(acc)
        return out

    return powers(a), powers(b), powers(1 / b), powers(c)


_I_POWERS = None


def _theta_sum(char: ThetaChar, n: int, caches):
    pow_a, pow_b, pow_binv, pow_c = caches
    a1, a2, b1, b2 = char.bits()
    i_pows = (mpc(1), mpc(0, 1), mpc(-1), mpc(0, -1))
    s = mpc(0)
    for m1 in range(-n, n + 1):
        u = 2 * m1 + a1
        pa = pow_a[u * u]
        ub1 = u * b1
        for m2 in range(-n, n + 1):
            v = 2 * m2 + a2
            w = u * v
            pb = pow_b[w] if w >= 0 else pow_binv[-w]
            s += pa * pb * pow_c[v * v] * i_pows[(ub1 + v * b2) % 4]
    return s


def theta_constant(char: ThetaChar, tau: SiegelPoint, tol: float = 1e-12,
                   dps: int = DEFAULT_DPS) -> EvalResult:
    """Genus-2 theta constant, truncated with a certified tail below ``tol``.

    Odd characteristics return exactly zero without summation.
    """
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    if not char.is_even():
        return EvalResult(mpc(0), mpf(0), 0)
    with workdps(dps):
        n, tail = _truncation_radius(tau, tol)
        caches = _quarter_period_caches(tau, n)
        return EvalResult(_theta_sum(char, n, caches), tail, (2 * n + 1) ** 2)


def igusa_delta10(tau: SiegelPoint, tol: float = 1e-12, dps: int = DEFAULT_DPS) -> EvalResult:
    """Product of the squares of the 10 even theta constants.

    The returned bound is the exact worst-case propagation
    prod(|t_i| + e_i)^2 - prod |t_i|^2 of the per-factor tail bounds.
    """
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    with workdps(dps):
        n, tail = _truncation_radius(tau, tol / 100)
        caches = _quarter_period_caches(tau, n)
        values = [_theta_sum(c, n, caches) for c in even_characteristics()]
        value = mpf(1)
        for v in values:
            value = value * v * v
        inflated = mpf(1)
        plain = mpf(1)
        for v in values:
            inflated *= (abs(v) + tail) ** 2
            plain *= abs(v) ** 2
        return EvalResult(value, inflated - plain, 10 * (2 * n + 1) ** 2)


def slash(f, k: int, m: RationalMatrix, tau: SiegelPoint, dps: int = DEFAULT_DPS):
    """Weight-k slash action: det(C tau + D)^-k * f(m tau)."""
    with workdps(dps):
        det = _cd_det(m, tau)
        moved = act(m, tau)
        return det ** (-k) * f(moved)


def _cd_det(m: RationalMatrix, tau: SiegelPoint):
    c = m.block(2, 0, 2, 2)
    d = m.block(2, 2, 2, 2)

    def conv(x):
        return mpf(x.numerator) / x.denominator

    e11 = conv(c[0, 0]) * tau.tau1 + conv(c[0, 1]) * tau.tau2 + conv(d[0, 0])
    e12 = conv(c[0, 0]) * tau.tau2 + conv(c[0, 1]) * tau.tau3 + conv(d[0, 1])
    e21 = conv(c[1, 0]) * tau.tau1 + conv(c[1, 1]) * tau.tau2 + conv(d[1, 0])
    e22 = conv(c[1, 0]) * tau.tau2 + conv(c[1, 1]) * tau.tau3 + conv(d[1, 1])
    return e11 * e22 - e12 * e21


def f0(tau: SiegelPoint, d: int, tol: float = 1e-12, dps: int = DEFAULT_DPS) -> EvalResult:
    """Multiplicative symmetrization of the weight-10 form over the
    PSL(2, Z/d) coset representatives; declared weight ``10 * mu(d)``."""
    if d < 1:
        raise PreconditionError("d must be >= 1")
    with workdps(dps):
        reps = coset_reps_psl2(d)
        values = []
        errors = []
        terms = 0
        for rep in reps:
            det = _cd_det(rep, tau)
            moved = act(rep, tau)
            part = igusa_delta10(moved, tol=tol, dps=dps)
            scale = abs(det) ** (-10)
            values.append(det ** (-10) * part.value)
            errors.append(scale * part.tail_bound)
            terms += part.terms_used
        value = mpf(1)
        for v in values:
            value = value * v
        inflated = mpf(1)
        plain = mpf(1)
        for v, e in zip(values, errors):
            inflated *= abs(v) + e
            plain *= abs(v)
        return EvalResult(value, inflated - plain, terms)


def f0_weight(d: int) -> int:
    return 10 * mu(d)


# ---------------------------------------------------------------------------
# Order-of-vanishing and decay estimators
# ---------------------------------------------------------------------------


def _ls_slope(xs, ys):
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = sum((x - mx) ** 2 for x in xs)
    return num / den


def vanishing_order_diagonal(tau1, tau3, eps_ladder, dps: int = 40,
                             evaluator=None) -> float:
    """Least-squares slope of log|f| against log eps for tau2 = eps.

    ``evaluator`` defaults to the weight-10 form; any map SiegelPoint -> EvalResult
    with comparable decay can be estimated the same way.
    """
    ladder = [float(e) for e in eps_ladder]
    if any(e <= 0 for e in ladder) or any(
        b >= a for a, b in zip(ladder, ladder[1:])
    ):
        raise PreconditionError("eps ladder must be positive and decreasing")
    evaluator = evaluator or (lambda t: igusa_delta10(t, tol=1e-25, dps=dps))
    with workdps(dps):
        if not (mpc(tau1).imag > 0 and mpc(tau3).imag > 0):
            raise PreconditionError("base point must have positive imaginary parts")
        floor = mpf(10) ** (-(dps - 6))
        xs, ys = [], []
        for e in ladder:
            point = SiegelPoint(tau1, e, tau3)
            res = evaluator(point)
            mag = abs(res.value)
            if mag <= floor or mag <= 4 * res.tail_bound:
                continue  # below the precision floor: excluded
            xs.append(float(mp.log(e)))
            ys.append(float(mp.log(mag)))
        if len(xs) < 3:
            raise EstimationError("fewer than 3 usable ladder points")
        return float(_ls_slope(xs, ys))


def cusp_decay_rate(tau_base: SiegelPoint, heights, dps: int = DEFAULT_DPS) -> float:
    """Slope of log|weight-10 form| against Im(tau3); a cusp form decays at -2*pi."""
    hs = [float(h) for h in heights]
    if len(hs) < 2 or any(b <= a for a, b in zip(hs, hs[1:])) or hs[0] <= 0:
        raise PreconditionError("heights must be increasing positive values")
    with workdps(dps):
        xs, ys = [], []
        floor = mpf(10) ** (-(dps - 6))
        re3 = tau_base.tau3.real
        for h in hs:
            point = SiegelPoint(tau_base.tau1, tau_base.tau2, mpc(re3, h))
            res = igusa_delta10(point, tol=1e-25, dps=dps)
            mag = abs(res.value)
            if mag <= floor or mag <= 4 * res.tail_bound:
                continue
            xs.append(h)
            ys.append(float(mp.log(mag)))
        if len(xs) < 2:
            raise EstimationError("fewer than 2 usable height points")
        return float(_ls_slope(xs, ys))


# ---------------------------------------------------------------------------
# Genus-1 theta function and its quasi-periodicity
# ---------------------------------------------------------------------------


def elliptic_theta(tau, z, tol: float = 1e-12, dps: int = DEFAULT_DPS):
    """theta(tau, z) = sum_n exp(pi*i*n^2*tau + 2*pi*i*n*z), certified truncation."""
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    with workdps(dps):
        tau = mpc(tau)
        z = mpc(z)
        y = tau.imag
        if y < MIN_IMAG_EIG:
            raise ConditioningError("Im tau below the conditioning floor")
        v = abs(z.imag)
        fy = float(y)
        fv = float(v)
        n = max(2, int((fv / fy) + math.sqrt(math.log(64.0 / (tol * fy)) / (math.pi * fy))) + 2)
        while True:
            # dropped terms: |exp| = exp(-pi y k^2 + 2 pi v k), both signs of k
            tail = mpf(0)
            k = n + 1
            while True:
                term = 2 * exp(-pi * y * k * k + 2 * pi * v * k)
                tail += term
                if term < tail * mpf(10) ** (-mp.dps) or k > n + 400:
                    break
                k += 1
            if tail < tol:
                break
            n += 2
            if n > 20000:
                raise ConditioningError("truncation radius exploded in elliptic theta")
        pi_i = pi * mpc(0, 1)
        two_pi_i = 2 * pi * mpc(0, 1)
        s = mpc(0)
        for m in range(-n, n + 1):
            s += exp(pi_i * m * m * tau + two_pi_i * m * z)
        return EvalResult(s, tail, 2 * n + 1)


def genus1_theta_char(a_bit: int, b_bit: int, tau, tol: float = 1e-12,
                      dps: int = DEFAULT_DPS):
    """Genus-1 theta null value with characteristic (a, b), a, b in {0, 1/2}."""
    with workdps(dps):
        tau = mpc(tau)
        y = tau.imag
        if y < MIN_IMAG_EIG:
            raise ConditioningError("Im tau below the conditioning floor")
        a = mpf(a_bit) / 2
        b = mpf(b_bit) / 2
        fy = float(y)
        n = max(2, int(math.sqrt(math.log(64.0 / (tol * fy)) / (math.pi * fy))) + 2)
        pi_i = pi * mpc(0, 1)
        two_pi_i = 2 * pi * mpc(0, 1)
        s = mpc(0)
        for m in range(-n, n + 1):
            x = m + a
            s += exp(pi_i * x * x * tau + two_pi_i * x * b)
        tail = mpf(0)
        k = n + 1
        while True:
            term = 2 * exp(-pi * y * (k - mpf(1) / 2) ** 2)
            tail += term
            if term < tail * mpf(10) ** (-mp.dps) or k > n + 400:
                break
            k += 1
        return EvalResult(s, tail, 2 * n + 1)


def verify_formula3(tau, z, k: int, m: int, tol: float = 1e-14,
                    dps: int = DEFAULT_DPS) -> float:
    """Relative residual of the quasi-periodicity law
    theta(tau, z + k*tau + m) = exp(2*pi*i*(-k^2 tau/2 - k z)) theta(tau, z)."""
    with workdps(dps):
        tau = mpc(tau)
        z = mpc(z)
        lhs = elliptic_theta(tau, z + k * tau + m, tol=tol, dps=dps).value
        base = elliptic_theta(tau, z, tol=tol, dps=dps).value
        if abs(base) == 0:
            raise PreconditionError("theta vanishes at the base point")
        factor = exp(2 * pi * mpc(0, 1) * (-mpf(k) ** 2 * tau / 2 - k * z))
        return float(abs(lhs - factor * base) / abs(base))


def shear_exponent_matches_elliptic(n: int) -> bool:
    """Exact identity between the two exponent polynomials in (k, tau2, tau3).

    The conormal shear factor has exponent (-k^2 tau3 - 2 k tau2)/n while the
    elliptic quasi-periodicity factor has exponent -k^2 tau3 / 2 - k tau2;
    the first equals 2/n times the second, as rational-coefficient polynomials.
    """
    if n < 1:
        raise PreconditionError("n must be positive")
    shear = {("k2", "tau3"): Fraction(-1, n), ("k", "tau2"): Fraction(-2, n)}
    elliptic = {("k2", "tau3"): Fraction(-1, 2), ("k", "tau2"): Fraction(-1)}
    scaled = {key: Fraction(2, n) * val for key, val in elliptic.items()}
    return shear == scaled


def classical_theta_constant(dps: int = DEFAULT_DPS):
    """pi^(1/4) / Gamma(3/4), the value of the genus-1 theta null at tau = i."""
    with workdps(dps):
        return pi ** mpf("0.25") / gamma(mpf(3) / 4)
