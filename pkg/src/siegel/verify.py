"""Self-contained verification report over all modules.

``verify_all`` executes every acceptance check and returns a deterministic,
machine-readable report: same seed and precision give a byte-identical
report.  Failures are recorded, never raised.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import gcd, pi as _float_pi

from mpmath import mpc, workdps

from . import __version__
from .cusps import (
    IsotropicLine,
    IsotropicPlane,
    line_stabilizer,
    plane_stabilizer,
    tits_counts,
    verify_cusp_coordinates,
    p_l0_generators,
)
from .exact import RationalMatrix, is_symplectic, standard_j
from .groups import (
    GroupSpec,
    SiegelPoint,
    act,
    congruence_pattern_holds,
    coset_reps_psl2,
    dual_quotient_action,
    is_member,
    sample_members,
    to_integral,
)
from .invariants import (
    DiscrepancyCheck,
    cusp_number_t,
    deg_l_x,
    discrepancy_ok,
    genus_x,
    k_decomposition,
    kc_diagonal_curve,
    boundary_positivity,
    mu,
    verify_prop22,
    weissauer_margin,
)
from .theta import (
    ThetaChar,
    all_characteristics,
    cusp_decay_rate,
    even_characteristics,
    f0,
    f0_weight,
    genus1_theta_char,
    igusa_delta10,
    shear_exponent_matches_elliptic,
    slash,
    theta_constant,
    vanishing_order_diagonal,
    verify_formula3,
)
from .voronoi import Sym2Lattice, gl2_translate, is_basic, principal_cone, smoothness_report

REPORT_SCHEMA_VERSION = "1"


def _level_partner(d: int) -> int:
    return 4 if d == 5 else 5


def _spec_list(d: int):
    n = _level_partner(d)
    return [
        GroupSpec(d, 1, "plain"),
        GroupSpec(d, 1, "lev"),
        GroupSpec(d, n, "level_n"),
        GroupSpec(d, n, "lev_level_n"),
    ]


def _check_group_membership(seed: int, members_per_spec: int) -> dict:
    j = standard_j()
    failures = []
    checked = 0
    for d in range(1, 7):
        for spec in _spec_list(d):
            ms = sample_members(spec, members_per_spec, seed + d)
            for m in ms:
                checked += 1
                if not is_member(m, spec):
                    failures.append(f"membership d={d} flavor={spec.flavor}")
                    break
                if not congruence_pattern_holds(m, d):
                    failures.append(f"pattern d={d} flavor={spec.flavor}")
                    break
                if spec.has_dual_condition and not (m.is_integral() and is_symplectic(m, j)):
                    failures.append(f"lev-integrality d={d} flavor={spec.flavor}")
                    break
            # dual action is a homomorphism, spot-checked on consecutive pairs
            for a, b in zip(ms[::2], ms[1::2]):
                da = dual_quotient_action(to_integral(a, d), d)
                db = dual_quotient_action(to_integral(b, d), d)
                dab = dual_quotient_action(to_integral(a @ b, d), d)
                if da.compose(db).matrix != dab.matrix:
                    failures.append(f"dual-homomorphism d={d} flavor={spec.flavor}")
                    break
    return {
        "status": "pass" if not failures else "fail",
        "details": {"members_checked": checked, "failures": failures},
    }


def _seeded_lines_planes(d: int, count: int, seed: int):
    """Transport the reference line/plane by seeded integer symplectic frames."""
    mats = sample_members(GroupSpec(1, 1, "plain"), count, seed)
    lines, planes = [], []
    for m in mats:
        rows = m.to_int_rows()
        lines.append(IsotropicLine.from_vector(rows[2]))
        planes.append(IsotropicPlane.from_vectors(rows[2], rows[3]))
    return lines, planes


def _divides_either_way(x: Fraction, d: int) -> bool:
    # index of the intersection inside each lattice must divide d; mixed
    # divisors such as 3/2 occur for composite d, where neither lattice
    # contains the other
    return d % x.numerator == 0 and d % x.denominator == 0


def _check_stabilizer_cokernels(seed: int, geometries: int) -> dict:
    failures = []
    checked = 0
    for d in (2, 3, 4, 6):
        lines, planes = _seeded_lines_planes(d, geometries, seed + 17 * d)
        spec = GroupSpec(d, 1, "plain")
        for line in lines:
            rep = line_stabilizer(line, spec)
            checked += 1
            if not all(_divides_either_way(x, d) for x in rep.elementary_divisors_vs_reference):
                failures.append(f"line divisor d={d}: {rep.to_json_obj()}")
        for plane in planes:
            rep = plane_stabilizer(plane, spec)
            checked += 1
            if not all(_divides_either_way(x, d) for x in rep.elementary_divisors_vs_reference):
                failures.append(f"plane divisor d={d}: {rep.to_json_obj()}")
    # level-n lattices are exactly n times the level-1 lattices
    for d, n in ((2, 5), (3, 4), (3, 5), (4, 5), (6, 5)):
        lines, planes = _seeded_lines_planes(d, 3, seed + 31 * d + n)
        for line in lines:
            r1 = line_stabilizer(line, GroupSpec(d, 1, "plain"))
            rn = line_stabilizer(line, GroupSpec(d, n, "level_n"))
            checked += 1
            if rn.basis[0] != n * r1.basis[0]:
                failures.append(f"line level scaling d={d} n={n}")
        for plane in planes:
            r1 = plane_stabilizer(plane, GroupSpec(d, 1, "plain"))
            rn = plane_stabilizer(plane, GroupSpec(d, n, "level_n"))
            checked += 1
            scaled = tuple(tuple(n * x for x in row) for row in r1.basis)
            if scaled != rn.basis:
                failures.append(f"plane level scaling d={d} n={n}")
    return {
        "status": "pass" if not failures else "fail",
        "details": {"stabilizers_checked": checked, "failures": failures},
    }


def _base_point():
    return SiegelPoint(mpc("0.13", "1.21"), mpc("0.22", "0.34"), mpc("-0.31", "1.44"))


def _admissible_samples(spec: GroupSpec, count: int, seed: int, tau: SiegelPoint,
                        floor=5e-3, reps=None):
    """Seeded members filtered so the moved point (and its coset translates,
    when the evaluation will take them) stays numerically safe."""
    out = []
    batch = 0
    while len(out) < count and batch < 40:
        for m in sample_members(spec, count, seed + 1000 * batch):
            moved = act(m, tau)
            if float(moved.imag_min_eig()) < floor:
                continue
            if reps and any(float(act(r, moved).imag_min_eig()) < 2e-3 for r in reps):
                continue
            out.append(m)
            if len(out) == count:
                break
        batch += 1
    return out


def _check_igusa_form(seed: int, modularity_samples: int, dps: int) -> dict:
    failures = []
    with workdps(dps):
        tau = _base_point()
        # odd characteristics vanish identically
        for char in all_characteristics():
            if not char.is_even():
                if theta_constant(char, tau).value != 0:
                    failures.append(f"odd characteristic {char.bits()} not exactly 0")
        # diagonal splitting against independent genus-1 sums
        t1, t3 = mpc("0.21", "1.13"), mpc("-0.37", "1.52")
        diag = SiegelPoint(t1, 0.0, t3)
        for char in all_characteristics():
            g2 = theta_constant(char, diag, tol=1e-14, dps=dps).value
            g1a = genus1_theta_char(char.a1, char.b1, t1, tol=1e-16, dps=dps).value
            g1b = genus1_theta_char(char.a2, char.b2, t3, tol=1e-16, dps=dps).value
            if abs(g2 - g1a * g1b) > 1e-10:
                failures.append(f"diagonal splitting {char.bits()}")
        # modularity under seeded integer symplectic elements
        base = igusa_delta10(tau, tol=1e-20, dps=dps).value
        for m in _admissible_samples(GroupSpec(1), modularity_samples, seed + 5, tau):
            lhs = slash(lambda t: igusa_delta10(t, tol=1e-20, dps=dps).value, 10, m, tau, dps=dps)
            if abs(lhs - base) / abs(base) > 1e-8:
                failures.append("weight-10 modularity residual above 1e-8")
                break
        # vanishing along the diagonal
        for k in range(10):
            point = SiegelPoint(mpc(0.1 * k, 1.0 + 0.1 * k), 0.0, mpc(-0.2 * k, 1.3 + 0.05 * k))
            if abs(igusa_delta10(point, tol=1e-14, dps=dps).value) > 1e-9:
                failures.append(f"diagonal point {k} value above 1e-9")
        # order-2 vanishing transversal to the diagonal
        ladder = [1e-1, 1e-2, 1e-3, 1e-4]
        for t1b, t3b in ((1j, 2j), (2j, 3j)):
            slope = vanishing_order_diagonal(t1b, t3b, ladder)
            if abs(slope - 2.0) > 0.05:
                failures.append(f"diagonal slope {slope} outside 2.00 +- 0.05")
        # cusp decay
        rate = cusp_decay_rate(SiegelPoint(mpc(0, 1.5), mpc(0.2, 0.3), mpc(0, 2.0)),
                               [2, 3, 4, 5, 6], dps=dps)
        if abs(rate + 2 * _float_pi) > 0.02 * 2 * _float_pi:
            failures.append(f"decay rate {rate} outside -2*pi +- 2%")
        # elliptic quasi-periodicity residuals
        import random as _random

        rng = _random.Random(seed + 9)
        for _ in range(50):
            tau1 = complex(rng.uniform(-0.4, 0.4), rng.uniform(0.8, 1.6))
            z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3))
            k = rng.randint(-2, 2)
            mshift = rng.randint(-3, 3)
            if verify_formula3(tau1, z, k, mshift, dps=dps) > 1e-10:
                failures.append("quasi-periodicity residual above 1e-10")
                break
        if not shear_exponent_matches_elliptic(4) or not shear_exponent_matches_elliptic(5):
            failures.append("shear/elliptic exponent identity failed")
    return {"status": "pass" if not failures else "fail", "details": {"failures": failures}}


def _check_symmetrized_form(seed: int, samples: int, dps: int) -> dict:
    failures = []
    with workdps(dps):
        tau = _base_point()
        # d = 1 reduces to the weight-10 form exactly
        if f0(tau, 1, tol=1e-18, dps=dps).value != igusa_delta10(tau, tol=1e-18, dps=dps).value:
            failures.append("d=1 symmetrization differs from the weight-10 form")
        for d, expected in ((2, 6), (3, 12)):
            reps = coset_reps_psl2(d)
            if len(reps) != expected or len(reps) != mu(d):
                failures.append(f"coset count d={d}: {len(reps)}")
                continue
            weight = f0_weight(d)
            base = f0(tau, d, tol=1e-18, dps=dps).value
            for m in _admissible_samples(GroupSpec(d), samples, seed + 50 * d, tau, reps=reps):
                lhs = slash(lambda t: f0(t, d, tol=1e-18, dps=dps).value, weight, m, tau, dps=dps)
                if abs(lhs - base) / abs(base) > 1e-7:
                    failures.append(f"symmetrized invariance d={d} residual above 1e-7")
                    break
    return {"status": "pass" if not failures else "fail", "details": {"failures": failures}}


def _check_surface_invariants() -> dict:
    failures = []
    for k in range(3, 61):
        if deg_l_x(k) != Fraction(k * cusp_number_t(k), 12):
            failures.append(f"degree formula k={k}")
        if 2 * genus_x(k) - 2 != Fraction((k - 6) * cusp_number_t(k), 6):
            failures.append(f"genus/degree consistency k={k}")
    for n in range(4, 9):
        for p in (3, 5, 7):
            if gcd(n, p) != 1:
                continue
            rep = verify_prop22(n, p)
            if not rep["pass"]:
                failures.append(f"normal bundle degrees n={n} p={p}")
            if rep["checks"]["normal_degree_on_fibre"]["got"] != str(-2 * n * p):
                failures.append(f"fibre degree n={n} p={p}")
    for n in range(3, 51):
        positive = kc_diagonal_curve(n) > 0
        if positive != (n >= 5):
            failures.append(f"diagonal-curve positivity n={n}")
    if kc_diagonal_curve(4) != 0 or boundary_positivity(4) != 0:
        failures.append("n=4 boundary values not exactly 0")
    for n in range(1, 21):
        for d in range(1, 7):
            want = n >= 4
            if (k_decomposition(n, d).coefficient("L") > 0) != want:
                failures.append(f"L-coefficient sign n={n} d={d}")
            if n >= 4 and not discrepancy_ok(DiscrepancyCheck(n, d)):
                failures.append(f"discrepancy n={n} d={d}")
    if discrepancy_ok(DiscrepancyCheck(3, 1)):
        failures.append("discrepancy n=3 d=1 should fail")
    if not weissauer_margin(5, 2) or weissauer_margin(5, 3):
        failures.append("low-order margin boundary (5, 2)/(5, 3)")
    return {"status": "pass" if not failures else "fail", "details": {"failures": failures}}


def _check_voronoi() -> dict:
    failures = []
    pc = principal_cone()
    ok, det = is_basic(pc, Sym2Lattice.standard())
    if not ok or det != 1:
        failures.append(f"principal cone vs standard lattice: det {det}")
    for n in range(1, 7):
        ok, _ = is_basic(pc, Sym2Lattice.standard(n))
        if not ok:
            failures.append(f"principal cone vs {n}*standard lattice")
    # The spec fixture expects (False, det 4) for the d=2 plane lattice
    # {Z, 2Z, 2Z}.  The primitive ray points (1,0,0), (0,0,2), (2,-2,2)
    # are an exact basis of that lattice (2*v1 + v2 - v3 = (0,2,0)), so the
    # honest verdict is (True, det 1); the fixture is recorded as failed.
    lat2 = Sym2Lattice.from_triples([(1, 0, 0), (0, 2, 0), (0, 0, 2)])
    ok, det = is_basic(pc, lat2)
    spec_fixture = {"expected": {"basic": False, "det": 4}, "got": {"basic": ok, "det": int(det)}}
    if ok or det != 4:
        failures.append(
            "declared d=2 non-basicness fixture is unsatisfiable: the ray points "
            f"form a lattice basis (verdict {ok}, det {det})"
        )
    # the singularity mechanism does exist: d=3 lattice with a translated cone
    lat3 = Sym2Lattice.from_triples([(1, 0, 0), (0, 3, 0), (0, 0, 3)])
    moved = gl2_translate(pc, [[1, 1], [1, 2]])
    ok3, det3 = is_basic(moved, lat3)
    if ok3 or abs(det3) != 3:
        failures.append(f"d=3 translated cone should be non-basic with det 3, got {det3}")
    smooth = {}
    for p, n in ((3, 4), (3, 5), (5, 4)):
        rep = smoothness_report(p, n)
        smooth[f"{p},{n}"] = rep["smooth"]
        if not rep["smooth"]:
            failures.append(f"boundary charts (p={p}, n={n}) not smooth")
    return {
        "status": "pass" if not failures else "fail",
        "details": {"failures": failures, "d2_fixture": spec_fixture, "smooth": smooth},
    }


def _check_cusp_coordinates(seed: int, dps: int) -> dict:
    failures = []
    with workdps(dps):
        import random as _random

        for p, n in ((3, 5), (5, 4), (3, 4)):
            gens = p_l0_generators(p, n)
            rng = _random.Random(seed + 100 * p + n)
            shear = gens[1]
            embed_b, embed_c = gens[3], gens[4]
            for _ in range(25):
                tau = SiegelPoint(
                    mpc(rng.uniform(-0.4, 0.4), rng.uniform(0.9, 1.4)),
                    mpc(rng.uniform(-0.3, 0.3), rng.uniform(0.1, 0.4)),
                    mpc(rng.uniform(-0.4, 0.4), rng.uniform(1.0, 1.6)),
                )
                element = rng.choice([gens[0], shear, gens[2], embed_b, embed_c, embed_b @ embed_c])
                if verify_cusp_coordinates(p, n, element, tau, dps=dps) > 1e-9:
                    failures.append(f"cusp coordinate residual p={p} n={n}")
                    break
            counts = tits_counts(p)
            if counts != {
                "central_lines": 1,
                "peripheral_lines": (p * p - 1) // 2,
                "planes": p + 1,
            }:
                failures.append(f"cusp counts p={p}")
    return {"status": "pass" if not failures else "fail", "details": {"failures": failures}}


def verify_all(seed: int = 0, precision_digits: int = 30,
               members_per_spec: int = 200, geometries: int = 20,
               modularity_samples: int = 20, invariance_samples: int = 10) -> dict:
    """Run every verification section and return the report dictionary."""
    sections = [
        ("group_membership", lambda: _check_group_membership(seed, members_per_spec)),
        ("stabilizer_cokernels", lambda: _check_stabilizer_cokernels(seed, geometries)),
        ("cusp_coordinates", lambda: _check_cusp_coordinates(seed, precision_digits)),
        ("igusa_form", lambda: _check_igusa_form(seed, modularity_samples, precision_digits)),
        ("symmetrized_form", lambda: _check_symmetrized_form(seed, invariance_samples, precision_digits)),
        ("surface_invariants", _check_surface_invariants),
        ("voronoi_cones", _check_voronoi),
    ]
    out = []
    for name, fn in sections:
        try:
            result = fn()
        except Exception as exc:  # failures are reported, not thrown
            result = {"status": "fail", "details": {"error": f"{type(exc).__name__}: {exc}"}}
        out.append({"name": name, "status": result["status"], "details": result["details"]})
    overall = "pass" if all(s["status"] == "pass" for s in out if s["status"] != "skip") else "fail"
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool_version": __version__,
        "seed": seed,
        "precision_digits": precision_digits,
        "sections": out,
        "overall": overall,
    }


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
