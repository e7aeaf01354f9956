"""Service-layer handlers shared by the HTTP endpoints and the CLI.

Each handler takes a validated request model and returns a plain dict;
domain errors propagate as the package's typed exceptions and are mapped
to HTTP codes (or process exit codes) by the callers.
"""

from __future__ import annotations

from fractions import Fraction

from mpmath import mpc, workdps

from ..errors import PreconditionError
from ..exact import RationalMatrix, is_symplectic, standard_j
from ..cusps import (
    IsotropicLine,
    IsotropicPlane,
    line_stabilizer,
    plane_stabilizer,
    tits_counts,
)
from ..groups import (
    GroupSpec,
    SiegelPoint,
    congruence_pattern_holds,
    coset_reps_psl2,
    dual_quotient_action,
    is_member,
    to_integral,
)
from ..invariants import (
    DiscrepancyCheck,
    boundary_positivity,
    discrepancy_ok,
    invariant_table,
    k_decomposition,
    kc_diagonal_curve,
    mu,
    verify_prop22,
)
from ..theta import (
    ThetaChar,
    f0,
    f0_weight,
    igusa_delta10,
    theta_constant,
    vanishing_order_diagonal,
)
from ..verify import verify_all
from ..voronoi import Cone3, Sym2Lattice, SymForm, is_basic, principal_cone, smoothness_report
from . import schemas


def _spec(req) -> GroupSpec:
    return GroupSpec(req.d, req.n, req.flavor, req.coords)


def _parse_tau(pairs, dps: int) -> SiegelPoint:
    if len(pairs) != 3:
        raise PreconditionError("tau needs exactly three [re, im] pairs")
    with workdps(dps):
        vals = [mpc(str(p[0]), str(p[1])) for p in pairs]
        return SiegelPoint(*vals)


def groups_member(req: schemas.MemberRequest) -> dict:
    spec = _spec(req)
    m = RationalMatrix.from_json_obj(req.matrix)
    if m.rows != 4 or m.cols != 4:
        raise PreconditionError("matrix must be 4x4")
    rational = m if req.coords == "rational" else None
    integral = to_integral(m, spec.d) if req.coords == "rational" else m
    if rational is None:
        rational = m  # integral input: pattern is evaluated on the conjugate
        from ..groups import to_rational

        rational = to_rational(m, spec.d)
    if not is_symplectic(rational, standard_j()):
        raise PreconditionError("matrix is not symplectic over the rationals")
    member = is_member(m, spec)
    pattern = congruence_pattern_holds(rational, spec.d)
    dual = None
    if integral.is_integral():
        try:
            dual = dual_quotient_action(integral, spec.d).to_lists()
        except PreconditionError:
            dual = None
    return {"member": member, "pattern": pattern, "dual_action": dual}


def groups_cosets(req: schemas.CosetsRequest) -> dict:
    reps = coset_reps_psl2(req.d)
    return {"d": req.d, "mu": mu(req.d), "reps": [r.to_json_obj() for r in reps]}


def cusps_stab(req: schemas.StabRequest) -> dict:
    spec = _spec(req)
    if (req.line is None) == (req.plane is None):
        raise PreconditionError("provide exactly one of line or plane")
    if req.line is not None:
        rep = line_stabilizer(IsotropicLine.from_vector(req.line), spec)
    else:
        if len(req.plane) != 2:
            raise PreconditionError("plane needs exactly two basis vectors")
        rep = plane_stabilizer(IsotropicPlane.from_vectors(*req.plane), spec)
    return rep.to_json_obj()


def cusps_counts(req: schemas.CountsRequest) -> dict:
    return tits_counts(req.p)


def theta_eval(req: schemas.ThetaEvalRequest) -> dict:
    tau = _parse_tau(req.tau, req.precision_digits)
    char = ThetaChar(*req.char)
    res = theta_constant(char, tau, tol=req.tol, dps=req.precision_digits)
    return _eval_response(res)


def theta_delta10(req: schemas.TauFields) -> dict:
    tau = _parse_tau(req.tau, req.precision_digits)
    res = igusa_delta10(tau, tol=req.tol, dps=req.precision_digits)
    return _eval_response(res)


def theta_f0(req: schemas.F0Request) -> dict:
    tau = _parse_tau(req.tau, req.precision_digits)
    res = f0(tau, req.d, tol=req.tol, dps=req.precision_digits)
    out = _eval_response(res)
    out["weight"] = f0_weight(req.d)
    return out


def theta_order(req: schemas.OrderRequest) -> dict:
    if len(req.tau) != 3:
        raise PreconditionError("tau needs exactly three [re, im] pairs")
    with workdps(req.precision_digits):
        t1 = mpc(str(req.tau[0][0]), str(req.tau[0][1]))
        t3 = mpc(str(req.tau[2][0]), str(req.tau[2][1]))
    slope = vanishing_order_diagonal(t1, t3, req.ladder, dps=req.precision_digits)
    return {"slope": slope}


def _eval_response(res) -> dict:
    return {
        "value": [float(res.value.real), float(res.value.imag)],
        "tail_bound": float(res.tail_bound),
        "terms_used": res.terms_used,
    }


def invariants_table(req: schemas.TableRequest) -> dict:
    return {"rows": invariant_table(req.k_min, req.k_max)}


def invariants_prop22(req: schemas.Prop22Request) -> dict:
    return verify_prop22(req.n, req.p)


def invariants_ample(req: schemas.AmpleRequest) -> dict:
    kc = kc_diagonal_curve(req.n)
    return {"kc": str(kc), "ample_boundary": kc > 0 and boundary_positivity(req.n) > 0}


def invariants_claims(req: schemas.ClaimsRequest) -> dict:
    expr = k_decomposition(req.n, req.d)
    return {
        "k_decomposition": expr.to_dict(),
        "l_coefficient_positive": expr.coefficient("L") > 0,
        "discrepancy_ok": discrepancy_ok(DiscrepancyCheck(req.n, req.d)),
    }


def voronoi_basic(req: schemas.BasicRequest) -> dict:
    lattice = Sym2Lattice.from_triples([[Fraction(x) for x in row] for row in req.lattice])
    if req.cone is None:
        cone = principal_cone()
    else:
        if len(req.cone) != 3:
            raise PreconditionError("cone needs exactly three generators")
        cone = Cone3(tuple(SymForm.of(*[Fraction(x) for x in row]) for row in req.cone))
    ok, det = is_basic(cone, lattice)
    return {"basic": ok, "det": str(det)}


def voronoi_smooth(req: schemas.SmoothRequest) -> dict:
    return smoothness_report(req.p, req.n)


def run_verify(req: schemas.VerifyRequest) -> dict:
    return verify_all(
        seed=req.seed,
        precision_digits=req.precision_digits,
        members_per_spec=req.members_per_spec,
        geometries=req.geometries,
        modularity_samples=req.modularity_samples,
        invariance_samples=req.invariance_samples,
    )
