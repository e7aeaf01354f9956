"""Command-line client for the verification toolkit.

By default every subcommand runs in-process through the same service layer
the HTTP endpoints use; with ``--server URL`` the request is POSTed to a
running service instead.  All output is JSON on stdout (or ``--out FILE``).

Exit codes: 0 success, 2 precondition error, 3 numerical-conditioning error,
1 internal error, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConditioningError, PreconditionError
from .service import schemas
from .service import handlers

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_PRECONDITION = 2
EXIT_CONDITIONING = 3
EXIT_USAGE = 64

_TAU_SHORTHANDS = {
    "diag-i": [[0.0, 1.0], [0.0, 0.0], [0.0, 1.0]],
    "diag-2i": [[0.0, 2.0], [0.0, 0.0], [0.0, 2.0]],
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_json_arg(value: str):
    """Accept a file path, inline JSON, '-' for stdin, or a tau shorthand."""
    if value in _TAU_SHORTHANDS:
        return _TAU_SHORTHANDS[value]
    if value == "-":
        return json.load(sys.stdin)
    text = value
    if not value.lstrip().startswith(("[", "{")):
        try:
            with open(value) as fh:
                text = fh.read()
        except OSError as exc:
            raise PreconditionError(f"cannot read {value!r}: {exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"invalid JSON input: {exc}")


def _common_flags(p: argparse.ArgumentParser) -> None:
    # accepted both before and after the subcommand
    p.add_argument("--server", default=argparse.SUPPRESS,
                   help="base URL of a running service; "
                        "when omitted the command runs in-process")
    p.add_argument("--out", default=argparse.SUPPRESS,
                   help="write the JSON result to FILE instead of stdout")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                   help="emit JSON (always on)")


def _build_parser() -> _Parser:
    parser = _Parser(prog="siegel", description=__doc__)
    parser.add_argument("--server", default=None)
    parser.add_argument("--out", default=None)
    parser.add_argument("--json", action="store_true", default=True)
    sub = parser.add_subparsers(dest="area")
    leaves = []

    groups = sub.add_parser("groups").add_subparsers(dest="op")
    member = groups.add_parser("member")
    leaves.append(member)
    member.add_argument("--d", type=int, required=True)
    member.add_argument("--n", type=int, default=1)
    member.add_argument("--flavor", default="plain",
                        choices=["plain", "lev", "level_n", "lev_level_n"])
    member.add_argument("--coords", default="rational", choices=["rational", "integral"])
    member.add_argument("--matrix", required=True)
    cosets = groups.add_parser("cosets")
    leaves.append(cosets)
    cosets.add_argument("--d", type=int, required=True)

    cusps = sub.add_parser("cusps").add_subparsers(dest="op")
    stab = cusps.add_parser("stab")
    leaves.append(stab)
    stab.add_argument("--d", type=int, required=True)
    stab.add_argument("--n", type=int, default=1)
    stab.add_argument("--flavor", default="plain",
                      choices=["plain", "lev", "level_n", "lev_level_n"])
    stab.add_argument("--coords", default="rational", choices=["rational", "integral"])
    stab.add_argument("--line")
    stab.add_argument("--plane")
    counts = cusps.add_parser("counts")
    leaves.append(counts)
    counts.add_argument("--p", type=int, required=True)

    theta = sub.add_parser("theta").add_subparsers(dest="op")
    for name in ("eval", "delta10", "f0", "order"):
        cmd = theta.add_parser(name)
        leaves.append(cmd)
        cmd.add_argument("--tau", required=True)
        cmd.add_argument("--tol", type=float, default=1e-12)
        cmd.add_argument("--precision-digits", type=int, default=30)
        if name == "eval":
            cmd.add_argument("--char", default="0,0,0,0",
                             help="four bits a1,a2,b1,b2 (twice the characteristic)")
        if name == "f0":
            cmd.add_argument("--d", type=int, default=1)
        if name == "order":
            cmd.add_argument("--ladder", default="1e-1,1e-2,1e-3,1e-4")

    inv = sub.add_parser("invariants").add_subparsers(dest="op")
    table = inv.add_parser("table")
    leaves.append(table)
    table.add_argument("--k-min", type=int, default=3)
    table.add_argument("--k-max", type=int, default=60)
    table.add_argument("--format", default="json", choices=["json", "csv"])
    prop22 = inv.add_parser("prop22")
    leaves.append(prop22)
    prop22.add_argument("--n", type=int, required=True)
    prop22.add_argument("--p", type=int, required=True)
    ample = inv.add_parser("ample")
    leaves.append(ample)
    ample.add_argument("--n", type=int, required=True)
    claims = inv.add_parser("claims")
    leaves.append(claims)
    claims.add_argument("--n", type=int, required=True)
    claims.add_argument("--d", type=int, required=True)

    vor = sub.add_parser("voronoi").add_subparsers(dest="op")
    smooth = vor.add_parser("smooth")
    leaves.append(smooth)
    smooth.add_argument("--p", type=int, required=True)
    smooth.add_argument("--n", type=int, required=True)
    basic = vor.add_parser("basic")
    leaves.append(basic)
    basic.add_argument("--lattice", required=True)
    basic.add_argument("--cone")

    verify = sub.add_parser("verify")
    leaves.append(verify)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--precision-digits", type=int, default=30)
    verify.add_argument("--members-per-spec", type=int, default=200)
    verify.add_argument("--geometries", type=int, default=20)
    verify.add_argument("--modularity-samples", type=int, default=20)
    verify.add_argument("--invariance-samples", type=int, default=10)

    serve = sub.add_parser("serve")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    for leaf in leaves:
        _common_flags(leaf)
    return parser


def _dispatch(args) -> tuple:
    """Returns (path, request_model, handler)."""
    area, op = args.area, getattr(args, "op", None)
    if area == "groups" and op == "member":
        req = schemas.MemberRequest(
            d=args.d, n=args.n, flavor=args.flavor, coords=args.coords,
            matrix=_as_string_matrix(_load_json_arg(args.matrix)),
        )
        return "/groups/member", req, handlers.groups_member
    if area == "groups" and op == "cosets":
        return "/groups/cosets", schemas.CosetsRequest(d=args.d), handlers.groups_cosets
    if area == "cusps" and op == "stab":
        line = _load_json_arg(args.line) if args.line else None
        plane = _load_json_arg(args.plane) if args.plane else None
        req = schemas.StabRequest(d=args.d, n=args.n, flavor=args.flavor,
                                  coords=args.coords, line=line, plane=plane)
        return "/cusps/stab", req, handlers.cusps_stab
    if area == "cusps" and op == "counts":
        return "/cusps/counts", schemas.CountsRequest(p=args.p), handlers.cusps_counts
    if area == "theta":
        if op == "eval":
            bits = [int(x) for x in args.char.split(",")]
            req = schemas.ThetaEvalRequest(
                tau=_load_json_arg(args.tau), tol=args.tol,
                precision_digits=args.precision_digits, char=bits,
            )
            return "/theta/eval", req, handlers.theta_eval
        if op == "delta10":
            req = schemas.TauFields(tau=_load_json_arg(args.tau), tol=args.tol,
                                    precision_digits=args.precision_digits)
            return "/theta/delta10", req, handlers.theta_delta10
        if op == "f0":
            req = schemas.F0Request(tau=_load_json_arg(args.tau), tol=args.tol,
                                    precision_digits=args.precision_digits, d=args.d)
            return "/theta/f0", req, handlers.theta_f0
        if op == "order":
            ladder = [float(x) for x in args.ladder.split(",")]
            req = schemas.OrderRequest(tau=_load_json_arg(args.tau), ladder=ladder,
                                       precision_digits=args.precision_digits)
            return "/theta/order", req, handlers.theta_order
    if area == "invariants":
        if op == "table":
            req = schemas.TableRequest(k_min=args.k_min, k_max=args.k_max)
            return "/invariants/table", req, handlers.invariants_table
        if op == "prop22":
            return "/invariants/prop22", schemas.Prop22Request(n=args.n, p=args.p), \
                handlers.invariants_prop22
        if op == "ample":
            return "/invariants/ample", schemas.AmpleRequest(n=args.n), handlers.invariants_ample
        if op == "claims":
            return "/invariants/claims", schemas.ClaimsRequest(n=args.n, d=args.d), \
                handlers.invariants_claims
    if area == "voronoi":
        if op == "smooth":
            return "/voronoi/smooth", schemas.SmoothRequest(p=args.p, n=args.n), \
                handlers.voronoi_smooth
        if op == "basic":
            lattice = _as_string_matrix(_load_json_arg(args.lattice))
            cone = _as_string_matrix(_load_json_arg(args.cone)) if args.cone else None
            return "/voronoi/basic", schemas.BasicRequest(lattice=lattice, cone=cone), \
                handlers.voronoi_basic
    if area == "verify":
        req = schemas.VerifyRequest(
            seed=args.seed, precision_digits=args.precision_digits,
            members_per_spec=args.members_per_spec, geometries=args.geometries,
            modularity_samples=args.modularity_samples,
            invariance_samples=args.invariance_samples,
        )
        return "/verify", req, handlers.run_verify
    raise UsageError(f"unknown subcommand {area!r} {op!r}")


def _as_string_matrix(obj):
    if not isinstance(obj, list):
        raise PreconditionError("expected an array of arrays")
    return [[str(x) for x in row] for row in obj]


def _emit(result, args) -> None:
    if getattr(args, "format", "json") == "csv" and "rows" in result:
        lines = ["k,t,genus,deg_l"]
        lines += [f"{r['k']},{r['t']},{r['genus']},{r['deg_l']}" for r in result["rows"]]
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(result, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _remote_call(server: str, path: str, req) -> dict:
    import httpx

    resp = httpx.post(server.rstrip("/") + path, json=req.model_dump(), timeout=600.0)
    if resp.status_code >= 400:
        body = resp.json()
        code = body.get("error", {}).get("code", "internal")
        message = body.get("error", {}).get("message", resp.text)
        if code == "precondition":
            raise PreconditionError(message)
        if code == "conditioning":
            raise ConditioningError(message)
        raise RuntimeError(message)
    return resp.json()


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.area is None:
            raise UsageError("a subcommand is required")
        if args.area == "serve":
            import uvicorn

            from .service.app import create_app

            uvicorn.run(create_app(), host=args.host, port=args.port)
            return EXIT_OK
        path, req, handler = _dispatch(args)
        if args.server:
            result = _remote_call(args.server, path, req)
        else:
            result = handler(req)
        _emit(result, args)
        return EXIT_OK
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        _build_parser().print_usage(sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        _emit_error("precondition", exc)
        return EXIT_PRECONDITION
    except ConditioningError as exc:
        _emit_error("conditioning", exc)
        return EXIT_CONDITIONING
    except Exception as exc:
        from pydantic import ValidationError

        if isinstance(exc, ValidationError):
            _emit_error("precondition", exc)
            return EXIT_PRECONDITION
        sys.stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL


def _emit_error(code: str, exc: Exception) -> None:
    sys.stdout.write(json.dumps({"error": {"code": code, "message": str(exc)}}) + "\n")


if __name__ == "__main__":
    sys.exit(main())
