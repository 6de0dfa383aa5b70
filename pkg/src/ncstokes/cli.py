"""Command line front end: solve, converge, check."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import harness, oracle
from .fields import (
    div_h,
    dump_piecewise_const,
    dump_vector_field,
    l2_norm,
    seminorm_1h,
)
from .mesh import MeshError, build_masked, build_rectangular, load_mask
from .quadrature import square_moments
from .pressure import momentum_residuals
from .solver import SolverConfig, SolverError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncstokes",
        description="Stokes solver on square meshes using a locally "
        "divergence-free nonconforming velocity basis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve the built-in benchmark problem")
    ps.add_argument("--nx", type=int, default=16, help="squares in x direction")
    ps.add_argument("--ny", type=int, default=16, help="squares in y direction")
    ps.add_argument("--mask", type=str, default=None, help="mask file for non-rectangular domains (overrides --nx/--ny)")
    ps.add_argument("--h", type=float, default=None, help="square side length (default 1/max(nx, ny))")
    ps.add_argument("--origin", type=float, nargs=2, default=(0.0, 0.0), metavar=("X0", "Y0"), help="coordinates of the bottom-left lattice corner")
    ps.add_argument("--solver", choices=("cg", "dense"), default="cg", help="linear solver for the color systems")
    ps.add_argument("--tol", type=float, default=1e-10, help="CG relative residual tolerance")
    ps.add_argument("--max-iters", type=int, default=50_000, help="CG iteration cap")
    ps.add_argument("--quad", type=int, default=3, help="Gauss-Legendre order for load integration")
    ps.add_argument("--dump-fields", type=str, default=None, metavar="DIR", help="write velocity.txt and pressure.txt to DIR")
    ps.add_argument("--oracle", action="store_true", help="cross-check against the dense mixed solver (small meshes only)")
    ps.set_defaults(func=cmd_solve)

    pc = sub.add_parser("converge", help="convergence study on n-by-n unit squares")
    pc.add_argument("--levels", type=str, default="8,16,32,64,128", help="comma-separated mesh sizes")
    pc.add_argument("--out", type=str, default=None, metavar="CSV", help="write the study table to this CSV file")
    pc.add_argument("--solver", choices=("cg", "dense"), default="cg")
    pc.add_argument("--tol", type=float, default=1e-10)
    pc.add_argument("--max-iters", type=int, default=50_000)
    pc.add_argument("--quad", type=int, default=3)
    pc.set_defaults(func=cmd_converge)

    pk = sub.add_parser("check", help="run the invariant suite on small meshes")
    pk.set_defaults(func=cmd_check)
    return parser


def _config(args) -> SolverConfig:
    return SolverConfig(
        method=args.solver,
        tol=args.tol,
        max_iterations=args.max_iters,
        quad_order=args.quad,
    )


def cmd_solve(args) -> int:
    if args.mask is not None:
        mask = load_mask(args.mask)
        h = args.h if args.h is not None else 1.0 / max(mask.shape)
        mesh = build_masked(mask, h, tuple(args.origin))
    else:
        h = args.h if args.h is not None else 1.0 / max(args.nx, args.ny)
        mesh = build_rectangular(args.nx, args.ny, h, tuple(args.origin))

    dim_red, dim_black, dim_full = harness.subspace_dims(mesh)
    print(
        f"mesh: {mesh.n_squares} squares, {mesh.n_interior_vertices} interior "
        f"vertices, {mesh.n_interior_squares} interior squares, h = {mesh.h:g}"
    )
    print(f"dims: red {dim_red}, black {dim_black}, full space {dim_full}")

    case = harness.stokes_case()
    config = _config(args)
    u_h, pres = harness.solve_case(mesh, case, config)

    moments = square_moments(mesh, case.forcing, config.quad_order)
    lhs1, rhs1, lhs2, rhs2 = momentum_residuals(
        mesh, u_h, pres.pressure, case.forcing, moments=moments
    )
    res = 0.0
    if mesh.n_interior_vertices:
        res = max(
            float(np.abs(lhs1 - rhs1).max()), float(np.abs(lhs2 - rhs2).max())
        )
    print(
        f"velocity: |u_h|_1h = {seminorm_1h(u_h):.6E}, "
        f"max |div_h u_h| = {float(np.abs(div_h(u_h).values).max() if mesh.n_squares else 0.0):.2E}"
    )
    print(
        f"pressure: |p_h|_0 = {l2_norm(pres.pressure):.6E}, "
        f"anchors (red, black) = {pres.anchors}, "
        f"momentum residual = {res:.2E}"
    )

    unit_square = (
        args.mask is None
        and args.nx == args.ny
        and tuple(args.origin) == (0.0, 0.0)
        and abs(mesh.h * args.nx - 1.0) <= 1e-12
    )
    if unit_square:
        err = harness.error_norms(mesh, u_h, pres.pressure, case)
        print(
            f"errors vs exact solution: |u-u_h|_0 = {err.u_l2:.4E}, "
            f"|u-u_h|_1h = {err.u_h1:.4E}, |p-p_h|_0 = {err.p_l2:.4E}"
        )

    if args.oracle:
        try:
            u_ref, p_ref, lam = oracle.solve_mixed(
                mesh, case.forcing, config.quad_order, moments=moments
            )
        except ValueError as exc:
            print(f"oracle cross-check unavailable: {exc}", file=sys.stderr)
            return 2
        du = type(u_h).from_coeffs(
            mesh, u_h.x.coeffs - u_ref.x.coeffs, u_h.y.coeffs - u_ref.y.coeffs
        )
        dp = type(pres.pressure)(mesh, pres.values - p_ref.values)
        print(
            f"oracle: |u_h - u_ref|_1h = {seminorm_1h(du):.2E}, "
            f"|p_h - p_ref|_0 = {l2_norm(dp):.2E}, "
            f"max multiplier = {float(np.abs(lam).max()):.2E}"
        )

    if args.dump_fields is not None:
        out = Path(args.dump_fields)
        out.mkdir(parents=True, exist_ok=True)
        dump_vector_field(u_h, out / "velocity.txt")
        dump_piecewise_const(pres.pressure, out / "pressure.txt")
        print(f"fields written to {out}/velocity.txt and {out}/pressure.txt")
    return 0


def cmd_converge(args) -> int:
    try:
        levels = [int(tok) for tok in args.levels.split(",") if tok.strip()]
    except ValueError:
        print(f"invalid --levels value: {args.levels!r}", file=sys.stderr)
        return 2
    if not levels or sorted(levels) != levels:
        print("--levels must be an ascending list of mesh sizes", file=sys.stderr)
        return 2
    config = _config(args)
    rows = harness.convergence_study(levels, config=config, progress=print)
    if args.out is not None:
        Path(args.out).write_text(harness.study_csv(rows))
        print(f"table written to {args.out}")
    return 0


def cmd_check(args) -> int:
    results = harness.run_invariant_checks()
    failed = 0
    for r in results:
        status = "ok  " if r.passed else "FAIL"
        print(f"{status} {r.name}: {r.detail}")
        failed += not r.passed
    if failed:
        print(f"{failed} of {len(results)} checks failed")
        return 1
    print(f"all {len(results)} checks passed")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MeshError as exc:
        print(f"mesh validation error: {exc}", file=sys.stderr)
        return 1
    except (SolverError, np.linalg.LinAlgError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
