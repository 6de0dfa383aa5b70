"""Manufactured Stokes problem, error measurement, and convergence studies."""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import divfree, oracle
from .fields import (
    NCVectorField,
    PiecewiseConstField,
    curl_h,
    div_h,
    l2_norm,
    seminorm_1h,
    vector_local_data,
)
from .mesh import SquareMesh, build_masked, build_rectangular, parse_mask
from .pressure import PressureField, momentum_residuals, recover_pressure
from .quadrature import square_moments, square_rule
from .solver import SolverConfig, solve_velocity

PI = np.pi


# ---------------------------------------------------------------------------
# manufactured solution
#
# stream function phi(x, y) = A(x) B(y) with A = sin(2 pi x)(x^3 - x) and
# B = sin(3 pi y)(y^2 - y), velocity u = (A B', -A' B) (exactly divergence
# free, zero on the boundary of the unit square together with its tangential
# derivative), pressure p = sin(4 pi x) exp(pi y) (zero mean on the square).
# The forcing is f = -laplace(u) + grad(p) with every derivative written out
# by hand; tests cross-check them against finite differences.
# ---------------------------------------------------------------------------


def _a0(x):
    return np.sin(2 * PI * x) * (x**3 - x)


def _a1(x):
    s, c, g, g1 = np.sin(2 * PI * x), np.cos(2 * PI * x), x**3 - x, 3 * x**2 - 1
    return 2 * PI * c * g + s * g1


def _a2(x):
    s, c, g, g1 = np.sin(2 * PI * x), np.cos(2 * PI * x), x**3 - x, 3 * x**2 - 1
    return -4 * PI**2 * s * g + 4 * PI * c * g1 + 6 * x * s


def _a3(x):
    s, c, g, g1 = np.sin(2 * PI * x), np.cos(2 * PI * x), x**3 - x, 3 * x**2 - 1
    return -8 * PI**3 * c * g - 12 * PI**2 * s * g1 + 36 * PI * x * c + 6 * s


def _b0(y):
    return np.sin(3 * PI * y) * (y**2 - y)


def _b1(y):
    t, tau, w, w1 = np.sin(3 * PI * y), np.cos(3 * PI * y), y**2 - y, 2 * y - 1
    return 3 * PI * tau * w + t * w1


def _b2(y):
    t, tau, w, w1 = np.sin(3 * PI * y), np.cos(3 * PI * y), y**2 - y, 2 * y - 1
    return -9 * PI**2 * t * w + 6 * PI * tau * w1 + 2 * t


def _b3(y):
    t, tau, w, w1 = np.sin(3 * PI * y), np.cos(3 * PI * y), y**2 - y, 2 * y - 1
    return -27 * PI**3 * tau * w - 27 * PI**2 * t * w1 + 18 * PI * tau


@dataclass(frozen=True)
class ManufacturedCase:
    """Closed-form Stokes solution on the unit square with all the pieces the
    pipeline and the error norms need: u, grad u, p, and f = -lap u + grad p."""

    name: str
    velocity: Callable
    velocity_gradient: Callable
    pressure: Callable
    forcing: Callable


def _velocity(x, y):
    return _a0(x) * _b1(y), -_a1(x) * _b0(y)


def _velocity_gradient(x, y):
    # rows of grad u: (d/dx u1, d/dy u1, d/dx u2, d/dy u2)
    return (
        _a1(x) * _b1(y),
        _a0(x) * _b2(y),
        -_a2(x) * _b0(y),
        -_a1(x) * _b1(y),
    )


def _pressure(x, y):
    return np.sin(4 * PI * x) * np.exp(PI * y)


def _forcing(x, y):
    f1 = -(_a2(x) * _b1(y) + _a0(x) * _b3(y)) + 4 * PI * np.cos(4 * PI * x) * np.exp(
        PI * y
    )
    f2 = (_a3(x) * _b0(y) + _a1(x) * _b2(y)) + PI * np.sin(4 * PI * x) * np.exp(PI * y)
    return f1, f2


def stokes_case() -> ManufacturedCase:
    return ManufacturedCase(
        name="trig-poly stream function",
        velocity=_velocity,
        velocity_gradient=_velocity_gradient,
        pressure=_pressure,
        forcing=_forcing,
    )


# ---------------------------------------------------------------------------
# error norms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorNorms:
    u_l2: float
    u_h1: float
    p_l2: float


def error_norms(
    mesh: SquareMesh,
    u_h: NCVectorField,
    p_h: PiecewiseConstField,
    case: ManufacturedCase,
    quad_order: int = 4,
    chunk: int = 1 << 13,
) -> ErrorNorms:
    """Broken norms of u - u_h (L2 and piecewise-H1 seminorm) and of p - p_h,
    by per-square Gauss-Legendre quadrature of the exact fields."""
    xh, yh, wts = square_rule(quad_order)
    h = mesh.h
    centers = mesh.centers()
    lx, ly = vector_local_data(u_h)
    pv = p_h.values
    dx = h * xh
    dy = h * yh
    e_u = e_g = e_p = 0.0
    for lo in range(0, mesh.n_squares, chunk):
        hi = min(lo + chunk, mesh.n_squares)
        x = centers[lo:hi, 0:1] + dx[None, :]
        y = centers[lo:hi, 1:2] + dy[None, :]
        u1, u2 = case.velocity(x, y)
        u1 -= lx[lo:hi, 0:1] + lx[lo:hi, 1:2] * dx + lx[lo:hi, 2:3] * dy
        u2 -= ly[lo:hi, 0:1] + ly[lo:hi, 1:2] * dx + ly[lo:hi, 2:3] * dy
        e_u += np.sum(wts * (u1 * u1 + u2 * u2))

        g11, g12, g21, g22 = case.velocity_gradient(x, y)
        g11 -= lx[lo:hi, 1:2]
        g12 -= lx[lo:hi, 2:3]
        g21 -= ly[lo:hi, 1:2]
        g22 -= ly[lo:hi, 2:3]
        e_g += np.sum(wts * (g11 * g11 + g12 * g12 + g21 * g21 + g22 * g22))

        dp = case.pressure(x, y) - pv[lo:hi, None]
        e_p += np.sum(wts * dp * dp)
    h2 = h * h
    return ErrorNorms(
        u_l2=math.sqrt(h2 * e_u), u_h1=math.sqrt(h2 * e_g), p_l2=math.sqrt(h2 * e_p)
    )


# ---------------------------------------------------------------------------
# convergence study
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StudyRow:
    n: int
    dim_red: int
    dim_black: int
    dim_full: int
    err_u_l2: float
    err_u_h1: float
    err_p_l2: float
    ord_u_l2: float | None
    ord_u_h1: float | None
    ord_p_l2: float | None
    seconds: float


def subspace_dims(mesh: SquareMesh) -> tuple[int, int, int]:
    """(red, black, full) dimensions: interior squares per color and
    2 N(interior vertices) + N(squares) - 2 for the full velocity space."""
    red = int(np.count_nonzero(mesh.interior_red_mask))
    black = int(mesh.n_interior_squares - red)
    full = 2 * mesh.n_interior_vertices + mesh.n_squares - 2
    return red, black, full


def dims_report(levels: Sequence[int]) -> list[tuple[int, int, int, int]]:
    """(n, dim_red, dim_black, dim_full) for n-by-n unit-square meshes."""
    out = []
    for n in levels:
        mesh = build_rectangular(n, n, 1.0 / n)
        out.append((n, *subspace_dims(mesh)))
    return out


def solve_case(
    mesh: SquareMesh,
    case: ManufacturedCase,
    config: SolverConfig | None = None,
) -> tuple[NCVectorField, PressureField]:
    """Velocity solve plus pressure recovery, sharing one forcing-moment table."""
    config = config or SolverConfig()
    moments = square_moments(mesh, case.forcing, config.quad_order)
    _, u_h = solve_velocity(mesh, case.forcing, config, moments=moments)
    pres = recover_pressure(
        mesh,
        u_h,
        case.forcing,
        quad_order=config.quad_order,
        moments=moments,
        backend=config.resolve_backend(),
    )
    return u_h, pres


def convergence_study(
    levels: Sequence[int] = (8, 16, 32, 64, 128),
    case: ManufacturedCase | None = None,
    config: SolverConfig | None = None,
    error_quad_order: int = 4,
    progress: Callable[[str], None] | None = None,
) -> list[StudyRow]:
    """Solve the manufactured problem on a sequence of n-by-n meshes and
    report errors, observed orders between consecutive levels, and wall time
    per level (assembly + solves + pressure sweep, excluding error norms)."""
    case = case or stokes_case()
    config = config or SolverConfig()
    rows: list[StudyRow] = []
    prev: StudyRow | None = None
    for n in levels:
        mesh = build_rectangular(n, n, 1.0 / n)
        t0 = time.perf_counter()
        u_h, pres = solve_case(mesh, case, config)
        seconds = time.perf_counter() - t0
        err = error_norms(mesh, u_h, pres.pressure, case, error_quad_order)
        dim_red, dim_black, dim_full = subspace_dims(mesh)

        def order(e_prev: float, e_cur: float) -> float:
            return math.log(e_prev / e_cur) / math.log(n / prev.n)

        row = StudyRow(
            n=n,
            dim_red=dim_red,
            dim_black=dim_black,
            dim_full=dim_full,
            err_u_l2=err.u_l2,
            err_u_h1=err.u_h1,
            err_p_l2=err.p_l2,
            ord_u_l2=order(prev.err_u_l2, err.u_l2) if prev else None,
            ord_u_h1=order(prev.err_u_h1, err.u_h1) if prev else None,
            ord_p_l2=order(prev.err_p_l2, err.p_l2) if prev else None,
            seconds=seconds,
        )
        rows.append(row)
        prev = row
        if progress is not None:
            progress(format_study_row(row))
    return rows


CSV_HEADER = (
    "mesh,dim_red,dim_black,dim_full,err_u_l2,ord_u_l2,"
    "err_u_h1,ord_u_h1,err_p_l2,ord_p_l2,seconds"
)


def _fmt_ord(o: float | None) -> str:
    return "" if o is None else f"{o:.4f}"


def study_csv(rows: Sequence[StudyRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for r in rows:
        writer.writerow(
            [
                f"{r.n}x{r.n}",
                r.dim_red,
                r.dim_black,
                r.dim_full,
                f"{r.err_u_l2:.4E}",
                _fmt_ord(r.ord_u_l2),
                f"{r.err_u_h1:.4E}",
                _fmt_ord(r.ord_u_h1),
                f"{r.err_p_l2:.4E}",
                _fmt_ord(r.ord_p_l2),
                f"{r.seconds:.3f}",
            ]
        )
    return buf.getvalue()


def format_study_row(r: StudyRow) -> str:
    def o(v):
        return "   -  " if v is None else f"{v:6.4f}"

    return (
        f"{r.n:>5}x{r.n:<5} dims {r.dim_red}/{r.dim_black}/{r.dim_full}  "
        f"|u-uh|_0 {r.err_u_l2:.4E} ({o(r.ord_u_l2)})  "
        f"|u-uh|_1h {r.err_u_h1:.4E} ({o(r.ord_u_h1)})  "
        f"|p-ph|_0 {r.err_p_l2:.4E} ({o(r.ord_p_l2)})  "
        f"{r.seconds:6.2f}s"
    )


# ---------------------------------------------------------------------------
# invariant battery for the `check` subcommand
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


L_MASK = parse_mask("111110\n111110\n111110\n111111\n111111\n111111")


def _l_mesh(h: float = 1.0) -> SquareMesh:
    # 6x6 square missing a 1x3 notch at the top right: connected, hole free,
    # satisfies every mesh assumption, and has interior squares of both colors
    return build_masked(L_MASK, h)


def run_invariant_checks(rng_seed: int = 2718) -> list[CheckResult]:
    """Fast self-checks of the core identities; returns one result per check."""
    rng = np.random.default_rng(rng_seed)
    results: list[CheckResult] = []

    def record(name: str, passed: bool, detail: str) -> None:
        results.append(CheckResult(name, bool(passed), detail))

    # entity counts and the Euler relation
    try:
        m8 = build_rectangular(8, 8, 1.0 / 8)
        m3 = build_rectangular(3, 3, 1.0 / 3)
        ml = _l_mesh()
        ok = True
        details = []
        for mesh, label, expect in (
            (m8, "8x8", (49, 64, 36)),
            (m3, "3x3", (4, 9, 1)),
        ):
            got = (mesh.n_interior_vertices, mesh.n_squares, mesh.n_interior_squares)
            ok &= got == expect
            details.append(f"{label}: iv/sq/int {got}")
        for mesh, label in ((m8, "8x8"), (m3, "3x3"), (ml, "L")):
            euler = 2 * mesh.n_interior_vertices - mesh.n_squares + 2
            ok &= euler == mesh.n_interior_squares
        record("entity counts + Euler relation", ok, "; ".join(details))
    except Exception as exc:  # pragma: no cover - only on real breakage
        record("entity counts + Euler relation", False, repr(exc))
        return results

    # basis fields are divergence free; random combinations too
    m16 = build_rectangular(16, 16, 1.0 / 16)
    worst = 0.0
    for sq in mesh_samples(m16, rng, 6):
        worst = max(worst, float(np.abs(div_h(divfree.basis_function(m16, sq)).values).max()))
    c = divfree.DivFreeCoefficients(m16, rng.standard_normal(m16.n_interior_squares))
    worst = max(worst, float(np.abs(div_h(divfree.expand(c)).values).max()))
    record(
        "basis divergence free",
        worst <= 1e-12,
        f"max |div_h| = {worst:.2e} (16x16, sampled bases + random combination)",
    )

    # energy of a vector hat field splits into divergence and curl parts
    u = NCVectorField.from_coeffs(
        m16,
        rng.standard_normal(m16.n_interior_vertices),
        rng.standard_normal(m16.n_interior_vertices),
    )
    lhs = seminorm_1h(u) ** 2
    rhs = l2_norm(div_h(u)) ** 2 + l2_norm(curl_h(u)) ** 2
    rel = abs(lhs - rhs) / lhs
    record("norm split |u|^2 = |div|^2 + |curl|^2", rel <= 1e-12, f"rel err {rel:.2e}")

    # assembled stencil equals the gradient Gram matrix, including on the L
    worst = 0.0
    for mesh in (m8, _l_mesh(0.25)):
        for color in (0, 1):
            K = divfree.assemble_stiffness(mesh, color).toarray()
            mask = mesh.interior_red_mask if color == 0 else ~mesh.interior_red_mask
            ids = mesh.interior_square_ids[mask]
            fields = [vector_local_data(divfree.basis_function(mesh, s)) for s in ids]
            h2 = mesh.h * mesh.h
            for a, (ax, ay) in enumerate(fields):
                for b, (bx, by) in enumerate(fields):
                    gram = h2 * (
                        ax[:, 1] @ bx[:, 1]
                        + ax[:, 2] @ bx[:, 2]
                        + ay[:, 1] @ by[:, 1]
                        + ay[:, 2] @ by[:, 2]
                    )
                    worst = max(worst, abs(K[a, b] - gram))
    record(
        "stencil matches gradient Gram matrix",
        worst <= 1e-10,
        f"max |K - Gram| = {worst:.2e} (8x8 and L-shaped, both colors)",
    )

    # fast pipeline agrees with the dense mixed oracle
    case = stokes_case()
    cfg = SolverConfig(method="dense")
    u_fast, pres = solve_case(m8, case, cfg)
    u_orc, p_orc, lam = oracle.solve_mixed(m8, case.forcing, cfg.quad_order)
    du = max(
        float(np.abs(u_fast.x.coeffs - u_orc.x.coeffs).max()),
        float(np.abs(u_fast.y.coeffs - u_orc.y.coeffs).max()),
    )
    dp = float(np.abs(pres.values - p_orc.values).max())
    ok = du <= 1e-8 and dp <= 1e-8 and float(np.abs(lam).max()) <= 1e-8
    record(
        "fast solve matches mixed oracle",
        ok,
        f"8x8: max velocity diff {du:.2e}, pressure diff {dp:.2e}, "
        f"multipliers {float(np.abs(lam).max()):.2e}",
    )

    # recovered pressure satisfies the defining equations with zero color means
    cfg16 = SolverConfig()
    u16, pres16 = solve_case(m16, case, cfg16)
    moments = square_moments(m16, case.forcing, cfg16.quad_order)
    lhs1, rhs1, lhs2, rhs2 = momentum_residuals(
        m16, u16, pres16.pressure, case.forcing, moments=moments
    )
    scale = max(
        1.0,
        float(np.abs(lhs1).max()),
        float(np.abs(lhs2).max()),
        float(np.abs(rhs1).max()),
        float(np.abs(rhs2).max()),
    )
    mres = max(
        float(np.abs(lhs1 - rhs1).max()), float(np.abs(lhs2 - rhs2).max())
    ) / scale
    red = m16.is_red
    mean_red = abs(float(pres16.values[red].mean()))
    mean_black = abs(float(pres16.values[~red].mean()))
    ok = mres <= 1e-8 and mean_red <= 1e-12 and mean_black <= 1e-12
    record(
        "pressure solves its defining equations",
        ok,
        f"16x16: relative momentum residual {mres:.2e}, "
        f"color means {mean_red:.2e}/{mean_black:.2e}",
    )
    return results


def mesh_samples(mesh: SquareMesh, rng: np.random.Generator, k: int) -> np.ndarray:
    """Up to k distinct interior-square ids, pseudo-randomly chosen."""
    ids = mesh.interior_square_ids
    if len(ids) <= k:
        return ids
    return rng.choice(ids, size=k, replace=False)
