"""Root scan of the secular determinant at a fixed parameter point.

Every sign change of the scaled determinant on the bracket grid is refined
by bisection and polished by a safeguarded Newton step with a numeric
derivative.  Every candidate must pass the matching-matrix residual test,
which rejects refinement artifacts while keeping zeros that sit exactly on a
singularity crossing of the ratio form (those carry genuine eigenstates: the
matching matrix stays rank one there).  Even-multiplicity zeros
(near-mergers) produce no sign change; a local-minimum probe of |det|
reports them in the diagnostics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .lattice import bracket_hints
from .model import ScaledParams
from .secular import (
    matching_residual,
    nsw_det_R,
    nsw_det_R_many,
    secular_det_R,
    secular_det_R_many,
    sigma_of_R,
    tau_of_R,
)

BISECT_REL_TOL = 1e-12
RESIDUAL_TOL = 1e-9
DEDUP_TOL = 1e-9
TANGENCY_THRESHOLD = 1e-8


class Stability(str, Enum):
    ROBUST = "robust"
    FRAGILE = "fragile"
    UNKNOWN = "unknown"


@dataclass
class Root:
    """One accepted bound-state root with its derived quantities."""

    R: float
    sigma: float
    tau: float
    energy: float
    residual: float
    index: int
    stability: Stability = Stability.UNKNOWN
    critical_Z: float | None = None


@dataclass
class TangencyHint:
    """A local minimum of |det| without a sign change: a near-merged pair."""

    R: float
    min_abs_det: float
    local_scale: float


@dataclass
class ScanDiagnostics:
    raw_sign_changes: int = 0
    rejected_spurious: int = 0
    near_tangencies: list[TangencyHint] = field(default_factory=list)
    bracket_width: float = 0.0


@dataclass
class Spectrum:
    params: ScaledParams
    roots: list[Root]
    R_max: float
    diagnostics: ScanDiagnostics


def default_R_max(params: ScaledParams, levels: int = 8) -> float:
    """Window capturing at least `levels` low levels for any coupling."""
    return math.pi * (levels + 0.5) / max(params.lam, 1.0)


def _refine_root(f: Callable[[float], float], a: float, b: float, fa: float, fb: float) -> float:
    """Bisection to |dR| < 1e-12*max(1, R), then safeguarded Newton polish."""
    while (b - a) > BISECT_REL_TOL * max(1.0, 0.5 * (a + b)):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm > 0.0) == (fa > 0.0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    x = 0.5 * (a + b)
    fx = f(x)
    for _ in range(8):
        h = 1e-7 * max(1.0, abs(x))
        d = (f(x + h) - f(x - h)) / (2.0 * h)
        if d == 0.0:
            break
        x_new = x - fx / d
        if not (a <= x_new <= b):
            break
        fx_new = f(x_new)
        if abs(fx_new) >= abs(fx):
            break
        x, fx = x_new, fx_new
        if fx == 0.0:
            break
    return x


def _scan(
    det_scalar: Callable[[float], float],
    det_many: Callable[[np.ndarray], np.ndarray],
    params: ScaledParams,
    R_max: float,
    refine_factor: int,
) -> tuple[list[Root], ScanDiagnostics]:
    brackets = bracket_hints(params, R_max)
    if refine_factor > 1:
        fine: list[tuple[float, float]] = []
        for a, b in brackets:
            edges = np.linspace(a, b, refine_factor + 1)
            fine.extend((edges[i], edges[i + 1]) for i in range(refine_factor))
        brackets = fine
    grid = np.array([brackets[0][0]] + [b for _, b in brackets])
    vals = det_many(grid)
    diag = ScanDiagnostics(bracket_width=float(grid[1] - grid[0]))

    accepted: list[Root] = []
    Z = params.Z
    for i in range(len(grid) - 1):
        fa, fb = float(vals[i]), float(vals[i + 1])
        if fa == 0.0 or fa * fb < 0.0:
            diag.raw_sign_changes += 1
            r = grid[i] if fa == 0.0 else _refine_root(det_scalar, float(grid[i]), float(grid[i + 1]), fa, fb)
            s, t = sigma_of_R(r, Z), tau_of_R(r, Z)
            try:
                res = matching_residual((r, s, t), params)
            except ValueError:
                diag.rejected_spurious += 1
                continue
            if res > RESIDUAL_TOL:
                diag.rejected_spurious += 1
                continue
            if accepted and abs(accepted[-1].R - r) < DEDUP_TOL * max(1.0, r):
                continue
            accepted.append(
                Root(
                    R=r,
                    sigma=s,
                    tau=t,
                    energy=(r / params.scale) ** 2,
                    residual=res,
                    index=len(accepted),
                )
            )

    _probe_tangencies(det_scalar, grid, vals, diag)
    return accepted, diag


def _probe_tangencies(
    det_scalar: Callable[[float], float], grid: np.ndarray, vals: np.ndarray, diag: ScanDiagnostics
) -> None:
    """Flag interior local minima of |det| that dip far below the local scale."""
    a = np.abs(vals)
    for i in range(1, len(grid) - 1):
        if not (a[i] < a[i - 1] and a[i] <= a[i + 1]):
            continue
        if vals[i - 1] * vals[i] < 0.0 or vals[i] * vals[i + 1] < 0.0 or vals[i] == 0.0:
            continue  # a sign change handles this cell
        lo = max(0, i - 8)
        hi = min(len(grid), i + 9)
        local_scale = float(np.max(a[lo:hi]))
        r_min, f_min = _golden_min_abs(det_scalar, float(grid[i - 1]), float(grid[i + 1]))
        if f_min < TANGENCY_THRESHOLD * local_scale:
            diag.near_tangencies.append(TangencyHint(R=r_min, min_abs_det=f_min, local_scale=local_scale))


def _golden_min_abs(f: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    phi = 0.5 * (3.0 - math.sqrt(5.0))
    x1 = a + phi * (b - a)
    x2 = b - phi * (b - a)
    f1, f2 = abs(f(x1)), abs(f(x2))
    for _ in range(60):
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = a + phi * (b - a)
            f1 = abs(f(x1))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = b - phi * (b - a)
            f2 = abs(f(x2))
        if (b - a) < 1e-13 * max(1.0, abs(a)):
            break
    return (x1, f1) if f1 < f2 else (x2, f2)


def scan_roots(params: ScaledParams, R_max: float | None = None, refine_factor: int = 1) -> Spectrum:
    """All real bound-state roots on (0, R_max], in increasing order.

    An ell = 0 parameter point (lam == 0) dispatches to the dedicated
    limiting solver, whose secular function is a different analytic branch.
    """
    if R_max is None:
        R_max = default_R_max(params)
    if R_max <= 0.0:
        raise ValueError(f"R_max must be positive, got {R_max}")
    if params.lam == 0.0:
        roots, diag = _scan(
            lambda r: nsw_det_R(r, params.Z),
            lambda rs: nsw_det_R_many(rs, params.Z),
            params,
            R_max,
            refine_factor,
        )
    else:
        roots, diag = _scan(
            lambda r: secular_det_R(r, params),
            lambda rs: secular_det_R_many(rs, params),
            params,
            R_max,
            refine_factor,
        )
    for root in roots:
        root.energy = (root.R / params.scale) ** 2
    return Spectrum(params=params, roots=roots, R_max=R_max, diagnostics=diag)


def solve_nsw(Z: float, R_max: float, scale: float = 1.0, refine_factor: int = 1) -> list[Root]:
    """Roots of the ell = 0 limiting problem: M = 0 under the two constraints."""
    if Z < 0.0:
        raise ValueError(f"Z must be non-negative, got {Z}")
    params = ScaledParams(lam=0.0, Z=Z, scale=scale)
    return scan_roots(params, R_max=R_max, refine_factor=refine_factor).roots


def count_real_roots(params: ScaledParams, R_max: float, refine_factor: int = 1) -> int:
    """Number of accepted real roots in (0, R_max]; deterministic."""
    return len(scan_roots(params, R_max=R_max, refine_factor=refine_factor).roots)
