"""Level tracking, exceptional points and robust/fragile classification.

A sweep runs the root scan over a parameter grid and associates roots across
neighboring points by nearest-R matching with a slope-scaled gate.  When the
association is not clean (a root appears, disappears, or two tracks compete)
the parameter interval is bisected locally up to a depth limit; a pair of
adjacent tracks that approach each other and vanish together is recorded as
a merger, anything still unresolved becomes a gap.

An exceptional point is a double root of the determinant: the two-variable
system Dhat(R; p) = 0, dDhat/dR(R; p) = 0 is solved by damped Newton with
central-difference derivatives for (R, p), p being the free parameter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import ScaledParams
from .secular import eval_N_scaled, secular_det_R, SigmaTau
from .spectrum import Spectrum, Stability, default_R_max, scan_roots

MAX_REFINE_DEPTH = 6
NEWTON_STEP_SCALE = 1e-6


class ContinuationError(RuntimeError):
    """Non-convergence or missing double-root structure in a continuation solve."""


@dataclass
class Track:
    """One level followed along the sweep grid."""

    id: int
    param_values: list[float] = field(default_factory=list)
    R_values: list[float] = field(default_factory=list)
    status: str = "real"  # "real" | "merged" | "gap"
    merged_at: float | None = None
    merged_with: int | None = None
    born_at: float | None = None

    def last_R(self) -> float:
        return self.R_values[-1]

    def slope(self) -> float:
        if len(self.R_values) < 2:
            return 0.0
        dp = self.param_values[-1] - self.param_values[-2]
        if dp == 0.0:
            return 0.0
        return (self.R_values[-1] - self.R_values[-2]) / dp


@dataclass
class Branch:
    """Result of a parameter sweep: the grid and all tracks with statuses."""

    swept_parameter: str
    grid: list[float]
    tracks: list[Track]
    base: ScaledParams


def _params_at(base: ScaledParams, which: str, value: float) -> ScaledParams:
    if which == "Z":
        return ScaledParams(lam=base.lam, Z=value, scale=base.scale)
    return ScaledParams(lam=value, Z=base.Z, scale=base.scale)


def sweep(
    params0: ScaledParams,
    which: str,
    prange: tuple[float, float],
    steps: int,
    R_max: float | None = None,
) -> Branch:
    """Track all levels while `which` ("Z" or "lambda") runs over prange."""
    if which not in ("Z", "lambda"):
        raise ValueError(f"which must be 'Z' or 'lambda', got {which!r}")
    lo, hi = prange
    if not (lo < hi and lo >= 0.0):
        raise ValueError(f"invalid sweep range {prange}")
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    if R_max is None:
        R_max = default_R_max(_params_at(params0, which, hi if which == "Z" else lo))

    def roots_at(p: float) -> list[float]:
        return [r.R for r in scan_roots(_params_at(params0, which, p), R_max=R_max).roots]

    def pair_count(p: float, r_lo: float, r_hi: float) -> int:
        spec = scan_roots(_params_at(params0, which, p), R_max=min(r_hi + 0.3, R_max), refine_factor=8)
        return sum(1 for r in spec.roots if r_lo <= r.R <= r_hi)

    grid = list(np.linspace(lo, hi, steps))
    tracks: list[Track] = []
    active: list[Track] = []

    first = roots_at(grid[0])
    for r in first:
        tr = Track(id=len(tracks), param_values=[grid[0]], R_values=[r], born_at=grid[0])
        tracks.append(tr)
        active.append(tr)

    prev_p, prev_roots = grid[0], first
    for p in grid[1:]:
        roots = roots_at(p)
        active = _advance(tracks, active, prev_p, prev_roots, p, roots, roots_at, pair_count, R_max, 0)
        prev_p, prev_roots = p, roots
    return Branch(swept_parameter=which, grid=grid, tracks=tracks, base=params0)


def _bisect_merger(pair_count, p0: float, p1: float, r_lo: float, r_hi: float) -> float:
    """Sharpen the merger parameter: the pair is present at p0, gone past it.

    The coarse scan may lose the pair a little early (once its separation
    falls below the bracket width), so the locally refined counter is also
    allowed to push the right edge forward before bisecting.
    """
    n_ref = pair_count(p0, r_lo, r_hi)
    if n_ref < 2:
        return p1  # window polluted by a neighbor; keep the coarse estimate
    lo, hi = p0, p1
    step = max(p1 - p0, 1e-9 * max(1.0, abs(p1)))
    for _ in range(40):
        c = pair_count(hi, r_lo, r_hi)
        if c <= n_ref - 2:
            break
        lo, hi = hi, hi + step
        step *= 1.6
    else:
        return p1
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        c = pair_count(mid, r_lo, r_hi)
        if c >= n_ref:
            lo = mid
        elif c <= n_ref - 2:
            hi = mid
        else:
            return mid  # structure changed underfoot; stop here
        if (hi - lo) < 1e-10 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def _associate(active: list[Track], p1: float, roots1: list[float], dp: float):
    """Greedy nearest-prediction matching inside slope-scaled gates.

    Returns (pairs, unmatched_tracks, unmatched_roots, ambiguous) where pairs
    maps track -> root index.
    """
    spacing = math.inf
    if len(roots1) > 1:
        spacing = min(b - a for a, b in zip(roots1, roots1[1:]))
    candidates = []
    for tr in active:
        pred = tr.last_R() + tr.slope() * dp
        gate = max(3.0 * abs(tr.slope()) * abs(dp), 0.25 * spacing if math.isfinite(spacing) else 0.3, 1e-6)
        for j, r in enumerate(roots1):
            d = abs(r - pred)
            if d <= gate:
                candidates.append((d, tr.id, j))
    candidates.sort()
    by_id = {tr.id: tr for tr in active}
    taken_tracks: set[int] = set()
    taken_roots: set[int] = set()
    pairs: dict[int, int] = {}
    ambiguous = False
    for d, tid, j in candidates:
        if tid in taken_tracks:
            continue
        if j in taken_roots:
            ambiguous = True  # second-best claim on an assigned root
            continue
        pairs[tid] = j
        taken_tracks.add(tid)
        taken_roots.add(j)
    unmatched_tracks = [by_id[tid] for tid in by_id if tid not in taken_tracks]
    unmatched_roots = [j for j in range(len(roots1)) if j not in taken_roots]
    return pairs, unmatched_tracks, unmatched_roots, ambiguous


def _advance(
    tracks: list[Track],
    active: list[Track],
    p0: float,
    roots0: list[float],
    p1: float,
    roots1: list[float],
    roots_at,
    pair_count,
    R_max: float,
    depth: int,
) -> list[Track]:
    """Associate one grid interval, recursing on a midpoint when unclean."""
    dp = p1 - p0
    pairs, lost, born, ambiguous = _associate(active, p1, roots1, dp)
    clean = not lost and not born and not ambiguous
    if not clean and depth < MAX_REFINE_DEPTH:
        pm = 0.5 * (p0 + p1)
        rootsm = roots_at(pm)
        active = _advance(tracks, active, p0, roots0, pm, rootsm, roots_at, pair_count, R_max, depth + 1)
        return _advance(tracks, active, pm, rootsm, p1, roots1, roots_at, pair_count, R_max, depth + 1)

    by_id = {tr.id: tr for tr in active}
    next_active: list[Track] = []
    for tid, j in pairs.items():
        tr = by_id[tid]
        tr.param_values.append(p1)
        tr.R_values.append(roots1[j])
        next_active.append(tr)

    # pair up lost tracks that were R-adjacent and closing in on each other
    lost_sorted = sorted(lost, key=lambda tr: tr.last_R())
    used: set[int] = set()
    for a, b in zip(lost_sorted, lost_sorted[1:]):
        if a.id in used or b.id in used:
            continue
        gap_now = abs(b.last_R() - a.last_R())
        closing = True
        if len(a.R_values) >= 2 and len(b.R_values) >= 2:
            closing = gap_now <= abs(b.R_values[-2] - a.R_values[-2]) + 1e-12
        if closing and gap_now < 1.0:
            r_lo = a.last_R() - 0.35 * (gap_now + 0.2)
            r_hi = b.last_R() + 0.35 * (gap_now + 0.2)
            a.status = b.status = "merged"
            a.merged_at = b.merged_at = _bisect_merger(pair_count, p0, p1, r_lo, r_hi)
            a.merged_with, b.merged_with = b.id, a.id
            used.update((a.id, b.id))
    for tr in lost_sorted:
        if tr.id in used:
            continue
        if tr.last_R() > R_max - max(0.15 * R_max, 3.0 * abs(tr.slope()) * abs(dp)):
            tr.status = "real"  # drifted out of the scan window, still real
        else:
            tr.status = "gap"

    for j in born:
        tr = Track(id=len(tracks), param_values=[p1], R_values=[roots1[j]], born_at=p1)
        tracks.append(tr)
        next_active.append(tr)
    next_active.sort(key=lambda tr: tr.last_R())
    return next_active


# ---------------------------------------------------------------------------
# exceptional points


@dataclass
class ExceptionalPoint:
    """A coalescence of two real roots: Dhat = 0 and dDhat/dR = 0."""

    lam: float
    Z: float
    R_double: float
    pair_indices: tuple[int, int]
    residual_det: float
    residual_slope: float
    second_derivative: float


def _det_and_slope(R: float, params: ScaledParams) -> tuple[float, float]:
    h = NEWTON_STEP_SCALE * max(1.0, abs(R))
    f = secular_det_R(R, params)
    if R - h > 0.0:
        d = (secular_det_R(R + h, params) - secular_det_R(R - h, params)) / (2.0 * h)
    else:
        d = (secular_det_R(R + h, params) - f) / h
    return f, d


def find_exceptional(
    params_hint: ScaledParams,
    R_hint: float,
    free: str,
    max_iter: int = 100,
    tol: float = 1e-9,
) -> ExceptionalPoint:
    """Solve Dhat = 0, dDhat/dR = 0 for (R, p) near the hint.

    p is either "Z" or "lambda".  Derivatives are central differences with
    step 1e-6*max(1, |.|); the Newton iteration is damped by backtracking.
    Raises ContinuationError on non-convergence (with the last iterate in
    the message) and, distinctly, when the converged point shows no local
    double-root structure.
    """
    if free not in ("Z", "lambda"):
        raise ValueError(f"free must be 'Z' or 'lambda', got {free!r}")
    p0 = params_hint.Z if free == "Z" else params_hint.lam

    def F(R: float, p: float) -> np.ndarray:
        f, d = _det_and_slope(max(R, 1e-9), _params_at(params_hint, free, max(p, 0.0)))
        return np.array([f, d])

    # local scales for the convergence test
    probes = [abs(secular_det_R(max(R_hint + o, 1e-6), _params_at(params_hint, free, p0)))
              for o in (-0.45, -0.3, -0.15, 0.15, 0.3, 0.45)]
    s_det = max(max(probes), 1e-12)
    s_slope = s_det / 0.15

    R, p = float(R_hint), float(p0)
    converged = False
    for _ in range(max_iter):
        v = F(R, p)
        if abs(v[0]) <= tol * s_det and abs(v[1]) <= tol * s_slope:
            converged = True
            break
        hR = NEWTON_STEP_SCALE * max(1.0, abs(R))
        hp = NEWTON_STEP_SCALE * max(1.0, abs(p))
        J = np.empty((2, 2))
        J[:, 0] = (F(R + hR, p) - F(R - hR, p)) / (2.0 * hR)
        J[:, 1] = (F(R, p + hp) - F(R, p - hp)) / (2.0 * hp)
        try:
            step = np.linalg.solve(J, -v)
        except np.linalg.LinAlgError as exc:
            raise ContinuationError(f"singular Jacobian at R={R}, {free}={p}") from exc
        limit = max(abs(step[0]) / 0.35, abs(step[1]) / (0.2 * max(1.0, abs(p))))
        if limit > 1.0:
            step /= limit
        norm0 = np.linalg.norm([v[0] / s_det, v[1] / s_slope])
        alpha = 1.0
        moved = False
        for _ in range(40):
            Rn, pn = R + alpha * step[0], p + alpha * step[1]
            if Rn > 0.0 and pn >= 0.0:
                vn = F(Rn, pn)
                if np.linalg.norm([vn[0] / s_det, vn[1] / s_slope]) < norm0:
                    R, p = Rn, pn
                    moved = True
                    break
            alpha *= 0.5
        if not moved:
            break
    v = F(R, p)
    if not converged and not (abs(v[0]) <= tol * s_det and abs(v[1]) <= tol * s_slope):
        raise ContinuationError(
            f"no convergence after {max_iter} iterations; last iterate R={R!r}, {free}={p!r}, "
            f"residuals=({v[0]:.3e}, {v[1]:.3e})"
        )

    params_star = _params_at(params_hint, free, p)
    h2 = 1e-4 * max(1.0, abs(R))
    dd = (secular_det_R(R + h2, params_star) - 2.0 * secular_det_R(R, params_star)
          + secular_det_R(R - h2, params_star)) / (h2 * h2)
    if R < 1e-3 or abs(dd) * h2 * h2 < 1e-12 * s_det:
        raise ContinuationError(
            f"no local double-root structure near hint (R={R!r}, {free}={p!r}, d2={dd!r})"
        )

    pair = _pair_ordinals(params_star, free, p, R)
    lam = params_star.lam
    Z = params_star.Z
    return ExceptionalPoint(
        lam=lam,
        Z=Z,
        R_double=R,
        pair_indices=pair,
        residual_det=abs(v[0]),
        residual_slope=abs(v[1]),
        second_derivative=dd,
    )


def _pair_ordinals(params_star: ScaledParams, free: str, p_star: float, R_star: float) -> tuple[int, int]:
    """Ordinals of the two levels that coalesce, read off just before the merger."""
    for delta in (1e-4, 1e-3, 1e-2):
        d = delta * max(1.0, abs(p_star))
        for side in (-1.0, 1.0):
            p_try = p_star + side * d
            if p_try < 0.0:
                continue
            spec = scan_roots(_params_at(params_star, free, p_try), R_max=R_star + 2.0, refine_factor=16)
            near = [r for r in spec.roots if abs(r.R - R_star) < 0.5]
            if len(near) >= 2:
                near.sort(key=lambda r: abs(r.R - R_star))
                i, j = sorted((near[0].index, near[1].index))
                return (i, j)
    return (-1, -1)


# ---------------------------------------------------------------------------
# robust/fragile classification


def classify_levels(
    params: ScaledParams,
    Z_cap: float = 50.0,
    R_max: float | None = None,
    steps: int = 64,
) -> Spectrum:
    """Continue each level of the spectrum at `params` in Z up to Z_cap.

    Levels that survive to Z_cap are flagged robust, levels whose track
    merges are flagged fragile with the merger coupling recorded, and levels
    whose track ends in a gap stay unknown.
    """
    if Z_cap <= params.Z:
        raise ValueError(f"Z_cap={Z_cap} must exceed params.Z={params.Z}")
    if R_max is None:
        R_max = default_R_max(params)
    base = scan_roots(params, R_max=R_max)
    if not base.roots:
        return base
    br = sweep(params, "Z", (params.Z, Z_cap), steps, R_max=R_max)
    # tracks born at the base grid point, in R order, are the base levels
    base_tracks = sorted(
        (tr for tr in br.tracks if tr.born_at == br.grid[0]), key=lambda tr: tr.R_values[0]
    )
    for root, tr in zip(base.roots, base_tracks):
        if tr.status == "merged":
            root.stability = Stability.FRAGILE
            root.critical_Z = tr.merged_at
        elif tr.status == "real" and math.isclose(tr.param_values[-1], br.grid[-1]):
            root.stability = Stability.ROBUST
        else:
            root.stability = Stability.UNKNOWN
    return base


# ---------------------------------------------------------------------------
# touching parameters of the singularity curves

# The moving singularity curves of the ratio form are hyperbolas of constant
# R; the standing singularity ovals are the zero curves of N(sigma, tau) in
# the stripes tau in [(n+1/4)pi, (n+3/4)pi].  The two crossings of a moving
# curve with an oval coalesce (a double root of the R-profile along the oval)
# exactly when the curve radius reaches an extremum of R over the oval:
# the maximum (attained at the oval's top end, sigma = 0) on the way in, the
# minimum (attained at sigma > 0 on the lower arc) on the way out.  Reported
# values use the doubled shift-ratio normalization 2*ell/(L-ell); the
# geometric events occur at half these values of ell/(L-ell).


def touching_lambda_in(N: int, k: int) -> float:
    """Closed form (4k+2)/(4N-1) for the first-contact shift of curve k with oval N-1."""
    if N < 1 or k < 0:
        raise ValueError(f"need N >= 1 and k >= 0, got N={N}, k={k}")
    return (4.0 * k + 2.0) / (4.0 * N - 1.0)


def _oval_tau(n: int, sigma: float, upper: bool) -> float | None:
    """tau on the zero curve of N(sigma, .) in stripe n, upper or lower arc."""
    t_lo = (n + 0.25) * math.pi
    t_hi = (n + 0.75) * math.pi
    t_mid = (n + 0.5) * math.pi
    a, b = (t_mid, t_hi) if upper else (t_lo, t_mid)
    st_a = SigmaTau(sigma, a)
    st_b = SigmaTau(sigma, b)
    fa, fb = eval_N_scaled(st_a), eval_N_scaled(st_b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        return None  # sigma beyond the oval's width
    for _ in range(80):
        m = 0.5 * (a + b)
        fm = eval_N_scaled(SigmaTau(sigma, m))
        if fm == 0.0:
            return m
        if (fm > 0.0) == (fa > 0.0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return 0.5 * (a + b)


def _oval_R_range(n: int, n_sigma: int = 1200) -> tuple[float, float]:
    """(min, max) of R = sqrt(tau^2 - sigma^2) over the traced oval boundary."""
    r_min, r_max = math.inf, -math.inf
    sig_hi = 0.5 * math.acosh(((n + 0.75) * math.pi) ** 2) + 1.0  # beyond any oval width
    sigmas = np.linspace(0.0, sig_hi, n_sigma)
    for upper in (True, False):
        for s in sigmas:
            t = _oval_tau(n, float(s), upper)
            if t is None:
                continue
            r2 = t * t - s * s
            if r2 < 0.0:
                continue
            r = math.sqrt(r2)
            r_min = min(r_min, r)
            r_max = max(r_max, r)
    if not math.isfinite(r_min):
        raise ContinuationError(f"failed to trace the stripe-{n} singularity oval")
    # parabolic sharpening of the minimum along the lower arc
    r_min = _refine_R_extremum(n, r_min, minimum=True)
    return r_min, r_max


def _refine_R_extremum(n: int, r_coarse: float, minimum: bool) -> float:
    def r_of_sigma(s: float) -> float:
        t = _oval_tau(n, s, upper=False)
        if t is None:
            return math.inf
        return math.sqrt(max(t * t - s * s, 0.0))

    # golden-section around the coarse minimum on the lower arc
    a, b = 0.0, 0.5 * math.acosh(((n + 0.75) * math.pi) ** 2) + 1.0
    phi = 0.5 * (3.0 - math.sqrt(5.0))
    x1 = a + phi * (b - a)
    x2 = b - phi * (b - a)
    f1, f2 = r_of_sigma(x1), r_of_sigma(x2)
    for _ in range(80):
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = a + phi * (b - a)
            f1 = r_of_sigma(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = b - phi * (b - a)
            f2 = r_of_sigma(x2)
        if (b - a) < 1e-12:
            break
    return min(f1, f2, r_coarse)


def _curve_radius(printed_lam: float, j: int) -> float:
    """R of the j-th moving singularity curve at a printed (doubled) shift value."""
    return (2.0 * j + 1.0) * math.pi / (2.0 * printed_lam)


def verify_touching_lambda_in(N: int, k: int) -> float:
    """Numeric first-contact shift: bisection on curve-oval intersection.

    The moving curve intersects the oval exactly while its radius lies in
    the oval's R range; first contact is the crossing of the upper edge.
    Agrees with touching_lambda_in to the tracing accuracy.
    """
    closed = touching_lambda_in(N, k)
    r_min, r_max = _oval_R_range(N - 1)
    lo, hi = 0.5 * closed, 1.5 * closed
    if _curve_radius(lo, k) <= r_max or _curve_radius(hi, k) > r_max:
        raise ContinuationError("bracket does not straddle the first contact")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _curve_radius(mid, k) > r_max:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def touching_lambda_out(N: int, k: int, bracket: tuple[float, float]) -> float:
    """Shift at which the last pair of curve-oval crossings disappears.

    The two crossings of the moving curve with the standing oval form a
    double root of the R-profile along the oval at the detachment; past it
    the curve has left the oval entirely.  The detached side has the curve
    radius below the oval minimum, reached at sigma > 0 on the lower arc.
    """
    if N < 1 or k < 1:
        raise ValueError(f"need N >= 1 and k >= 1, got N={N}, k={k}")
    lo, hi = bracket
    if not (0.0 < lo < hi):
        raise ValueError(f"invalid bracket {bracket}")
    j = k - 1
    r_min, _ = _oval_R_range(N - 1)

    def attached(printed_lam: float) -> bool:
        return _curve_radius(printed_lam, j) >= r_min

    if not attached(lo) or attached(hi):
        raise ContinuationError(f"no detachment of curve {k} from oval {N - 1} inside {bracket}")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if attached(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
