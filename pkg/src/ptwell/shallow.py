"""Shallow-well limit: purely imaginary steps on the whole line.

When the hard walls recede to infinity the model keeps only the inner
half-width ell and the step height g = T^2.  The bound-state condition for
the level angle omega_N in (0, 1) reads

    cos(ell*omega/2) = 1 / (r + sqrt(r^2 + 1)),
    sqrt(r) = (2N + 2 - omega) / (4T),

one equation per level index N >= 0.  The wavenumber k_N = (2N+2-omega_N)/4
pins every energy into [(N+1/2)^2/4, (N+1)^2/4] regardless of the coupling.
This system is a closed calibration of its own: its wave-function matching
is exact at ell = pi (see shallow_wavefunction).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ShallowParams:
    """Inner half-width ell >= 0 and coupling square root T = sqrt(g) >= 0."""

    ell: float
    T: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.ell) and self.ell >= 0.0):
            raise ValueError(f"ell must be finite and non-negative, got {self.ell}")
        if not (math.isfinite(self.T) and self.T >= 0.0):
            raise ValueError(f"T must be finite and non-negative, got {self.T}")


@dataclass(frozen=True)
class ShallowLevel:
    """One solved level with all derived matching parameters."""

    N: int
    omega: float
    k: float
    energy: float
    p: float
    q: float
    alpha: float
    G_plus: float
    G_minus: float

    @property
    def r_level(self) -> float:
        """Coupling ratio r of the level: sqrt(r) = (2N+2-omega)/(4T) = k/T."""
        return (self.k / _t_of(self)) ** 2


def _t_of(level: ShallowLevel) -> float:
    # recover T from q = T/sqrt(2 cos alpha)
    return level.q * math.sqrt(2.0 * math.cos(level.alpha))


def _rhs(r: float) -> float:
    """1/(r + sqrt(r^2+1)): smooth, monotonically decreasing, never above one."""
    return 1.0 / (r + math.hypot(r, 1.0))


def level_equation(params: ShallowParams, N: int, omega: float) -> float:
    """cos(ell*omega/2) - rhs(r(omega)); its unique zero in (0,1) is the level."""
    sqrt_r = (2.0 * N + 2.0 - omega) / (4.0 * params.T)
    return math.cos(0.5 * params.ell * omega) - _rhs(sqrt_r * sqrt_r)


def solve_level(params: ShallowParams, N: int) -> ShallowLevel | None:
    """Bisect the level equation for omega_N in (0, 1) and fill derived fields.

    Returns None when no root exists (always the case at ell = 0, where the
    left side is identically 1 and the right side stays below it).  T = 0 is
    rejected: the equation degenerates.
    """
    if params.T == 0.0:
        raise ValueError("T must be positive to solve for levels")
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")

    def f(w: float) -> float:
        return level_equation(params, N, w)

    # verify single-signed-change monotone layout on a sample grid
    ws = np.linspace(1e-12, 1.0 - 1e-12, 64)
    vals = [f(float(w)) for w in ws]
    changes = sum(1 for a, b in zip(vals, vals[1:]) if a * b < 0.0)
    if changes == 0:
        return None
    if changes > 1 or any(b > a + 1e-12 for a, b in zip(vals, vals[1:])):
        raise RuntimeError(
            f"level equation is not monotone on (0,1) for ell={params.ell}, T={params.T}, N={N}"
        )

    a, b = 1e-12, 1.0 - 1e-12
    fa = f(a)
    while (b - a) > 1e-13:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            a = b = m
            break
        if (fm > 0.0) == (fa > 0.0):
            a, fa = m, fm
        else:
            b = m
    omega = 0.5 * (a + b)

    k = 0.25 * (2.0 * N + 2.0 - omega)
    alpha = 0.5 * params.ell * omega
    q = params.T / math.sqrt(2.0 * math.cos(alpha))
    p = q * math.cos(alpha)
    return ShallowLevel(
        N=N,
        omega=omega,
        k=k,
        energy=k * k,
        p=p,
        q=q,
        alpha=alpha,
        G_plus=-k * k / (q + p),
        G_minus=-k * k / (q - p),
    )


def solve_levels(params: ShallowParams, N_max: int) -> list[ShallowLevel]:
    """Levels N = 0 .. N_max; empty at ell = 0 for any positive coupling."""
    out = []
    for N in range(N_max + 1):
        lv = solve_level(params, N)
        if lv is not None:
            out.append(lv)
    return out


def weak_coupling_eta(r: float) -> float:
    """Two-term large-r estimate 1/(2r) - 5/(48 r^3) of arcsin(1/(r+sqrt(r^2+1)))."""
    if r <= 1.0:
        raise ValueError(f"the weak-coupling series needs r > 1, got {r}")
    return 0.5 / r - 5.0 / (48.0 * r**3)


def weak_coupling_eta_exact(r: float) -> float:
    """arcsin(1/(r+sqrt(r^2+1))): the angle complement pi/2 - ell*omega/2 at the root."""
    return math.asin(_rhs(r))


def strong_coupling_omega(r: float) -> float:
    """Two-term small-r estimate r/2 - r^2/4 of the squared matching half-sine.

    Estimates sin^2(ell*omega/4) = [r - (sqrt(1+r^2) - 1)]/2, the argument of
    the arcsin-square-root form of the level equation at small r.
    """
    if not (0.0 < r < 1.0):
        raise ValueError(f"the strong-coupling series needs 0 < r < 1, got {r}")
    return 0.5 * r - 0.25 * r * r


def strong_coupling_omega_exact(r: float) -> float:
    """sin^2(ell*omega/4) = [r - (sqrt(1+r^2) - 1)]/2, exact in r."""
    return 0.5 * (r - (math.hypot(1.0, r) - 1.0))


def slope_parameters(level: ShallowLevel) -> tuple[float, float]:
    """(G_plus, G_minus) = (-k^2/(q+p), -k^2/(q-p)) for the level."""
    if level.q <= level.p:
        raise ValueError(f"degenerate level with q <= p (q={level.q}, p={level.p})")
    return (-level.k**2 / (level.q + level.p), -level.k**2 / (level.q - level.p))


def shallow_wavefunction(level: ShallowLevel, params: ShallowParams, x: float) -> complex:
    """The normalized wave function: psi(0) = 1 and psi'(0) = iG exactly.

    Inner piece cos(kx) + (iG/k) sin(kx) on (0, ell), matched decaying
    exponential with exponent sigma = p + iq outside; negative x by the
    antilinear reflection psi(-x) = conj(psi(x)).  The derivative is
    continuous across ell when ell = pi, the calibration at which the level
    equation and the matching system coincide.
    """
    if x < 0.0:
        return shallow_wavefunction(level, params, -x).conjugate()
    G = level.G_plus if level.N % 2 == 0 else level.G_minus
    k = level.k
    B = complex(0.0, G / k)
    if x <= params.ell:
        return math.cos(k * x) + B * math.sin(k * x)
    psi_ell = math.cos(k * params.ell) + B * math.sin(k * params.ell)
    sigma = complex(level.p, level.q)
    return psi_ell * cmath.exp(-sigma * (x - params.ell))


def solution_curve(params: ShallowParams, n_points: int = 400) -> tuple[np.ndarray, np.ndarray]:
    """Graphical-solution data: y(omega) = sin(ell*omega/2)/sqrt(2 cos(ell*omega/2)).

    Level N solves y(omega) = (2N+2-omega)/(4T), a family of parallel lines.
    """
    omega = np.linspace(1e-9, 1.0 - 1e-9, n_points)
    half = 0.5 * params.ell * omega
    y = np.sin(half) / np.sqrt(2.0 * np.cos(half))
    return omega, y


def solution_line(params: ShallowParams, N: int, omega: np.ndarray) -> np.ndarray:
    """The straight line (2N+2-omega)/(4T) intersected by the solution curve."""
    return (2.0 * N + 2.0 - omega) / (4.0 * params.T)
