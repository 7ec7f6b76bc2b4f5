"""Potential definition and parameter conversions.

Physical parameters are the half-width L, the step onset ell and the step
height g.  All internal computation happens in the dimensionless variables
lam = ell/(L-ell), Z = g(L-ell)^2/2, with the length scale L-ell; energies
are converted back only at output boundaries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalParams:
    """Hard-wall well on (-L, L) with imaginary steps +-ig outside (-ell, ell)."""

    L: float
    ell: float
    g: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.L) and self.L > 0.0):
            raise ValueError(f"L must be finite and positive, got L={self.L}")
        if not (math.isfinite(self.ell) and 0.0 <= self.ell < self.L):
            raise ValueError(f"ell must satisfy 0 <= ell < L, got ell={self.ell}, L={self.L}")
        if not (math.isfinite(self.g) and self.g >= 0.0):
            raise ValueError(f"g must be finite and non-negative, got g={self.g}")


@dataclass(frozen=True)
class ScaledParams:
    """Dimensionless parameter pair (lam, Z) plus the length scale L - ell."""

    lam: float
    Z: float
    scale: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lam) and self.lam >= 0.0):
            raise ValueError(f"lam must be finite and non-negative, got {self.lam}")
        if not (math.isfinite(self.Z) and self.Z >= 0.0):
            raise ValueError(f"Z must be finite and non-negative, got {self.Z}")
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise ValueError(f"scale must be finite and positive, got {self.scale}")


def scale_params(p: PhysicalParams) -> ScaledParams:
    """Convert physical (L, ell, g) to scaled (lam, Z, scale)."""
    scale = p.L - p.ell
    return ScaledParams(lam=p.ell / scale, Z=0.5 * p.g * scale * scale, scale=scale)


def physical_params(s: ScaledParams) -> PhysicalParams:
    """Invert scale_params.  Round-trips to machine precision."""
    ell = s.lam * s.scale
    return PhysicalParams(L=s.scale + ell, ell=ell, g=2.0 * s.Z / (s.scale * s.scale))


def potential_at(p: PhysicalParams, x: float) -> complex:
    """The complex potential at a point strictly inside the box.

    Zero on (-ell, ell), +ig right of the step, -ig left of it; the real part
    vanishes everywhere inside.  Points on the steps themselves belong to the
    outer branches.
    """
    if abs(x) >= p.L:
        raise ValueError(f"|x| must be < L = {p.L}, got x={x} (infinite wall)")
    if x > p.ell:
        return complex(0.0, p.g)
    if x < -p.ell:
        return complex(0.0, -p.g)
    return complex(0.0, 0.0)


def energy_from_R(R: float, scale: float) -> float:
    """E = R^2 / scale^2 for a dimensionless root R."""
    if R < 0.0:
        raise ValueError(f"R must be non-negative, got {R}")
    if scale <= 0.0:
        raise ValueError(f"scale must be positive, got {scale}")
    return (R / scale) ** 2
