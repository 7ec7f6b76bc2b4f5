"""Band/phase reparametrization of the oscillating angles and root brackets.

The secular function oscillates through tau and through rho = lam*R.  Writing
tau = pi(N + t) and rho = pi(K + r) separates integer band indices, which
leave every trigonometric factor invariant, from the periodic phases t, r in
(0, 1).  The fixed-phase trigonometric constants turn the secular equation
into an explicit map sigma -> R on the moving lattice; here the machinery
serves to generate guaranteed root brackets for the R scan.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .model import ScaledParams


class LatticeCoords(NamedTuple):
    """Band indices and phases: tau = pi(N + t), rho = pi(K + r)."""

    N: int
    t: float
    K: int
    r: float

    def tau(self) -> float:
        return math.pi * (self.N + self.t)

    def rho(self) -> float:
        return math.pi * (self.K + self.r)


@dataclass(frozen=True)
class TrigConstants:
    """Psi = sin(2*pi*t), Phi = cos(2*pi*t), Xi = -tan(2*pi*r)."""

    Psi: float
    Phi: float
    Xi: float


def trig_constants(t: float, r: float) -> TrigConstants:
    """Phase constants for fixed (t, r); independent of the band indices.

    The doubled angle of rho = pi(K + r) is 2*pi*r, so the tangent constant
    is -tan(2*pi*r) and its poles sit at r = 1/4 and r = 3/4.
    """
    if not (0.0 < t < 1.0 and 0.0 < r < 1.0):
        raise ValueError(f"phases must lie strictly inside (0, 1), got t={t}, r={r}")
    if min(abs(r - 0.25), abs(r - 0.75)) < 1e-12:
        raise ValueError(f"r={r} sits on a pole of tan(2*pi*r)")
    two_pi = 2.0 * math.pi
    return TrigConstants(Psi=math.sin(two_pi * t), Phi=math.cos(two_pi * t), Xi=-math.tan(two_pi * r))


def lattice_map_R(sigma: float, consts: TrigConstants, Z: float) -> float:
    """The fixed-phase map sigma -> R,

        R = Xi * (sigma^4 cosh 2s + Z^2 Phi) / (sigma^3 sinh 2s + sigma Z Psi),

    evaluated in the exp(-2*sigma)-scaled form.  Behaves like Xi*|sigma| for
    large |sigma| and like (Z/sigma)*Phi*Xi/Psi for small |sigma|.
    """
    s = abs(sigma)
    e2 = math.exp(-2.0 * s)
    e4 = e2 * e2
    ch = 0.5 * (1.0 + e4)
    sh = 0.5 * (1.0 - e4)
    num = sigma**4 * ch + Z * Z * consts.Phi * e2
    den = sigma**3 * sh * math.copysign(1.0, sigma) + sigma * Z * consts.Psi * e2
    # sinh(2*sigma) is odd: the scaled sh above was built from |sigma|
    if den == 0.0:
        raise ValueError(f"zero denominator in lattice map at sigma={sigma}, Z={Z}")
    return consts.Xi * num / den


def bracket_hints(params: ScaledParams, R_max: float) -> list[tuple[float, float]]:
    """Ordered intervals covering (0, R_max] for the determinant sign scan.

    Width is at most min(pi, pi/lam)/16: tau(R) advances no faster than R
    itself (d tau/dR = R*tau/(tau^2+sigma^2) <= 1), so both sin(2*tau(R))
    and sin(2*lam*R) complete at least 16 samples per half-period and no
    oscillation can be skipped.
    """
    if R_max <= 0.0:
        raise ValueError(f"R_max must be positive, got {R_max}")
    lam = params.lam
    width_bound = min(math.pi, math.pi / lam) / 16.0 if lam > 0.0 else math.pi / 16.0
    n = max(8, int(math.ceil(R_max / width_bound)))
    w = R_max / n
    left = min(1e-6 * w, 0.5 * w)
    edges = [left] + [w * (i + 1) for i in range(n)]
    edges[-1] = R_max
    return [(edges[i], edges[i + 1]) for i in range(n)]
