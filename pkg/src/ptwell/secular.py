"""Analytic functions of the matching problem.

The matching of the piecewise wave function reduces to the vanishing of a
secular function.  Two equivalent forms are evaluated here:

* the ratio form  D = M/N + tan(2*lam*R)/R,  with
  M(sigma, tau) = sigma*sinh(2*sigma) + tau*sin(2*tau) and
  N(sigma, tau) = sigma^2*cosh(2*sigma) + tau^2*cos(2*tau),
  which has poles on N = 0 and on cos(2*lam*R) = 0 and is used for grids
  and diagnostics only;

* the pole-free single-variable form
  Dhat(R) = N*sin(2*lam*R) + R*M*cos(2*lam*R)
  evaluated on the constraint manifold sigma*tau = Z, tau^2 - sigma^2 = R^2,
  which drives all root finding.

Overflow guard: every expression containing cosh(2*sigma) or sinh(2*sigma)
is evaluated in the scaled form exp(-2*sigma) * (expression), using
exp(-2s)*cosh(2s) = (1 + exp(-4s))/2 and its sinh analogue.  The scaling is
by a positive factor, so signs and zeros are preserved exactly; raw
evaluation would overflow near sigma ~ 355.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .model import ScaledParams

# Relative thresholds flagging near-singular samples of the ratio form.
POLE_RELATIVE_THRESHOLD = 1e-10


class SigmaTau(NamedTuple):
    """Scaled decay-rate pair: sigma = s(L-ell) >= 0, tau = t(L-ell) >= 0."""

    sigma: float
    tau: float


@dataclass(frozen=True)
class MatchCoefficients:
    """Inner amplitudes (C, D), both real, and the implied outer amplitudes."""

    C: float
    D: float
    B_plus: complex
    B_minus: complex


@dataclass(frozen=True)
class SecularSample:
    """One evaluation of the ratio form with all ingredients.

    value_Dhat is overflow-scaled by exp(-2*sigma), like secular_det_R.
    singular_flag marks samples close to a pole of the ratio form; there
    value_Q and value_Dratio are unreliable.
    """

    sigma: float
    tau: float
    R: float
    value_M: float
    value_N: float
    value_Q: float
    value_Dratio: float
    value_Dhat: float
    singular_flag: bool


# ---------------------------------------------------------------------------
# constraint-manifold parametrization


def sigma_of_R(R: float, Z: float) -> float:
    """sigma(R) = sqrt(2 Z^2 / (R^2 + sqrt(R^4 + 4 Z^2))); 0 for Z = 0.

    This is the cancellation-free closed form of the decaying branch of the
    constraints sigma*tau = Z, tau^2 - sigma^2 = R^2.
    """
    if R < 0.0 or Z < 0.0:
        raise ValueError("R and Z must be non-negative")
    if Z == 0.0:
        return 0.0
    return math.sqrt(2.0 * Z * Z / (R * R + math.sqrt(R**4 + 4.0 * Z * Z)))


def tau_of_R(R: float, Z: float) -> float:
    """tau(R) = Z/sigma(R) for Z > 0, computed without cancellation; R for Z = 0."""
    if R < 0.0 or Z < 0.0:
        raise ValueError("R and Z must be non-negative")
    return math.sqrt(0.5 * (R * R + math.sqrt(R**4 + 4.0 * Z * Z)))


def sigma_tau_of_R(R: float, Z: float) -> SigmaTau:
    return SigmaTau(sigma_of_R(R, Z), tau_of_R(R, Z))


# ---------------------------------------------------------------------------
# separable building blocks


def eval_M(st: SigmaTau) -> float:
    """M = sigma*sinh(2*sigma) + tau*sin(2*tau) (raw value; +inf on overflow)."""
    s, t = st
    if 2.0 * s > 709.0:
        return math.inf
    return s * math.sinh(2.0 * s) + t * math.sin(2.0 * t)


def eval_N(st: SigmaTau) -> float:
    """N = sigma^2*cosh(2*sigma) + tau^2*cos(2*tau) (raw value; +inf on overflow)."""
    s, t = st
    if 2.0 * s > 709.0:
        return math.inf
    return s * s * math.cosh(2.0 * s) + t * t * math.cos(2.0 * t)


def eval_M_scaled(st: SigmaTau) -> float:
    """exp(-2*sigma) * M, safe for all sigma."""
    s, t = st
    e2 = math.exp(-2.0 * s)
    return s * 0.5 * (1.0 - e2 * e2) + t * math.sin(2.0 * t) * e2


def eval_N_scaled(st: SigmaTau) -> float:
    """exp(-2*sigma) * N, safe for all sigma."""
    s, t = st
    e2 = math.exp(-2.0 * s)
    return s * s * 0.5 * (1.0 + e2 * e2) + t * t * math.cos(2.0 * t) * e2


def eval_Dratio(st: SigmaTau, R: float, lam: float) -> SecularSample:
    """Evaluate the ratio form D = M/N + tan(2*lam*R)/R at one sample.

    Poles are flagged, never raised: singular_flag is set when |cos(2*lam*R)|
    or the relative size of N falls below POLE_RELATIVE_THRESHOLD.  The
    removable R = 0 singularity of the tangent term is filled with its limit
    2*lam.
    """
    if lam < 0.0:
        raise ValueError("lam must be non-negative")
    s, t = st
    Ms = eval_M_scaled(st)
    Ns = eval_N_scaled(st)
    # relative magnitude of N against its separable parts
    n_scale = s * s * 0.5 * (1.0 + math.exp(-4.0 * s)) + t * t * math.exp(-2.0 * s)
    cos2rho = math.cos(2.0 * lam * R)
    sin2rho = math.sin(2.0 * lam * R)
    singular = (n_scale > 0.0 and abs(Ns) / n_scale < POLE_RELATIVE_THRESHOLD) or abs(
        cos2rho
    ) < POLE_RELATIVE_THRESHOLD
    q = Ms / Ns if Ns != 0.0 else math.copysign(math.inf, Ms) if Ms != 0.0 else math.nan
    if R == 0.0:
        tan_term = 2.0 * lam
    elif cos2rho != 0.0:
        tan_term = sin2rho / (cos2rho * R)
    else:
        tan_term = math.inf
    dhat = Ns * sin2rho + R * Ms * cos2rho
    return SecularSample(
        sigma=s,
        tau=t,
        R=R,
        value_M=eval_M(st),
        value_N=eval_N(st),
        value_Q=q,
        value_Dratio=q + tan_term,
        value_Dhat=dhat,
        singular_flag=singular,
    )


# ---------------------------------------------------------------------------
# pole-free determinant in R


def secular_det_R(R: float, params: ScaledParams) -> float:
    """exp(-2*sigma(R)) * Dhat(R): overflow-scaled, sign-true, continuous in R."""
    Z, lam = params.Z, params.lam
    s = sigma_of_R(R, Z)
    t = tau_of_R(R, Z)
    e2 = math.exp(-2.0 * s)
    e4 = e2 * e2
    Ns = s * s * 0.5 * (1.0 + e4) + t * t * math.cos(2.0 * t) * e2
    Ms = s * 0.5 * (1.0 - e4) + t * math.sin(2.0 * t) * e2
    return Ns * math.sin(2.0 * lam * R) + R * Ms * math.cos(2.0 * lam * R)


def secular_det_R_many(R: np.ndarray, params: ScaledParams) -> np.ndarray:
    """Vectorized secular_det_R over an array of non-negative R."""
    Z, lam = params.Z, params.lam
    R = np.asarray(R, dtype=float)
    root = np.sqrt(R**4 + 4.0 * Z * Z)
    t = np.sqrt(0.5 * (R * R + root))
    if Z == 0.0:
        s = np.zeros_like(R)
    else:
        s = np.sqrt(2.0 * Z * Z / (R * R + root))
    e2 = np.exp(-2.0 * s)
    e4 = e2 * e2
    Ns = s * s * 0.5 * (1.0 + e4) + t * t * np.cos(2.0 * t) * e2
    Ms = s * 0.5 * (1.0 - e4) + t * np.sin(2.0 * t) * e2
    return Ns * np.sin(2.0 * lam * R) + R * Ms * np.cos(2.0 * lam * R)


def nsw_det_R(R: float, Z: float) -> float:
    """exp(-2*sigma) * M on the constraint manifold: the lam = 0 secular function."""
    s = sigma_of_R(R, Z)
    t = tau_of_R(R, Z)
    e2 = math.exp(-2.0 * s)
    return s * 0.5 * (1.0 - e2 * e2) + t * math.sin(2.0 * t) * e2


def nsw_det_R_many(R: np.ndarray, Z: float) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    root = np.sqrt(R**4 + 4.0 * Z * Z)
    t = np.sqrt(0.5 * (R * R + root))
    if Z == 0.0:
        s = np.zeros_like(R)
    else:
        s = np.sqrt(2.0 * Z * Z / (R * R + root))
    e2 = np.exp(-2.0 * s)
    return s * 0.5 * (1.0 - e2 * e2) + t * np.sin(2.0 * t) * e2


# ---------------------------------------------------------------------------
# matching matrix, residual, coefficients, wave function


def matching_matrix(root: Sequence[float], params: ScaledParams) -> np.ndarray:
    """The real 2x2 homogeneous system for the inner amplitudes (C, D).

    Rows are scaled by exp(-sigma), so det(matrix) equals
    secular_det_R(R, params)/2 and the singular-value ratio is unchanged.
    """
    R, s, t = float(root[0]), float(root[1]), float(root[2])
    rho = params.lam * R
    es = math.exp(-s)
    ch = 0.5 * (1.0 + es * es)  # exp(-s) cosh(s)
    sh = 0.5 * (1.0 - es * es)  # exp(-s) sinh(s)
    sr, cr = math.sin(rho), math.cos(rho)
    st_, ct = math.sin(t), math.cos(t)
    return np.array(
        [
            [
                R * sr * sh * ct - s * cr * ch * ct + t * cr * sh * st_,
                R * cr * ch * st_ + s * sr * sh * st_ + t * sr * ch * ct,
            ],
            [
                R * sr * ch * st_ - s * cr * sh * st_ - t * cr * ch * ct,
                -R * cr * sh * ct - s * sr * ch * ct + t * sr * sh * st_,
            ],
        ]
    )


def matching_residual(root: Sequence[float], params: ScaledParams) -> float:
    """Smallest singular value of the matching matrix over its largest.

    Near 0 at a genuine root, bounded away from 0 at spurious zeros of the
    scaled determinant.
    """
    mat = matching_matrix(root, params)
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv[0] == 0.0:
        raise ValueError("matching matrix is identically zero (degenerate sample)")
    return float(sv[-1] / sv[0])


def solve_coefficients(
    root: Sequence[float], params: ScaledParams, residual_tol: float = 1e-9
) -> MatchCoefficients:
    """Unit-norm null vector (C, D) of the matching system plus outer amplitudes.

    The phase convention keeps C and D real; the overall sign makes the
    larger of the two positive.  Outer amplitudes follow from value matching
    at x = +-ell (or from derivative matching when the outer sinh vanishes
    at the interface, which happens for Hermitian levels with a node there).
    """
    res = matching_residual(root, params)
    if res > residual_tol:
        raise ValueError(f"matching residual {res:.3e} exceeds tolerance {residual_tol:.1e}")
    mat = matching_matrix(root, params)
    _, _, vt = np.linalg.svd(mat)
    c, d = float(vt[-1, 0]), float(vt[-1, 1])
    if (abs(c) >= abs(d) and c < 0.0) or (abs(d) > abs(c) and d < 0.0):
        c, d = -c, -d

    R, s, t = float(root[0]), float(root[1]), float(root[2])
    rho = params.lam * R
    kappa_sc = complex(s, t)  # kappa * (L - ell)
    psi_plus = complex(c * math.cos(rho), d * math.sin(rho))  # psi0(ell)
    dpsi_plus = complex(-c * math.sin(rho), d * math.cos(rho)) * R  # psi0'(ell) * (L-ell)
    b_plus = _outer_amplitude(psi_plus, dpsi_plus, kappa_sc)
    b_minus = _outer_amplitude(psi_plus.conjugate(), -dpsi_plus.conjugate(), kappa_sc.conjugate(), left=True)
    return MatchCoefficients(C=c, D=d, B_plus=b_plus, B_minus=b_minus)


def _outer_amplitude(psi: complex, dpsi: complex, kappa_sc: complex, left: bool = False) -> complex:
    """Amplitude of B*sinh(kappa(L -+ x)) matching value and slope at the step.

    Uses the better-conditioned of the two matching rows; at a genuine root
    they agree.
    """
    sh = cmath.sinh(kappa_sc)
    ch = cmath.cosh(kappa_sc)
    sign = 1.0 if left else -1.0  # d/dx of sinh(kappa(L-x)) carries -kappa
    if abs(sh) >= 1e-8 * max(abs(ch), 1.0):
        return psi / sh
    return dpsi / (sign * kappa_sc * ch)


def wavefunction_at(
    coeffs: MatchCoefficients, root: Sequence[float], params: ScaledParams, x: float
) -> complex:
    """The three-piece wave function at a point of [-L, L].

    Vanishes identically at the walls by construction; continuous with a
    continuous derivative at +-ell for any accepted root.
    """
    R = float(root[0])
    scale = params.scale
    ell = params.lam * scale
    L = scale + ell
    if abs(x) > L:
        raise ValueError(f"|x| must be <= L = {L}, got x={x}")
    k = R / scale
    kappa = complex(root[1], root[2]) / scale
    if x > ell:
        return coeffs.B_plus * cmath.sinh(kappa * (L - x))
    if x < -ell:
        return coeffs.B_minus * cmath.sinh(kappa.conjugate() * (L + x))
    return complex(coeffs.C * math.cos(k * x), coeffs.D * math.sin(k * x))


def wavefunction_derivative_at(
    coeffs: MatchCoefficients, root: Sequence[float], params: ScaledParams, x: float
) -> complex:
    """Closed-form d(psi)/dx of the matching piece containing x.

    At x = +-ell the inner branch is returned; use the outer pieces'
    one-sided values to probe the smoothness of the matching.
    """
    R = float(root[0])
    scale = params.scale
    ell = params.lam * scale
    L = scale + ell
    if abs(x) > L:
        raise ValueError(f"|x| must be <= L = {L}, got x={x}")
    k = R / scale
    kappa = complex(root[1], root[2]) / scale
    if x > ell:
        return -kappa * coeffs.B_plus * cmath.cosh(kappa * (L - x))
    if x < -ell:
        return kappa.conjugate() * coeffs.B_minus * cmath.cosh(kappa.conjugate() * (L + x))
    return k * complex(-coeffs.C * math.sin(k * x), coeffs.D * math.cos(k * x))
