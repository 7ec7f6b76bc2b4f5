import math

import numpy as np
import pytest

from ptwell import ScaledParams
from ptwell.secular import (
    MatchCoefficients,
    SigmaTau,
    eval_Dratio,
    eval_M,
    eval_M_scaled,
    eval_N,
    eval_N_scaled,
    matching_matrix,
    matching_residual,
    secular_det_R,
    secular_det_R_many,
    sigma_of_R,
    solve_coefficients,
    tau_of_R,
    wavefunction_at,
    wavefunction_derivative_at,
)

# frozen to 40-digit evaluations of the elementary functions
M_1_1 = 4.536157834672700463064233848713
N_1_1 = 3.346048854536489072564645248273
Q_1_1 = 1.355675912658206260004595783711
SIGMA_1_1 = 0.7861513777574232860695585858430
TAU_1_1 = 1.272019649514068964252422461737


def test_eval_M_examples():
    assert eval_M(SigmaTau(0.0, 0.0)) == 0.0
    assert eval_M(SigmaTau(0.0, math.pi / 2)) == pytest.approx(0.0, abs=1e-15)
    assert eval_M(SigmaTau(1.0, 1.0)) == pytest.approx(M_1_1, rel=1e-14)


def test_eval_N_examples():
    assert eval_N(SigmaTau(0.0, 0.0)) == 0.0
    assert eval_N(SigmaTau(0.0, math.pi / 4)) == pytest.approx(0.0, abs=1e-15)
    assert eval_N(SigmaTau(1.0, 1.0)) == pytest.approx(N_1_1, rel=1e-14)


def test_overflow_guard():
    big = SigmaTau(400.0, 3.0)
    assert eval_M(big) == math.inf
    assert eval_N(big) == math.inf
    assert math.isfinite(eval_M_scaled(big))
    assert math.isfinite(eval_N_scaled(big))
    # raw cosh(2 sigma) would overflow near sigma ~ 355; the scaled
    # determinant stays finite at couplings far beyond that
    huge = ScaledParams(lam=0.8, Z=1e6, scale=1.0)
    for r in (0.5, 3.0, 40.0):
        assert math.isfinite(secular_det_R(r, huge))
    # scaled forms match raw values rescaled, where raw is representable
    st = SigmaTau(3.2, 5.1)
    e = math.exp(-2.0 * st.sigma)
    assert eval_M_scaled(st) == pytest.approx(eval_M(st) * e, rel=1e-13)
    assert eval_N_scaled(st) == pytest.approx(eval_N(st) * e, rel=1e-13)


def test_q_times_n_equals_m():
    rng = np.random.RandomState(3)
    checked = 0
    for _ in range(400):
        st = SigmaTau(float(rng.uniform(0.0, 4.0)), float(rng.uniform(0.0, 12.0)))
        sample = eval_Dratio(st, float(rng.uniform(0.0, 8.0)), float(rng.uniform(0.0, 3.0)))
        if sample.singular_flag or not math.isfinite(sample.value_N) or sample.value_N == 0.0:
            continue
        assert sample.value_Q * sample.value_N == pytest.approx(sample.value_M, rel=1e-12)
        checked += 1
    assert checked > 300


def test_eval_Dratio_examples():
    # both terms vanish as lam -> 0 at a zero of M with N != 0
    s = eval_Dratio(SigmaTau(0.0, math.pi / 2), math.pi / 2, 1e-12)
    assert abs(s.value_Dratio) < 1e-11
    # pole of the tangent term
    lam = (math.pi / 2) / (2.0 * 1.7)
    s = eval_Dratio(SigmaTau(1.0, 2.2), 1.7, lam)
    assert s.singular_flag
    # ratio of the frozen values plus the R -> 0 limit of the tangent term
    s = eval_Dratio(SigmaTau(1.0, 1.0), 0.0, 0.1)
    assert s.value_Q == pytest.approx(Q_1_1, rel=1e-12)
    assert s.value_Dratio == pytest.approx(Q_1_1 + 0.2, rel=1e-12)


def test_eval_Dratio_flags_N_pole():
    # on the N = 0 oval the ratio form is singular
    tau = 4.7

    def n_of_sigma(sig):
        return eval_N_scaled(SigmaTau(sig, tau))

    a, b = 0.0, 2.0
    fa = n_of_sigma(a)
    assert fa * n_of_sigma(b) < 0.0
    for _ in range(80):
        m = 0.5 * (a + b)
        if (n_of_sigma(m) > 0.0) == (fa > 0.0):
            a = m
        else:
            b = m
    s = eval_Dratio(SigmaTau(0.5 * (a + b), tau), 1.0, 0.3)
    assert s.singular_flag


def test_sigma_tau_of_R_examples():
    assert sigma_of_R(0.0, 1.0) == pytest.approx(1.0, rel=1e-14)
    assert tau_of_R(0.0, 1.0) == pytest.approx(1.0, rel=1e-14)
    assert sigma_of_R(2.0, 0.0) == 0.0
    assert tau_of_R(2.0, 0.0) == pytest.approx(2.0, rel=1e-15)
    assert sigma_of_R(1.0, 1.0) == pytest.approx(SIGMA_1_1, rel=1e-14)
    assert tau_of_R(1.0, 1.0) == pytest.approx(TAU_1_1, rel=1e-14)


def test_constraint_identities():
    rng = np.random.RandomState(11)
    for _ in range(200):
        R = float(rng.uniform(0.0, 20.0))
        Z = float(rng.uniform(0.0, 30.0))
        s, t = sigma_of_R(R, Z), tau_of_R(R, Z)
        assert s * t == pytest.approx(Z, rel=1e-12, abs=1e-12)
        assert t * t - s * s == pytest.approx(R * R, rel=1e-12, abs=1e-12)


def test_hermitian_zeros_of_det():
    # at Z = 0 the determinant reduces to R^2 sin(2R(1+lam))
    for lam in (0.3, 1.0, 2.4):
        params = ScaledParams(lam=lam, Z=0.0, scale=1.0)
        for n in range(1, 9):
            r_n = n * math.pi / (2.0 * (1.0 + lam))
            assert abs(secular_det_R(r_n, params)) < 1e-12 * r_n * r_n
            # a bracketed bisection around the zero reproduces it to 1e-12
            a, b = r_n - 0.1, r_n + 0.1
            fa = secular_det_R(a, params)
            for _ in range(100):
                m = 0.5 * (a + b)
                fm = secular_det_R(m, params)
                if (fm > 0.0) == (fa > 0.0):
                    a, fa = m, fm
                else:
                    b = m
            assert 0.5 * (a + b) == pytest.approx(r_n, rel=1e-12)


def test_det_vanishes_at_origin():
    for lam in (0.0, 0.7, 2.4):
        for Z in (0.0, 1.3):
            assert secular_det_R(0.0, ScaledParams(lam=lam, Z=Z, scale=1.0)) == 0.0


def test_det_scaled_matches_direct_evaluation():
    # far from overflow the scaled form is exp(-2 sigma) times the raw form
    params = ScaledParams(lam=1.25, Z=2.0, scale=1.0)
    R = 2.0
    s, t = sigma_of_R(R, params.Z), tau_of_R(R, params.Z)
    raw = eval_N(SigmaTau(s, t)) * math.sin(2 * params.lam * R) + R * eval_M(
        SigmaTau(s, t)
    ) * math.cos(2 * params.lam * R)
    val = secular_det_R(R, params)
    assert val != 0.0
    assert val == pytest.approx(raw * math.exp(-2.0 * s), rel=1e-12)
    assert math.copysign(1.0, val) == math.copysign(1.0, raw)


def test_det_vectorized_matches_scalar():
    params = ScaledParams(lam=0.7, Z=3.3, scale=1.0)
    rs = np.linspace(0.01, 12.0, 500)
    vals = secular_det_R_many(rs, params)
    for r, v in zip(rs[::37], vals[::37]):
        assert v == pytest.approx(secular_det_R(float(r), params), rel=1e-13, abs=1e-300)


def test_det_continuity_no_lost_sign_changes():
    # refining a grid 10x never loses a sign change
    for lam, Z in ((0.7, 1.5), (2.1, 4.0)):
        params = ScaledParams(lam=lam, Z=Z, scale=1.0)
        coarse = np.linspace(1e-6, 10.0, 400)
        fine = np.linspace(1e-6, 10.0, 4000)
        n_coarse = int(np.sum(np.diff(np.sign(secular_det_R_many(coarse, params))) != 0))
        n_fine = int(np.sum(np.diff(np.sign(secular_det_R_many(fine, params))) != 0))
        assert n_fine >= n_coarse


def test_matching_residual_at_hermitian_roots():
    params = ScaledParams(lam=0.6, Z=0.0, scale=1.0)
    for n in range(1, 6):
        r = n * math.pi / (2.0 * (1.0 + params.lam))
        st = SigmaTau(sigma_of_R(r, 0.0), tau_of_R(r, 0.0))
        assert matching_residual((r, st.sigma, st.tau), params) < 1e-12


def test_matching_residual_rejects_non_roots():
    # a zero of sin(2 lam R) where M != 0 is not a root: residual stays large
    params = ScaledParams(lam=1.25, Z=2.0, scale=1.0)
    R = math.pi / (2.0 * params.lam)
    st = SigmaTau(sigma_of_R(R, params.Z), tau_of_R(R, params.Z))
    assert abs(eval_M_scaled(st)) > 1e-3
    assert matching_residual((R, st.sigma, st.tau), params) > 1e-3


def test_matching_matrix_determinant_identity():
    # row-scaled matching matrix has det = det_scaled/2 (used by the filter)
    rng = np.random.RandomState(5)
    for _ in range(50):
        params = ScaledParams(lam=float(rng.uniform(0.05, 3.0)), Z=float(rng.uniform(0.0, 6.0)), scale=1.0)
        R = float(rng.uniform(0.1, 10.0))
        st = (R, sigma_of_R(R, params.Z), tau_of_R(R, params.Z))
        det = float(np.linalg.det(matching_matrix(st, params)))
        assert det == pytest.approx(0.5 * secular_det_R(R, params), rel=1e-10, abs=1e-12)


def test_matching_degenerate_matrix_reported():
    params = ScaledParams(lam=1.0, Z=0.0, scale=1.0)
    with pytest.raises(ValueError, match="degenerate"):
        matching_residual((0.0, 0.0, 0.0), params)


def _hermitian_root(params: ScaledParams, n: int):
    r = n * math.pi / (2.0 * (1.0 + params.lam))
    return (r, 0.0, r)


def test_solve_coefficients_hermitian_parity():
    params = ScaledParams(lam=1.0, Z=0.0, scale=0.5)
    even = solve_coefficients(_hermitian_root(params, 1), params)
    assert abs(even.C) == pytest.approx(1.0, abs=1e-12)
    assert abs(even.D) < 1e-12
    odd = solve_coefficients(_hermitian_root(params, 2), params)
    assert abs(odd.D) == pytest.approx(1.0, abs=1e-12)
    assert abs(odd.C) < 1e-12


def test_solve_coefficients_continuity_in_Z():
    from ptwell import scan_roots

    params0 = ScaledParams(lam=0.8, Z=0.0, scale=1.0)
    ratios = []
    for Z in (1e-3, 2e-3, 4e-3, 8e-3):
        params = ScaledParams(lam=0.8, Z=Z, scale=1.0)
        root = scan_roots(params, R_max=2.0).roots[0]
        co = solve_coefficients((root.R, root.sigma, root.tau), params)
        ratios.append(abs(co.D) / abs(co.C))
    assert all(r < 0.05 for r in ratios)
    assert all(b > a for a, b in zip(ratios, ratios[1:]))  # grows smoothly with Z
    # B amplitudes satisfy the two value-matching equations
    params = ScaledParams(lam=0.8, Z=8e-3, scale=1.0)
    from ptwell import scan_roots as _sr

    root = _sr(params, R_max=2.0).roots[0]
    co = solve_coefficients((root.R, root.sigma, root.tau), params)
    rho = params.lam * root.R
    import cmath

    lhs_p = co.B_plus * cmath.sinh(complex(root.sigma, root.tau))
    rhs_p = complex(co.C * math.cos(rho), co.D * math.sin(rho))
    assert abs(lhs_p - rhs_p) < 1e-10
    lhs_m = co.B_minus * cmath.sinh(complex(root.sigma, -root.tau))
    rhs_m = complex(co.C * math.cos(rho), -co.D * math.sin(rho))
    assert abs(lhs_m - rhs_m) < 1e-10


def _coeffs_for(params: ScaledParams, index: int = 0):
    from ptwell import scan_roots

    root = scan_roots(params).roots[index]
    triple = (root.R, root.sigma, root.tau)
    return solve_coefficients(triple, params), triple


def test_wavefunction_walls_and_pt():
    params = ScaledParams(lam=0.9, Z=1.3, scale=1.0)
    co, triple = _coeffs_for(params, index=1)
    L = params.scale * (1.0 + params.lam)
    assert wavefunction_at(co, triple, params, L) == 0.0
    assert wavefunction_at(co, triple, params, -L) == 0.0
    rng = np.random.RandomState(13)
    scale = max(abs(wavefunction_at(co, triple, params, float(x))) for x in rng.uniform(-L, L, 32))
    for x in rng.uniform(-L, L, 64):
        lhs = wavefunction_at(co, triple, params, float(-x))
        rhs = wavefunction_at(co, triple, params, float(x)).conjugate()
        assert abs(lhs - rhs) < 1e-12 * scale
    with pytest.raises(ValueError):
        wavefunction_at(co, triple, params, 1.01 * L)


def test_wavefunction_c1_matching():
    params = ScaledParams(lam=1.1, Z=2.2, scale=0.7)
    co, triple = _coeffs_for(params, index=2)
    ell = params.lam * params.scale
    d_in = wavefunction_derivative_at(co, triple, params, ell)
    d_out = wavefunction_derivative_at(co, triple, params, ell * (1.0 + 1e-14))
    dmax = max(abs(d_in), abs(d_out))
    assert abs(d_in - d_out) < 1e-8 * dmax
    # the mirror interface
    d_in_m = wavefunction_derivative_at(co, triple, params, -ell)
    d_out_m = wavefunction_derivative_at(co, triple, params, -ell * (1.0 + 1e-14))
    assert abs(d_in_m - d_out_m) < 1e-8 * dmax


def test_wavefunction_derivative_against_numeric():
    params = ScaledParams(lam=0.5, Z=0.9, scale=1.0)
    co, triple = _coeffs_for(params, index=0)
    for x in (0.15, 0.62, -0.41, 0.9):
        h = 1e-6
        numeric = (
            wavefunction_at(co, triple, params, x + h) - wavefunction_at(co, triple, params, x - h)
        ) / (2.0 * h)
        analytic = wavefunction_derivative_at(co, triple, params, x)
        assert abs(numeric - analytic) < 1e-7 * max(1.0, abs(analytic))


def test_match_coefficients_type():
    co = MatchCoefficients(C=1.0, D=0.0, B_plus=1 + 0j, B_minus=1 - 0j)
    assert co.C == 1.0
