import math

import numpy as np
import pytest

from ptwell.shallow import (
    ShallowParams,
    level_equation,
    shallow_wavefunction,
    slope_parameters,
    solution_curve,
    solution_line,
    solve_level,
    solve_levels,
    strong_coupling_omega,
    strong_coupling_omega_exact,
    weak_coupling_eta,
    weak_coupling_eta_exact,
)

PI = math.pi


def test_no_levels_at_zero_inner_width():
    for T in (0.1, 1.0, 10.0):
        params = ShallowParams(ell=0.0, T=T)
        for N in range(6):
            assert solve_level(params, N) is None
        assert solve_levels(params, 5) == []


def test_zero_coupling_rejected():
    with pytest.raises(ValueError):
        solve_level(ShallowParams(ell=1.0, T=0.0), 0)


def test_energy_bounds_all_couplings():
    for T in (0.01, 0.1, 1.0, 10.0, 100.0):
        params = ShallowParams(ell=PI, T=T)
        for N in range(0, 51):
            lv = solve_level(params, N)
            assert lv is not None
            assert 0.0 < lv.omega < 1.0
            assert (N + 0.5) ** 2 / 4.0 <= lv.energy <= (N + 1.0) ** 2 / 4.0


def test_wavenumber_interlacing():
    params = ShallowParams(ell=PI, T=0.7)
    for N in range(0, 12):
        lv = solve_level(params, N)
        if N % 2 == 0:
            n = N // 2
            assert n + 0.25 < lv.k < n + 0.5
        else:
            m = (N - 1) // 2
            assert m + 0.75 < lv.k < m + 1.0


def test_parametrization_consistency():
    params = ShallowParams(ell=PI, T=2.0)
    for N in range(0, 8):
        lv = solve_level(params, N)
        assert lv.p == pytest.approx(lv.q * math.cos(lv.alpha), rel=1e-12)
        assert lv.k == pytest.approx(lv.q * math.sin(lv.alpha), rel=1e-12)
        assert lv.q == pytest.approx(params.T / math.sqrt(2.0 * math.cos(lv.alpha)), rel=1e-12)
        # the decay constants reproduce the coupling: 2 p q = T^2
        assert 2.0 * lv.p * lv.q == pytest.approx(params.T**2, rel=1e-12)


def test_solve_level_example_small_inner_width():
    # independent re-solve of the level equation on a fine grid
    params = ShallowParams(ell=1.0, T=1.0)
    lv = solve_level(params, 0)
    ws = np.linspace(1e-9, 1 - 1e-9, 200001)
    vals = np.array([level_equation(params, 0, float(w)) for w in ws])
    idx = int(np.argmin(np.abs(vals)))
    assert lv.omega == pytest.approx(float(ws[idx]), abs=1e-5)
    assert level_equation(params, 0, lv.omega) == pytest.approx(0.0, abs=1e-12)


def test_weak_coupling_series():
    # frozen 40-digit reference differences of series vs arcsin form
    assert abs(weak_coupling_eta(10.0) - weak_coupling_eta_exact(10.0)) < 1e-6
    assert abs(weak_coupling_eta(10.0) - weak_coupling_eta_exact(10.0)) == pytest.approx(
        4.89215489608824e-07, rel=1e-4
    )
    err2 = abs(weak_coupling_eta(2.0) - weak_coupling_eta_exact(2.0))
    err10 = abs(weak_coupling_eta(10.0) - weak_coupling_eta_exact(10.0))
    assert err2 > err10  # series ordering
    assert weak_coupling_eta(1e9) < 1e-9  # -> 0 at infinite separation
    with pytest.raises(ValueError):
        weak_coupling_eta(0.5)


def test_weak_series_matches_bisection():
    # at the solved root, arcsin(rhs) equals pi/2 - ell*omega/2 exactly
    params = ShallowParams(ell=PI, T=0.1)
    for N in range(0, 10):
        lv = solve_level(params, N)
        r = lv.r_level
        if r < 10.0:
            continue
        angle_from_root = 0.5 * PI - 0.5 * params.ell * lv.omega
        assert abs(weak_coupling_eta(r) - angle_from_root) < 1e-6


def test_strong_coupling_series():
    assert abs(strong_coupling_omega(0.01) - strong_coupling_omega_exact(0.01)) < 1e-6
    assert abs(strong_coupling_omega(0.01) - strong_coupling_omega_exact(0.01)) == pytest.approx(
        6.2496875195e-10, rel=1e-3
    )
    err_small = abs(strong_coupling_omega(0.01) - strong_coupling_omega_exact(0.01))
    err_big = abs(strong_coupling_omega(0.5) - strong_coupling_omega_exact(0.5))
    assert err_big > err_small
    # r -> 0 means omega -> 0: the estimate vanishes
    assert strong_coupling_omega(1e-9) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(ValueError):
        strong_coupling_omega(1.5)


def test_strong_series_matches_solved_levels():
    # sin^2(ell*omega/4) at the solved root equals the exact bracket in r
    params = ShallowParams(ell=PI, T=40.0)
    lv = solve_level(params, 0)
    r = lv.r_level
    assert r < 0.01
    assert math.sin(0.25 * params.ell * lv.omega) ** 2 == pytest.approx(
        strong_coupling_omega_exact(r), rel=1e-10
    )
    assert strong_coupling_omega(r) == pytest.approx(strong_coupling_omega_exact(r), rel=1e-4)


def test_slope_parameters_symmetric_limit():
    # weak coupling: p << q and the two branches approach each other
    params = ShallowParams(ell=PI, T=0.01)
    lv = solve_level(params, 0)
    gp, gm = slope_parameters(lv)
    assert lv.p / lv.q < 0.02
    assert abs(gp - gm) / abs(gm) < 0.05
    assert gp == pytest.approx(lv.G_plus, rel=1e-14)
    assert gm == pytest.approx(lv.G_minus, rel=1e-14)


def _slope_fit(t_values, branch):
    params_of = lambda T: ShallowParams(ell=PI, T=T)
    rs, gs = [], []
    for T in t_values:
        lv = solve_level(params_of(T), 0)
        r = lv.r_level
        if not (1e-4 <= r <= 1e-2):
            continue
        rs.append(math.log10(r))
        gs.append(math.log10(abs(lv.G_plus if branch == "+" else lv.G_minus)))
    assert len(rs) >= 5
    return float(np.polyfit(rs, gs, 1)[0])


def test_strong_coupling_slopes_of_implemented_formulas():
    # measured log-log exponents of G+- = -k^2/(q +- p) over r in [1e-4, 1e-2]:
    # the product identity G+ * G- = k^2 = O(1) forces them to be opposite
    t_values = np.geomspace(12.0, 160.0, 16)
    slope_p = _slope_fit(t_values, "+")
    slope_m = _slope_fit(t_values, "-")
    assert slope_p == pytest.approx(0.5, abs=0.05)
    assert slope_m == pytest.approx(-0.5, abs=0.05)
    assert slope_p + slope_m == pytest.approx(0.0, abs=0.02)


def test_product_identity():
    # G+ G- = k^4/(q^2-p^2) = k^2 exactly, since q^2 - p^2 = k^2
    params = ShallowParams(ell=PI, T=3.0)
    for N in range(0, 6):
        lv = solve_level(params, N)
        assert lv.G_plus * lv.G_minus == pytest.approx(lv.k**2, rel=1e-10)


def test_wavefunction_normalization_and_slope():
    params = ShallowParams(ell=PI, T=1.0)
    for N in (0, 1, 2):
        lv = solve_level(params, N)
        assert shallow_wavefunction(lv, params, 0.0) == 1.0
        G = lv.G_plus if N % 2 == 0 else lv.G_minus
        h = 1e-7
        d0 = (shallow_wavefunction(lv, params, h) - shallow_wavefunction(lv, params, -h)) / (2 * h)
        assert abs(d0 - 1j * G) < 1e-6 * max(1.0, abs(G))


def test_wavefunction_outer_decay():
    params = ShallowParams(ell=PI, T=1.0)
    lv = solve_level(params, 0)
    xs = np.linspace(params.ell + 1.0, params.ell + 6.0, 6)
    mags = [abs(shallow_wavefunction(lv, params, float(x))) for x in xs]
    rates = [-math.log(b / a) / (x2 - x1) for a, b, x1, x2 in zip(mags, mags[1:], xs, xs[1:])]
    for rate in rates:
        assert rate == pytest.approx(lv.p, rel=1e-9)


def test_wavefunction_c1_at_calibration_width():
    params = ShallowParams(ell=PI, T=1.0)
    for N in (0, 1, 2, 3):
        lv = solve_level(params, N)
        h = 1e-8
        x = params.ell
        inner = (
            shallow_wavefunction(lv, params, x) - shallow_wavefunction(lv, params, x - h)
        ) / h
        outer = (
            shallow_wavefunction(lv, params, x + h) - shallow_wavefunction(lv, params, x)
        ) / h
        assert abs(inner - outer) < 1e-6 * max(abs(inner), abs(outer))
        # continuity is exact by construction
        below = shallow_wavefunction(lv, params, x - 1e-12)
        above = shallow_wavefunction(lv, params, x + 1e-12)
        assert abs(below - above) < 1e-10


def test_wavefunction_pt_reflection():
    params = ShallowParams(ell=PI, T=1.0)
    lv = solve_level(params, 1)
    for x in (0.3, 1.1, 4.0):
        assert shallow_wavefunction(lv, params, -x) == pytest.approx(
            shallow_wavefunction(lv, params, x).conjugate(), rel=1e-14
        )


def test_solution_curve_and_lines():
    params = ShallowParams(ell=PI, T=1.0)
    omega, y = solution_curve(params)
    assert len(omega) == len(y)
    assert np.all(np.diff(omega) > 0)
    # each solved level is an intersection of the curve with its line
    for N in (0, 1, 2):
        lv = solve_level(params, N)
        half = 0.5 * params.ell * lv.omega
        curve_val = math.sin(half) / math.sqrt(2.0 * math.cos(half))
        line_val = float(solution_line(params, N, np.array([lv.omega]))[0])
        assert curve_val == pytest.approx(line_val, rel=1e-10)
