import math

import numpy as np
import pytest

from ptwell import PhysicalParams, ScaledParams, energy_from_R, physical_params, potential_at, scale_params


def test_scale_params_examples():
    s = scale_params(PhysicalParams(L=1.0, ell=0.5, g=4.0))
    assert s.lam == pytest.approx(1.0, rel=1e-15)
    assert s.Z == pytest.approx(0.5, rel=1e-15)
    assert s.scale == pytest.approx(0.5, rel=1e-15)

    s = scale_params(PhysicalParams(L=51.0, ell=11.0, g=0.0))
    assert s.lam == pytest.approx(11.0 / 40.0, rel=1e-15)
    assert s.Z == 0.0
    assert s.scale == pytest.approx(40.0, rel=1e-15)

    s = scale_params(PhysicalParams(L=1.0, ell=0.0, g=2.0))
    assert s.lam == 0.0
    assert s.Z == pytest.approx(1.0, rel=1e-15)
    assert s.scale == pytest.approx(1.0, rel=1e-15)


def test_parameter_validation():
    with pytest.raises(ValueError):
        PhysicalParams(L=1.0, ell=1.0, g=0.0)  # ell == L
    with pytest.raises(ValueError):
        PhysicalParams(L=1.0, ell=1.5, g=0.0)
    with pytest.raises(ValueError):
        PhysicalParams(L=1.0, ell=-0.1, g=0.0)
    with pytest.raises(ValueError):
        PhysicalParams(L=1.0, ell=0.5, g=-1.0)
    with pytest.raises(ValueError):
        PhysicalParams(L=-1.0, ell=0.0, g=0.0)
    with pytest.raises(ValueError):
        ScaledParams(lam=-0.1, Z=0.0, scale=1.0)
    with pytest.raises(ValueError):
        ScaledParams(lam=0.0, Z=-1.0, scale=1.0)
    with pytest.raises(ValueError):
        ScaledParams(lam=0.0, Z=0.0, scale=0.0)


def test_roundtrip_bijection():
    rng = np.random.RandomState(42)
    for _ in range(200):
        L = float(rng.uniform(0.2, 50.0))
        ell = float(rng.uniform(0.0, 0.999) * L)
        g = float(rng.uniform(0.0, 100.0))
        p = PhysicalParams(L=L, ell=ell, g=g)
        q = physical_params(scale_params(p))
        assert q.L == pytest.approx(L, rel=1e-14)
        assert q.ell == pytest.approx(ell, rel=1e-14, abs=1e-14)
        assert q.g == pytest.approx(g, rel=1e-14, abs=1e-14)


def test_potential_examples():
    p = PhysicalParams(L=1.0, ell=0.3, g=2.0)
    assert potential_at(p, 0.0) == 0.0
    assert potential_at(p, 0.5) == 2.0j
    assert potential_at(p, -0.5) == -2.0j
    with pytest.raises(ValueError):
        potential_at(p, 1.0)
    with pytest.raises(ValueError):
        potential_at(p, -1.2)


def test_potential_pt_antisymmetry():
    p = PhysicalParams(L=2.0, ell=0.7, g=3.5)
    rng = np.random.RandomState(7)
    for x in rng.uniform(-1.999, 1.999, size=64):
        assert potential_at(p, float(x)) == potential_at(p, float(-x)).conjugate()


def test_energy_from_R():
    assert energy_from_R(0.0, 1.0) == 0.0
    assert energy_from_R(math.pi, 2.0) == pytest.approx(math.pi**2 / 4.0, rel=1e-15)
    # consistency with E = (tau^2 - sigma^2)/scale^2 at sigma = 0
    tau = 2.347
    assert energy_from_R(tau, 0.5) == pytest.approx(tau * tau / 0.25, rel=1e-15)
    with pytest.raises(ValueError):
        energy_from_R(-1.0, 1.0)
    with pytest.raises(ValueError):
        energy_from_R(1.0, 0.0)
