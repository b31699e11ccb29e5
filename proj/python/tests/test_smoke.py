import math

import numpy as np
import pytest

import bicpy


def test_models_listed():
    names = bicpy.models()
    assert "twolevel" in names and "sphere" in names


def test_twolevel_bic_point_has_real_eigenvalue():
    eps, energy = bicpy.twolevel_bic_point(0.1, 0.2, 25.0)
    assert eps == pytest.approx(-8.838834764831844, abs=1e-12)
    z = bicpy.twolevel_eigenvalues(eps, 0.1, 0.2, 25.0)
    assert min(abs(v.imag) for v in z) < 1e-10
    assert bicpy.twolevel_bic_point(0.0, 0.2, 1.0) is None


def test_smatrix_unitary():
    rng = np.random.default_rng(4)
    W = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
    S = bicpy.smatrix(np.array([-1.0, 0.0, 0.5, 2.0]), 0.3 * W, 0.7)
    assert np.allclose(S.conj().T @ S, np.eye(2), atol=1e-12)
    H = bicpy.heff(np.array([0.0, 1.0, 2.0, 3.0]), 0.3 * W)
    assert np.all(np.linalg.eigvals(H).imag <= 1e-12)


def test_ring_flux():
    r, t = bicpy.ring_transmission(1.3, 0.4)
    assert abs(r) ** 2 + abs(t) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_chain_bic_at_midpoint():
    epsw, _, width = bicpy.fp_chain_bic(-0.5, 0.3, 0.25, 0.5)
    assert epsw == pytest.approx(-0.1, abs=1e-8)
    assert abs(width) < 1e-10


def test_sweep_and_errors():
    d = bicpy.sweep("twolevel", {"gamma1": 0.2}, ("eps", -1.0, 1.0, 3), ("E", -1.0, 1.0, 4))
    assert d["columns"][:2] == ["eps", "E"]
    assert len(d["rows"]) == 12
    assert d["failures"] == 0
    with pytest.raises(ValueError):
        bicpy.sweep("nosuch")
    with pytest.raises(ValueError):
        bicpy.sweep("twolevel", {"bogus": 1.0})


def test_catalog():
    recs = bicpy.bics("twolevel", {"gamma1": 0.1, "gamma2": 0.2, "u": 25.0})
    assert len(recs) == 1
    assert recs[0]["kind"] == "fw"
    assert math.isclose(recs[0]["point"][0], -8.838834764831844, abs_tol=1e-9)
