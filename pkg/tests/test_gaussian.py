import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from seeded_pdc.core import PdcParams, gamma_e, output_moments
from seeded_pdc.errors import NumericalFailure
from seeded_pdc.gaussian import (
    OMEGA,
    CovarianceMatrix,
    build_covariance,
    ppt_check,
    squeezing_symplectic,
    symplectic_eigenvalues,
)

params = st.builds(
    PdcParams,
    st.floats(0, 3),
    st.floats(0, 3),
    st.floats(0, 2),
    st.floats(0, 2 * math.pi),
)


def twb_nu_minus(muk):
    return 0.5 * (math.sqrt(muk + 1) - math.sqrt(muk)) ** 2


def test_conventions():
    # vacuum variance 1/2 and x,p ordering: Omega pairs (x1, p1) and (x2, p2)
    assert np.allclose(build_covariance(PdcParams(0, 0, 0)).sigma, 0.5 * np.eye(4))
    assert OMEGA[0, 1] == 1 and OMEGA[2, 3] == 1 and OMEGA[0, 2] == 0


@given(st.floats(0, 2), st.floats(0, 2 * math.pi))
def test_squeezer_is_symplectic(r, phi):
    S = squeezing_symplectic(r, phi)
    assert np.allclose(S @ OMEGA @ S.T, OMEGA, atol=1e-10 * math.cosh(r) ** 2)


def test_identity_map_without_gain():
    cm = build_covariance(PdcParams(1, 2, 0))
    assert np.array_equal(cm.sigma, np.diag([1.5, 1.5, 2.5, 2.5]))


def test_twin_beam_determinant():
    cm = build_covariance(PdcParams(0, 0, 0.25))
    assert np.linalg.det(cm.sigma) == pytest.approx(1 / 16, abs=1e-14)
    # two-mode squeezed vacuum: <x1 x2> = sinh(2r)/2 * cos(phi)
    r = math.asinh(0.5)
    assert cm.sigma[0, 2] == pytest.approx(0.5 * math.sinh(2 * r))


@given(params)
def test_covariance_invariants(p):
    cm = build_covariance(p)
    assert cm.is_bona_fide()
    scale = (p.mu1 + 0.5) ** 2 * (p.mu2 + 0.5) ** 2
    assert np.linalg.det(cm.sigma) == pytest.approx(scale, rel=1e-8)
    m = output_moments(p)
    n1, n2 = cm.mean_photons()
    assert n1 == pytest.approx(m.n1, abs=1e-10 * max(1, m.n1))
    assert n2 == pytest.approx(m.n2, abs=1e-10 * max(1, m.n2))


@given(params)
def test_symplectic_spectrum_is_input_spectrum(p):
    nu = symplectic_eigenvalues(build_covariance(p).sigma)
    expected = sorted([p.mu1 + 0.5, p.mu2 + 0.5])
    assert nu == pytest.approx(expected, rel=1e-9)


def test_vacuum_ppt():
    rep = ppt_check(build_covariance(PdcParams(0, 0, 0)))
    assert rep.nu_minus == pytest.approx(0.5, abs=1e-15)
    assert not rep.entangled


@pytest.mark.parametrize("muk", [0.01, 0.25, 1.0, 2.0])
def test_twin_beam_nu_minus(muk):
    rep = ppt_check(build_covariance(PdcParams(0, 0, muk)))
    # independent route: exp(-2r)/2 with r = asinh(sqrt(muk))
    assert math.exp(-2 * math.asinh(math.sqrt(muk))) / 2 == pytest.approx(twb_nu_minus(muk))
    assert rep.nu_minus == pytest.approx(twb_nu_minus(muk), abs=1e-10)
    assert rep.entangled


def test_twin_beam_value():
    assert twb_nu_minus(1.0) == pytest.approx(0.08578643762690485)


def test_separable_point():
    p = PdcParams(1, 1, 0.1)
    assert gamma_e(p) < 0
    assert not ppt_check(build_covariance(p)).entangled


@given(st.floats(0, 3), st.floats(0, 3), st.floats(0, 1), st.floats(0, 2 * math.pi))
def test_phase_independence(mu1, mu2, muk, phi):
    a = ppt_check(build_covariance(PdcParams(mu1, mu2, muk, 0.0))).nu_minus
    b = ppt_check(build_covariance(PdcParams(mu1, mu2, muk, phi))).nu_minus
    assert a == pytest.approx(b, abs=1e-10)


def test_sign_agreement_grid():
    mu = np.linspace(0, 3, 30)
    for mu1 in mu:
        for mu2 in mu:
            for muk in np.linspace(0, 1, 20):
                p = PdcParams(mu1, mu2, muk)
                if p.is_origin:
                    continue
                ge = gamma_e(p)
                if abs(ge) < 1e-9:
                    continue
                assert ppt_check(build_covariance(p)).entangled == (ge > 0), (mu1, mu2, muk)


def test_rejects_asymmetric():
    bad = np.eye(4)
    bad[0, 1] = 0.1
    with pytest.raises(ValueError):
        CovarianceMatrix(bad)


@pytest.mark.parametrize(
    "sigma",
    [np.diag([1.0, -1.0, 1.0, 1.0]), np.zeros((4, 4))],
    ids=["indefinite", "singular"],
)
def test_unphysical_spectrum_raises(sigma):
    with pytest.raises(NumericalFailure):
        ppt_check(CovarianceMatrix(sigma))
