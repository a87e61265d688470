import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ladder_cavity.errors import ParameterError
from ladder_cavity.model import Severity, SystemParams, derive_dressed, secular_check


def params(**kw):
    base = dict(g1=6.0, g2=4.0, gamma2=2.0, kappa=0.1, omega1=100.0, omega2=150.0,
                phi1=math.pi / 4, phi2=math.pi / 4)
    base.update(kw)
    return SystemParams(**base)


def test_symmetric_driving_angle():
    d = derive_dressed(params(omega1=10.0, omega2=10.0))
    assert d.theta == pytest.approx(math.pi / 4, abs=1e-15)
    assert d.omega_total == pytest.approx(10 * math.sqrt(2), rel=1e-15)


def test_in_phase_matched_ratio_cancels_coupling():
    d = derive_dressed(params())
    assert d.g_abs == 0.0


def test_antiphase_maximum():
    d = derive_dressed(params(phi2=math.pi / 4 + math.pi))
    assert d.g_abs == pytest.approx(6 / math.sqrt(1 + 9 / 4), rel=1e-14)
    assert d.g_abs == pytest.approx(3.3282011773513753, rel=1e-14)
    assert d.g_abs == pytest.approx(6 * math.cos(d.theta), rel=1e-14)


def test_rates_at_quarter_angle():
    d = derive_dressed(params(omega1=5.0, omega2=5.0, gamma2=2.0))
    assert d.gamma_a == pytest.approx(0.25, rel=1e-14)
    assert d.gamma_b == pytest.approx(0.125, rel=1e-14)
    assert d.gamma_c == pytest.approx(0.1875, rel=1e-14)
    # reduced-equation constants at theta = pi/4, gamma1 = 1, gamma2 = 2
    assert d.alpha == pytest.approx(0.5 + 2.0, rel=1e-14)
    assert d.beta == pytest.approx(1.0 + 1.0, rel=1e-14)
    assert d.zeta == pytest.approx((2.5 + 3.0) / 4, rel=1e-14)


def test_upper_laser_only_gives_right_angle():
    d = derive_dressed(params(omega1=0.0, omega2=3.0))
    assert d.theta == math.pi / 2
    assert d.gamma_a == pytest.approx(0.0, abs=1e-30)


def test_both_lasers_off_rejected():
    with pytest.raises(ParameterError):
        params(omega1=0.0, omega2=0.0)


@pytest.mark.parametrize("field,value", [
    ("g1", -1.0), ("gamma1", 0.0), ("kappa", 0.0), ("kappa", -1e-3),
    ("omega2", -1.0), ("gamma2", -0.1), ("phi1", math.nan), ("g2", math.inf),
])
def test_invalid_params(field, value):
    with pytest.raises(ParameterError):
        params(**{field: value})


def _dressed_basis(theta):
    c, s = math.cos(theta), math.sin(theta)
    r = 1 / math.sqrt(2)
    # columns: bare components of |->, |0>, |+>
    return np.array([[-c * r, -s, c * r],
                     [r, 0.0, r],
                     [-s * r, c, s * r]])


@pytest.mark.parametrize("o1,o2", [(3.0, 1.0), (1.0, 1.0), (0.4, 2.0)])
def test_rates_match_secular_projection_of_bare_jumps(o1, o2):
    """Independent check: project the bare decay operators on the dressed basis
    and sum squared components per resonance class."""
    gam1, gam2 = 1.0, 2.0
    d = derive_dressed(params(omega1=o1, omega2=o2, gamma2=gam2))
    U = _dressed_basis(d.theta)
    HL = np.array([[0, o1, 0], [o1, 0, o2], [0, o2, 0]])
    np.testing.assert_allclose(U.T @ HL @ U, np.diag([-d.omega_total, 0, d.omega_total]), atol=1e-12)
    S12 = np.zeros((3, 3)); S12[0, 1] = 1
    S23 = np.zeros((3, 3)); S23[1, 2] = 1
    T12, T23 = U.T @ S12 @ U, U.T @ S23 @ U
    m, z, p = 0, 1, 2
    # coefficient of L(R) is (gamma/2) |component|^2
    coeff = lambda i, j: gam1 / 2 * T12[i, j] ** 2 + gam2 / 2 * T23[i, j] ** 2
    assert coeff(m, z) == pytest.approx(d.gamma_a, abs=1e-14)
    assert coeff(p, z) == pytest.approx(d.gamma_a, abs=1e-14)
    assert coeff(z, m) == pytest.approx(d.gamma_b, abs=1e-14)
    assert coeff(z, p) == pytest.approx(d.gamma_b, abs=1e-14)
    assert coeff(p, m) == pytest.approx(d.gamma_c, abs=1e-14)
    assert coeff(m, p) == pytest.approx(d.gamma_c, abs=1e-14)
    # zero-frequency part must be proportional to R_z
    for T in (T12, T23):
        assert T[z, z] == pytest.approx(0, abs=1e-14)
        assert T[p, p] == pytest.approx(-T[m, m], abs=1e-14)
    rz = gam1 / 2 * T12[p, p] ** 2 + gam2 / 2 * T23[p, p] ** 2
    assert rz == pytest.approx(d.gamma_c, abs=1e-14)


@pytest.mark.parametrize("phi1,phi2", [(0.3, 1.1), (math.pi / 4, 2.0), (0.0, math.pi)])
def test_effective_coupling_is_resonant_component(phi1, phi2):
    """The coefficient of a^+ R_{-+} in the bare cavity coupling equals i g_eff."""
    p = params(omega1=2.0, omega2=3.0, phi1=phi1, phi2=phi2)
    d = derive_dressed(p)
    U = _dressed_basis(d.theta)
    S12 = np.zeros((3, 3)); S12[0, 1] = 1
    S23 = np.zeros((3, 3)); S23[1, 2] = 1
    coupling = 1j * (p.g1 * np.exp(-1j * phi1) * S12 + p.g2 * np.exp(-1j * phi2) * S23)
    comp = (U.T @ coupling @ U)[0, 2]
    assert comp == pytest.approx(1j * d.g_eff, abs=1e-14)
    assert d.psi == pytest.approx(np.angle(d.g_eff), abs=1e-14)


angles = st.floats(-10, 10, allow_nan=False)
pos = st.floats(0.01, 50, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(g1=pos, g2=pos, o1=pos, o2=pos, phi1=angles, phi2=angles, c=angles)
def test_global_phase_invariance(g1, g2, o1, o2, phi1, phi2, c):
    a = derive_dressed(params(g1=g1, g2=g2, omega1=o1, omega2=o2, phi1=phi1, phi2=phi2))
    b = derive_dressed(params(g1=g1, g2=g2, omega1=o1, omega2=o2, phi1=phi1 + c, phi2=phi2 + c))
    assert b.g_abs == pytest.approx(a.g_abs, rel=1e-12, abs=1e-12)
    for name in ("gamma_a", "gamma_b", "gamma_c", "alpha", "beta", "zeta", "theta"):
        assert getattr(a, name) == getattr(b, name)


@settings(max_examples=200, deadline=None)
@given(g1=pos, g2=pos, o1=pos, o2=pos, phi1=angles, dphi=angles)
def test_coupling_bounds_and_symmetry(g1, g2, o1, o2, phi1, dphi):
    a = derive_dressed(params(g1=g1, g2=g2, omega1=o1, omega2=o2, phi1=phi1, phi2=phi1 + dphi))
    b = derive_dressed(params(g1=g1, g2=g2, omega1=o1, omega2=o2, phi1=phi1, phi2=phi1 - dphi))
    c = derive_dressed(params(g1=g1, g2=g2, omega1=o1, omega2=o2, phi1=phi1,
                              phi2=phi1 + dphi + 2 * math.pi))
    assert a.g_abs == pytest.approx(abs(a.g_eff), rel=1e-12)
    assert a.g_abs <= (g1 + g2) / 2 * (1 + 1e-12)
    assert 0 <= a.theta <= math.pi / 2
    assert b.g_abs == pytest.approx(a.g_abs, rel=1e-9, abs=1e-12)
    assert c.g_abs == pytest.approx(a.g_abs, rel=1e-9, abs=1e-12)
    assert min(a.gamma_a, a.gamma_b, a.gamma_c, a.alpha, a.beta, a.zeta) >= 0


@settings(max_examples=200, deadline=None)
@given(g1=pos, g2=pos, o1=pos, phi=angles, dphi=st.floats(0.05, 2 * math.pi - 0.05))
def test_zero_coupling_only_at_interference(g1, g2, o1, phi, dphi):
    o2 = o1 * g1 / g2
    matched = derive_dressed(params(g1=g1, g2=g2, omega1=o1, omega2=o2, phi1=phi, phi2=phi))
    assert matched.g_abs <= 1e-12 * (g1 + g2)
    off = derive_dressed(params(g1=g1, g2=g2, omega1=o1, omega2=o2, phi1=phi, phi2=phi + dphi))
    assert off.g_abs > 1e-6 * min(g1, g2) * min(o1, o2) / math.hypot(o1, o2)


@pytest.mark.parametrize("kw,ratios,severity", [
    (dict(g1=1, g2=1, gamma2=1, omega1=100, omega2=0), (0.01, 0.01), Severity.OK),
    (dict(g1=6, g2=0, gamma2=1, omega1=12, omega2=0), (0.5, 1 / 12), Severity.VIOLATION),
    (dict(g1=2, g2=0, gamma2=2, omega1=10, omega2=0), (0.2, 0.2), Severity.WARN),
])
def test_secular_check_examples(kw, ratios, severity):
    p = SystemParams(kappa=0.1, **kw)
    rep = secular_check(p, derive_dressed(p))
    assert (rep.coupling_ratio, rep.decay_ratio) == pytest.approx(ratios, rel=1e-14)
    assert rep.severity is severity


def test_secular_thresholds_configurable():
    p = SystemParams(g1=2, g2=0, gamma2=0, kappa=0.1, omega1=10, omega2=0)
    assert secular_check(p, derive_dressed(p), warn=0.25, violation=0.5).severity is Severity.OK
    with pytest.raises(ParameterError):
        secular_check(p, derive_dressed(p), warn=0.5, violation=0.2)
