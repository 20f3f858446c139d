import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tripleflow import energetics as en
from tripleflow.errors import BarrierBlowup
from tripleflow.params import GSpec, ModelParams


def _params(**kw):
    return ModelParams(**kw)


# ---- barrier ------------------------------------------------------------


def test_ell_frozen_values():
    assert en.ell(0.5) == 0.0
    assert en.ell(-0.5) == pytest.approx(0.5)
    assert en.ell_prime(0.3) == 0.0
    assert en.ell_prime(-0.5) == pytest.approx(-3.0)


def test_ell_pole_raises():
    with pytest.raises(BarrierBlowup):
        en.ell(-1.0)
    with pytest.raises(BarrierBlowup):
        en.ell(np.array([0.2, -1.5]))


@given(st.floats(min_value=-0.999, max_value=5.0))
@settings(max_examples=200, deadline=None)
def test_ell_nonnegative_and_continuous_at_zero(x):
    v = en.ell(x)
    assert v >= 0.0
    if x >= 0.0:
        assert v == 0.0


def test_ell_prime_matches_fd():
    xs = np.linspace(-0.9, 1.5, 41)
    h = 1e-7
    fd = (en.ell(xs + h) - en.ell(xs - h)) / (2 * h)
    np.testing.assert_allclose(en.ell_prime(xs), fd, atol=2e-6)


# ---- double well --------------------------------------------------------


def test_w_dw_frozen_values():
    assert en.w_dw(0.5, 0.1) == pytest.approx(1.125)
    assert en.w_dw(0.0, 0.1) == 0.0
    assert en.w_dw(1.0, 0.1) == 0.0
    # just outside [0, 1] the barrier kicks in on top of the quartic
    assert en.w_dw(1.05, 0.1) == pytest.approx(18 * (1.05 * 0.05) ** 2 + 0.05)


def test_w_dw_pole():
    with pytest.raises(BarrierBlowup):
        en.w_dw(-0.1, 0.1)


def test_w_dw_prime_and_second_match_fd():
    delta = 0.0625
    # stay clear of phi = 0 and 1, where the barrier switches on and the
    # second derivative is one-sided
    phi = np.concatenate(
        [np.linspace(-0.049, -0.004, 8), np.linspace(0.004, 0.996, 40),
         np.linspace(1.004, 1.049, 8)]
    )
    h = 1e-6
    fd1 = (en.w_dw(phi + h, delta) - en.w_dw(phi - h, delta)) / (2 * h)
    np.testing.assert_allclose(en.w_dw_prime(phi, delta), fd1, atol=5e-5, rtol=1e-6)
    fd2 = (
        en.w_dw(phi + h, delta) - 2 * en.w_dw(phi, delta) + en.w_dw(phi - h, delta)
    ) / h**2
    np.testing.assert_allclose(en.w_dw_second(phi, delta), fd2, atol=5e-2, rtol=1e-4)


def test_stabilization_bound_physical_range():
    assert en.stabilization_bound(0.0625) == pytest.approx(36.0)
    # widening into the barrier must only increase the bound
    assert en.stabilization_bound(0.0625, lo=-0.03) > 36.0


# ---- projection and triple well -----------------------------------------


def test_project_frozen():
    sig = (0.5, 0.5, 0.5)
    st_ = 1.0 / 6.0
    p = en.project_P((0.2, 0.3, 0.4), sig, st_)
    np.testing.assert_allclose(p, (0.7 / 3, 1.0 / 3, 1.3 / 3), rtol=1e-14)
    # plane points are fixed points
    q = en.project_P((0.2, 0.3, 0.5), sig, st_)
    np.testing.assert_allclose(q, (0.2, 0.3, 0.5), atol=1e-15)
    # the origin projects to the Sigma-weighted center
    z = en.project_P((0.0, 0.0, 0.0), sig, st_)
    np.testing.assert_allclose(z, (1 / 3, 1 / 3, 1 / 3), rtol=1e-14)


def test_projected_triple_sums_to_one():
    rng = np.random.default_rng(7)
    sig = (0.25, 0.75, 1.25)
    st_ = 15.0 / 92.0
    for _ in range(50):
        tri = tuple(rng.uniform(-0.2, 1.2, size=3))
        p = en.project_P(tri, sig, st_)
        assert sum(p) == pytest.approx(1.0, abs=1e-12)


def test_triple_well_vanishes_at_pure_phases():
    sig = (0.25, 0.75, 1.25)
    st_ = 15.0 / 92.0
    for pure in [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)]:
        assert en.W(pure, 0.1, sig, st_) == pytest.approx(0.0, abs=1e-14)


def test_triple_well_symmetric_midpoint():
    sig = (0.5, 0.5, 0.5)
    st_ = 1.0 / 6.0
    assert en.W((0.5, 0.5, 0.0), 0.1, sig, st_) == pytest.approx(1.125)


def test_dw_matches_fd_off_plane():
    # independent oracle: central differences of W, including off-plane points
    rng = np.random.default_rng(3)
    sig = (0.25, 0.75, 1.25)
    st_ = 15.0 / 92.0
    delta = 0.125
    h = 1e-6
    for _ in range(100):
        # plane-bound triple plus a small off-plane excursion, the regime the
        # solver actually visits
        tri = rng.dirichlet([2.0, 2.0, 2.0]) + rng.uniform(-0.03, 0.03, size=3)
        grad = en.dW_dphi(tuple(tri), delta, sig, st_)
        for j in range(3):
            up = tri.copy()
            dn = tri.copy()
            up[j] += h
            dn[j] -= h
            fd = (en.W(tuple(up), delta, sig, st_) - en.W(tuple(dn), delta, sig, st_)) / (
                2 * h
            )
            assert grad[j] == pytest.approx(fd, abs=1e-6, rel=1e-6)


@given(
    st.tuples(
        st.floats(min_value=-0.05, max_value=1.05),
        st.floats(min_value=-0.05, max_value=1.05),
        st.floats(min_value=-0.05, max_value=1.05),
    )
)
@settings(max_examples=200, deadline=None)
def test_dw_sigma_weighted_null(tri):
    """sum_i dW_i / Sigma_i vanishes identically, even off the plane."""
    sig = (0.25, 0.75, 1.25)
    st_ = 15.0 / 92.0
    try:
        g = en.dW_dphi(tri, 0.125, sig, st_)
    except BarrierBlowup:
        return
    total = sum(g[i] / sig[i] for i in range(3))
    scale = max(1.0, max(abs(v) for v in g))
    assert abs(total) < 1e-11 * scale


# ---- localizer, drag, reactions -----------------------------------------


def test_q_localizer_frozen():
    assert en.q_localizer((0.5, 0.0, 0.5)) == pytest.approx(1.5)
    assert en.q_localizer((1.0, 0.0, 0.0)) == 0.0
    # equipartition identity on a 1-3 interface: q = sqrt(2 w_dw)
    phi = np.linspace(0.05, 0.95, 19)
    q = en.q_localizer((phi, np.zeros_like(phi), 1.0 - phi))
    np.testing.assert_allclose(q, np.sqrt(2.0 * en.w_dw(phi, 1e-3)), rtol=1e-12)


def test_drag_frozen():
    assert en.drag(1.0, 5.0) == 0.0
    assert en.drag(0.0, 5.0) == 5.0
    assert en.drag(0.5, 5.0) == 2.5
    assert en.drag(1.2, 5.0) == 0.0
    assert en.drag(-0.1, 5.0) == 5.0


def test_reaction_rate_default_g():
    p = _params(g=GSpec(a=1.0, c0=0.0), c_star=1.0)
    assert en.reaction_rate_r(0.5, p) == pytest.approx(0.75)
    assert en.reaction_rate_r(1.0, p) == pytest.approx(1.0)
    assert en.reaction_rate_r(0.0, p) == 0.0


def test_reaction_R1_frozen():
    p = _params(eps=0.01, alpha=0.0, g=GSpec(a=1.0, c0=0.0), c_star=1.0)
    r = en.reaction_R1((0.5, 0.0, 0.5), 0.5, mu1=2.0, mu3=2.0, params=p)
    assert float(r.R1) == pytest.approx(-112.5)
    assert float(r.R3) == pytest.approx(112.5)
    assert float(r.Rc) == pytest.approx(-112.5)
    assert float(r.Rf) == pytest.approx(-112.5)
    assert float(r.R2) == 0.0


def test_reaction_R1_mu_term_uses_alpha_tilde():
    p = _params(eps=0.01, alpha=0.0)
    # alpha == 0 means alpha_t == eps, so a potential difference of 1 adds
    # -(q/eps)*eps = -q to R1
    r0 = en.reaction_R1((0.5, 0.0, 0.5), 0.0, mu1=1.0, mu3=0.0, params=p)
    assert float(r0.R1) == pytest.approx(-1.5)


# ---- mixture quantities -------------------------------------------------


def test_delta_modified_pure_solid():
    p = _params(delta=0.01, rho1=1.0, rho2=0.8, rho3=1.0)
    m = en.delta_modified((0.0, 0.0, 1.0), p)
    assert float(m.phi_f_tilde) == pytest.approx(0.02)
    assert float(m.phi_c_tilde) == pytest.approx(0.01)
    assert float(m.rho_f_tilde) == pytest.approx(1.8 * 0.01)
    assert float(m.rho) == pytest.approx(1.0)
    assert float(m.phi_f) == 0.0


def test_delta_modified_pure_fluid1():
    p = _params(delta=0.01, rho1=1.0, rho2=0.8, rho3=1.0)
    m = en.delta_modified((1.0, 0.0, 0.0), p)
    assert float(m.phi_f_tilde) == pytest.approx(1.0)
    assert float(m.rho_f_tilde) == pytest.approx(1.0 + 1.8 * 0.01)
    assert float(m.phi_c_tilde) == pytest.approx(1.01)


def test_delta_modified_viscosity_equal_gammas():
    p = _params(delta=0.01, gamma1=2.0, gamma2=2.0, gamma3=2.0)
    m = en.delta_modified((1 / 3, 1 / 3, 1 / 3), p)
    assert float(m.gamma_tilde) == pytest.approx(2.0 / 1.03)


def test_delta_modified_strictly_positive_everywhere():
    rng = np.random.default_rng(11)
    p = _params(delta=0.05, rho2=0.3, gamma2=0.1, gamma3=10.0)
    for _ in range(200):
        tri = tuple(rng.dirichlet([1.0, 1.0, 1.0]))
        m = en.delta_modified(tri, p)
        assert float(m.phi_f_tilde) > 0.0
        assert float(m.rho_f_tilde) > 0.0
        assert float(m.phi_c_tilde) > 0.0
        assert float(m.gamma_tilde) > 0.0
