import numpy as np
import pytest

from lattice_akns import dnls
from lattice_akns.darboux import soliton_type1, type1_params
from lattice_akns.errors import BlowUp, FlowUnsupported, InconsistentDressing


def test_lax_zero_fields_is_identity_at_origin():
    st = dnls.zero_state(4)
    assert np.allclose(dnls.lax_matrix(st, 0, 0.0), np.eye(2))


def test_lax_scalar_hand_value():
    st = dnls.zero_state(3).with_fields(
        np.full((3, 1, 1), 2.0 + 0j), np.full((3, 1, 1), 3.0 + 0j)
    )
    # composite block is 1 + 2*3 = 7
    assert np.allclose(dnls.lax_matrix(st, 1, 0.0), [[7, 2], [3, 1]])


def test_lax_block_zero_fields():
    st = dnls.zero_state(3, n_dim=1, m_dim=2)
    assert np.allclose(dnls.lax_matrix(st, 0, 5.0), np.diag([6.0, 1.0, 1.0]))


def test_v1_zero_fields_is_half_grading():
    st = dnls.zero_state(5, n_dim=2, m_dim=2)
    v = dnls.v_operator(st, 0, 1, 2.0)
    assert np.allclose(v, np.diag([1.0, 1.0, -1.0, -1.0]))


def test_v2_zero_fields():
    st = dnls.zero_state(5)
    assert np.allclose(dnls.v_operator(st, 0, 2, 2.0), np.diag([2.0, -2.0]))


def test_v_operator_unsupported_flow():
    st = dnls.zero_state(4)
    with pytest.raises(FlowUnsupported):
        dnls.v_operator(st, 0, 4, 1.0)


def test_eom_zero_fields_is_zero():
    st = dnls.zero_state(6)
    for alpha in (1, 2):
        dx, dy = dnls.eom_rhs(st, alpha)
        assert np.abs(dx).max() == 0 and np.abs(dy).max() == 0


def test_eom_single_site_pulse_hand_values():
    n = 6
    x = np.zeros((n, 1, 1), dtype=complex)
    x[0] = 1.0
    st = dnls.zero_state(n).with_fields(x, np.zeros((n, 1, 1), dtype=complex))
    dx, dy = dnls.eom_rhs(st, 1)
    assert dx[0, 0, 0] == -1.0  # x_1 - x_0 with x_1 = 0
    assert dx[n - 1, 0, 0] == 1.0  # x_0 wraps in as the forward neighbor
    assert np.abs(dx[1:-1]).max() == 0
    assert np.abs(dy).max() == 0


def test_eom_unsupported_flow():
    with pytest.raises(FlowUnsupported):
        dnls.eom_rhs(dnls.zero_state(4), 3)


def test_zero_curvature_zero_fields():
    st = dnls.zero_state(5)
    assert max(dnls.zero_curvature_residual(st, 1, [0.5, 2.0, 1j])) == 0


def test_zero_curvature_random_scalar_first_flow():
    rng = np.random.default_rng(0)
    st = dnls.random_state(rng, 8, scale=0.7)
    lams = rng.uniform(-1, 1, 5) + 1j * rng.uniform(-1, 1, 5)
    assert max(dnls.zero_curvature_residual(st, 1, lams)) < 1e-12


def test_zero_curvature_random_block_second_flow():
    rng = np.random.default_rng(1)
    st = dnls.random_state(rng, 8, n_dim=1, m_dim=2, scale=0.7)
    lams = rng.uniform(-1, 1, 5) + 1j * rng.uniform(-1, 1, 5)
    assert max(dnls.zero_curvature_residual(st, 2, lams)) < 1e-11


def test_zero_curvature_general_theta():
    rng = np.random.default_rng(2)
    st = dnls.random_state(rng, 6, scale=0.5, theta=0.4 + 0.2j)
    assert max(dnls.zero_curvature_residual(st, 2, [0.8, -1.2 + 0.5j])) < 1e-12


def frozen_soliton_derivative(xi, kappa, d1, x1, a1, y1, n, t, alpha):
    """Independent oracle: hand-differentiated closed forms.

    x = A E / (C E + D) with E = xi^(n-1) exp(L t) gives
    dx/dt = A D L E / (C E + D)^2, and similarly for y on the reversed
    factor G = xi^(-n) exp(-L t).
    """
    lam = (xi - 1.0) ** alpha
    e = xi ** (n - 1) * np.exp(lam * t)
    a_coef, c_coef, d_coef = (xi - 1) * x1, xi - 1 + kappa * d1, -kappa * d1
    dx = a_coef * d_coef * lam * e / (c_coef * e + d_coef) ** 2
    g = xi ** (-n) * np.exp(-lam * t)
    a2, c2, d2 = (xi - 1) * (1 - kappa * a1) * y1, xi - 1 + kappa * a1, -kappa * a1
    dy = a2 * d2 * (-lam) * g / (c2 * g + d2) ** 2
    return dx, dy


def test_soliton_rhs_matches_hand_derivative():
    n_sites = 12
    params = type1_params(np.exp(2j * np.pi / n_sites), 1.0, 0.1, 0.7)
    t = 0.2
    st = soliton_type1(params, n_sites, t, require_periodic=True)
    dx, dy = dnls.eom_rhs(st, 1)
    ns = np.arange(1, n_sites + 1)
    ox, oy = frozen_soliton_derivative(
        params.xi, params.kappa, params.d1, params.x1, params.a1, params.y1, ns, t, 1
    )
    assert np.abs(dx[:, 0, 0] - ox).max() < 1e-9
    assert np.abs(dy[:, 0, 0] - oy).max() < 1e-9


def test_evolve_zero_state_unchanged():
    st = dnls.zero_state(6)
    final = dnls.evolve(st, 1, 1e-2, 50)[-1][1]
    assert np.abs(final.x).max() == 0 and np.abs(final.y).max() == 0


def test_evolve_tracks_closed_form():
    n_sites = 12
    params = type1_params(np.exp(2j * np.pi / n_sites), 1.0, 0.1, 0.7)
    st = soliton_type1(params, n_sites, 0.0, require_periodic=True)
    t_final = 0.5
    final = dnls.evolve(st, 1, 1e-3, 500)[-1][1]
    ref = soliton_type1(params, n_sites, t_final, require_periodic=True)
    assert np.abs(final.x - ref.x).max() < 1e-6
    assert np.abs(final.y - ref.y).max() < 1e-6


def test_evolve_blowup_detected():
    n = 4
    big = np.full((n, 1, 1), 50.0 + 0j)
    st = dnls.zero_state(n).with_fields(big, big)
    with pytest.raises(BlowUp):
        dnls.evolve(st, 1, 1.0, 50)


def test_dressed_recursion_rejects_inconsistent_blocks():
    rng = np.random.default_rng(3)
    st = dnls.random_state(rng, 6, scale=0.5)
    kmats = rng.normal(size=(6, 2, 2)) + 1j * rng.normal(size=(6, 2, 2))
    with pytest.raises(InconsistentDressing):
        dnls.dressed_v_from_recursion(st, kmats, 1)


def test_states_are_write_protected():
    st = dnls.zero_state(4)
    with pytest.raises(ValueError):
        st.x[0, 0, 0] = 1.0
