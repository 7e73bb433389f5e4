import numpy as np
import pytest

from lattice_akns import conserved, dnls
from lattice_akns.algebra import poly_mul
from lattice_akns.darboux import soliton_type1, type1_params
from lattice_akns.errors import NotNormalized, UnvalidatedOrder


def test_transfer_single_site_is_the_lax_poly():
    rng = np.random.default_rng(0)
    st = dnls.random_state(rng, 1, scale=0.5)
    t = conserved.transfer_poly(st)
    assert t.distance(dnls.lax_poly(st, 0)) == 0


def test_transfer_two_site_zero_fields():
    st = dnls.zero_state(2)
    t = conserved.transfer_poly(st)
    # (lam Sigma+ + I)^2 = [[ (lam+1)^2, 0], [0, 1]]
    oracle = poly_mul(dnls.lax_poly(st, 1), dnls.lax_poly(st, 0))
    assert t.distance(oracle) == 0
    assert np.allclose(t.coeff(0), np.diag([1.0, 1.0]))
    assert np.allclose(t.coeff(1), np.diag([2.0, 0.0]))
    assert np.allclose(t.coeff(2), np.diag([1.0, 0.0]))


def test_transfer_eval_matches_numeric_product():
    rng = np.random.default_rng(1)
    st = dnls.random_state(rng, 6, n_dim=1, m_dim=2, scale=0.6)
    t = conserved.transfer_poly(st)
    for lam in (0.4, -1.2 + 0.7j, 2.0j):
        direct = conserved.transfer_trace(st, lam)
        assert abs(np.trace(t.eval(lam)) - direct) < 1e-11 * max(1.0, abs(direct))


def test_zero_field_charges():
    for n_dim in (1, 2):
        st = dnls.zero_state(5, n_dim=n_dim, m_dim=n_dim)
        h1, h2, h3, h4 = conserved.closed_form_charges(st)
        n, w = 5, n_dim
        assert abs(h1 - n * w) < 1e-14
        assert abs(h2 + n * w / 2) < 1e-14
        assert abs(h3 - n * w / 3) < 1e-14
        assert abs(h4 + n * w / 4) < 1e-14


def test_h2_against_trace_coefficients_three_sites():
    rng = np.random.default_rng(2)
    st = dnls.random_state(rng, 3, scale=0.8)
    tau = conserved.tau_coefficients(st, up_to=2)
    h = conserved.closed_form_charges(st)
    assert abs(h[1] - (tau[2] - 0.5 * h[0] ** 2)) < 1e-9


@pytest.mark.parametrize("dims", [(1, 1), (1, 2)])
def test_log_expansion_identities(dims):
    rng = np.random.default_rng(3)
    st = dnls.random_state(rng, 8, n_dim=dims[0], m_dim=dims[1], scale=0.6)
    tau = conserved.tau_coefficients(st)
    h1, h2, h3, h4 = conserved.closed_form_charges(st)
    assert abs(tau[0] - 1.0) < 1e-12
    assert abs(h1 - tau[1]) < 1e-9
    assert abs(h2 - (tau[2] - 0.5 * h1**2)) < 1e-9
    assert abs(h3 - (tau[3] - h1 * h2 - h1**3 / 6)) < 1e-9
    assert abs(h4 - (tau[4] - h1 * h3 - 0.5 * h2**2 - 0.5 * h1**2 * h2 - h1**4 / 24)) < 1e-9


def test_tau_requires_width_one():
    st = dnls.zero_state(4, n_dim=2, m_dim=2)
    with pytest.raises(NotNormalized):
        conserved.tau_coefficients(st)


def test_charge_recursion_trivial_case():
    h = conserved.charge_recursion([1.0, 0.0, 3.5 + 1j, 0.0, 0.0], up_to=2)
    assert h[0] == 0.0
    assert h[1] == 3.5 + 1j


def test_charge_recursion_order_four_formula():
    rng = np.random.default_rng(4)
    tau = [1.0] + list(rng.normal(size=4) + 1j * rng.normal(size=4))
    h = conserved.charge_recursion(tau, up_to=4)
    h1 = tau[1]
    h2 = tau[2] - 0.5 * h1**2
    h3 = tau[3] - h1 * h2 - h1**3 / 6
    h4 = tau[4] - h1 * h3 - 0.5 * h2**2 - 0.5 * h1**2 * h2 - h1**4 / 24
    assert np.allclose(h, (h1, h2, h3, h4))


def test_charge_recursion_cross_method():
    rng = np.random.default_rng(5)
    st = dnls.random_state(rng, 9, scale=0.6)
    tau = conserved.tau_coefficients(st)
    from_tau = conserved.charge_recursion(tau, up_to=4)
    closed = conserved.closed_form_charges(st)
    assert max(abs(a - b) for a, b in zip(from_tau, closed)) < 1e-9


def test_charge_recursion_unvalidated_order():
    with pytest.raises(UnvalidatedOrder):
        conserved.charge_recursion([0.0] * 7, up_to=5)


def test_experimental_weights_agree_through_order_five():
    rng = np.random.default_rng(6)
    tau = [1.0] + list(rng.normal(size=6))
    a = conserved.charge_recursion(tau, up_to=5, experimental_weight="product")
    b = conserved.charge_recursion(tau, up_to=5, experimental_weight="max")
    assert np.allclose(a, b)
    # the product weight reproduces the validated relations
    v = conserved.charge_recursion(tau, up_to=4)
    assert np.allclose(a[:4], v)
    # from order six on, repeated exponents separate the two weights
    a6 = conserved.charge_recursion(tau, up_to=6, experimental_weight="product")
    b6 = conserved.charge_recursion(tau, up_to=6, experimental_weight="max")
    assert abs(a6[5] - b6[5]) > 1e-12


def test_charges_conserved_under_flow():
    n_sites = 12
    params = type1_params(np.exp(2j * np.pi / n_sites), 1.0, 0.1, 0.7)
    st = soliton_type1(params, n_sites, require_periodic=True)
    final = dnls.evolve(st, 1, 1e-3, 300)[-1][1]
    h0 = conserved.closed_form_charges(st)
    h1 = conserved.closed_form_charges(final)
    assert max(abs(a - b) for a, b in zip(h0, h1)) < 1e-8


def test_charge_report_serialization():
    rng = np.random.default_rng(7)
    st = dnls.random_state(rng, 5, scale=0.5)
    rep = conserved.local_charges(st, lambda_samples=[0.5, 1.0 + 0.3j])
    d = rep.to_json_dict()
    assert set(d).issuperset({"h1", "h2", "h3", "h4", "tau0", "tau4", "trace_samples"})
    assert len(d["trace_samples"]) == 2
    h2 = complex(*d["h2"])
    assert h2 == rep.h[1]
