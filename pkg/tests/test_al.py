import numpy as np
import pytest

from lattice_akns import al, conserved
from lattice_akns.algebra import make_rank_one_pair
from lattice_akns.errors import DegenerateMode, InconsistentDressing, SpectralPole

PAIR = make_rank_one_pair(1, 1, 1.0, "triple")


def scalar_state(bhat_values, b_values, boundary=al.PERIODIC):
    bhat = np.asarray(bhat_values, dtype=complex)[:, None, None]
    b = np.asarray(b_values, dtype=complex)[:, None, None]
    return al.AlState(len(bhat_values), 1, 1, bhat, b, boundary)


def oscillator_soliton(n_sites=16, core=8, xi=2.2, mu=0.4, peak=1.0):
    q = 1.0
    kappa_c = mu * q**4
    a_amp = (peak / 2) * xi ** (1 - core)
    c1 = a_amp * (1 - mu / xi) / (kappa_c / q**2)
    u_seed = (peak / 2) * mu ** (-core)
    params = al.AlDarbouxParams(big_q=q, pair=PAIR, kappa=kappa_c, zeta=kappa_c / q**2)
    return al.al_soliton_oscillator(params, [(c1, xi)], u_seed=u_seed)


class TestLax:
    def test_zero_fields(self):
        st = al.zero_state(4)
        assert np.allclose(al.al_lax(st, 0, 2.0), np.diag([2.0, 0.5]))

    def test_scalar_entries(self):
        st = scalar_state([1.0], [-1.0])
        assert np.allclose(al.al_lax(st, 0, 1.0), [[1, 1], [-1, 1]])

    def test_determinant(self):
        st = scalar_state([0.4 + 0.1j], [0.7])
        for z in (0.5, 2.0, 1j):
            det = np.linalg.det(al.al_lax(st, 0, z))
            expected = 1.0 - st.bhat[0, 0, 0] * st.b[0, 0, 0]
            assert abs(det - expected) < 1e-14

    def test_pole_at_origin(self):
        with pytest.raises(SpectralPole):
            al.al_lax(al.zero_state(3), 0, 0.0)


class TestVOperator:
    def test_standard_variant_vanishes_at_unit_z_zero_fields(self):
        st = al.zero_state(4)
        assert np.abs(al.al_v_operator(st, 0, al.VARIANT_AL, 1.0)).max() == 0

    def test_network_variant_zero_fields(self):
        st = al.zero_state(4)
        assert np.allclose(al.al_v_operator(st, 0, al.VARIANT_NETWORK, 2.0), np.diag([4.0, 0.25]))

    def test_soliton_zero_curvature(self):
        st = oscillator_soliton().state(16, 0.1, boundary=al.PERIODIC)
        resid = max(al.al_zero_curvature_residual(st, al.VARIANT_AL, [0.8, 1.5, 0.7j]))
        assert resid < 1e-10


class TestEom:
    def test_zero_fields(self):
        dbh, db = al.al_eom_rhs(al.zero_state(5), al.VARIANT_AL)
        assert np.abs(dbh).max() == 0 and np.abs(db).max() == 0

    def test_single_pulse_hand_values(self):
        n = 6
        bhat = np.zeros(n)
        bhat[0] = 1.0
        st = scalar_state(bhat, np.zeros(n))
        dbh, _ = al.al_eom_rhs(st, al.VARIANT_AL)
        assert dbh[0, 0, 0] == -2.0
        assert dbh[1, 0, 0] == 1.0 and dbh[n - 1, 0, 0] == 1.0
        assert np.abs(dbh[2:-1]).max() == 0

    def test_network_symmetric_reduction(self):
        rng = np.random.default_rng(0)
        b = 0.4 * (rng.uniform(-1, 1, 8) + 1j * rng.uniform(-1, 1, 8))
        st = scalar_state(b, b)
        dbh, db = al.al_eom_rhs(st, al.VARIANT_NETWORK)
        assert np.abs(dbh - db).max() < 1e-15
        bp, bm = np.roll(b, -1), np.roll(b, 1)
        expected = bp - bm - bp * b**2 + b**2 * bm
        assert np.abs(db[:, 0, 0] - expected).max() < 1e-14

    def test_zero_curvature_random_both_variants(self):
        rng = np.random.default_rng(1)
        st = al.random_state(rng, 8, scale=0.4)
        zs = rng.uniform(0.5, 2.0, 5) * np.exp(1j * rng.uniform(0, 2 * np.pi, 5))
        for variant in (al.VARIANT_AL, al.VARIANT_NETWORK):
            assert max(al.al_zero_curvature_residual(st, variant, zs)) < 1e-11


class TestEvolve:
    def test_zero_state_unchanged(self):
        final = al.al_evolve(al.zero_state(6), al.VARIANT_AL, 1e-2, 30)[-1][1]
        assert np.abs(final.bhat).max() == 0

    def test_symmetric_reduction_preserved(self):
        rng = np.random.default_rng(2)
        b = 0.3 * (rng.uniform(-1, 1, 8) + 1j * rng.uniform(-1, 1, 8))
        st = scalar_state(b, b)
        final = al.al_evolve(st, al.VARIANT_NETWORK, 1e-3, 500)[-1][1]
        assert np.abs(final.bhat - final.b).max() < 1e-10

    def test_soliton_trace_conservation(self):
        st = oscillator_soliton().state(16, 0.0, boundary=al.PERIODIC)
        final = al.al_evolve(st, al.VARIANT_AL, 1e-3, 300)[-1][1]
        for z in (0.8, 1.5):
            t0 = conserved.transfer_trace(st, z)
            t1 = conserved.transfer_trace(final, z)
            assert abs(t1 - t0) / abs(t0) < 1e-6


class TestFundamentalSoliton:
    def test_zero_seeds_zero_state(self):
        params = al.AlDarbouxParams(big_q=1.1, pair=PAIR)
        st = al.al_soliton_fundamental(params, 8)
        assert np.abs(st.bhat).max() == 0 and np.abs(st.b).max() == 0

    def test_recursion_against_product_form(self):
        params = al.AlDarbouxParams(big_q=1.1, pair=PAIR, a1=0.05, d1=0.04, bhat1=0.3, b1=0.2)
        n = 10
        a, d, bh, b = al.al_fundamental_scalars(params, 1, n)
        q2 = params.big_q**2
        # defining relations, site by site
        for i in range(1, n):
            assert abs(bh[i - 1] - q2 * (1 + d[i]) * bh[i]) < 1e-13
            assert abs(b[i - 1] - (1 + a[i]) * b[i] / q2) < 1e-13
        # product closed form for the hatted field
        prods = np.cumprod(1 + d[1:])
        expected = bh[0] * q2 ** (-np.arange(1, n)) / prods
        assert np.abs(bh[1:] - expected).max() < 1e-13

    def test_gauge_identity(self):
        params = al.AlDarbouxParams(big_q=1.1, pair=PAIR, a1=0.05, d1=0.04, bhat1=0.3, b1=0.2)
        resid = al.al_darboux_identity_residual(params, 10, [0.5, 1.0, 2.0, 1j, 1 + 1j])
        assert resid < 1e-9


class TestOscillatorSoliton:
    def test_dispersion_value(self):
        sol = al.al_soliton_oscillator(
            al.AlDarbouxParams(big_q=1.0, pair=PAIR, kappa=0.4, zeta=0.4), [(1.0, 2.0)], u_seed=1.0
        )
        # base 2 carries rate (sqrt2 - 1/sqrt2)^2 = 1/2
        lam = (np.sqrt(2.0) - 1 / np.sqrt(2.0)) ** 2
        assert abs(lam - 0.5) < 1e-15
        h0 = sol._mode_sum(sol.heat_modes, 3, 0.0)
        h1 = sol._mode_sum(sol.heat_modes, 3, 1.0)
        assert abs(h1 / h0 - np.exp(0.5)) < 1e-12

    def test_zero_heat_data_means_zero_upper_field(self):
        sol = al.al_soliton_oscillator(
            al.AlDarbouxParams(big_q=1.0, pair=PAIR, kappa=0.4, zeta=0.4), [(0.0, 2.0)], u_seed=1.0
        )
        st = sol.state(10, 0.3)
        assert np.abs(st.bhat).max() == 0

    def test_constraint_mismatch_rejected(self):
        with pytest.raises(InconsistentDressing):
            al.al_soliton_oscillator(
                al.AlDarbouxParams(big_q=1.0, pair=PAIR, kappa=0.4, zeta=0.3), [(1.0, 2.0)]
            )

    def test_resonant_base_rejected(self):
        with pytest.raises(DegenerateMode):
            al.al_soliton_oscillator(
                al.AlDarbouxParams(big_q=1.0, pair=PAIR, kappa=0.4, zeta=0.4), [(1.0, 0.4)]
            )

    def test_flow_residual(self):
        sol = oscillator_soliton()
        ns = np.arange(1, 17)
        t = 0.3
        bh, b, dbh, db = sol.scalars_with_derivative(ns, t)
        bhp, bp, _, _ = sol.scalars_with_derivative(ns + 1, t)
        bhm, bm, _, _ = sol.scalars_with_derivative(ns - 1, t)
        rh = dbh - (bhp + bhm - 2 * bh - bh * b * bhm - bhp * b * bh)
        rb = db - (-bp - bm + 2 * b + bp * bh * b + b * bh * bm)
        assert max(np.abs(rh).max(), np.abs(rb).max()) < 1e-8


def test_vanishing_boundary_validation():
    sol = oscillator_soliton(n_sites=16)
    st = sol.state(16, 0.0, boundary=al.VANISHING)
    with pytest.raises(ValueError):
        al.validate_vanishing(st, tol=1e-10)  # edges are only ~1e-3 here
    al.validate_vanishing(st, tol=1e-2)


def test_hamiltonian_diagnostic_zero_fields():
    assert al.al_hamiltonian(al.zero_state(5)) == 0


def test_fundamental_singular_step_reported():
    # seeds driving 1 + kappa*d through zero on the first step
    params = al.AlDarbouxParams(big_q=1.0, pair=PAIR, a1=0.0, d1=-1.0, bhat1=0.0, b1=0.0)
    with pytest.raises(al.SingularDressing):
        al.al_fundamental_scalars(params, 1, 6)
