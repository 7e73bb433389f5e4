import math

import numpy as np
import pytest

from lattice_akns import glm
from lattice_akns.algebra import make_rank_one_pair
from lattice_akns.errors import DegenerateMode, ModeOverflow, SingularGlm

PAIR = make_rank_one_pair(1, 1, 1.0, "triple")


def scaled_mode(lam_hat, lam, window, amp_hat=1.0, amp=1.0, full=True):
    """Mode with amplitudes normalized so data peaks near O(1) on the window."""
    factor = 2 * window if full else window
    return glm.GlmMode(
        amp_hat * np.exp(-factor * lam_hat) * PAIR.bhat,
        lam_hat,
        amp * np.exp(-factor * lam) * PAIR.b,
        lam,
    )


class TestDifferenceOps:
    def test_small_window_layout(self):
        ops = glm.build_difference_ops(1)
        assert np.array_equal(ops.d.real, [[-1, 1, 0], [0, -1, 1], [0, 0, -1]])
        assert np.array_equal(ops.dstar.real, ops.d.real.T)

    def test_second_power_interior_rows(self):
        ops = glm.build_difference_ops(3)
        sq = ops.d @ ops.d
        assert np.array_equal(sq[0, :3].real, [1, -2, 1])
        assert np.array_equal(sq[3, 3:6].real, [1, -2, 1])

    @pytest.mark.parametrize("alpha", [1, 2, 3, 4])
    def test_powers_match_binomial_closed_form(self, alpha):
        ops = glm.build_difference_ops(4)
        powered = np.linalg.matrix_power(ops.d, alpha)
        powered_star = np.linalg.matrix_power(ops.dstar, alpha)
        assert np.array_equal(powered, glm.difference_power_closed_form(4, alpha))
        assert np.array_equal(powered_star, glm.difference_power_closed_form(4, alpha, star=True))

    def test_right_action_shifts_columns(self):
        rng = np.random.default_rng(0)
        n, alpha = 4, 3
        size = 2 * n + 1
        f = rng.normal(size=(size, size))
        ops = glm.build_difference_ops(n)
        prod = f @ np.linalg.matrix_power(ops.dstar, alpha)
        for i in range(size):
            for j in range(size):
                expected = sum(
                    (-1) ** (alpha - k) * math.comb(alpha, k) * f[i, j + k]
                    for k in range(alpha + 1)
                    if j + k < size
                )
                assert abs(prod[i, j] - expected) < 1e-12


class TestDispersions:
    def test_zero_exponent(self):
        mode = glm.GlmMode(PAIR.bhat, 0.0, PAIR.b, 0.5)
        lam_hat, _ = glm.scheme_dispersions(mode, glm.FORWARD_BACKWARD, 1.0, 2)
        assert lam_hat == 0

    def test_forward_first_flow(self):
        mode = glm.GlmMode(PAIR.bhat, 0.3, PAIR.b, np.log(2.0))
        _, lam = glm.scheme_dispersions(mode, glm.FORWARD_BACKWARD, 1.0, 1)
        assert abs(lam - 1.0) < 1e-15

    def test_symmetric(self):
        mode = glm.GlmMode(PAIR.bhat, np.log(2.0), PAIR.b, 0.3)
        lam_hat, _ = glm.scheme_dispersions(mode, glm.SYMMETRIC, 1.0, 1)
        assert abs(lam_hat - 0.5) < 1e-14


class TestHankelData:
    def test_linear_residual_both_schemes(self):
        window = 8
        modes = [scaled_mode(0.65, 0.55, window), scaled_mode(0.8, 0.6, window, 0.4, 0.7)]
        for scheme in (glm.FORWARD_BACKWARD, glm.SYMMETRIC):
            system = glm.build_hankel_data(modes, scheme, 1.0, window, alpha=1, time=0.4)
            assert system.linear_residual() < 1e-12

    def test_forward_higher_flow_residual(self):
        window = 6
        system = glm.build_hankel_data(
            [scaled_mode(0.5, 0.45, window)], glm.FORWARD_BACKWARD, 1.0, window, alpha=3, time=0.2
        )
        assert system.linear_residual() < 1e-12

    def test_overflow_guard(self):
        with pytest.raises(ModeOverflow):
            glm.build_hankel_data(
                [glm.GlmMode(PAIR.bhat, 1.5, PAIR.b, 1.5)], glm.FORWARD_BACKWARD, 1.0, 14
            )

    def test_needs_modes(self):
        with pytest.raises(DegenerateMode):
            glm.build_hankel_data([], glm.FORWARD_BACKWARD, 1.0, 4)

    def test_json_round_trip(self):
        window = 6
        system = glm.build_hankel_data(
            [scaled_mode(0.6, 0.5, window)], glm.SYMMETRIC, 0.8 + 0.1j, window, 1, 0.3
        )
        rebuilt = glm.glm_system_from_json(system.to_json_dict())
        assert np.abs(rebuilt.fhat - system.fhat).max() == 0
        assert np.abs(rebuilt.f - system.f).max() == 0


class TestSolve:
    def test_zero_data(self):
        system = glm.build_hankel_data(
            [glm.GlmMode(0 * PAIR.bhat, 0.6, 0 * PAIR.b, 0.5)], glm.FORWARD_BACKWARD, 1.0, 4
        )
        sol = glm.solve_glm(system)
        assert max(np.abs(sol.a).max(), np.abs(sol.b).max(), np.abs(sol.c).max(), np.abs(sol.d).max()) == 0
        assert sol.factorization_residual == 0

    def test_single_mode_matches_closed_form(self):
        window = 14
        mode = scaled_mode(0.65, 0.55, window)
        system = glm.build_hankel_data([mode], glm.FORWARD_BACKWARD, 1.0, window, 1, 0.3)
        sol = glm.solve_glm(system)
        kappa = complex(mode.amp_hat[0, 0] * mode.amp[0, 0])
        bcf, ccf = glm.one_soliton_closed_form(mode, kappa, window, 0.3)
        size = 2 * window + 1
        mask = np.triu(np.ones((size, size), dtype=bool))
        assert np.abs((sol.b - bcf)[:, :, 0, 0])[mask].max() < 1e-10
        assert np.abs((sol.c - ccf)[:, :, 0, 0])[mask].max() < 1e-10

    def test_two_mode_factorization_and_support(self):
        window = 10
        modes = [scaled_mode(0.65, 0.55, window), scaled_mode(0.8, 0.6, window, 0.4, 0.7)]
        for scheme in (glm.FORWARD_BACKWARD, glm.SYMMETRIC):
            sol = glm.solve_glm(glm.build_hankel_data(modes, scheme, 1.0, window, 1, 0.2))
            assert sol.factorization_residual < 1e-10
            # upper-block support is exact by construction
            size = 2 * window + 1
            for wi in range(size):
                for wj in range(wi):
                    assert np.abs(sol.b[wi, wj]).max() == 0
            # the remainder is strictly below the block diagonal
            dim = sol.n_dim + sol.m_dim
            for wi in range(size):
                blk = sol.kminus_big[wi * dim : (wi + 1) * dim, wi * dim :]
                assert np.abs(blk).max() == 0

    def test_singular_window_detected(self):
        # constant antidiagonal data with amplitude product 1/4 makes the
        # width-2 row operator [[1/2, -1/2], [-1/2, 1/2]] exactly singular
        mode = glm.GlmMode(0.5 * PAIR.bhat, 0.0, 0.5 * PAIR.b, 0.0)
        system = glm.build_hankel_data([mode], glm.FORWARD_BACKWARD, 1.0, 4)
        with pytest.raises(SingularGlm):
            glm.solve_glm(system)


class TestClosedForm:
    def test_geometric_factor_arithmetic(self):
        # lam = lam_hat = ln 2, kappa = 1, k = j = 1, t = 0
        mode = glm.GlmMode(PAIR.bhat, np.log(2.0), PAIR.b, np.log(2.0))
        b, _ = glm.one_soliton_closed_form(mode, 1.0, 2, 0.0)
        # h_1 = (1/16)/(1/4 - 1)^2 = 1/9, so B_11 = -(1/4)/(1 - 1/9) = -9/32
        assert abs(b[3, 3, 0, 0] - (-9.0 / 32.0)) < 1e-14

    def test_decay_limit(self):
        window = 12
        mode = scaled_mode(0.7, 0.6, window)
        b, _ = glm.one_soliton_closed_form(
            mode, complex(mode.amp_hat[0, 0] * mode.amp[0, 0]), window, 0.0
        )
        k = window  # far from the core: geometric factor negligible
        j = window
        expected = -np.exp(-0.7 * (k + j)) * mode.amp_hat[0, 0]
        assert abs(b[k + window, j + window, 0, 0] - expected) < 1e-12 * abs(expected)

    def test_degenerate_exponents_rejected(self):
        mode = glm.GlmMode(PAIR.bhat, -0.5, PAIR.b, 0.5)
        with pytest.raises(DegenerateMode):
            glm.one_soliton_closed_form(mode, 1.0, 4, 0.0)


class TestLocalFields:
    def test_zero_data(self):
        system = glm.build_hankel_data(
            [glm.GlmMode(0 * PAIR.bhat, 0.6, 0 * PAIR.b, 0.5)], glm.FORWARD_BACKWARD, 1.0, 4
        )
        xs, ys = glm.extract_local_fields(glm.solve_glm(system))
        assert np.abs(xs).max() == 0 and np.abs(ys).max() == 0

    def test_matches_shifted_seed_family(self):
        from lattice_akns.verification import _glm_local_field_match

        assert _glm_local_field_match(window=20) < 1e-8

    def test_scaling_limit_tracks_continuum_profile(self):
        # with lam -> delta*lam and window -> 1/delta, the diagonal elements
        # over delta^2 approach (lam+lam_hat)^2 exp(2 lam x) / kappa at fixed x
        lam, lam_hat, x_probe = 0.8, 1.0, 0.75
        values = []
        for delta in (0.25, 0.125, 0.0625):
            window = int(round(3.0 / delta))
            mode = glm.GlmMode(PAIR.bhat, delta * lam_hat, PAIR.b, delta * lam)
            system = glm.build_hankel_data([mode], glm.FORWARD_BACKWARD, 1.0, window, 1, 0.0)
            sol = glm.solve_glm(system)
            site = int(round(x_probe / delta))
            values.append(sol.b[site + window, site + window, 0, 0] / delta**2)
        target = (lam + lam_hat) ** 2 * np.exp(2 * lam * x_probe)
        errs = [abs(v - target) for v in values]
        assert errs[1] < errs[0] and errs[2] < errs[1]
