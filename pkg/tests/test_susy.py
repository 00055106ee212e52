import numpy as np
import pytest

from conftest import schrodinger_residual
from hypstep.errors import DomainError, InadmissibleIndexError, NodeError, WronskianZeroError
from hypstep.harness import ode_oracle
from hypstep.model import PotentialParams, potential
from hypstep.scattering import amplitudes
from hypstep.susy import (
    asymptotic_superpotentials,
    partner_amplitudes,
    partner_bound_states,
    partner_dlog_factors,
    partner_potential,
    partner_potential_closed_form,
    reflection_phase_shift,
    superpotential,
    susy_chain,
    susy_delay_shift,
    transmission_phase_shift,
)

X = np.linspace(-10, 10, 2001)


class TestSuperpotential:
    def test_asymptotic_values(self, p_half):
        wm, wp = asymptotic_superpotentials(1, p_half)
        assert wm == pytest.approx(0.25)
        assert wp == pytest.approx(-0.75)

    def test_limits_of_superpotential(self, p_half):
        W = superpotential(3, p_half)
        assert W(-60.0) == pytest.approx(W.W_minus, abs=1e-12)
        assert W(60.0) == pytest.approx(W.W_plus, abs=1e-12)

    def test_riccati(self, p_half):
        # W^2 - W' = V - E_n for the seed energy
        n = 1
        W = superpotential(n, p_half)
        h = 1e-4
        x = np.linspace(-6, 6, 61)
        dW = (W(x + h) - W(x - h)) / (2 * h)
        E = -0.0625
        assert np.max(np.abs(W(x) ** 2 - dW - (potential(x, p_half) - E))) < 1e-7

    def test_even_seed_has_node(self, p_half):
        with pytest.raises(NodeError):
            superpotential(2, p_half)

    def test_inadmissible(self):
        with pytest.raises(InadmissibleIndexError):
            superpotential(2, PotentialParams(9.0, 1.0))


class TestHierarchy:
    @pytest.mark.parametrize("order", [1, 2, 3, 4])
    def test_closed_form(self, p_half, order):
        darboux = partner_potential(order, X, p_half)
        assert np.max(np.abs(darboux - partner_potential_closed_form(order, X, p_half))) < 1e-9

    @pytest.mark.parametrize("V0,alpha", [(0.3, 1.2), (0.05, 3.0), (0.8, 0.5), (2.0, 0.3)])
    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_closed_form_general_parameters(self, V0, alpha, order):
        p = PotentialParams(V0, alpha)
        c = susy_chain(order, p)
        x = np.linspace(-10 * alpha, 10 * alpha, 801)
        assert np.max(np.abs(c.partner_potential(x) - c.closed_form(x))) < 1e-9 / alpha**2

    def test_order_one_explicit(self, p_half):
        expected = 0.25 * (1 + np.tanh(X / 2)) - 0.5 / np.cosh(X / 2) ** 2
        assert np.max(np.abs(partner_potential(1, X, p_half) - expected)) < 1e-9

    def test_order_two_explicit(self, p_half):
        expected = 0.25 * (1 + np.tanh(X / 2)) - 1.5 / np.cosh(X / 2) ** 2
        assert np.max(np.abs(partner_potential(2, X, p_half) - expected)) < 1e-9

    def test_routes(self, p_half):
        a = partner_potential(2, X, p_half, route="darboux")
        b = partner_potential(2, X, p_half, route="closed_form")
        assert np.allclose(a, b, atol=1e-9)
        with pytest.raises(ValueError):
            partner_potential(2, X, p_half, route="nope")

    def test_order_zero_is_base(self, p_half):
        assert np.array_equal(partner_potential(0, X, p_half), potential(X, p_half))

    def test_single_even_seed_with_node_rejected(self, p_half):
        with pytest.raises(WronskianZeroError):
            susy_chain(1, p_half, seeds=(2,))
        c = susy_chain(2, p_half)
        assert not c.outside_analyzed_set

    def test_bad_seed_list(self, p_half):
        with pytest.raises(DomainError):
            susy_chain(2, p_half, seeds=(1, 1))
        with pytest.raises(DomainError):
            susy_chain(-1, p_half)


class TestBoundStates:
    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_count_and_energies(self, p_half, order):
        states = partner_bound_states(order, p_half)
        assert len(states) == order
        expected = sorted(-0.25 * (s - 0.5 / s) ** 2 for s in range(1, order + 1))
        assert [b.energy for b in states] == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_schrodinger_residual(self, p_half, order):
        x = np.linspace(-30, 30, 12001)
        V = partner_potential(order, x, p_half)
        for b in partner_bound_states(order, p_half):
            assert schrodinger_residual(b(x), x, b.energy, V) < 1e-6

    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_tail_decay(self, p_half, order):
        for b in partner_bound_states(order, p_half):
            left, right = b.wavefunction.decay_rates()
            assert left > 0 and right < 0
            assert abs(b(-60.0)) < 1e-6 * np.max(np.abs(b(np.linspace(-5, 5, 101))))
            assert abs(b(60.0)) < 1e-6 * np.max(np.abs(b(np.linspace(-5, 5, 101))))


class TestTransparency:
    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_moduli_preserved(self, p_half, order):
        k = np.linspace(0.05, 5, 400)
        k = k[np.abs(k - p_half.threshold) > 1e-6]
        r, t = partner_amplitudes(k, 0, p_half)
        rr, tt = partner_amplitudes(k, order, p_half)
        assert np.max(np.abs(np.abs(rr) - np.abs(r))) < 1e-12
        above = k > p_half.threshold
        assert np.max(np.abs(np.abs(tt[above]) - np.abs(t[above]))) < 1e-12

    def test_below_threshold_transmission_modulus_changes(self, p_half):
        # the evanescent tail is reshaped, so |t~| differs from |t| below threshold
        r, t = partner_amplitudes(0.4, 0, p_half)
        rr, tt = partner_amplitudes(0.4, 1, p_half)
        assert abs(abs(tt) - abs(t)) > 1e-3

    @pytest.mark.parametrize("order,k", [(1, 1.2), (2, 0.9), (2, 2.4), (1, 0.5)])
    def test_against_oracle(self, p_half, order, k):
        res = ode_oracle(k, p_half, potential_override=lambda x: partner_potential(order, x, p_half))
        rr, tt = partner_amplitudes(k, order, p_half)
        assert abs(abs(res.r_numeric) - abs(rr)) < 1e-6
        if k > p_half.threshold:
            assert abs(abs(res.t_numeric) - abs(tt)) < 1e-6
            assert abs(res.t_numeric - tt) < 1e-6
        if abs(rr) > 1e-4:
            assert abs(np.angle(res.r_numeric / rr)) < 1e-5


class TestShifts:
    @pytest.mark.parametrize("n", [1, 3])
    def test_reflection_phase_shift(self, p_half, n):
        k = np.linspace(0.1, 5, 50)
        k = k[np.abs(k - p_half.threshold) > 1e-3]
        seeds = (n,)
        rr, _ = partner_amplitudes(k, 1, p_half, seeds=seeds)
        r = np.array([amplitudes(kk, p_half).r for kk in k])
        shift = np.angle(rr / r)
        assert np.max(np.abs(np.angle(np.exp(1j * (shift - reflection_phase_shift(k, n, p_half)))))) < 1e-12

    @pytest.mark.parametrize("n", [1, 3])
    def test_transmission_phase_shift(self, p_half, n):
        k = np.linspace(0.75, 5, 50)
        _, tt = partner_amplitudes(k, 1, p_half, seeds=(n,))
        _, t = partner_amplitudes(k, 0, p_half)
        diff = np.angle(tt / t) - transmission_phase_shift(k, n, p_half)
        assert np.max(np.abs(np.angle(np.exp(1j * diff)))) < 1e-12

    def test_transmission_shift_domain(self, p_half):
        with pytest.raises(DomainError):
            transmission_phase_shift(0.5, 1, p_half)

    @pytest.mark.parametrize("n", [1, 3, 5])
    def test_delay_shift_matches_finite_differences(self, p_half, n):
        k = np.linspace(0.8, 5, 40)
        h = 1e-4
        d_r, d_t = susy_delay_shift(n, k, p_half)

        def fd(f):
            return (-f(k + 2 * h) + 8 * f(k + h) - 8 * f(k - h) + f(k - 2 * h)) / (12 * h) / k

        fd_r = fd(lambda q: reflection_phase_shift(q, n, p_half))
        fd_t = fd(lambda q: transmission_phase_shift(q, n, p_half))
        assert np.max(np.abs(d_r - fd_r)) < 1e-7
        assert np.max(np.abs(d_t - fd_t)) < 1e-7

    def test_delay_shift_agrees_with_dlog(self, p_half):
        k = np.linspace(0.8, 5, 40)
        dr, dt = partner_dlog_factors(k, 1, p_half)
        d_r, d_t = susy_delay_shift(1, k, p_half)
        assert np.allclose(np.imag(dr) / k, d_r, atol=1e-13)
        assert np.allclose(np.imag(dt) / k, d_t, atol=1e-13)

    def test_delay_shift_below_threshold(self, p_half):
        d_r, d_t = susy_delay_shift(1, np.array([0.3, 1.0]), p_half)
        assert np.isnan(d_t[0]) and np.isfinite(d_t[1])
        with pytest.raises(DomainError):
            susy_delay_shift(1, 0.3, p_half)
