import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypstep.errors import DomainError, GammaPoleError, ThresholdError
from hypstep.model import PotentialParams, transmitted_momentum
from hypstep.scattering import (
    amplitudes,
    antibound_poles,
    circle_contour,
    dlog_reflection_dk,
    dlog_transmission_dk,
    log_inverse_transmission,
    pole_admissibility_check,
    pole_winding_probe,
    rectangle_scan,
    reflection_amplitude,
    scatter_matrix,
    transfer_matrix,
    transmission_amplitude,
    winding_number,
)

finite = dict(allow_nan=False, allow_infinity=False)

# closed-form amplitudes evaluated with mpmath (V0 = 1/2, alpha = 1)
R_AT_1P2 = 0.0013826824237408875 + 0.0010395935664699834j
T_AT_1P2 = 1.1122105610167918 + 0.02625756193060005j
R_AT_0P4 = -0.9264882814473326 - 0.3763236165068146j


def mp_amplitudes(k, V0, alpha):
    """Independent mpmath evaluation of the Gamma-product amplitudes."""
    mpmath.mp.dps = 30
    k = mpmath.mpf(k)
    kp = mpmath.sqrt(k + mpmath.sqrt(V0)) * mpmath.sqrt(k - mpmath.sqrt(V0))
    z = -1j * alpha * (k + kp)
    w = 1j * alpha * (k - kp)
    g = mpmath.gamma
    r = g(2j * alpha * k) * g(z) * g(1 + z) / (g(-2j * alpha * k) * g(w) * g(1 + w))
    t = g(z) * g(1 + z) / (g(-2j * alpha * k) * g(1 - 2j * alpha * kp))
    return complex(r), complex(t)


class TestAmplitudes:
    def test_frozen_above_threshold(self, p_half):
        assert abs(reflection_amplitude(1.2, p_half) - R_AT_1P2) < 1e-14
        assert abs(transmission_amplitude(1.2, p_half) - T_AT_1P2) < 1e-13

    def test_frozen_below_threshold(self, p_half):
        assert abs(reflection_amplitude(0.4, p_half) - R_AT_0P4) < 1e-13

    def test_against_mpmath(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            V0, alpha = rng.uniform(0.1, 5), rng.uniform(0.1, 3)
            k = rng.uniform(0.05, 6)
            if abs(k - math.sqrt(V0)) < 1e-3:
                continue
            r, t = mp_amplitudes(k, V0, alpha)
            p = PotentialParams(V0, alpha)
            assert abs(reflection_amplitude(k, p) - r) <= 1e-10 * max(1, abs(r))
            assert abs(transmission_amplitude(k, p) - t) <= 1e-10 * max(1, abs(t))

    def test_total_reflection_below_threshold(self, p_half):
        k = np.linspace(0.01, 0.7, 50)
        assert np.allclose(np.abs(reflection_amplitude(k, p_half)), 1.0, atol=1e-12)

    def test_low_energy_limit(self, p_half):
        assert abs(reflection_amplitude(1e-8, p_half) + 1) < 1e-6

    def test_high_energy_limit(self, p_half):
        amp = amplitudes(50.0, p_half)
        assert amp.R < 1e-30
        assert abs(amp.t - 1) < 1e-2

    def test_large_momentum_no_gamma_pole(self, p_half):
        # log-Gamma cancellation costs about eps * k log k at very large k
        amp = amplitudes(1e8, p_half)
        assert np.isfinite(amp.R) and abs(amp.t - 1) < 1e-6

    @pytest.mark.parametrize("k", [10.0, 1e3, 1e5])
    def test_flux_at_large_momentum(self, p_half, k):
        assert abs(amplitudes(k, p_half).flux_sum() - 1) < 1e-9

    def test_record_fields(self, p_half):
        amp = amplitudes(0.4, p_half)
        assert amp.evanescent
        assert amp.delta_r == pytest.approx(np.angle(amp.r))
        assert amp.R == pytest.approx(1.0)

    def test_domain_errors(self, p_half):
        with pytest.raises(DomainError):
            amplitudes(0.0, p_half)
        with pytest.raises(DomainError):
            amplitudes(-1.0, p_half)
        with pytest.raises(ThresholdError):
            amplitudes(math.sqrt(0.5) + 1e-12, p_half)

    def test_free_particle(self):
        p = PotentialParams(0.0, 1.0)
        amp = amplitudes(0.9, p)
        assert abs(amp.r) < 1e-14
        assert abs(amp.t - 1) < 1e-14

    def test_sharp_step_limit(self):
        p = PotentialParams(2.0, 1e-3)
        for k in np.linspace(1.1, 5, 9) * p.threshold:
            kp = math.sqrt(k * k - p.V0)
            amp = amplitudes(k, p)
            assert abs(abs(amp.r) - (k - kp) / (k + kp)) < 1e-3
            assert abs(abs(amp.t) - 2 * k / (k + kp)) < 1e-3


@settings(max_examples=150, deadline=None)
@given(st.floats(0.01, 9, **finite), st.floats(0.05, 4, **finite), st.floats(1.001, 8, **finite))
def test_flux_conservation(V0, alpha, ratio):
    p = PotentialParams(V0, alpha)
    k = ratio * p.threshold
    assert abs(amplitudes(k, p).flux_sum() - 1) <= 1e-10


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 9, **finite), st.floats(0.05, 4, **finite), st.floats(1.001, 8, **finite))
def test_transfer_determinant(V0, alpha, ratio):
    p = PotentialParams(V0, alpha)
    k = ratio * p.threshold
    kp = transmitted_momentum(k, p)
    assert abs(transfer_matrix(k, p).det / (k / kp) - 1) <= 1e-10


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 9, **finite), st.floats(0.05, 4, **finite), st.floats(1.001, 8, **finite))
def test_modified_unitarity(V0, alpha, ratio):
    p = PotentialParams(V0, alpha)
    k = ratio * p.threshold
    kp = transmitted_momentum(k, p).real
    assert scatter_matrix(k, p).unitarity_defect(k, kp) <= 1e-10


class TestMatrices:
    def test_amplitudes_from_transfer_matrix(self, p_half):
        k = 1.2
        T = transfer_matrix(k, p_half)
        kp = transmitted_momentum(k, p_half)
        assert abs(-T.T21 / T.T22 - reflection_amplitude(k, p_half)) < 1e-13
        assert abs((k / kp) / T.T22 - transmission_amplitude(k, p_half)) < 1e-13

    def test_scatter_matrix_layout(self, p_half):
        k = 1.2
        S = scatter_matrix(k, p_half).as_array()
        assert abs(S[0, 0] - reflection_amplitude(k, p_half)) < 1e-13
        assert abs(S[1, 0] - transmission_amplitude(k, p_half)) < 1e-13

    def test_gamma_pole_reports_entry(self, p_half):
        with pytest.raises(GammaPoleError) as info:
            transfer_matrix(0.0, p_half)
        assert info.value.entry is not None


class TestLogDerivatives:
    @pytest.mark.parametrize("k", [0.3, 0.9, 2.5])
    def test_reflection(self, p_half, k):
        h = 1e-6
        fd = (np.log(reflection_amplitude(k + h, p_half) / reflection_amplitude(k - h, p_half))) / (2 * h)
        assert abs(dlog_reflection_dk(k, p_half) - fd) < 1e-6

    @pytest.mark.parametrize("k", [0.9, 2.5])
    def test_transmission(self, p_half, k):
        h = 1e-6
        fd = (np.log(transmission_amplitude(k + h, p_half) / transmission_amplitude(k - h, p_half))) / (2 * h)
        assert abs(dlog_transmission_dk(k, p_half) - fd) < 1e-6


class TestPoles:
    def test_ladder(self, p_half):
        poles = antibound_poles(p_half, 6)
        assert [q.n for q in poles] == list(range(1, 7))
        assert poles[0].E_n == -0.0625
        for q in poles:
            assert q.k_n.imag == pytest.approx(-0.5 * (q.n - 0.5 / q.n))
            assert q.E_n < 0

    def test_inverse_transmission_vanishes_at_poles(self, p_half):
        for q in antibound_poles(p_half, 4):
            assert abs(np.exp(log_inverse_transmission(q.k_n + 1e-7, p_half))) < 1e-9

    def test_admissibility_certificates(self):
        p = PotentialParams(9.0, 1.0)
        for n in (1, 2, 3):
            ok, cert = pole_admissibility_check(n, p)
            assert not ok
            assert cert.real > 0 and abs(cert.imag) < 1e-12
        ok, cert = pole_admissibility_check(4, p)
        assert ok
        assert abs(cert + 4) < 1e-12
        assert [q.n for q in antibound_poles(p, 6)] == [4, 5, 6]

    def test_winding_of_known_function(self):
        path = circle_contour(0.3 - 0.2j, 0.1)
        assert winding_number(lambda z: 3 * np.log(z - (0.3 - 0.2j)), path) == pytest.approx(3, abs=1e-9)
        assert winding_number(lambda z: np.log(z - 2.0), path) == pytest.approx(0, abs=1e-9)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_pole_multiplicity_is_two(self, p_half, n):
        # Gamma(z) Gamma(1+z) = z Gamma(z)^2: each anti-bound pole of t is double
        assert pole_winding_probe(n, p_half) == pytest.approx(2, abs=1e-9)

    @pytest.mark.parametrize("V0", [0.5, 9.0])
    def test_no_poles_elsewhere(self, V0):
        for rect, w in rectangle_scan(PotentialParams(V0, 1.0)):
            assert abs(w) < 1e-9, rect
