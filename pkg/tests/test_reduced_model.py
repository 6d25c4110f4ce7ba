import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pemdamp.exceptions import ModelInputError
from pemdamp.reduced_model import (
    FrequencyResponse,
    ReducedParams,
    fixed_point_r,
    fixed_points_rl,
    fixed_points_rl_closed_form,
    hinf_norm,
    mobility_r,
    mobility_rl,
    reduced_params,
    sweep,
)

GAMMA = 0.167
F1 = 20.44


def brute_max(p, which="rl", points=400001, top=3.0):
    w = np.linspace(top / points, top, points)
    H = mobility_rl if which == "rl" else mobility_r
    return np.abs(H(w, p)).max()


class TestParams:
    def test_beta_one_by_construction(self):
        lam, c, w1 = 0.121, 52.85e-9, 2 * math.pi * F1
        L = lam / (w1**2 * c)
        assert reduced_params(L, 1e5, lam, c, w1, GAMMA).beta == pytest.approx(1.0, rel=1e-15)
        assert L == pytest.approx(139, rel=0.01)

    def test_resistive(self):
        assert reduced_params(None, 1e4, 0.12, 50e-9, 128.0, GAMMA).beta == 0.0

    def test_gamma_sign_normalized(self):
        assert ReducedParams(1, 0.1, -0.2).gamma == 0.2

    def test_validation(self):
        with pytest.raises(ModelInputError):
            ReducedParams(-1, 0.1, 0.1)
        with pytest.raises(ModelInputError):
            reduced_params(0.0, 1.0, 0.1, 1.0, 1.0, 0.1)


class TestMobility:
    def test_low_frequency_limit(self):
        assert abs(mobility_rl(1e-8, ReducedParams(1, 0.2, GAMMA))) < 1e-7

    def test_uncoupled_pole(self):
        assert np.isinf(mobility_rl(1.0, ReducedParams(1.3, 0.2, 0.0)))

    def test_large_delta_is_short_circuit(self):
        w = np.linspace(0.5, 1.5, 101)
        w = w[np.abs(w - 1) > 1e-3]
        got = mobility_rl(w, ReducedParams(1.0, 1e9, GAMMA))
        np.testing.assert_allclose(got, 1j * w / (1 - w**2), rtol=1e-6)

    def test_undamped_resonance(self):
        w = math.sqrt(1 + GAMMA**2)
        assert abs(mobility_r(w, ReducedParams(0.0, 0.0, GAMMA))) > 1e12

    @given(st.floats(0.01, 3), st.floats(0, 2), st.floats(0.01, 5), st.floats(0.01, 0.5))
    def test_conjugate_symmetry(self, w, b, d, g):
        p = ReducedParams(b, d, g)
        # H(-w) is the conjugate of H(w) (real impulse response)
        num = 1j * w * (-(w**2) + b - 1j * w * d)
        den = -(w**4) - 1j * d * w**3 + w**2 * (b + 1 + g * g) + 1j * w * d - b
        assert num / den == pytest.approx(np.conj(mobility_rl(w, p)), rel=1e-10)

    def test_r_requires_beta_zero(self):
        with pytest.raises(ModelInputError):
            mobility_r(1.0, ReducedParams(1.0, 0.1, 0.1))


class TestFixedPoints:
    def test_spacing_in_hz(self):
        ws, wt = fixed_points_rl(1.0, GAMMA)
        assert wt - ws == pytest.approx(0.1181, abs=1e-4)
        assert (wt - ws) * F1 == pytest.approx(2.41, rel=0.02)

    def test_closed_form_check(self):
        np.testing.assert_allclose(fixed_points_rl(1.0, GAMMA), fixed_points_rl_closed_form(1.0, GAMMA), rtol=1e-10)

    def test_spacing_exact_at_beta_one(self):
        ws, wt = fixed_points_rl_closed_form(1.0, GAMMA)
        assert wt - ws == pytest.approx(GAMMA / math.sqrt(2), rel=1e-12)

    def test_amplitude_at_fixed_points(self):
        for w in fixed_points_rl(1.0, GAMMA):
            for d in (0.05, 0.5):
                assert abs(mobility_rl(w, ReducedParams(1.0, d, GAMMA))) == pytest.approx(math.sqrt(2) / GAMMA, rel=1e-9)

    @given(st.floats(0.5, 2.0), st.floats(0.05, 0.5), st.floats(0.01, 10), st.floats(0.01, 10))
    def test_delta_independence(self, beta, gamma, d1, d2):
        ws, wt = fixed_points_rl(beta, gamma)
        for w in (ws, wt):
            a = abs(mobility_rl(w, ReducedParams(beta, d1, gamma)))
            b = abs(mobility_rl(w, ReducedParams(beta, d2, gamma)))
            assert a == pytest.approx(b, rel=1e-9)
        np.testing.assert_allclose((ws, wt), fixed_points_rl_closed_form(beta, gamma), rtol=1e-9)

    def test_r_fixed_point(self):
        wf, amp = fixed_point_r(GAMMA)
        assert wf == pytest.approx(1.00695, abs=1e-5)
        assert wf * F1 == pytest.approx(20.58, rel=0.005)
        for d in (0.1, 1.0, 10.0):
            assert abs(mobility_r(wf, ReducedParams(0, d, GAMMA))) == pytest.approx(amp, rel=1e-9)

    def test_r_fixed_point_small_gamma(self):
        assert fixed_point_r(1e-6)[0] == pytest.approx(1.0, abs=1e-12)


class TestHinf:
    def test_flat_rule_reaches_bound(self):
        p = ReducedParams(1.0, math.sqrt(1.5) * GAMMA, GAMMA)
        assert hinf_norm(p) == pytest.approx(math.sqrt(2) / GAMMA, rel=1e-6)

    def test_nominal_rule_peak(self):
        # the sqrt(2/3) rule leaves the peak 13.46 % above sqrt(2)/gamma
        p = ReducedParams(1.0, math.sqrt(2 / 3) * GAMMA, GAMMA)
        assert hinf_norm(p) / (math.sqrt(2) / GAMMA) == pytest.approx(1.1346, abs=2e-4)

    def test_refined_matches_brute_force(self):
        for p, which in [
            (ReducedParams(1.0, 0.2, GAMMA), "rl"),
            (ReducedParams(1.2, 0.05, 0.3), "rl"),
            (ReducedParams(0.0, 1.01, GAMMA), "r"),
        ]:
            assert hinf_norm(p, which) == pytest.approx(brute_max(p, which), rel=1e-6)

    def test_r_optimum_at_fixed_point(self):
        from pemdamp.network_optimizer import optimal_r_damping

        p = ReducedParams(0.0, optimal_r_damping(GAMMA), GAMMA)
        assert hinf_norm(p, "r") == pytest.approx(fixed_point_r(GAMMA)[1], rel=0.005)

    def test_unbounded(self):
        assert hinf_norm(ReducedParams(1.0, 0.0, GAMMA)) == math.inf
        assert hinf_norm(ReducedParams(1.3, 0.2, 0.0)) == math.inf

    def test_return_peak(self):
        norm, w = hinf_norm(ReducedParams(1.0, 0.2, GAMMA), return_peak=True)
        assert abs(mobility_rl(w, ReducedParams(1.0, 0.2, GAMMA))) == pytest.approx(norm)


class TestSweep:
    def test_default_grid(self):
        r = sweep(ReducedParams(1.0, 0.2, GAMMA, omega1=128.0))
        assert len(r.frequency) == 4001 and r.frequency[-1] == 3.0 and r.frequency[0] > 0
        assert not r.unbounded.any()

    def test_hz_conversion(self):
        w1 = 2 * math.pi * F1
        r = sweep(ReducedParams(1.0, 0.2, GAMMA, omega1=w1), grid=[0.5, 1.0], hz=True)
        np.testing.assert_allclose(r.frequency, [F1 / 2, F1])
        assert r.units == "hz"

    def test_hz_needs_omega1(self):
        with pytest.raises(ModelInputError):
            sweep(ReducedParams(1.0, 0.2, GAMMA), grid=[1.0], hz=True)

    def test_grid_must_increase(self):
        with pytest.raises(ModelInputError):
            FrequencyResponse(np.array([1.0, 0.5]), np.zeros(2))

    def test_unbounded_flag(self):
        r = sweep(ReducedParams(1.3, 0.2, 0.0), grid=[0.5, 1.0, 1.5])
        np.testing.assert_array_equal(r.unbounded, [False, True, False])
        assert math.isnan(r.phase[1])
