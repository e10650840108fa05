import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lehmerscan.config import EvalConfig
from lehmerscan.errors import (
    ConfigError,
    ContourPoleError,
    OscillationError,
    PoleError,
    TailBoundError,
)
from lehmerscan.kernels import (
    eval_Xi_and_derivs,
    eval_Xi_deformed,
    eval_Xi_integral,
    eval_Z_and_theta,
    eval_h_logderivs,
    eval_phi,
    eval_zeta,
    eval_zeta_derivs,
    phi_tail_bound,
)
from oracles import central_diff, em_zeta

GAMMA1 = "14.134725141734693790457251983562470270784257115699243175685567460149963429809256764949010"


def rel(a, b):
    with mp.workprec(300):
        return abs(mp.mpc(a) - mp.mpc(b)) / abs(mp.mpc(b))


class TestEvalZeta:
    def test_zeta2_closed_form(self, cfg25):
        z = eval_zeta(2, cfg25)
        with cfg25.workprec():
            assert abs(z.value - mp.pi ** 2 / 6) < mp.mpf(10) ** -25

    def test_zeta0_closed_form(self, cfg25):
        z = eval_zeta(0, cfg25)
        with cfg25.workprec():
            assert abs(z.value + mp.mpf(1) / 2) < mp.mpf(10) ** -25

    def test_pole(self, cfg25):
        with pytest.raises(PoleError):
            eval_zeta(1, cfg25)

    def test_against_independent_euler_maclaurin_at_height(self, cfg15):
        s = mp.mpc(mp.mpf(1) / 2, mp.mpf(7005))
        z = eval_zeta(s, cfg15)
        oracle = em_zeta(s, dps=2 * cfg15.working_digits)
        assert rel(z.value, oracle) < mp.mpf(10) ** -15

    def test_against_em_low_height(self, cfg25):
        s = mp.mpc(mp.mpf("0.75"), mp.mpf(42))
        z = eval_zeta(s, cfg25)
        oracle = em_zeta(s, dps=2 * cfg25.working_digits)
        assert rel(z.value, oracle) < mp.mpf(10) ** -25


class TestZetaDerivs:
    def test_zeta_prime_zero_closed_form(self, cfg25):
        d = eval_zeta_derivs(mp.mpc(0), 1, cfg25)[0]
        with cfg25.workprec():
            expect = -mp.log(2 * mp.pi) / 2
            assert abs(d.value - expect) < mp.mpf(10) ** -24

    def test_contour_route_matches_backend(self, cfg25):
        s = mp.mpc(mp.mpf(1) / 2, mp.mpf(30))
        back = eval_zeta_derivs(s, 3, cfg25)
        cont = eval_zeta_derivs(s, 3, cfg25, route="contour")
        with cfg25.workprec():
            for b, c in zip(back, cont):
                assert abs(b.value - c.value) / abs(b.value) < mp.mpf(10) ** -22

    def test_first_deriv_vs_finite_differences_at_zero_ordinate(self, cfg25):
        with mp.workprec(400):
            s = mp.mpc(mp.mpf(1) / 2, mp.mpf(GAMMA1))
        d = eval_zeta_derivs(s, 1, cfg25)[0]
        f = lambda t: mp.zeta(mp.mpc(mp.mpf(1) / 2, t))
        with mp.workdps(80):
            fd = central_diff(f, mp.mpf(GAMMA1), 1, mp.mpf(10) ** -8, 80)
            # d/dt zeta(1/2+it) = i zeta'(s)
            assert abs(mp.mpc(0, 1) * d.value - fd) / abs(fd) < mp.mpf(10) ** -6

    def test_third_deriv_vs_dirichlet_series(self, cfg25):
        d3 = eval_zeta_derivs(mp.mpc(2), 3, cfg25)[2]
        with mp.workdps(60):
            N = 20000
            series = mp.fsum([-(mp.log(n) ** 3) * mp.power(n, -2)
                              for n in range(2, N + 1)])
            # integral tail of (log x)^3 / x^2 plus half the boundary term
            L = mp.log(N)
            series -= (L ** 3 + 3 * L ** 2 + 6 * L + 6) / N - (L ** 3) / (2 * N ** 2)
            assert abs(d3.value - series) / abs(series) < mp.mpf(10) ** -6

    def test_contour_refuses_pole(self, cfg25):
        with pytest.raises(ContourPoleError):
            eval_zeta_derivs(mp.mpc("1.01"), 1, cfg25, route="contour")

    def test_order_bounds(self, cfg25):
        with pytest.raises(ConfigError):
            eval_zeta_derivs(mp.mpc(2), 4, cfg25)


class TestHLogderivs:
    def test_closed_form_at_two(self, cfg25):
        h1, _ = eval_h_logderivs(2, cfg25)
        with cfg25.workprec():
            expect = -mp.log(mp.pi) / 2 - mp.euler / 2
            assert abs(h1.value - expect) < mp.mpf(10) ** -24

    def test_stirling_shape_at_great_height(self, cfg25):
        rho = mp.mpc(mp.mpf(1) / 2, mp.mpf(10) ** 6)
        h1, h2 = eval_h_logderivs(rho, cfg25)
        with cfg25.workprec():
            assert abs(h1.value.real - mp.log(mp.mpf(10) ** 6 / (2 * mp.pi)) / 2) < 1e-5
            assert abs(h1.value.imag - mp.pi / 4) < 1e-5

    def test_second_logderiv_decay(self, cfg25):
        mags = []
        for expo in (3, 4, 5):
            rho = mp.mpc(mp.mpf(1) / 2, mp.mpf(10) ** expo)
            _, h2 = eval_h_logderivs(rho, cfg25)
            mags.append(float(abs(h2.value)))
        # magnitude <= C/gamma with one fitted C, and monotone decay
        C = mags[0] * 10 ** 3 * 1.1
        for expo, m in zip((3, 4, 5), mags):
            assert m <= C / 10 ** expo
        assert mags[0] > mags[1] > mags[2]

    def test_pole(self, cfg25):
        with pytest.raises(PoleError):
            eval_h_logderivs(0, cfg25)
        with pytest.raises(PoleError):
            eval_h_logderivs(-4, cfg25)


class TestZTheta:
    def test_z_vanishes_at_first_zero(self, cfg25):
        z, _ = eval_Z_and_theta(GAMMA1, cfg25)
        assert abs(z.value) < mp.mpf(10) ** (-cfg25.target_digits + 2)

    def test_modulus_identity(self, cfg25):
        z, _ = eval_Z_and_theta(100, cfg25)
        zeta = eval_zeta(mp.mpc(mp.mpf(1) / 2, 100), cfg25)
        with cfg25.workprec():
            assert abs(abs(z.value) - abs(zeta.value)) < mp.mpf(10) ** -25

    def test_lehmer_region_small_positive_maximum(self, cfg25):
        z, _ = eval_Z_and_theta(mp.mpf("7005.1"), cfg25)
        assert 0 < float(z.value) < 0.001

    @given(t=st.floats(min_value=10, max_value=500))
    @settings(max_examples=15, deadline=None)
    def test_modulus_identity_random_grid(self, t, cfg15):
        z, _ = eval_Z_and_theta(t, cfg15)
        zeta = eval_zeta(mp.mpc(mp.mpf(1) / 2, mp.mpf(t)), cfg15)
        with cfg15.workprec():
            assert abs(abs(z.value) - abs(zeta.value)) < mp.mpf(10) ** -15


class TestXiDerivs:
    def test_xi_prime_odd(self, cfg25):
        xs = eval_Xi_and_derivs(0, 1, cfg25)
        # Xi is even, so Xi'(0) = 0
        assert abs(xs[1].value) < mp.mpf(10) ** -24

    def test_vanishes_at_zero_ordinate(self, cfg25):
        xs = eval_Xi_and_derivs(GAMMA1, 0, cfg25)
        assert abs(xs[0].value) < mp.mpf(10) ** -30

    def test_routes_agree(self, cfg25):
        from dataclasses import replace

        t = mp.mpf(5)
        a = eval_Xi_and_derivs(t, 3, cfg25)
        b = eval_Xi_and_derivs(t, 3, replace(cfg25, xi_route="contour"))
        with cfg25.workprec():
            for u, v in zip(a, b):
                assert abs(u.value - v.value) / abs(v.value) < mp.mpf(10) ** -22

    def test_against_integral_representation(self, cfg25):
        t = mp.mpf(5)
        a = eval_Xi_and_derivs(t, 0, cfg25)[0]
        b = eval_Xi_integral(t, cfg25)
        with cfg25.workprec():
            assert abs(a.value - b.value) / abs(b.value) < mp.mpf(10) ** -20


class TestPhi:
    @pytest.mark.parametrize("u", ["0", "0.1", "0.5"])
    def test_positive(self, u, cfg25):
        assert float(eval_phi(mp.mpf(u), 8, cfg25).value) > 0

    def test_superexponential_decay(self, cfg25):
        v = eval_phi(3, 8, cfg25)
        assert abs(v.value) < mp.mpf(10) ** -30

    def test_truncation_consistency(self, cfg25):
        a = eval_phi(1, 1, cfg25)
        b = eval_phi(1, 10, cfg25)
        with cfg25.workprec():
            assert abs(a.value - b.value) <= phi_tail_bound(1, 2)

    def test_tail_error(self):
        # 1 term cannot certify 40 digits at u = 0
        with pytest.raises(TailBoundError):
            eval_phi(0, 1, EvalConfig(target_digits=40))


class TestXiIntegral:
    @pytest.mark.parametrize("t", ["0", "1", GAMMA1])
    def test_cross_route(self, t, cfg25):
        a = eval_Xi_and_derivs(t, 0, cfg25)[0]
        b = eval_Xi_integral(t, cfg25)
        with cfg25.workprec():
            scale = max(abs(a.value), abs(b.value), mp.mpf(10) ** -12)
            assert abs(a.value - b.value) / scale < mp.mpf(10) ** -10

    def test_positive_at_origin(self, cfg25):
        assert float(eval_Xi_integral(0, cfg25).value) > 0

    def test_even(self, cfg25):
        a = eval_Xi_integral(mp.mpf(3), cfg25)
        b = eval_Xi_integral(mp.mpf(-3), cfg25)
        assert a.value == b.value

    def test_oscillation_range(self, cfg25):
        with pytest.raises(OscillationError):
            eval_Xi_integral(10 ** 4, cfg25)


class TestXiDeformed:
    def test_zero_time_is_half_xi(self, cfg25):
        d = eval_Xi_deformed(0, 1, cfg25)
        x = eval_Xi_and_derivs(1, 0, cfg25)[0]
        with cfg25.workprec():
            assert abs(d.value - x.value / 2) / abs(d.value) < mp.mpf(10) ** -20

    def test_even_in_x(self, cfg25):
        a = eval_Xi_deformed(mp.mpf("-0.01"), 7, cfg25)
        b = eval_Xi_deformed(mp.mpf("-0.01"), -7, cfg25)
        assert a.value == b.value

    def test_time_bound(self, cfg25):
        with pytest.raises(ConfigError):
            eval_Xi_deformed(0.6, 1, cfg25)

    def test_backward_heat_residual(self, cfg15):
        # (d/dtau + d^2/dx^2) of the deformed integral vanishes
        tau0, x0 = mp.mpf("-0.01"), mp.mpf(10)
        h = mp.mpf(10) ** -3
        f = lambda tau, x: eval_Xi_deformed(tau, x, cfg15).value
        with cfg15.workprec():
            d_tau = (f(tau0 + h, x0) - f(tau0 - h, x0)) / (2 * h)
            d_xx = (f(tau0, x0 + h) - 2 * f(tau0, x0) + f(tau0, x0 - h)) / h ** 2
            resid = d_tau + d_xx
            scale = abs(f(tau0, x0)) + abs(d_tau)
            assert abs(resid) < mp.mpf(10) ** -6 * max(scale, mp.mpf(10) ** -12)


class TestRealityInvariant:
    def test_reality_ratio_on_grid(self, cfg15):
        for t in (2, 9, 17):
            xs = eval_Xi_and_derivs(t, 3, cfg15)
            assert all(x.value.imag == 0 if hasattr(x.value, "imag") else True
                       for x in xs)  # BigReal wraps real mpf by construction
