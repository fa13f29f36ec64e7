import math

import numpy as np
import pytest
from scipy.special import loggamma as _loggamma

from rsmoments import arith as ar
from rsmoments import lseries as ls
from rsmoments.arith import CuspLabel
from rsmoments.specfun import DomainError, NonConvergenceError, riemann_zeta


@pytest.fixture(scope="module")
def delta():
    return ls.delta_newform(20000)


class TestDeltaGenerator:
    def test_small_coefficients(self, delta):
        a = delta.a_exact
        assert a[0] == 1
        assert a[1] == -24
        assert a[2] == 252
        assert a[3] == -1472
        assert a[5] == -6048

    def test_hecke_multiplicativity(self, delta):
        a = delta.a_exact
        assert a[5] == a[1] * a[2]  # a(6) = a(2) a(3)
        assert a[9] == a[1] * a[4]  # a(10) = a(2) a(5)
        assert a[11] == a[2] * a[3]  # a(12) = a(3) a(4)

    def test_against_naive_eta_expansion(self, delta):
        # independent O(M^2) expansion of q prod (1 - q^n)^24 up to q^13
        M = 13
        poly = [1] + [0] * M
        for nn in range(1, M + 1):
            for _ in range(24):
                new = poly[:]
                for i in range(M, nn - 1, -1):
                    new[i] -= poly[i - nn]
                poly = new
        for n in range(1, M):
            assert delta.a_exact[n - 1] == poly[n - 1]

    def test_deligne_bound_normalized(self, delta):
        A = delta.A(20000)
        n = np.arange(1, 20001)
        dcount = np.zeros(20000)
        for d in range(1, 20001):
            dcount[d - 1 :: d] += 1
        assert np.all(np.abs(A) <= dcount + 1e-9)


class TestLoaders:
    def test_newform_roundtrip(self, tmp_path, delta):
        path = tmp_path / "form.txt"
        M = 50
        lines = [f"1 12 {M}"] + [f"{n} {delta.a_exact[n - 1]}" for n in range(1, M + 1)]
        path.write_text("\n".join(lines) + "\n")
        f = ls.load_newform(path)
        assert f.N == 1 and f.k == 12 and f.M == M
        assert np.allclose(f.a, delta.a[:M])

    def test_rejects_bad_normalisation(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1 12 2\n1 2\n2 -24\n")
        with pytest.raises(ls.InvariantViolation) as err:
            ls.load_newform(path)
        assert "n=1" in str(err.value)

    def test_rejects_odd_or_small_weight(self, tmp_path):
        path = tmp_path / "w.txt"
        path.write_text("1 11 1\n1 1\n")
        with pytest.raises(ls.InvariantViolation):
            ls.load_newform(path)
        path.write_text("1 2 1\n1 1\n")
        with pytest.raises(ls.InvariantViolation):
            ls.load_newform(path)

    def test_maass_roundtrip(self, tmp_path):
        u = ls.synthetic_maass_form(N=2, L=1, r=9.53, m_max=64, seed=3)
        path = tmp_path / "maass.txt"
        lines = [f"2 1 {u.r} 0 64", f"{u.rho1} {u.lifts[1]} {u.lifts[2]}"]
        lines += [f"{n} {float(u.lam[n - 1])!r}" for n in range(1, 65)]
        path.write_text("\n".join(lines) + "\n")
        v = ls.load_maass_form(path)
        assert v.N == 2 and v.L == 1 and abs(v.r - 9.53) < 1e-12
        assert np.allclose(v.lam, u.lam)

    def test_cusp_expansion_roundtrip(self, tmp_path):
        path = tmp_path / "cusp.txt"
        path.write_text("4 2 1 3\n1 1.0 0.0\n2 -0.5 0.25\n3 0.125 0.0\n")
        ce = ls.load_cusp_expansion(path)
        assert ce.cusp == CuspLabel(4, 2, 1)
        assert ce.coeffs[1] == complex(-0.5, 0.25)


class TestRankinSelberg:
    def test_positive_real_and_truncation_consistency(self, delta):
        v1, t1 = ls.rankin_selberg_L(2.0, delta, delta, m_max=10_000)
        v2, t2 = ls.rankin_selberg_L(2.0, delta, delta, m_max=20_000)
        assert v1.real > 0 and abs(v1.imag) < 1e-14
        assert abs(v1 - v2) <= t1 + t2

    def test_real_symmetry(self, delta):
        v, _ = ls.rankin_selberg_L(2.3, delta, delta)
        assert abs(v.imag) < 1e-13 * abs(v)

    def test_pole_path_at_one(self, delta):
        with pytest.raises(DomainError):
            ls.rankin_selberg_L(1.0, delta, delta)

    def test_residue_positive_and_consistent(self, delta):
        res, err = ls.residue_at_1(delta)
        assert res > 0
        # node-count stability within the reported error
        hs = (0.1, 0.05)
        vals = []
        for h in hs:
            v, _ = ls.rankin_selberg_L(1.0 + h, delta, delta)
            vals.append(h * v)
        from rsmoments.specfun import extrapolate_to_zero

        two_node = extrapolate_to_zero(hs, vals).real
        assert abs(two_node - res) <= err
        # and the accurate route lands inside the reported error too
        assert abs(res - ls.selfdual_rs_constants(delta)["residue"]) <= err


class TestHoloL:
    def test_real_argument_real_value(self, delta):
        v = ls.holo_L(1.5, delta)
        assert abs(v.imag) < 1e-12 * abs(v)

    def test_afe_matches_direct_in_overlap(self, delta):
        for s in (3.0, 2.8 + 7j, 3.3 - 2j):
            d = ls.holo_L(s, delta, method="direct")
            a = ls.holo_L(s, delta, method="afe")
            assert abs(d - a) < 1e-8 * abs(d)

    def test_completed_functional_equation_critical_line(self, delta):
        def lam(s):
            a0 = (delta.k - 1) / 2.0
            return np.exp(-(s + a0) * math.log(2 * math.pi) + _loggamma(s + a0)) * ls.holo_L(
                s, delta, method="afe"
            )

        for tau in (0.5, 7.0, 30.0, 90.0, 160.0):
            l1 = lam(0.5 + 1j * tau)
            l2 = (1j) ** delta.k * lam(0.5 - 1j * tau)
            assert abs(l1 - l2) < 1e-7 * max(abs(l1), 1e-30)

    def test_insufficient_coefficients_reports_horizon(self):
        small = ls.delta_newform(256)
        with pytest.raises(ls.InsufficientCoefficientsError) as err:
            ls.holo_L(2.5, small, tol=1e-10, method="direct")
        assert err.value.needed > 256
        # in auto mode level 1 falls back to the (exact) functional-equation
        # route instead of failing
        v = ls.holo_L(2.5, small, tol=1e-10)
        big = ls.delta_newform(20000)
        assert abs(v - ls.holo_L(2.5, big, method="direct")) < 1e-8 * abs(v)


class TestSym2:
    def test_value_against_tabulated_petersson_norm(self, delta):
        # <delta, delta> = 1.0353620568043209e-6 (standard tabulated value);
        # the residue relation gives L(1, sym^2) = pi/2 (4 pi)^k <f,f>/G(k)
        ref = math.pi / 2 * (4 * math.pi) ** 12 * 1.0353620568043209e-6 / math.factorial(11)
        val = ls.sym2_L(1.0, delta).real
        assert abs(val - ref) < 1e-9 * ref

    def test_parameter_stability(self, delta):
        # independent smoothing parameters must agree
        v1 = ls.sym2_L(1.37, delta)
        from rsmoments.lseries import _form_key, _mellin_weights, _sym2_coeffs

        assert abs(ls.sym2_L(1.37, delta) - v1) == 0.0  # deterministic
        v2 = ls.selfdual_rs_L(1.37, delta) / riemann_zeta(1.37)
        assert abs(v1 - v2) < 1e-12 * abs(v1)

    def test_laurent_constants(self, delta):
        c = ls.selfdual_rs_constants(delta)
        # L(1 + x) ~ R/x + c0 + c1 x reproduced by actual values
        for x in (0.05, 0.025):
            lhs = ls.selfdual_rs_L(1.0 + x, delta)
            rhs = c["residue"] / x + c["finite_part"] + c["linear"] * x
            assert abs(lhs - rhs) < 5e-3 * abs(lhs) * x  # O(x^2) remainder


class TestCurlyLEisenstein:
    @pytest.mark.slow
    def test_direct_vs_factored_grid(self):
        # the spec grid: t in {0, 0.7}, r in {0.3, 1.1} (t = 0 exercises the
        # removable singularity of the local factors)
        for N in (1, 2):
            for cusp in ar.enumerate_cusps(N):
                for t in (0.0, 0.7):
                    for r in (0.3, 1.1):
                        d = ls.curly_L_eisenstein_direct(2.5, t, r, cusp, m_max=40_000)
                        fa = ls.curly_L_eisenstein_factored(2.5, t, 1j * r, cusp)
                        assert abs(d.value - fa) < 2e-6 * abs(fa), (N, cusp, t, r)

    def test_direct_vs_factored_quick(self):
        for N in (1, 2):
            for cusp in ar.enumerate_cusps(N):
                d = ls.curly_L_eisenstein_direct(2.5, 0.7, 0.3, cusp, m_max=40_000)
                fa = ls.curly_L_eisenstein_factored(2.5, 0.7, 0.3j, cusp)
                assert abs(d.value - fa) < 2e-6 * abs(fa), (N, cusp)

    def test_direct_region_check(self):
        with pytest.raises(DomainError):
            ls.curly_L_eisenstein_direct(1.2, 0.7, 0.3, CuspLabel(1, 1, 1), m_max=100)


class TestCurlyLMaass:
    def test_level_one_collapse(self):
        u = ls.synthetic_maass_form(N=1, L=1, r=5.1, m_max=50_000, seed=5)
        fa = ls.curly_L_maass_factored(2.5, 0.7, u)
        expect = (
            u.lifts[1]
            * u.rho1
            * ls.maass_L(2.5 + 0.7j, u)
            * ls.maass_L(2.5 - 0.7j, u)
        )
        assert abs(fa - expect) < 1e-12 * abs(expect)

    def test_t_zero_square(self):
        u = ls.synthetic_maass_form(N=1, L=1, r=5.1, m_max=50_000, seed=5)
        fa = ls.curly_L_maass_factored(2.5, 0.0, u)
        expect = u.lifts[1] * u.rho1 * ls.maass_L(2.5, u) ** 2
        assert abs(fa - expect) < 1e-12 * abs(expect)

    @pytest.mark.parametrize("N,L,seed", [(2, 1, 3), (4, 2, 11), (6, 1, 17)])
    def test_direct_vs_factored(self, N, L, seed):
        u = ls.synthetic_maass_form(N=N, L=L, r=7.7, m_max=200_000, seed=seed)
        d = ls.curly_L_maass_direct(2.5, 0.7, u)
        fa = ls.curly_L_maass_factored(2.5, 0.7, u)
        assert abs(d.value - fa) < 1e-8 * abs(fa)

    def test_t_zero_composite_level(self):
        u = ls.synthetic_maass_form(N=2, L=1, r=9.53, m_max=100_000, seed=3)
        d = ls.curly_L_maass_direct(2.5, 0.0, u)
        fa = ls.curly_L_maass_factored(2.5, 0.0, u)
        assert abs(d.value - fa) < 1e-7 * abs(fa)

    def test_displayed_local_factors_flagged(self):
        # the as-displayed local factors disagree with the direct sum at
        # composite level (the ord_p(N/d) = 1 cases lose their p-power
        # terms); the corrected factors are the production path and the
        # mismatch is pinned here so it stays visible
        u = ls.synthetic_maass_form(N=2, L=1, r=9.53, m_max=100_000, seed=3)
        d = ls.curly_L_maass_direct(2.5, 0.7, u).value
        from rsmoments.lseries import _lift_local_factor_display, _lam_at
        from rsmoments.arith import divisors

        lift_sum = sum(
            u.lifts[dd] * u.rho1 * dd ** (0.5 - 0.7j) * _lift_local_factor_display(u, dd, 2.5, 0.7)
            for dd in divisors(2)
        )
        displayed = (
            ls.maass_L(2.5 + 0.7j, u) * ls.maass_L(2.5 - 0.7j, u) * 2 ** (-2.5 - 0.7j) * lift_sum
        )
        assert abs(d - displayed) > 1e-2 * abs(d)


class TestDivisorModel:
    def test_closed_form_rankin_selberg(self):
        nu, mu = 0.52, 1.13
        for N in (1, 2):
            f = ls.divisor_model_newform(nu, 12, N, 4000)
            g = ls.divisor_model_newform(mu, 12, N, 4000)
            w = 2.6 + 0.4j
            direct, tail = ls.rankin_selberg_L(w, f, g, m_max=4000)
            closed = ls.divisor_model_rs_L(w, nu, mu, N)
            assert abs(direct - closed) < 1e-5 * abs(closed)

    def test_hecke_and_bounds(self):
        f = ls.divisor_model_newform(0.52, 12, 1, 500)
        A = f.A(500)
        assert abs(A[0] - 1.0) < 1e-14
        assert abs(A[5] - A[1] * A[2]) < 1e-12  # multiplicativity at 6 = 2*3
