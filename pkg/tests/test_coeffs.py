from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bilane.coeffs import (
    CoefficientSet,
    Params,
    QuarticPolynomial,
    SignLemmaError,
    bilaplacian_symbol,
    characteristic_polynomial,
    compute_coefficients,
    sign_report,
    sphere_eigenvalue,
    symbol_value,
    verify_symbol_identity,
    zero_state_roots,
)


def power_symbol(gamma, n):
    # independent oracle: gamma (gamma-2) (gamma+n-2) (gamma+n-4)
    return gamma * (gamma - 2) * (gamma + n - 2) * (gamma + n - 4)


def expand_shifted_power_quartic(n, gamma0):
    # oracle expansion of Q(m + gamma0) as a monic quartic in m, built by
    # plain convolution of the four linear factors (independent of the
    # package's own polynomial helpers)
    roots = [-gamma0, 2 - gamma0, 2 - n - gamma0, 4 - n - gamma0]
    poly = [Fraction(1)]
    for r in roots:
        out = [Fraction(0)] * (len(poly) + 1)
        for i, c in enumerate(poly):
            out[i] += c
            out[i + 1] -= c * r
        poly = out
    return tuple(poly)  # highest degree first


def window_grid(n, count):
    lo = Fraction(n, n - 4)
    hi = Fraction(n + 4, n - 4)
    return [lo + (hi - lo) * Fraction(j, count + 1) for j in range(1, count + 1)]


class TestComputeCoefficients:
    def test_values_n5_p7(self):
        cs = compute_coefficients(Params(5, 7))
        assert cs.K0 == Fraction(112, 81)
        assert cs.K1 == Fraction(58, 27)
        assert cs.K2 == Fraction(-19, 3)
        assert cs.K3 == Fraction(-2, 3)
        assert cs.J1 == Fraction(-22, 9)
        assert cs.gamma0 == Fraction(-2, 3)

    def test_c_pn_n5_p7(self):
        cs = compute_coefficients(Params(5, 7))
        assert cs.C_pn == float(Fraction(112, 81)) ** (1.0 / 6.0)
        assert abs(cs.C_pn - 1.055493348046262) < 1e-12

    def test_critical_exponent_degeneracy(self):
        # p = (n+4)/(n-4) makes K1 and K3 vanish identically
        for n in (5, 6, 8, 12):
            p = Fraction(n + 4, n - 4)
            cs = compute_coefficients(Params(n, p, strict=False))
            assert cs.K1 == 0
            assert cs.K3 == 0

    def test_left_endpoint_kills_K0(self):
        for n in (6, 8):
            p = Fraction(n, n - 4)
            cs = compute_coefficients(Params(n, p, strict=False))
            assert cs.K0 == 0
            assert cs.C_pn is None

    def test_K0_equals_power_symbol_at_gamma0(self):
        for n in range(5, 13):
            for p in window_grid(n, 7):
                params = Params(n, p)
                cs = compute_coefficients(params)
                assert cs.K0 == power_symbol(params.gamma0, n)

    def test_near_left_endpoint_K0_small_positive(self):
        p = Fraction(5, 1) + Fraction(1, 10**6)
        cs = compute_coefficients(Params(5, p))
        assert cs.K0 > 0
        assert cs.K0 < Fraction(1, 10**4)

    def test_float_p_matches_rational(self):
        exact = compute_coefficients(Params(5, Fraction(13, 2)))
        approx = compute_coefficients(Params(5, 6.5))
        for e, a in zip(exact.floats(), approx.floats()):
            assert a == pytest.approx(e, rel=1e-14)

    def test_rejects_p_at_most_one(self):
        with pytest.raises(ValueError, match="p must exceed 1"):
            Params(5, 1, strict=False)
        with pytest.raises(ValueError):
            Params(5, Fraction(1, 2), strict=False)


class TestParamsValidation:
    def test_strict_window_is_open(self):
        with pytest.raises(ValueError):
            Params(5, 5)  # left endpoint
        with pytest.raises(ValueError):
            Params(5, 9)  # right endpoint
        Params(5, Fraction(51, 10))  # inside is fine

    def test_strict_needs_n_at_least_5(self):
        with pytest.raises(ValueError):
            Params(4, 3)
        Params(4, 3, strict=False)

    def test_monotonicity_window_left_closed(self):
        assert Params(6, 3, strict=False).in_monotonicity_window()
        assert Params(8, 2, strict=False).in_monotonicity_window()
        assert Params(5, 7).in_monotonicity_window()
        assert not Params(6, 5, strict=False).in_monotonicity_window()
        assert not Params(5, Fraction(49, 10), strict=False).in_monotonicity_window()

    def test_growth_exponent(self):
        assert Params(5, 7).growth_exponent == Fraction(2, 3)
        assert Params(6, 3, strict=False).growth_exponent == 2


class TestSignReport:
    def test_example_pairs(self):
        for (n, p) in [(5, 7), (10, 2)]:
            rep = sign_report(Params(n, p))
            assert (rep.sign_K0, rep.sign_K1, rep.sign_K3, rep.sign_J1) == (1, 1, -1, -1)

    def test_rejects_non_strict(self):
        with pytest.raises(ValueError, match="strict"):
            sign_report(Params(6, 3, strict=False))

    def test_dense_grid(self):
        for n in range(5, 13):
            for p in window_grid(n, 40):
                rep = sign_report(Params(n, p))
                assert rep.sign_K0 == 1
                assert rep.sign_K1 == 1
                assert rep.sign_K3 == -1
                assert rep.sign_J1 == -1

    @given(n=st.integers(5, 12), j=st.integers(1, 400))
    @settings(max_examples=120, deadline=None)
    def test_sign_pattern_holds_everywhere(self, n, j):
        lo = Fraction(n, n - 4)
        hi = Fraction(n + 4, n - 4)
        p = lo + (hi - lo) * Fraction(j, 401)
        sign_report(Params(n, p))  # raises SignLemmaError on violation

    def test_violation_raises(self, monkeypatch):
        # fault injection: corrupt K1's sign and watch the check fire
        import bilane.coeffs as mod

        real = compute_coefficients

        def corrupted(params):
            cs = real(params)
            return CoefficientSet(params=cs.params, K0=cs.K0, K1=-cs.K1,
                                  K2=cs.K2, K3=cs.K3, J1=cs.J1,
                                  gamma0=cs.gamma0, C_pn=cs.C_pn)

        monkeypatch.setattr(mod, "compute_coefficients", corrupted)
        with pytest.raises(SignLemmaError):
            mod.sign_report(Params(5, 7))


class TestCharacteristicPolynomial:
    def test_n5_p7_coefficients(self):
        P = characteristic_polynomial(compute_coefficients(Params(5, 7)))
        assert P.coefficients == (1, Fraction(-2, 3), Fraction(-19, 3),
                                  Fraction(58, 27), Fraction(112, 81))

    def test_value_at_zero_is_K0(self):
        for n in (5, 7, 9):
            for p in window_grid(n, 5):
                cs = compute_coefficients(Params(n, p))
                assert characteristic_polynomial(cs)(0) == cs.K0

    def test_growth_exponent_is_root(self):
        for n in range(5, 13):
            for p in window_grid(n, 5):
                params = Params(n, p)
                P = characteristic_polynomial(compute_coefficients(params))
                assert P(params.growth_exponent) == 0

    def test_equals_shifted_power_quartic(self):
        for n in range(5, 13):
            for p in window_grid(n, 10):
                params = Params(n, p)
                P = characteristic_polynomial(compute_coefficients(params))
                assert P.coefficients == expand_shifted_power_quartic(n, params.gamma0)

    @given(n=st.integers(5, 12), j=st.integers(1, 400))
    @settings(max_examples=80, deadline=None)
    def test_shifted_identity_property(self, n, j):
        lo = Fraction(n, n - 4)
        hi = Fraction(n + 4, n - 4)
        p = lo + (hi - lo) * Fraction(j, 401)
        params = Params(n, p)
        P = characteristic_polynomial(compute_coefficients(params))
        assert P.coefficients == expand_shifted_power_quartic(n, params.gamma0)

    def test_vieta_sum_of_roots(self):
        for n in range(5, 13):
            for p in window_grid(n, 5):
                params = Params(n, p)
                cs = compute_coefficients(params)
                assert sum(zero_state_roots(params)) == -cs.K3

    def test_root_set_matches_closed_form(self):
        params = Params(5, 7)
        assert zero_state_roots(params) == (Fraction(2, 3), Fraction(8, 3),
                                            Fraction(-7, 3), Fraction(-1, 3))

    def test_monic_enforced(self):
        with pytest.raises(ValueError, match="monic"):
            QuarticPolynomial(2, 0, 0, 0, 0)

    def test_from_roots_round_trip(self):
        roots = (Fraction(2, 3), Fraction(8, 3), Fraction(-7, 3), Fraction(-1, 3))
        P = QuarticPolynomial.from_roots(roots)
        for r in roots:
            assert P(r) == 0
        assert P.coefficients == characteristic_polynomial(
            compute_coefficients(Params(5, 7))).coefficients

    def test_shifted_by(self):
        P = characteristic_polynomial(compute_coefficients(Params(5, 7)))
        d = Fraction(3, 7)
        S = P.shifted_by(d)
        for m in (Fraction(0), Fraction(1, 2), Fraction(-5, 3)):
            assert S(m) == P(m + d)


class TestSymbolIdentity:
    def test_report_passes(self):
        rep = verify_symbol_identity(Params(5, 7), trials=16, seed=1)
        assert rep.ok
        assert rep.checks == 64
        assert rep.counterexample is None
        assert "16/16 exact" in str(rep)

    def test_scalar_examples(self):
        params = Params(5, 7)
        cs = compute_coefficients(params)
        # sigma = 0: constants are biharmonic, both sides vanish
        m = Fraction(2, 3)
        assert symbol_value(cs, m, 0) == 0
        assert bilaplacian_symbol(params, m, 0) == 0
        # k = 0, m = 0: both sides are K0
        assert symbol_value(cs, 0, 0) == cs.K0
        assert bilaplacian_symbol(params, 0, 0) == cs.K0
        # k = 1, m = 0 with lambda_1 = 4: frozen exact value
        lam1 = sphere_eigenvalue(1, 5)
        assert lam1 == 4
        lhs = symbol_value(cs, 0, -lam1)
        rhs = bilaplacian_symbol(params, 0, 1)
        assert lhs == rhs == Fraction(2200, 81)

    def test_detects_corruption(self):
        params = Params(5, 7)
        cs = compute_coefficients(params)
        bad = CoefficientSet(params=params, K0=cs.K0, K1=cs.K1, K2=cs.K2,
                             K3=cs.K3, J1=cs.J1 + 1, gamma0=cs.gamma0, C_pn=cs.C_pn)
        m = Fraction(1, 2)
        k = 2
        lhs = symbol_value(bad, m, -sphere_eigenvalue(k, 5))
        rhs = bilaplacian_symbol(params, m, k)
        assert lhs != rhs

    def test_float_p_mode(self):
        rep = verify_symbol_identity(Params(5, 6.5), trials=8, seed=3)
        assert rep.ok

    def test_trials_validated(self):
        with pytest.raises(ValueError):
            verify_symbol_identity(Params(5, 7), trials=0)

    def test_deterministic_in_seed(self):
        a = verify_symbol_identity(Params(6, 4), trials=5, seed=42)
        b = verify_symbol_identity(Params(6, 4), trials=5, seed=42)
        assert a == b

    @given(n=st.integers(5, 12), j=st.integers(1, 60), seed=st.integers(0, 10**6))
    @settings(max_examples=40, deadline=None)
    def test_identity_property(self, n, j, seed):
        lo = Fraction(n, n - 4)
        hi = Fraction(n + 4, n - 4)
        p = lo + (hi - lo) * Fraction(j, 61)
        assert verify_symbol_identity(Params(n, p), trials=4, seed=seed).ok


def test_sphere_eigenvalue():
    assert sphere_eigenvalue(0, 5) == 0
    assert sphere_eigenvalue(1, 5) == 4
    assert sphere_eigenvalue(2, 5) == 10
    assert sphere_eigenvalue(3, 5) == 18
    with pytest.raises(ValueError):
        sphere_eigenvalue(-1, 5)
