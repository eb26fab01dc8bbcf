from fractions import Fraction as Fr

import mpmath as mp
import pytest

from pfqturan.errors import DomainError, HypothesisError
from pfqturan.hyperfn import HyperParams, PrecisionCtx, gamma_ratio
from pfqturan.turanian import (
    ShiftSpec,
    delta_coeffs_exact,
    delta_coeffs_float,
    delta_coeffs_proofsum,
    delta_f,
    predicted_sign,
    verify_theorem1,
    verify_theorem3,
)

CTX = PrecisionCtx(50, 1e-30)


def P(upper, lower, split=None):
    return HyperParams.from_strings(upper, lower, split)


def S(mu, alpha, beta):
    return ShiftSpec(Fr(mu), Fr(alpha), Fr(beta))


def test_shiftspec_validation():
    with pytest.raises(DomainError):
        S(-1, 1, 1)
    assert S(0, 2, 1).integer_alpha
    assert not S(0, Fr(1, 2), 1).integer_alpha
    assert S(0, 2, 1).swapped == S(0, 1, 2)


def test_delta_f_trivial_cases():
    assert abs(delta_f(P("", ""), S(1, 2, 3), Fr(7, 5), CTX)) < 1e-40
    assert abs(delta_f(P("1", "2"), S(1, 0, 3), 2, CTX)) < 1e-40


def test_delta_f_sign_moment_family():
    # f(mu; x) = int_0^1 t^mu e^{xt} dt is log-convex in mu
    assert delta_f(P("1", "2"), S(0, 1, 1), 1, CTX) <= 0


def test_delta_f_matches_direct_products():
    h, s, x = P("3/2", "5/2,1/3"), S(Fr(1, 2), Fr(3, 4), Fr(5, 3)), Fr(-7, 4)

    def f(mu):
        with mp.workdps(70):
            a, b = mp.mpf(3) / 2 + mu, [mp.mpf(5) / 2 + mu, mp.mpf(1) / 3 + mu]
            return mp.gamma(a) / (mp.gamma(b[0]) * mp.gamma(b[1])) * mp.hyper([a], b, mp.mpf(-7) / 4)

    with mp.workdps(70):
        mu, al, be = mp.mpf(1) / 2, mp.mpf(3) / 4, mp.mpf(5) / 3
        ref = f(mu + al) * f(mu + be) - f(mu) * f(mu + al + be)
        assert abs(delta_f(h, s, x, CTX) - ref) < 1e-27 * abs(f(mu) ** 2)


def test_symmetry_in_alpha_beta():
    h, x = P("2,1/2", "3"), Fr(1, 3)
    s = S(Fr(1, 4), Fr(2, 3), Fr(9, 5))
    with mp.workdps(60):
        assert abs(delta_f(h, s, x, CTX) - delta_f(h, s.swapped, x, CTX)) < 1e-29
    # exact path: the divided-out factor P(mu)P(mu+beta) is not symmetric, the
    # ratio of the two scalings is (a+mu)_2/(b+mu)_2 / ((a+mu)_3/(b+mu)_3) here
    t23 = delta_coeffs_exact(P("2", "1,3"), S(1, 2, 3), 10).coeffs
    t32 = delta_coeffs_exact(P("2", "1,3"), S(1, 3, 2), 10).coeffs
    r = Fr(3 * 4, 2 * 3 * 4 * 5) / Fr(3 * 4 * 5, 2 * 3 * 4 * 4 * 5 * 6)
    assert t32.scale(r).coeffs == t23.coeffs


def test_exact_coefficients_examples():
    t = delta_coeffs_exact(P("1", "2"), S(0, 1, 1), 5)
    assert t.coeffs[0] == Fr(-1, 6)
    assert list(t.coeffs) == [Fr(-1, 6), Fr(-1, 6), Fr(-4, 45), Fr(-1, 30), Fr(-11, 1120), Fr(-73, 30240)]
    assert all(c == 0 for c in delta_coeffs_exact(P("", ""), S(1, 2, 1), 8).coeffs)
    assert all(c == 0 for c in delta_coeffs_exact(P("3/2,1/3", "3/2,1/3"), S(1, 2, 1), 8).coeffs)


def test_exact_requires_positive_scaling_and_integer_alpha():
    with pytest.raises(DomainError):
        delta_coeffs_exact(P("-1/2", "2"), S(0, 1, 1), 4)
    with pytest.raises(DomainError):
        delta_coeffs_exact(P("1", "2"), S(0, Fr(1, 2), 1), 4)
    with pytest.raises(DomainError):
        delta_coeffs_exact(P("1", "2", "1,0"), S(0, 1, 1), 4)


@pytest.mark.parametrize("upper,lower,mu,beta", [
    ("1", "2", 0, 1), ("2", "1", Fr(1, 2), 3), ("3/2,5", "2/3", 1, Fr(1, 2)),
    ("1/3", "7/4,2", 2, 0), ("", "5/2", 0, 2),
])
def test_proofsum_oracle(upper, lower, mu, beta):
    h = P(upper, lower)
    assert delta_coeffs_exact(h, S(mu, 1, beta), 20).coeffs.coeffs == \
        delta_coeffs_proofsum(h, Fr(mu), Fr(beta), 20).coeffs


def test_proofsum_first_coefficient():
    assert delta_coeffs_proofsum(P("1", "2"), 0, 1, 3).coeffs[0] == Fr(-1, 6)
    assert all(c == 0 for c in delta_coeffs_proofsum(P("5/3", "5/3"), 1, 2, 6).coeffs)


def test_float_coefficients_match_exact_after_scaling():
    h, s = P("3/2", "5/2,2"), S(Fr(1, 2), 2, 1)
    exact = delta_coeffs_exact(h, s, 12)
    with mp.workdps(60):
        scale = gamma_ratio((Fr(2),), (Fr(3), Fr(5, 2)), CTX) * \
            gamma_ratio((Fr(3),), (Fr(4), Fr(7, 2)), CTX)
        flt = delta_coeffs_float(h, s, 12, CTX)
        for c, v in zip(exact.coeffs, flt):
            ref = mp.mpf(c.numerator) / c.denominator * scale
            assert abs(v - ref) <= 1e-35 * max(abs(ref), mp.mpf(10) ** -40)


def test_float_exact_consistency_on_series():
    h, s, x = P("1", "2"), S(1, 1, 2), Fr(1, 5)
    exact = delta_coeffs_exact(h, s, 60)
    with mp.workdps(60):
        scale = gamma_ratio((Fr(2),), (Fr(3),), CTX) * gamma_ratio((Fr(4),), (Fr(5),), CTX)
        approx = exact.coeffs.evaluate(x) * scale
        assert abs(approx - delta_f(h, s, x, CTX)) < 1e-20


def test_lemma1_and_lemma2_consistency():
    h = P("2", "1,3")  # decr chain holds
    for mu in (0, Fr(1, 2), 2):
        base = delta_coeffs_exact(h, S(mu, 1, 2), 15).signs()
        for k in (2, 3):
            signs = delta_coeffs_exact(h, S(mu, k, 2), 15).signs()
            assert all(s >= 0 for s in signs) and all(s >= 0 for s in base)


def test_predicted_sign():
    assert predicted_sign(P("1", "2")) == (-1, "incr")
    assert predicted_sign(P("2", "1")) == (1, "decr")
    assert predicted_sign(P("1", "2,3"))[1] in ("decr", "none")
    assert predicted_sign(P("3/2", "3/2")) == (0, "both")


def test_verify_theorem3_examples():
    v = verify_theorem3(P("1", "2"), S(Fr(1, 2), 1, 3), 30, [0, 1, 3], CTX)
    assert v.holds and v.chain == "incr" and all(c <= 0 for c in v.coefficients.coeffs)
    v = verify_theorem3(P("2", "1"), S(0, 1, 1), 30, [0, 2], CTX)
    assert v.holds and all(c >= 0 for c in v.coefficients.coeffs)
    v = verify_theorem3(P("5/2", "5/2"), S(0, 1, 1), 10, [1], CTX)
    assert v.holds and all(c == 0 for c in v.coefficients.coeffs)


def test_verify_theorem3_hypotheses():
    with pytest.raises(HypothesisError):
        verify_theorem3(P("1", "2"), S(0, Fr(1, 2), 1), 5, [], CTX)
    with pytest.raises(HypothesisError):
        verify_theorem3(P("1/2,2", "1,1"), S(0, 1, 1), 5, [], CTX)
    # alpha > beta + 1: only the grid is checked
    v = verify_theorem3(P("1", "2"), S(0, 3, 1), 5, [1], CTX)
    assert v.coeffs_hold is None and v.grid_hold


def test_verify_theorem1_example3_family():
    h = P("1,2", "2,3", "0,0")  # qFq with b majorizing a
    for x in (Fr(-49, 10), -1, 0, Fr(9, 10), 4):
        v = verify_theorem1(h, S(Fr(1, 2), Fr(3, 2), 1), x, CTX)
        assert v.lower_holds and v.upper_holds
        assert 0 <= v.ratio <= 0.25


def test_verify_theorem1_example2_family():
    h = P("-7/3,1", "2", "1,0")
    v = verify_theorem1(h, S(1, 1, 1), Fr(-1, 2), CTX)
    assert v.holds
    with pytest.raises(DomainError):
        verify_theorem1(h, S(1, 1, 1), Fr(-3, 2), CTX)


def test_verify_theorem1_hypotheses():
    with pytest.raises(HypothesisError, match="p2 >= 1"):
        verify_theorem1(P("1", "", "1,0"), S(0, 1, 1), 0, CTX)
    with pytest.raises(HypothesisError, match="split"):
        verify_theorem1(P("1", "2"), S(0, 1, 1), 0, CTX)
    with pytest.raises(HypothesisError, match="v_"):
        verify_theorem1(P("2", "1", "0,0"), S(0, 1, 1), 0, CTX)


def test_theorem1_left_inequality_tight_as_alpha_vanishes():
    h = P("1,2", "2,3", "0,0")
    vals = [verify_theorem1(h, S(1, Fr(1, 10 ** k), 1), Fr(1, 2), CTX).minus_delta for k in (2, 4, 6)]
    assert vals[0] > vals[1] > vals[2] > 0
    assert vals[2] < 1e-5
