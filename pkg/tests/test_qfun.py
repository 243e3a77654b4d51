from fractions import Fraction as F

import mpmath as mp
import pytest

from oracles import phi21_residual, qchar_residuals, special_points, theta_residuals
from qpv.exact import DomainError
from qpv.qfun import (
    ConvergenceError, PrecisionCtx, jackson_integral, jackson_sum, phi_rs, phi_rs_series,
    q_char, qpoch, qpoch_multi, sum_series, theta, theta_series, to_mpf,
)

CTX = PrecisionCtx(60)


def test_precision_ctx(monkeypatch):
    assert CTX.dps == 70
    monkeypatch.setenv("QPV_DIGITS", "33")
    assert PrecisionCtx.from_env().digits == 33
    with pytest.raises(DomainError):
        PrecisionCtx(10)


def test_finite_qpoch():
    assert qpoch(F(1, 2), F(1, 2), 2) == mp.mpf(3) / 8
    assert qpoch(5, F(1, 3), 0) == 1
    assert qpoch_multi([F(1, 2), F(1, 4)], F(1, 2), 1) == mp.mpf(3) / 8


def test_infinite_qpoch_matches_mpmath():
    with CTX.work():
        for a, q in [(F(1, 3), F(1, 2)), (F(-2), F(1, 7)), (F(5, 4), F(-3, 5))]:
            got = qpoch(a, q, None, CTX)
            ref = mp.qp(mp.mpf(a.numerator) / a.denominator, mp.mpf(q.numerator) / q.denominator)
            assert abs(got - ref) < mp.mpf(10) ** -55


def test_qpoch_rejects_bad_base():
    with pytest.raises(DomainError):
        qpoch(F(1, 2), 1)


def test_theta_product_equals_series():
    with CTX.work():
        for x, q in [(F(1, 3), F(1, 2)), (F(-5, 2), F(1, 5)), (F(7, 3), F(2, 3))]:
            assert abs(theta(x, q, CTX) - theta_series(x, q, CTX)) < mp.mpf(10) ** -55


def test_theta_zero_at_minus_one():
    assert theta(-1, F(1, 3)) == 0


def test_theta_quasi_periodicity():
    for p in special_points(count=4):
        good, printed = theta_residuals(*p["theta"], 60)
        assert good < mp.mpf(10) ** -55
        # the other orientation of the relation does not hold for this product
        assert printed > mp.mpf(10) ** -3


def test_q_character_relations():
    for p in special_points(count=4):
        good, printed = qchar_residuals(*p["qchar"], 60)
        assert good < mp.mpf(10) ** -55
        assert printed > mp.mpf(10) ** -3


def test_q_character_pole():
    q = F(1, 3)
    with pytest.raises(DomainError):
        q_char(F(2), F(-2) * q, q)


def test_terminating_series_length():
    q = F(1, 4)
    for n in range(6):
        r = phi_rs_series([q ** -n, 0, F(1, 2)], [F(1, 2), F(3, 4)], q, q)
        assert r.terms == n + 1


def test_q_binomial_theorem():
    # 1phi0(a;;q,z) = (az;q)_inf / (z;q)_inf
    a, q, z = F(1, 3), F(1, 2), F(1, 5)
    with CTX.work():
        lhs = phi_rs([a], [], q, z, CTX)
        rhs = qpoch(a * z, q, None, CTX) / qpoch(z, q, None, CTX)
        assert abs(lhs - rhs) < mp.mpf(10) ** -55


def test_series_divergence_and_poles():
    with pytest.raises(ConvergenceError):
        phi_rs([F(1, 2), F(1, 3)], [F(1, 5)], F(1, 2), F(3, 2))
    with pytest.raises(ConvergenceError):
        phi_rs([F(1, 2), F(1, 3), F(1, 7)], [F(1, 5)], F(1, 2), F(1, 3))
    with pytest.raises(DomainError):
        phi_rs([F(1, 3)], [F(4)], F(1, 2), F(1, 3))  # 1 - 4 q^2 = 0


def test_phi21_jackson_representation():
    for p in special_points(count=4):
        assert phi21_residual(*p["phi21"], 60) < mp.mpf(10) ** -55
    with pytest.raises(DomainError):
        from qpv.qfun import phi21_jackson
        phi21_jackson(F(1, 2), F(-1, 2), F(1, 3), F(1, 4), F(1, 2))


def test_jackson_monomials():
    # Jackson integral of x^k over [0, z] is z^(k+1) (1-q)/(1-q^(k+1))
    q, z = F(1, 3), F(2)
    with CTX.work():
        for k in range(4):
            got = jackson_sum(lambda t, k=k: t**k, z, q, CTX)
            want = to_mpf(z ** (k + 1) * (1 - q) / (1 - q ** (k + 1)))
            assert abs(got - want) < mp.mpf(10) ** -55
        assert jackson_integral(lambda t: t, 1, 1, q, CTX) == 0


def test_sum_series_tail_rule():
    ctx = PrecisionCtx(20)
    with ctx.work():
        r = sum_series((mp.mpf(1) / 2**k for k in range(10**6)), ctx)
        assert abs(r.value - 2) < mp.mpf(10) ** -29
        assert r.terms < 120
        # finite input is summed to the end
        assert sum_series(iter([1, 2, 3]), ctx).value == 6
