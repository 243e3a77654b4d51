import random
from fractions import Fraction as F

import pytest

from qpv.exact import (
    X, DomainError, Mat2, Poly, RatFunc, SingularMatrixError,
    mat2_to_json, poly_gcd, q_shift, rat, rat_str,
)


def rand_poly(rng, deg):
    return Poly(F(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(deg + 1))


def test_rat_promotion():
    assert rat("3/6") == F(1, 2)
    assert rat(4) == F(4)
    assert rat_str(F(-6, 4)) == "-3/2"
    assert rat_str(5) == "5"
    with pytest.raises(TypeError):
        rat(0.5)
    with pytest.raises(DomainError):
        rat("1/0")


def test_poly_basics():
    p = Poly((1, 0, 0))
    assert p.coeffs == (1,)
    assert Poly().degree == -1
    x = Poly.x()
    f = (x - 1) * (x + 2)
    assert f.coeffs == (-2, 1, 1)
    assert f(3) == 10
    assert f.q_shift(F(1, 2))(4) == f(2)
    assert (x + 1) ** 3 == Poly((1, 3, 3, 1))


def test_divmod_identity():
    rng = random.Random(1)
    for _ in range(30):
        a, b = rand_poly(rng, rng.randint(0, 6)), rand_poly(rng, rng.randint(0, 3))
        if b.is_zero():
            continue
        qt, r = divmod(a, b)
        assert qt * b + r == a
        assert r.degree < b.degree


def test_gcd_of_products():
    rng = random.Random(2)
    x = Poly.x()
    for _ in range(10):
        g = (x - F(rng.randint(-5, 5), 3)) * (x - F(rng.randint(-5, 5), 7))
        a, b = g * rand_poly(rng, 2), g * rand_poly(rng, 3)
        d = poly_gcd(a, b)
        assert (a % d).is_zero() and (b % d).is_zero()
        assert d.lead == 1 and d.degree >= 2


def test_ratfunc_canonical():
    f = RatFunc(Poly((-1, 0, 1)), Poly((-2, 2)))  # (x^2 - 1) / (2x - 2)
    assert f.num == Poly((F(1, 2), F(1, 2)))
    assert f.den == Poly((1,))
    assert (X / (X + 1)) + 1 / (X + 1) == RatFunc(1)
    assert (X * X - 1) / (X - 1) == X + 1
    assert RatFunc(0, Poly((3, 1))).den == Poly((1,))
    with pytest.raises(DomainError):
        RatFunc(1, 0)


def test_ratfunc_eval_and_shift():
    f = (X - 2) / (X + 3)
    assert f(F(1)) == F(-1, 4)
    assert q_shift(f, F(1, 3))(F(3)) == f(F(1))
    with pytest.raises(DomainError):
        f(-3)


def test_mat2_algebra():
    m = Mat2(X, 1, X - 1, 2)
    assert m * m.inv() == Mat2.identity()
    assert m.det() == X + 1
    assert m.trace() == X + 2
    with pytest.raises(SingularMatrixError):
        Mat2(X, X, 1, 1).inv()
    js = mat2_to_json(Mat2.diag(F(1, 2), X))
    assert js[0][0] == {"num": ["1/2"], "den": ["1"]}
    assert js[1][1]["num"] == ["0", "1"]
