import pytest
from hypothesis import given, strategies as st

from greenperturb.fields import constant, parse_polynomial, radial_square


def test_radial_square():
    p = radial_square()
    assert p(0.3, 0.4) == pytest.approx(0.25)
    assert p.laplacian(0.1, -0.7) == pytest.approx(4.0)
    gx, gy = p.grad(0.3, 0.4)
    assert (gx, gy) == pytest.approx((0.6, 0.8))


def test_constant():
    c = constant(2.5)
    assert c.is_constant
    assert c.at(0.3 + 0.1j) == pytest.approx(2.5)
    assert c.laplacian(0.2, 0.2) == 0.0


@pytest.mark.parametrize(
    "text,x,y,expected",
    [
        ("1 + 0.5*x^2 - y^2 + 2*x*y", 0.2, -0.3, 1 + 0.02 - 0.09 - 0.12),
        ("x^2+y^2", 0.3, 0.4, 0.25),
        ("-3", 5.0, 5.0, -3.0),
        ("1e-2*x", 2.0, 0.0, 0.02),
        ("x y^3", 2.0, 0.5, 0.25),
    ],
)
def test_parse_polynomial(text, x, y, expected):
    assert parse_polynomial(text)(x, y) == pytest.approx(expected)


@pytest.mark.parametrize("bad", ["", "x+", "2**x", "1 2", "z", "+*x", "x^"])
def test_parse_polynomial_rejects(bad):
    with pytest.raises(ValueError):
        parse_polynomial(bad)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-1, 1), st.floats(-1, 1))
def test_parsed_laplacian(a, b, x, y):
    p = parse_polynomial(f"{a!r}*x^3 + {abs(b)!r}*x*y^2 + 1")
    assert p.laplacian(x, y) == pytest.approx(6 * a * x + 2 * abs(b) * x, abs=1e-9)
