import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from expcomposite.special import (
    BracketError,
    QuadratureError,
    QuadratureResult,
    adaptive_quadrature,
    find_root_bracketed,
    ln_gamma,
    lower_incomplete_gamma,
    upper_incomplete_gamma,
)

# reference values computed with 30-digit arbitrary-precision arithmetic
UPPER_GAMMA_ORACLE = {
    (-0.5, 1.0): 0.1781477117815607,
    (-1.5, 2.0): 0.011832994103345998,
    (-2.25, 0.5): 0.9724938777218113,
    (0.3, 0.7): 0.3982897603002755,
    (2.0, 3.5): 0.13588822540043324,
    (1.0, 1.0): 0.36787944117144233,
    (-1.0, 1.0): 0.14849550677592205,
    (-2.0, 0.25): 5.194946015650299,
    (-0.9999, 3.0): 0.0035477649446591696,
}
LOWER_GAMMA_ORACLE = {
    (0.3, 0.7): 2.593279227387315,
    (2.0, 3.5): 0.8641117745995668,
    (1.349976, 1.349976): 0.5472945531794325,
}


def test_ln_gamma_matches_lgamma():
    for a in (0.05, 0.308298, 1.0, 2.5, 17.0):
        assert ln_gamma(a) == math.lgamma(a)


def test_ln_gamma_rejects_nonpositive():
    for a in (0.0, -1.0, -0.5):
        with pytest.raises(ValueError):
            ln_gamma(a)


@pytest.mark.parametrize("key,expected", sorted(UPPER_GAMMA_ORACLE.items()))
def test_upper_incomplete_gamma_oracle(key, expected):
    a, x = key
    got = upper_incomplete_gamma(a, x)
    assert got == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("key,expected", sorted(LOWER_GAMMA_ORACLE.items()))
def test_lower_incomplete_gamma_oracle(key, expected):
    a, x = key
    assert lower_incomplete_gamma(a, x) == pytest.approx(expected, rel=1e-12)


def test_upper_gamma_at_zero_is_complete_gamma():
    for a in (0.3, 1.7, 4.0):
        assert upper_incomplete_gamma(a, 0.0) == pytest.approx(
            math.gamma(a), rel=1e-14
        )


def test_upper_gamma_shape_zero_is_exponential_integral():
    assert upper_incomplete_gamma(0.0, 1.5) == pytest.approx(
        0.10001958240663265, rel=1e-12
    )


def test_upper_gamma_input_validation():
    with pytest.raises(ValueError):
        upper_incomplete_gamma(0.5, -1.0)
    with pytest.raises(ValueError):
        upper_incomplete_gamma(-0.5, 0.0)
    with pytest.raises(ValueError):
        upper_incomplete_gamma(math.nan, 1.0)
    with pytest.raises(ValueError):
        upper_incomplete_gamma(1.0, math.nan)


def test_lower_gamma_requires_positive_shape():
    with pytest.raises(ValueError):
        lower_incomplete_gamma(-0.5, 1.0)


@given(
    a=st.floats(min_value=-3.0, max_value=3.0),
    x=st.floats(min_value=0.05, max_value=20.0),
)
def test_upper_gamma_recurrence(a, x):
    # Gamma(a+1, x) = a Gamma(a, x) + x^a e^(-x), valid for every real a
    lhs = upper_incomplete_gamma(a + 1.0, x)
    rhs = a * upper_incomplete_gamma(a, x) + math.exp(a * math.log(x) - x)
    scale = max(abs(lhs), abs(rhs), 1e-290)
    assert abs(lhs - rhs) <= 1e-10 * scale


@given(a=st.floats(min_value=0.05, max_value=30.0), x=st.floats(min_value=0.0, max_value=40.0))
def test_lower_plus_upper_is_complete(a, x):
    total = lower_incomplete_gamma(a, x) + upper_incomplete_gamma(a, x)
    assert total == pytest.approx(math.gamma(a), rel=1e-12)


def test_quadrature_exponential_tail():
    res = adaptive_quadrature(lambda x: math.exp(-x), 0.0, math.inf)
    assert isinstance(res, QuadratureResult)
    assert res.value == pytest.approx(1.0, abs=1e-12)
    assert res.evaluations >= 1


def test_quadrature_endpoint_singularity():
    res = adaptive_quadrature(lambda x: x**-0.5, 0.0, 1.0)
    assert res.value == pytest.approx(2.0, rel=1e-9)


def test_quadrature_breakpoints_split_discontinuity():
    f = lambda x: 1.0 if x < 1.0 else 0.25
    res = adaptive_quadrature(f, 0.0, 3.0, breakpoints=[1.0])
    assert res.value == pytest.approx(1.5, rel=1e-12)


def test_quadrature_ignores_breakpoints_outside_range():
    res = adaptive_quadrature(lambda x: x, 0.0, 1.0, breakpoints=[5.0, -2.0])
    assert res.value == pytest.approx(0.5, rel=1e-12)


def test_quadrature_reports_divergence():
    with pytest.raises(QuadratureError):
        adaptive_quadrature(lambda x: 1.0 / x, 0.0, 1.0)


def test_quadrature_result_validation():
    with pytest.raises(ValueError):
        QuadratureResult(value=1.0, abs_error_estimate=-1e-3, evaluations=10)
    with pytest.raises(ValueError):
        QuadratureResult(value=1.0, abs_error_estimate=0.0, evaluations=0)


def test_root_cosine():
    root = find_root_bracketed(math.cos, 0.0, 3.0)
    assert root == pytest.approx(math.pi / 2.0, rel=1e-13)


def test_root_endpoint_shortcut():
    assert find_root_bracketed(lambda x: x - 2.0, 2.0, 5.0) == 2.0
    assert find_root_bracketed(lambda x: x - 5.0, 2.0, 5.0) == 5.0


def test_root_requires_sign_change():
    with pytest.raises(BracketError):
        find_root_bracketed(lambda x: 1.0 + x * x, -1.0, 1.0)


@given(target=st.floats(min_value=-5.0, max_value=5.0))
def test_root_linear_exact(target):
    root = find_root_bracketed(lambda x: x - target, -6.0, 6.0)
    assert root == pytest.approx(target, abs=1e-12)


def test_quadrature_polynomial_with_numpy_callable():
    res = adaptive_quadrature(lambda x: 3.0 * np.square(x), 0.0, 2.0)
    assert res.value == pytest.approx(8.0, rel=1e-12)
