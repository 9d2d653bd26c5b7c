import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from expcomposite.composite import (
    CompositeSpec,
    ExponentiatedComposite,
    InfiniteMomentError,
    LimitedMomentQuery,
    as_composite_spec,
    exponentiate,
    parent_moment,
    verify_composite,
)
from expcomposite.models import ModelId, build, exp_pareto_spec, ig_pareto_spec
from expcomposite.special import adaptive_quadrature

# A hand-built spliced density that is NOT calibrated for smoothness:
# exponential head with an arbitrary rate, Pareto tail with an arbitrary
# exponent.  The machinery contracts (mass, cdf/quantile, partial moments)
# must hold for it anyway; only verify_composite should complain.


def rough_spec(theta=2.0, rate=0.7, tail_exp=1.3, wired=True) -> CompositeSpec:
    c = 1.0 / (1.0 + (1.0 - math.exp(-rate * theta)))

    def head_density(x):
        return rate * np.exp(-rate * np.asarray(x, dtype=float))

    def tail_density(x):
        x = np.asarray(x, dtype=float)
        return tail_exp * theta**tail_exp * x ** (-tail_exp - 1.0)

    def head_cdf(u):
        return -np.expm1(-rate * np.asarray(u, dtype=float))

    def tail_cdf(u):
        return 1.0 - (theta / np.asarray(u, dtype=float)) ** tail_exp

    extras = {}
    if wired:
        extras = {
            "head_ppf": lambda q: -np.log1p(-np.asarray(q, dtype=float)) / rate,
            "tail_ppf": lambda q: theta
            * (1.0 - np.asarray(q, dtype=float)) ** (-1.0 / tail_exp),
        }
    return CompositeSpec(
        head_density=head_density,
        tail_density=tail_density,
        breakpoint=theta,
        norm_const=c,
        head_cdf=head_cdf,
        tail_cdf=tail_cdf,
        tail_moment_sup=tail_exp,
        label="rough",
        **extras,
    )


def test_spec_validation():
    with pytest.raises(ValueError):
        rough_spec(theta=-1.0)
    good = rough_spec()
    with pytest.raises(ValueError):
        CompositeSpec(
            head_density=good.head_density,
            tail_density=good.tail_density,
            breakpoint=good.breakpoint,
            norm_const=1.5,
            head_cdf=good.head_cdf,
            tail_cdf=good.tail_cdf,
        )


def test_total_mass_is_one():
    assert rough_spec().total_mass() == pytest.approx(1.0, abs=1e-12)
    assert rough_spec(theta=0.4, rate=2.2, tail_exp=0.4).total_mass() == pytest.approx(
        1.0, abs=1e-12
    )


def test_limited_moment_query_validation():
    with pytest.raises(ValueError):
        LimitedMomentQuery(order=-0.5, cap=1.0)
    with pytest.raises(ValueError):
        LimitedMomentQuery(order=1.0, cap=0.0)


def test_exponent_validation():
    with pytest.raises(ValueError):
        ExponentiatedComposite(rough_spec(), 0.0)
    with pytest.raises(ValueError):
        ExponentiatedComposite(rough_spec(), -2.0)


def test_pdf_is_change_of_variables():
    spec = rough_spec()
    eta = 1.7
    d = ExponentiatedComposite(spec, eta)
    c = spec.norm_const
    for y in (0.3, 0.9, d.breakpoint, 2.1, 7.0):
        x = y**eta
        piece = spec.head_density if x < spec.breakpoint else spec.tail_density
        expected = c * float(piece(x)) * eta * y ** (eta - 1.0)
        assert d.pdf(y) == pytest.approx(expected, rel=1e-14)


def test_pdf_nan_propagates_and_zero_handled():
    d = ExponentiatedComposite(rough_spec(), 2.0)
    out = d.pdf(np.array([math.nan, 0.0, 1.0]))
    assert math.isnan(out[0])
    assert out[1] == 0.0  # exponent > 1 pins the transformed density to 0
    assert out[2] > 0.0


def test_cdf_from_quadrature():
    d = ExponentiatedComposite(rough_spec(), 0.8)
    for y in (0.5, d.breakpoint, 5.0):
        num = adaptive_quadrature(
            lambda s: float(d.pdf(s)), 0.0, y, breakpoints=[d.breakpoint]
        )
        assert d.cdf(y) == pytest.approx(num.value, rel=1e-9)


def test_cdf_limits_and_monotonicity():
    d = ExponentiatedComposite(rough_spec(), 1.3)
    ys = np.linspace(0.0, 30.0, 200)
    vals = d.cdf(ys)
    assert vals[0] == 0.0
    assert np.all(np.diff(vals) >= 0.0)
    assert vals[-1] <= 1.0


@given(
    u=st.floats(min_value=0.001, max_value=0.999),
    eta=st.floats(min_value=0.3, max_value=4.0),
)
def test_quantile_round_trip(u, eta):
    d = ExponentiatedComposite(rough_spec(), eta)
    y = d.quantile(u)
    assert d.cdf(y) == pytest.approx(u, abs=1e-9)


def test_quantile_fallback_inversion_matches_wired():
    wired = ExponentiatedComposite(rough_spec(wired=True), 1.9)
    bare = ExponentiatedComposite(rough_spec(wired=False), 1.9)
    us = np.array([0.05, 0.3, wired.head_mass, 0.7, 0.99])
    got = bare.quantile(us)
    want = wired.quantile(us)
    assert np.allclose(got, want, rtol=1e-9)


def test_quantile_rejects_endpoints():
    d = ExponentiatedComposite(rough_spec(), 1.0)
    for u in (0.0, 1.0, -0.2, 1.7):
        with pytest.raises(ValueError):
            d.quantile(u)


def test_sampling_deterministic_and_plausible():
    d = ExponentiatedComposite(rough_spec(), 2.0)
    a = d.sample(4000, seed=11)
    b = d.sample(4000, seed=11)
    assert np.array_equal(a, b)
    assert a.shape == (4000,)
    head_frac = float(np.mean(a < d.breakpoint))
    assert head_frac == pytest.approx(d.cdf(d.breakpoint), abs=0.03)
    with pytest.raises(ValueError):
        d.sample(0, seed=1)


def test_partial_moment_quadrature_fallback():
    spec = rough_spec()
    # no closed-form partials wired: the methods must integrate
    u, r = 1.2, 0.7
    got = spec.head_partial(u, r)
    want = adaptive_quadrature(lambda x: x**r * float(spec.head_density(x)), 0.0, u)
    assert got == pytest.approx(want.value, rel=1e-9)
    u2 = 4.5
    got2 = spec.tail_partial(u2, r)
    want2 = adaptive_quadrature(
        lambda x: x**r * float(spec.tail_density(x)), spec.breakpoint, u2
    )
    assert got2 == pytest.approx(want2.value, rel=1e-9)


def test_moment_numeric_vs_parent_moment():
    # transformed t-th moment equals the parent moment of order t / eta
    spec = rough_spec()
    for eta, t in ((2.0, 1.0), (0.8, 0.25), (5.0, 2.0)):
        d = ExponentiatedComposite(spec, eta)
        assert d.moment_numeric(t) == pytest.approx(
            parent_moment(spec, t / eta), rel=1e-7
        )


def test_moment_divergence_guard():
    spec = rough_spec(tail_exp=1.3)
    d = ExponentiatedComposite(spec, 2.0)
    with pytest.raises(InfiniteMomentError):
        d.moment_numeric(2.6)  # t / eta == tail_moment_sup exactly
    with pytest.raises(InfiniteMomentError):
        d.moment_numeric(3.1)
    with pytest.raises(InfiniteMomentError):
        parent_moment(spec, 1.3)


def test_limited_moment_order_zero_is_one():
    d = ExponentiatedComposite(rough_spec(), 1.4)
    for cap in (0.2, d.breakpoint, 9.0):
        assert d.limited_moment(LimitedMomentQuery(0.0, cap)) == pytest.approx(
            1.0, abs=1e-12
        )


def test_limited_moment_accepts_tuple():
    d = ExponentiatedComposite(rough_spec(), 1.4)
    q = LimitedMomentQuery(0.5, 2.0)
    assert d.limited_moment((0.5, 2.0)) == d.limited_moment(q)


def test_limited_moment_vs_quadrature_all_branches():
    d = ExponentiatedComposite(rough_spec(), 1.6)
    yb = d.breakpoint
    t = 0.75
    for cap in (0.5 * yb, yb, 2.0 * yb):
        got = d.limited_moment(LimitedMomentQuery(t, cap))
        head = adaptive_quadrature(
            lambda y: y**t * float(d.pdf(y)),
            0.0,
            cap,
            breakpoints=[yb] if cap > yb else None,
        )
        want = head.value + cap**t * (1.0 - float(d.cdf(cap)))
        assert got == pytest.approx(want, rel=1e-8)


def test_limited_moment_branch_continuity():
    d = ExponentiatedComposite(rough_spec(), 0.9)
    yb = d.breakpoint
    t = 1.2
    eps = 1e-9
    below = d.limited_moment(LimitedMomentQuery(t, yb * (1.0 - eps)))
    at = d.limited_moment(LimitedMomentQuery(t, yb))
    above = d.limited_moment(LimitedMomentQuery(t, yb * (1.0 + eps)))
    assert below == pytest.approx(at, rel=1e-7)
    assert above == pytest.approx(at, rel=1e-7)


def test_limited_moment_grows_to_full_moment():
    d = ExponentiatedComposite(rough_spec(tail_exp=1.3), 2.0)
    t = 1.0  # t / eta = 0.5 < 1.3, the full moment exists
    full = d.moment_numeric(t)
    # last cap spans many decades, exercising the log-substitution fallback
    caps = [2.0, 8.0, 32.0, 128.0, 100000.0]
    vals = [d.limited_moment(LimitedMomentQuery(t, b)) for b in caps]
    assert all(x < y for x, y in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(full, rel=1e-2)


def test_log_pdf_matches_log_of_pdf():
    d = ExponentiatedComposite(rough_spec(), 2.5)
    ys = np.array([0.2, 0.8, 1.5, 4.0])
    assert np.allclose(d.log_pdf(ys), np.log(d.pdf(ys)), rtol=1e-12)


def test_log_pdf_survives_underflow():
    # far tail: pdf underflows to 0 but the log form stays finite
    d = build(ModelId.EXP_EXP_PARETO, 1.0, 20.0)
    y = 1e60
    assert d.pdf(y) == 0.0
    lp = d.log_pdf(y)
    assert math.isfinite(lp) and lp < -700.0


def test_verify_passes_calibrated_models():
    assert verify_composite(build(ModelId.EXP_IG_PARETO, 1.0, 1.0)).passed
    assert verify_composite(build(ModelId.EXP_EXP_PARETO, 3.0, 2.0)).passed


def test_verify_flags_rough_splice():
    report = verify_composite(ExponentiatedComposite(rough_spec(), 1.0))
    assert not report.continuity_ok
    assert not report.passed
    # normalization is fine by construction of the weight
    assert report.normalization_ok


def test_verify_flags_bad_normalization():
    spec = rough_spec()
    bad = CompositeSpec(
        head_density=spec.head_density,
        tail_density=spec.tail_density,
        breakpoint=spec.breakpoint,
        norm_const=spec.norm_const * 0.9,
        head_cdf=spec.head_cdf,
        tail_cdf=spec.tail_cdf,
        tail_moment_sup=spec.tail_moment_sup,
    )
    report = verify_composite(ExponentiatedComposite(bad, 1.0))
    assert not report.normalization_ok


def test_as_composite_spec_round_trip():
    d = build(ModelId.EXP_EXP_PARETO, 2.0, 1.5)
    mat = as_composite_spec(d)
    assert mat.breakpoint == pytest.approx(d.breakpoint)
    assert mat.norm_const == d.parent.norm_const
    flat = ExponentiatedComposite(mat, 1.0)
    ys = np.array([0.4, 1.0, mat.breakpoint, 3.0, 10.0])
    assert np.allclose(flat.pdf(ys), d.pdf(ys), rtol=1e-12)
    assert np.allclose(flat.cdf(ys), d.cdf(ys), rtol=1e-12)
    us = np.array([0.1, 0.5, 0.9])
    assert np.allclose(flat.quantile(us), d.quantile(us), rtol=1e-9)


def test_exponentiate_composes_through_materialization():
    spec = exp_pareto_spec(2.0)
    inner = exponentiate(spec, 1.6)
    two_step = exponentiate(inner, 2.0)
    one_step = exponentiate(spec, 3.2)
    ys = np.array([0.3, 0.9, 1.1, 2.0, 5.0])
    a = np.array([float(two_step.pdf(v)) for v in ys])
    b = one_step.pdf(ys)
    assert np.allclose(a, b, rtol=1e-12)


def test_exponentiate_identity():
    spec = ig_pareto_spec(1.0)
    d = exponentiate(spec, 1.0)
    ys = np.array([0.2, 1.0, 4.0])
    assert np.allclose(d.pdf(ys), spec.norm_const * np.where(
        ys < spec.breakpoint, spec.head_density(ys), spec.tail_density(ys)
    ), rtol=1e-12)


def test_scalar_and_array_conventions():
    d = build(ModelId.EXP_IG_PARETO, 1.0, 2.0)
    assert isinstance(d.pdf(1.5), float)
    assert isinstance(d.cdf(1.5), float)
    assert isinstance(d.quantile(0.5), float)
    arr = d.pdf(np.array([0.5, 1.5]))
    assert arr.shape == (2,)
