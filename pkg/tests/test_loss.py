import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hqtrc.loss import AdaptiveC, Estimator, adapt_c, weight_tensor

FAMILIES = ("welsch", "cauchy", "huber")


@pytest.mark.parametrize("family", FAMILIES)
def test_zero_loss_and_unit_weight(family):
    e = Estimator(family, 0.7)
    assert e.loss(0.0) == 0.0
    assert e.weight(0.0) == 1.0


def test_loss_examples():
    c = 0.4
    assert Estimator("welsch", c).loss(10 * c) == pytest.approx(c * c, abs=np.exp(-50) * c * c + 1e-18)
    assert Estimator("huber", c).loss(c) == pytest.approx(c * c / 2)
    assert Estimator("cauchy", 2.0).loss(2.0) == pytest.approx(2.0 * np.log(2.0))


def test_weight_examples():
    assert Estimator("welsch", 1.3).weight(1.3) == pytest.approx(np.exp(-0.5))
    assert Estimator("huber", 0.5).weight(1.0) == pytest.approx(0.5)
    assert Estimator("cauchy", 1.0).weight(1.0) == pytest.approx(0.5)


def test_unknown_family_and_bad_c():
    with pytest.raises(ValueError):
        Estimator("tukey")
    with pytest.raises(ValueError):
        Estimator("welsch", 0.0)


def test_weight_tensor_examples():
    c = 0.3
    e = Estimator("huber", c)
    full = np.ones(3)
    assert np.array_equal(weight_tensor(e, np.zeros(3), full), np.ones(3))
    assert np.array_equal(weight_tensor(e, np.ones(3), np.zeros(3)), np.zeros(3))
    assert np.allclose(weight_tensor(e, np.array([0.0, c, 2 * c]), full), [1.0, 1.0, 0.5])
    with pytest.raises(ValueError):
        weight_tensor(e, np.zeros(3), np.ones(4))


def test_adapt_c_examples():
    cfg = AdaptiveC()
    assert (cfg.eta, cfg.c_min) == (4.0, 0.15)
    assert adapt_c(cfg, np.zeros(10)) == 0.15
    assert adapt_c(cfg, np.array([-0.2, -0.1, 0.0, 0.1, 0.4])) == pytest.approx(0.4)
    with pytest.raises(ValueError):
        adapt_c(cfg, np.array([]))


def test_adapt_c_signed_mode_differs():
    res = np.array([-2.0, -1.5, -1.0, -0.5, 0.0])
    # quantiles -1.5 and -0.5: magnitudes give 4*1.5, signed max gives -2 -> floor
    assert adapt_c(AdaptiveC(), res) == pytest.approx(6.0)
    assert adapt_c(AdaptiveC(signed=True), res) == pytest.approx(0.15)


@pytest.mark.parametrize("family", FAMILIES)
def test_hq_dual_identity(family):
    c = 0.8
    e = Estimator(family, c)
    for t in np.linspace(-5 * c, 5 * c, 41):
        q = e.weight(t)
        assert 0.5 * q * t * t + e.dual(q) == pytest.approx(e.loss(t), abs=1e-12)
        # q = weight(t) minimizes the augmented cost
        qs = np.clip(q + np.linspace(-0.05, 0.05, 11), 1e-6, 1.0)
        vals = 0.5 * qs * t * t + e.dual(qs)
        assert np.all(vals >= e.loss(t) - 1e-12)


@pytest.mark.parametrize("family", FAMILIES)
def test_derivative_matches_finite_difference(family):
    c = 0.6
    e = Estimator(family, c)
    xs = np.linspace(-3, 3, 301)
    if family == "huber":
        xs = xs[np.abs(np.abs(xs) - c) > 1e-3]
    h = 1e-6
    fd = (e.loss(xs + h) - e.loss(xs - h)) / (2 * h)
    assert np.allclose(e.derivative(xs), fd, atol=1e-6)


def test_welsch_derivative_bound():
    c = 1.7
    xs = np.linspace(-20 * c, 20 * c, 200_001)
    assert np.max(np.abs(Estimator("welsch", c).derivative(xs))) <= c * np.exp(-0.5) + 1e-12


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(FAMILIES), st.floats(0.05, 5.0), st.floats(-50, 50), st.floats(-50, 50))
def test_shape_properties(family, c, a, b):
    e = Estimator(family, c)
    assert e.weight(a) == e.weight(-a)
    assert e.loss(a) == pytest.approx(e.loss(-a))
    assert 0 <= e.weight(a) <= 1
    if (a / c) ** 2 < 1000:  # Welsch underflows to 0 far out
        assert e.weight(a) > 0
    lo, hi = sorted((abs(a), abs(b)))
    assert e.weight(hi) <= e.weight(lo)
    assert e.loss(hi) >= e.loss(lo) - 1e-12
    assert e.weight(a) * a == pytest.approx(e.derivative(a), abs=1e-8)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=1, max_size=50))
def test_adapt_c_floor(res):
    assert adapt_c(AdaptiveC(), np.array(res)) >= 0.15
