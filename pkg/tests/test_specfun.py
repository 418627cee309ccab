import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvdyn.errors import DomainError, RangeError, SingularityError
from cvdyn.specfun import ei, ei_scaled_pair, si

from _oracles import ei_ref, si_ref


def test_si_examples():
    assert si(0.0) == 0.0
    assert si(1.0) == pytest.approx(0.9460830704, abs=1e-10)
    assert abs(si(1e6) - math.pi / 2) < 1e-5


def test_ei_examples():
    assert ei(1.0) == pytest.approx(1.8951178164, abs=1e-10)
    assert ei(-1.0) == pytest.approx(-0.2193839344, abs=1e-10)
    assert abs(ei(-50.0)) < 1e-22


def test_scaled_pair_examples():
    a, b = ei_scaled_pair(1.0)
    assert a == pytest.approx(-0.5963473624, abs=1e-10)
    assert b == pytest.approx(0.6971748832, abs=1e-10)
    a, b = ei_scaled_pair(1000.0)
    assert a == pytest.approx(-1e-3, rel=2e-3)
    assert b == pytest.approx(1e-3, rel=2e-3)


@pytest.mark.parametrize("x", np.logspace(-3, 4, 40))
def test_si_against_series_oracle(x):
    ref = float(si_ref(x))
    assert abs(si(x) - ref) <= 1e-13 * abs(ref)


@pytest.mark.parametrize("x", np.concatenate([np.logspace(-3, np.log10(700), 30), -np.logspace(-3, np.log10(700), 30)]))
def test_ei_against_series_oracle(x):
    ref = float(ei_ref(x))
    assert abs(ei(x) - ref) <= 1e-13 * abs(ref)


def test_ei_relative_accuracy_at_positive_root():
    x0 = float(mp.findroot(mp.ei, 0.37))
    for x in (x0 - 1e-3, x0 - 1e-9, x0 + 1e-9, x0 + 1e-3):
        ref = float(mp.ei(x))
        assert abs(ei(x) - ref) <= 1e-12 * abs(ref)


def test_vectorized_shape():
    x = np.linspace(-5, 5, 12).reshape(3, 4)
    assert si(x).shape == (3, 4)
    assert ei(x + 5.5).shape == (3, 4)
    assert isinstance(si(2.0), float)


def test_errors():
    with pytest.raises(SingularityError):
        ei(0.0)
    with pytest.raises(RangeError):
        ei(710.0)
    with pytest.raises(DomainError):
        si(float("nan"))
    with pytest.raises(DomainError):
        ei_scaled_pair(0.0)
    with pytest.raises(DomainError):
        ei_scaled_pair(-1.0)


@given(st.floats(min_value=1e-6, max_value=1e5))
def test_si_is_odd(x):
    assert si(-x) == -si(x)


@given(st.floats(min_value=10.0, max_value=1e7))
def test_si_approaches_half_pi(x):
    assert abs(si(x) - math.pi / 2) <= 2.0 / x
    assert si(x) <= si(math.pi)


@pytest.mark.parametrize("x", np.linspace(0.5, 40.0, 20))
def test_si_derivative(x):
    h = 1e-5
    fd = (si(x + h) - si(x - h)) / (2 * h)
    assert fd == pytest.approx(math.sin(x) / x, abs=1e-6)


@given(st.floats(min_value=0.05, max_value=600.0))
@settings(max_examples=60)
def test_ei_derivative(x):
    h = 1e-6 * max(1.0, x)
    fd = (ei(x + h) - ei(x - h)) / (2 * h)
    assert fd == pytest.approx(math.exp(x) / x, rel=1e-5)


def test_scaled_pair_against_extended_products():
    for u in np.logspace(-3, 3, 100):
        a, b = ei_scaled_pair(u)
        ea = mp.exp(u) * ei_ref(-u)
        eb = mp.exp(-u) * ei_ref(u)
        assert abs(a - float(ea)) <= 1e-9 * abs(float(ea))
        assert abs(b - float(eb)) <= 1e-9 * abs(float(eb))


def test_scaled_pair_matches_unscaled_where_representable():
    u = np.logspace(-2, 2.5, 50)
    a, b = ei_scaled_pair(u)
    np.testing.assert_allclose(a, np.exp(u) * ei(-u), rtol=1e-12)
    np.testing.assert_allclose(b, np.exp(-u) * ei(u), rtol=1e-12)
