"""Boundary symbol: anchors, closed forms, and shape properties."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neckforge.errors import PoleError
from neckforge.symbol import ModeSpec, constants, theta, theta_analytic


def test_constant_anchor_n3():
    cs = constants(3)
    assert abs(cs.c - 2.0 / np.pi) <= 1e-14
    assert abs(cs.kappa - 4.0 / np.pi) <= 1e-14


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_constant_is_symbol_at_zero(n):
    assert abs(constants(n).c - theta(ModeSpec(n=n, m=0), 0.0)) <= 1e-14


def test_mode0_closed_form_n3():
    # xi * coth(pi xi / 2) in three dimensions
    xi = np.linspace(0.1, 8.0, 40)
    want = xi / np.tanh(np.pi * xi / 2.0)
    got = theta(ModeSpec(n=3, m=0), xi)
    assert np.max(np.abs(got - want) / want) <= 1e-13


def test_mode1_value_at_zero_n3():
    # Theta_1(0) = pi/2 > kappa = 4/pi: mode 1 clears the resonance level
    got = theta(ModeSpec(n=3, m=1), 0.0)
    assert abs(got - np.pi / 2.0) <= 1e-13
    assert got > constants(3).kappa


def test_large_frequency_growth():
    # Theta ~ |xi|^(2 gamma) = |xi|; checked at the top of the neck FFT grid
    for n in (2, 3):
        xi = np.array([200.0, 400.0, 800.0])
        val = theta(ModeSpec(n=n, m=0), xi)
        assert np.all(np.isfinite(val))
        assert np.all(np.abs(val / xi - 1.0) < 0.05)


def test_analytic_continuation_matches_axis():
    spec = ModeSpec(n=3, m=2)
    xi = np.linspace(-5, 5, 21)
    assert np.allclose(theta_analytic(spec, xi + 0j), theta(spec, xi), rtol=1e-12)


def test_analytic_numerator_pole_raises():
    # A + i z / 2 at a non-positive integer
    spec = ModeSpec(n=3, m=0)
    z = 2j * spec.a_offset  # i z / 2 = -A
    with pytest.raises(PoleError):
        theta_analytic(spec, np.asarray(z))


def test_bad_spec_rejected():
    from neckforge.errors import ValidationError
    with pytest.raises(ValidationError):
        ModeSpec(n=1, m=0)
    with pytest.raises(ValidationError):
        ModeSpec(n=3, m=-1)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 5), m=st.integers(0, 6),
       xi=st.floats(-20, 20, allow_nan=False))
def test_even_positive(n, m, xi):
    spec = ModeSpec(n=n, m=m)
    a = theta(spec, xi)
    b = theta(spec, -xi)
    assert a > 0
    assert abs(a - b) <= 1e-12 * a


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 5), xi=st.floats(0, 10, allow_nan=False))
def test_monotone_in_mode(n, xi):
    vals = [theta(ModeSpec(n=n, m=m), xi) for m in range(5)]
    assert all(vals[i] < vals[i + 1] for i in range(4))
