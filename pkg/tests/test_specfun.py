"""Branch-cut square root and complex Hankel wrappers."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperbem.specfun import (SpecfunDomainError, branch_sqrt, hankel1_0,
                              hankel1_1)
from oracles import mp_branch_sqrt, mp_hankel1

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


@given(re=finite, im=st.floats(min_value=1e-12, max_value=1e6))
def test_branch_sqrt_squares_back(re, im):
    z = complex(re, im)
    w = branch_sqrt(z)
    assert abs(w * w - z) <= 1e-12 * abs(z)


@given(re=finite, im=st.floats(min_value=0.0, max_value=1e6))
def test_branch_sqrt_maps_upper_half_plane_to_first_quadrant(re, im):
    z = complex(re, im)
    if z == 0:
        return
    w = branch_sqrt(z)
    assert w.real >= -1e-12 * abs(w)
    assert w.imag >= -1e-12 * abs(w)


def test_branch_sqrt_positive_real_axis_is_real():
    x = np.array([1e-8, 0.5, 1.0, 9.0, 1e8])
    w = branch_sqrt(x)
    assert np.all(w.imag == 0.0)
    np.testing.assert_allclose(w.real, np.sqrt(x), rtol=1e-15)


def test_branch_sqrt_continuous_across_negative_real_axis():
    # the cut sits on the negative imaginary axis, so -1 +/- i*eps agree
    above = branch_sqrt(-1.0 + 1e-14j)
    below = branch_sqrt(-1.0 + 0j)
    assert abs(above - below) < 1e-7
    assert abs(below - 1j) < 1e-12


def test_branch_sqrt_rejects_cut_and_nonfinite():
    with pytest.raises(SpecfunDomainError):
        branch_sqrt(-1j)
    with pytest.raises(SpecfunDomainError):
        branch_sqrt(0.0)
    with pytest.raises(SpecfunDomainError):
        branch_sqrt(complex(np.nan, 1.0))


@settings(max_examples=30, deadline=None)
@given(re=st.floats(min_value=1e-3, max_value=30.0),
       im=st.floats(min_value=0.0, max_value=30.0))
def test_hankel_first_quadrant_matches_mpmath(re, im):
    z = complex(re, im)
    for order, fn in ((0, hankel1_0), (1, hankel1_1)):
        ref = mp_hankel1(order, z)
        assert abs(fn(z) - ref) <= 1e-12 * abs(ref)


def test_hankel_real_argument_array_path():
    x = np.linspace(0.05, 20.0, 57)
    ref0 = np.array([mp_hankel1(0, xi) for xi in x])
    ref1 = np.array([mp_hankel1(1, xi) for xi in x])
    np.testing.assert_allclose(hankel1_0(x + 0j), ref0, rtol=1e-12)
    np.testing.assert_allclose(hankel1_1(x + 0j), ref1, rtol=1e-12)


def test_hankel_complex_argument_array_path():
    # sweep both evaluation regimes and the ring where they meet
    mags = np.concatenate([np.linspace(0.05, 12.6, 40),
                           np.linspace(12.65, 12.75, 8),
                           np.linspace(12.8, 60.0, 30)])
    z = np.concatenate([mags * np.exp(1j * a)
                        for a in (0.0, 0.4, 0.9, 1.3, np.pi / 2)])
    for order, fn in ((0, hankel1_0), (1, hankel1_1)):
        got = fn(z)
        ref = np.array([mp_hankel1(order, zi) for zi in z])
        np.testing.assert_allclose(got, ref, rtol=1e-10)


def test_hankel_array_and_scalar_routes_agree():
    rng = np.random.default_rng(3)
    z = rng.uniform(0.1, 15.0, 64) * np.exp(1j * rng.uniform(0.0, np.pi / 2, 64))
    for fn in (hankel1_0, hankel1_1):
        batch = fn(z)
        single = np.array([fn(zi) for zi in z])
        np.testing.assert_allclose(batch, single, rtol=5e-11)


def test_hankel_rejects_zero():
    with pytest.raises(SpecfunDomainError):
        hankel1_0(0.0)
    with pytest.raises(SpecfunDomainError):
        hankel1_1(np.array([1.0, 0.0], dtype=complex))


def test_hankel_derivative_relation():
    # d/dz H0 = -H1, checked with a central difference
    z = 1.7 + 0.3j
    h = 1e-6
    num = (hankel1_0(z + h) - hankel1_0(z - h)) / (2 * h)
    assert abs(num + hankel1_1(z)) < 1e-9
