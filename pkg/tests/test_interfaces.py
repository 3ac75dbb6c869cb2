"""Fresnel factors, the round-trip resummation, and noise normalizers."""

import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st
from scipy.constants import c as c_light

from qplate.errors import DivergentResummationError
from qplate.interfaces import (
    fresnel_r,
    fresnel_t,
    multi_reflection_factor,
    noise_normalizers,
)
from qplate.media import RefractiveIndex


def test_fresnel_known_values():
    assert fresnel_r(1.0, 1.5) == pytest.approx(-0.2)
    assert fresnel_t(1.0, 1.5) == pytest.approx(0.8)
    assert fresnel_r(1.5, 1.0) == pytest.approx(0.2)


def test_fresnel_matched_media():
    n = 1.7 + 0.3j
    assert fresnel_r(n, n) == 0.0
    assert fresnel_t(n, n) == 1.0


complex_index = st.builds(
    complex, st.floats(0.5, 5.0), st.floats(0.0, 2.0)
)


@given(ni=complex_index, nj=complex_index)
def test_fresnel_identities(ni, nj):
    r = fresnel_r(ni, nj)
    t = fresnel_t(ni, nj)
    # continuity of the field across the boundary
    assert abs(1.0 + r - t) < 1e-12
    # antisymmetry and the Stokes relation
    assert abs(fresnel_r(nj, ni) + r) < 1e-12
    assert abs(t * fresnel_t(nj, ni) + r * r - 1.0) < 1e-12


def test_fresnel_accepts_refractive_index():
    n = RefractiveIndex(1.5, 0.2)
    assert fresnel_r(n, 1.0) == fresnel_r(1.5 + 0.2j, 1.0)


def test_multi_reflection_no_reflection():
    assert multi_reflection_factor(0.0, 0.3, 1.0 + 0.1j) == 1.0


def test_multi_reflection_partial_sums():
    r21, r23, phi = 0.4, -0.3, 1.2 + 0.05j
    q = cmath.exp(2j * phi) * r21 * r23
    series = sum(q ** k for k in range(200))
    assert multi_reflection_factor(r21, r23, phi) == pytest.approx(series)


def test_multi_reflection_divergence_guard():
    # |q| = 1 at phi = 0 and unit reflectivities
    with pytest.raises(DivergentResummationError):
        multi_reflection_factor(1.0, 1.0, 0.0)


def test_noise_normalizers_lossless():
    n = RefractiveIndex(1.5, 0.0)
    omega, l = 1e15, 1e-6
    u = omega * l / c_light
    cp, cm = noise_normalizers(n, omega, l)
    assert cp == pytest.approx(u + math.sin(1.5 * u) / 1.5, rel=1e-12)
    assert cm == pytest.approx(u - math.sin(1.5 * u) / 1.5, rel=1e-12)


def test_noise_normalizers_lossy_direct():
    n = RefractiveIndex(1.5, 0.4)
    omega, l = 1e15, 2e-6
    u = omega * l / c_light
    cp, cm = noise_normalizers(n, omega, l)
    damp = math.exp(-0.4 * u)
    assert cp == pytest.approx(
        damp * (math.sinh(0.4 * u) / 0.4 + math.sin(1.5 * u) / 1.5), rel=1e-12)
    assert cm == pytest.approx(
        damp * (math.sinh(0.4 * u) / 0.4 - math.sin(1.5 * u) / 1.5), rel=1e-12)


def test_noise_normalizers_taylor_branch_accuracy():
    # just below the series switch the result must still agree with the
    # direct formula, which is itself well conditioned at this scale
    omega, l = 1e15, 1e-6
    u = omega * l / c_light
    for x in (0.9e-6, 0.5e-6, 1e-8):
        g = x / u
        cp, cm = noise_normalizers(RefractiveIndex(1.5, g), omega, l)
        damp = math.exp(-x)
        direct_p = damp * (math.sinh(x) / g + math.sin(1.5 * u) / 1.5)
        direct_m = damp * (math.sinh(x) / g - math.sin(1.5 * u) / 1.5)
        assert cp == pytest.approx(direct_p, rel=1e-12)
        assert cm == pytest.approx(direct_m, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    beta=st.floats(0.3, 5.0),
    gamma=st.floats(0.0, 3.0),
    u=st.floats(1e-9, 50.0),
)
def test_noise_normalizers_nonnegative(beta, gamma, u):
    omega = 1e15
    l = u * c_light / omega
    cp, cm = noise_normalizers(RefractiveIndex(beta, gamma), omega, l)
    assert cp >= 0.0
    assert cm >= 0.0
    # sum identity: the oscillatory parts cancel
    x = gamma * u
    shx = math.sinh(x) / x if x > 1e-4 else 1.0 + x * x / 6.0
    total = 2.0 * math.exp(-x) * u * shx
    assert cp + cm == pytest.approx(total, rel=1e-9, abs=1e-12)
