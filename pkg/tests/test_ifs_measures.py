from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_pairs.exact_core import delta_hat
from spectral_pairs.finite_spectral import is_spectrum
from spectral_pairs.ifs_measures import (
    AffineIFS,
    AffineImage,
    HypothesisError,
    affine_transform_pair,
    compose_spectra,
    cycle_spectrum,
    digit_power_spectrum,
    factor_convolution,
    find_cycles,
    ft_vanishes_exactly,
    infinite_spectra_family,
    invariant_ft,
    recover_digit_spectrum,
    scaling_identity_residual,
    spectrum_from_old,
)
from spectral_pairs.interval_sets import unit_interval_ft

QUARTER = AffineIFS(4, (0, 2))


def test_rejects_non_expansive():
    with pytest.raises(ValueError):
        AffineIFS(1, (0, 1))


def test_lebesgue_ft():
    xs = np.linspace(-7, 7, 57)
    assert np.allclose(invariant_ft(AffineIFS(4, (0, 1, 2, 3)), xs), unit_interval_ft(xs), atol=1e-12)


def test_tail_tolerance_respected():
    xs = np.linspace(-50, 50, 201)
    loose = invariant_ft(QUARTER, xs, tol=1e-6)
    tight = invariant_ft(QUARTER, xs, tol=1e-14)
    assert np.max(np.abs(loose - tight)) <= 1e-6


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.sets(st.integers(1, 9), max_size=3))
def test_scaling_identity(A, rest):
    ifs = AffineIFS(A, tuple(sorted(rest | {0})))
    xs = np.random.default_rng(A).uniform(-20, 20, 50)
    assert np.max(scaling_identity_residual(ifs, xs, 1e-12)) <= 1e-11


def test_two_dimensional_ft():
    ifs = AffineIFS(((2, 0), (0, 2)), ((0, 0), (1, 0), (0, 1), (1, 1)))
    x = np.array([[0.3, -0.7]])
    expected = unit_interval_ft(0.3) * unit_interval_ft(-0.7)
    assert abs(invariant_ft(ifs, x)[0] - expected) < 1e-12


def test_exact_zero_test():
    assert ft_vanishes_exactly(QUARTER, F(1))
    assert ft_vanishes_exactly(QUARTER, F(4))
    assert not ft_vanishes_exactly(QUARTER, F(2))
    assert not ft_vanishes_exactly(QUARTER, F(0))


def test_cycles():
    assert find_cycles(4, (0, 2), (0, 1)) == [(F(0),)]
    assert sorted(find_cycles(4, (0, 3), (0, 3))) == [(F(0),), (F(1),)]


def test_cycle_spectrum_prefix():
    spec = cycle_spectrum(QUARTER, [0, 1])
    assert spec.elements(64) == [0, 1, 4, 5, 16, 17, 20, 21]
    assert spec.first(8) == [0, 1, 4, 5, 16, 17, 20, 21]


def test_factorization_of_two_intervals():
    ifs = AffineIFS(4, (0, 1, 8, 9))
    fac = factor_convolution(ifs, 2, 2)
    assert fac.atom_set == (0, 2)
    assert fac.base.digits == (0, 1, 2, 3)
    assert fac.residual(ifs, np.linspace(-20, 20, 201)) < 1e-12
    assert factor_convolution(AffineIFS(4, (0, 1, 4, 5)), 2, 2) is None


def test_compose():
    D, spec = compose_spectra([(1, [0, 1], 2, [0, 1]), (8, [0, 1], 2, [0, 1])])
    assert D == (0, 1, 8, 9)
    assert is_spectrum(D, spec)


def test_digit_power_spectrum():
    res = digit_power_spectrum(2, 2, [0, 1], [[0, 1], [0, 1]], [[0, 1], [0, 1]])
    pts = res.spectrum.elements(3)
    assert F(1, 4) in pts and 0 in pts
    with pytest.raises(HypothesisError):
        digit_power_spectrum(2, 2, [0], [[0, 1]], [[0, 1]])


def test_new_spectrum_from_old():
    old = cycle_spectrum(QUARTER, [0, 1])
    new = spectrum_from_old(QUARTER, old, [0, 3])
    pts = new.elements(100)
    assert all(ft_vanishes_exactly(QUARTER, a - b) for a in pts for b in pts if a != b)
    assert recover_digit_spectrum(QUARTER, old, [0, 1]).points == (0, F(1, 4))
    with pytest.raises(HypothesisError):
        recover_digit_spectrum(QUARTER, new, [0, 3])


def test_infinite_family_distinct():
    fam = infinite_spectra_family(AffineIFS(4, (0, 1)), [0, 2], 5)
    prefixes = {tuple(s.elements(64)) for s in fam.spectra}
    assert len(prefixes) == 5
    radix = infinite_spectra_family(AffineIFS(4, (0, 1)), [0, 2], 3, shifts="radix")
    assert len(radix.spectra) == 3
    with pytest.raises(HypothesisError):
        infinite_spectra_family(AffineIFS(2, (0, 1)), [0, 1], 2)


mats = st.sampled_from([F(1, 2), F(2), F(-1), F(3, 2), F(-2, 3)])
shifts = st.builds(F, st.integers(-6, 6), st.integers(1, 4))


@settings(max_examples=40, deadline=None)
@given(mats, shifts, mats, shifts)
def test_affine_action_group_law(c1, s1, c2, s2):
    spec = cycle_spectrum(QUARTER, [0, 1])
    m1, l1 = affine_transform_pair(QUARTER, spec, c1, [s1])
    m12, l12 = affine_transform_pair(m1, l1, c2, [s2])
    m_direct, l_direct = affine_transform_pair(QUARTER, spec, c2 * c1, [c2 * s1 + s2])
    xs = np.linspace(-3, 3, 31)
    assert np.allclose(m12.ft(xs), m_direct.ft(xs), atol=1e-12)
    assert l12.elements(40) == l_direct.elements(40)


def test_affine_identity_and_ifs_image():
    spec = cycle_spectrum(QUARTER, [0, 1])
    m, l = affine_transform_pair(QUARTER, spec, 1)
    assert m == QUARTER and l is spec
    m, _ = affine_transform_pair(QUARTER, spec, F(1, 2))
    assert m == AffineIFS(4, (0, 1))
    m, _ = affine_transform_pair(QUARTER, spec, F(1, 3), [F(1, 7)])
    assert isinstance(m, AffineImage)


def test_image_ft_formula():
    spec = cycle_spectrum(QUARTER, [0, 1])
    m, _ = affine_transform_pair(QUARTER, spec, F(1, 3), [F(1, 7)])
    xs = np.linspace(-2, 2, 9)
    expected = np.exp(2j * np.pi * xs / 7) * invariant_ft(QUARTER, xs / 3)
    assert np.allclose(m.ft(xs), expected, atol=1e-12)
