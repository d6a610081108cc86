from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_pairs.finite_spectral import RationalSpectrum
from spectral_pairs.interval_sets import (
    IntervalUnion,
    QuasiLattice,
    as_affine_ifs,
    attractor_matches,
    hausdorff_distance,
    interval_complement,
    interval_union_ft,
    spectra_of_interval_union,
    tiles_real_line,
    unit_interval_ft,
)
from spectral_pairs.validation import parseval_scan


def test_unit_interval_ft_continuous_at_zero():
    ts = np.array([0.0, 1e-9, 1e-7, 1e-5])
    vals = unit_interval_ft(ts)
    exact = np.where(ts == 0, 1, (np.exp(2j * np.pi * ts) - 1) / (2j * np.pi * np.where(ts == 0, 1, ts)))
    assert np.allclose(vals, exact, atol=1e-14)
    assert unit_interval_ft(0) == 1


def test_interval_union_ft_zeros():
    assert abs(interval_union_ft([0, 2], 0.25)) < 1e-15
    assert abs(interval_union_ft([0, 2], 1.0)) < 1e-15


def test_two_interval_spectra():
    assert [str(s) for s in spectra_of_interval_union([0, 2])] == ["Z + {0, 1/4}", "Z + {0, 3/4}"]


def test_quasi_lattice_elements_strict_radius():
    ql = QuasiLattice(RationalSpectrum([0, F(1, 4)]))
    assert ql.elements(2) == [-2 + F(1, 4), -1, -1 + F(1, 4), 0, F(1, 4), 1, F(5, 4)]
    with pytest.raises(ValueError):
        QuasiLattice(RationalSpectrum([0, 1]))


def test_quasi_lattice_parseval():
    rep = parseval_scan(IntervalUnion((0, 2)), QuasiLattice(RationalSpectrum([0, F(1, 4)])), radius=500)
    assert rep.passed and rep.bessel_ok


def test_tiles_real_line():
    cert = tiles_real_line([0, 1, 5])
    assert cert.modulus == 3 and cert.complement == (0,)
    assert tiles_real_line([0, 2]).modulus == 4


def test_as_affine_ifs_two_intervals():
    ifs, C = as_affine_ifs([0, 2])
    assert (ifs.scale, ifs.digits, C) == (4, (0, 1, 8, 9), (0, 1))
    assert attractor_matches([0, 2], ifs.scale, ifs.digits) == 0


def test_as_affine_ifs_single_interval():
    ifs, C = as_affine_ifs([0])
    assert ifs.scale == 2 and ifs.digits == (0, 1)


def test_interval_complement_unique():
    assert interval_complement([0, 2], 4) == (0, 1)
    assert interval_complement([0, 3], 4) is None


def test_hausdorff_distance():
    assert hausdorff_distance([(0, 1)], [(0, F(1, 2))]) == F(1, 2)
    assert hausdorff_distance([(0, 1), (2, 3)], [(0, 3)]) == F(1, 2)


@settings(max_examples=40, deadline=None)
@given(st.sets(st.integers(1, 8), max_size=3).map(lambda s: sorted(s | {0})))
def test_as_affine_ifs_attractor(A):
    found = as_affine_ifs(A)
    if found is not None:
        ifs, C = found
        assert sorted(a + c for a in A for c in C) == list(range(ifs.scale))
        assert attractor_matches(A, ifs.scale, ifs.digits, steps=12) == 0
