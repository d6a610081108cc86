import csv
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_pairs.finite_spectral import RationalSpectrum
from spectral_pairs.ifs_measures import AffineIFS, cycle_spectrum
from spectral_pairs.interval_sets import IntervalUnion, QuasiLattice
from spectral_pairs.validation import (
    BESSEL_SLACK,
    calibrate_witness_point,
    deficiency_witness,
    digit_factorizations,
    greedy_orthogonal_family,
    parseval_scan,
    sample_grid,
    zeros_contained,
)

QUARTER = AffineIFS(4, (0, 2))
NON_SPECTRAL = AffineIFS(4, (0, 1, 4, 5))


def test_sample_grid_deterministic():
    assert np.array_equal(sample_grid(10), sample_grid(10))
    assert not np.array_equal(sample_grid(10, seed=1), sample_grid(10, seed=2))
    pts = sample_grid(50, 3)
    assert pts.shape == (50, 3) and np.all((pts >= 0) & (pts < 1))


def test_sample_grid_avoids_points():
    pts = sample_grid(5, avoid=[sample_grid(5)[2]])
    assert abs(pts[2] - sample_grid(5)[2]) > 1e-6


def test_csv_dump(tmp_path):
    rep = parseval_scan(QUARTER, cycle_spectrum(QUARTER, [0, 1]), radius=256)
    path = tmp_path / "scan.csv"
    rep.write_csv(path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["x0", "partial_sum"] and len(rows) == 26


def test_parseval_rejects_bad_radius():
    with pytest.raises(ValueError):
        parseval_scan(QUARTER, cycle_spectrum(QUARTER, [0, 1]), radius=0)


@pytest.mark.parametrize(
    "measure, spectrum",
    [
        (QUARTER, cycle_spectrum(QUARTER, [0, 1])),
        (IntervalUnion((0, 2)), QuasiLattice(RationalSpectrum([0, F(1, 4)]))),
        (NON_SPECTRAL, RationalSpectrum(greedy_orthogonal_family(NON_SPECTRAL, 1024).points)),
    ],
)
@pytest.mark.parametrize("radius", [16, 128, 1024])
def test_bessel_bound(measure, spectrum, radius):
    rep = parseval_scan(measure, spectrum, radius=radius)
    assert rep.max_sum <= 1 + BESSEL_SLACK


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 1, allow_nan=False), st.integers(2, 6), st.integers(2, 6))
def test_partial_sums_monotone_in_radius(x, r1, r2):
    spec = cycle_spectrum(QUARTER, [0, 1])
    lo, hi = sorted((4**r1, 4**r2))
    a = parseval_scan(QUARTER, spec, xs=[x], radius=lo).partial_sums[0]
    b = parseval_scan(QUARTER, spec, xs=[x], radius=hi).partial_sums[0]
    assert a <= b + 1e-12


def test_greedy_family_exact_and_orthogonal():
    fam = greedy_orthogonal_family(NON_SPECTRAL, 1024)
    assert len(fam) >= 20 and fam.exact
    pts = fam.points
    vals = NON_SPECTRAL.ft(np.array([float(a - b) for a in pts for b in pts if a != b]))
    assert np.max(np.abs(vals)) < 1e-10


def test_cantor_third_family_small():
    assert len(greedy_orthogonal_family(AffineIFS(3, (0, 2)), 729)) <= 2


def test_half_line_family():
    fam = greedy_orthogonal_family(QUARTER, 64, half_line=True)
    assert all(p >= 0 for p in fam.points)
    assert set(fam.points) <= set(cycle_spectrum(QUARTER, [0, 1]).elements(64)) | {F(p) for p in range(64)}


def test_factorizations():
    assert ((0, 1), (0, 4)) in digit_factorizations((0, 1, 4, 5))
    assert zeros_contained(4, (0, 1), (0, 4))
    assert not zeros_contained(4, (0, 4), (0, 1))


def test_witness_and_negative_control():
    w = deficiency_witness(NON_SPECTRAL, 0.95, 64)
    assert w.valid and w.gap > 0.3
    gaps = [deficiency_witness(QUARTER, 0.37, R, require_factorization=False).gap for R in (16, 64, 256)]
    assert gaps[0] > gaps[1] > gaps[2] >= -1e-9


def test_witness_requires_factorization():
    with pytest.raises(ValueError):
        deficiency_witness(QUARTER, 0.3, 16)


def test_calibration_picks_interior_point():
    x, gap = calibrate_witness_point(NON_SPECTRAL, 64, (0, 1), grid=[0.25, 0.5, 0.95])
    assert x in (0.25, 0.5, 0.95) and gap > 0.01
