import json
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_pairs.interval_sets import unit_interval_ft
from spectral_pairs.multidim import (
    BoxUnionRegion,
    NonConstantSliceError,
    check_translation_tiling,
    derive_product_spectrum,
    fold_is_unit_square,
    hermite_normal_form,
    lattice_tiling_search,
    polygon_area,
    rearranged_cube,
    reduce_mod_lattice,
    slice_region,
    staircase,
    unit_cube,
)
from spectral_pairs.validation import parseval_scan


def test_staircase_shape():
    region = staircase()
    assert region.volume == 12 and len(region.cells) == 36 and region.dim == 3


def test_region_json_round_trip():
    region = staircase()
    assert BoxUnionRegion.from_json(json.loads(region.dumps())) == region
    with pytest.raises(ValueError):
        BoxUnionRegion.from_json({**region.to_json(), "extra": 1})


def test_cube_ft_is_product():
    x = np.array([[0.3, -0.2, 1.7]])
    expected = np.prod([unit_interval_ft(c) for c in x[0]])
    assert abs(unit_cube(3).ft(x)[0] - expected) < 1e-12


def test_derived_spectrum():
    spec = derive_product_spectrum(staircase())
    assert str(spec) == "1/3Z + {0} x 1/2Z + {0} x Z + {0, 1/4}"
    sliced = derive_product_spectrum(slice_region(staircase(), 1, 0))
    assert str(sliced) == "1/3Z + {0} x Z + {0, 1/4}"


def test_non_product_region_refused():
    L_shape = BoxUnionRegion((F(1), F(1)), ((0, 0), (1, 0), (0, 1)))
    with pytest.raises(NonConstantSliceError):
        derive_product_spectrum(L_shape)


def test_staircase_tiling():
    periods = [[3, 0, 0], [0, 2, 0], [0, 0, 4]]
    rep = check_translation_tiling(staircase(), periods, [[0, 0, 0], [0, 0, 1]])
    assert rep.tiles and rep.to_json()["coverage_histogram"] == {"1": 72}
    bare = check_translation_tiling(staircase(), periods)
    assert not bare.tiles


def test_lattice_search():
    assert lattice_tiling_search(staircase(), 4).lattices == ()
    cube = lattice_tiling_search(unit_cube(3), 1)
    assert len(cube.lattices) == 1


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=3, max_size=3), st.lists(st.integers(-20, 20), min_size=3, max_size=3))
def test_hnf_reduction_is_canonical(rows, v):
    if round(abs(np.linalg.det(np.array(rows, dtype=float)))) == 0:
        return
    H = hermite_normal_form(rows)
    assert all(H[i][j] == 0 for i in range(3) for j in range(i))
    r = reduce_mod_lattice(v, H)
    shifted = [a + b for a, b in zip(v, rows[0])]
    assert reduce_mod_lattice(shifted, H) == r


def test_polygon_area():
    assert polygon_area([(0, 0), (1, 0), (1, 1)]) == F(1, 2)


@pytest.mark.parametrize("p", [1, 2, 5, -3])
def test_rearranged_cube_fold(p):
    res = rearranged_cube(p, resolution=16)
    assert res.fold_ok and not res.upper_alone_ok and not res.lower_alone_ok


def test_fold_detects_overlap():
    tri = [(F(0), F(0)), (F(1), F(1)), (F(0), F(1))]
    assert not fold_is_unit_square([tri, tri], 16)


def test_rearranged_cube_rejects_zero():
    with pytest.raises(ValueError):
        rearranged_cube(0)


def test_staircase_parseval_small(kernel_backend):
    region = staircase()
    rep = parseval_scan(region, derive_product_spectrum(region), radius=12)
    assert rep.max_sum <= 1 + 1e-9 and rep.min_sum > 0.9
