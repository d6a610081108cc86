"""Fixed regression checks over the worked examples, run by ``spectral-pairs golden``."""
from __future__ import annotations

import concurrent.futures
from fractions import Fraction as F
from typing import Callable

import numpy as np

from . import finite_spectral as fs
from . import ifs_measures as im
from . import interval_sets as iv
from . import multidim as md
from . import validation as va
from .exact_core import mask_poly


def _mask_0189():
    return mask_poly([0, 1, 8, 9]).coeffs == (1, 1, 0, 0, 0, 0, 0, 0, 1, 1)


def _two_point():
    return fs.is_spectrum([0, 2], [0, F(1, 4)]) and fs.is_spectrum([0, 3], [0, F(1, 6)])


def _block():
    return fs.is_spectrum(range(5), [F(k, 5) for k in range(5)])


def _four_digit_chain():
    chain = fs.decompose_complementing([0, 1, 8, 9])
    spec = fs.spectrum_from_chain(chain)
    return chain.replay() == (0, 1, 8, 9) and fs.is_spectrum([0, 1, 8, 9], spec)


def _three_point():
    found = {tuple(s) for s in fs.enumerate_spectra([0, 2, 4])}
    return (0, F(1, 6), F(1, 3)) in found and len(found) == 4


def _complement():
    cert = fs.find_complement([0, 1, 8, 9], 16)
    return cert is not None and fs.covers_cyclic_group([0, 1, 8, 9], cert.complement, 16)


def _interval_spectra():
    return "Z + {0, 1/4}" in [str(s) for s in iv.spectra_of_interval_union([0, 2])]


def _as_ifs():
    ifs, C = iv.as_affine_ifs([0, 2])
    return ifs.scale == 4 and ifs.digits == (0, 1, 8, 9) and iv.attractor_matches([0, 2], 4, ifs.digits) == 0


def _factor():
    fac = im.factor_convolution(im.AffineIFS(4, (0, 1, 8, 9)), 2, 2)
    none = im.factor_convolution(im.AffineIFS(4, (0, 1, 4, 5)), 2, 2)
    return fac is not None and fac.residual(im.AffineIFS(4, (0, 1, 8, 9)), np.linspace(-5, 5, 41)) < 1e-9 and none is None


def _quarter_cantor():
    spec = im.cycle_spectrum(im.AffineIFS(4, (0, 2)), [0, 1])
    return spec.elements(64) == [0, 1, 4, 5, 16, 17, 20, 21]


def _new_spectrum():
    ifs = im.AffineIFS(4, (0, 2))
    new = im.spectrum_from_old(ifs, im.cycle_spectrum(ifs, [0, 1]), [0, 3])
    pts = new.elements(64)
    return all(im.ft_vanishes_exactly(ifs, a - b) for a in pts for b in pts if a != b)


def _family():
    fam = im.infinite_spectra_family(im.AffineIFS(4, (0, 2)), [0, 1], 3)
    prefixes = [tuple(s.elements(64)) for s in fam.spectra]
    return len(set(prefixes)) == 3


def _compose():
    D, spec = im.compose_spectra([(1, [0, 1], 2, [0, 1]), (8, [0, 1], 2, [0, 1])])
    return D == (0, 1, 8, 9) and fs.is_spectrum(D, spec)


def _cantor_third():
    fam = va.greedy_orthogonal_family(im.AffineIFS(3, (0, 2)), 243)
    return len(fam.points) <= 2


def _counterexample_family():
    fam = va.greedy_orthogonal_family(im.AffineIFS(4, (0, 1, 4, 5)), 1024)
    return len(fam.points) >= 20 and fam.exact


def _staircase_spectrum():
    return str(md.derive_product_spectrum(md.staircase())) == "1/3Z + {0} x 1/2Z + {0} x Z + {0, 1/4}"


def _staircase_tiling():
    region = md.staircase()
    periods = [[3, 0, 0], [0, 2, 0], [0, 0, 4]]
    with_offsets = md.check_translation_tiling(region, periods, [[0, 0, 0], [0, 0, 1]])
    return with_offsets.tiles and not md.check_translation_tiling(region, periods).tiles


def _no_lattice():
    return md.lattice_tiling_search(md.staircase(), 4).lattices == ()


def _rearranged_cube():
    res = md.rearranged_cube(1, 32)
    return res.fold_ok and not res.upper_alone_ok


def _two_interval_parseval():
    rep = va.parseval_scan(iv.IntervalUnion((0, 2)), iv.QuasiLattice(fs.RationalSpectrum([0, F(1, 4)])), radius=500)
    return rep.passed


CHECKS: list[tuple[str, Callable[[], bool]]] = [
    ("mask-polynomial-four-digits", _mask_0189),
    ("two-point-spectra", _two_point),
    ("block-spectrum", _block),
    ("four-digit-chain-spectrum", _four_digit_chain),
    ("three-point-spectra-count", _three_point),
    ("cyclic-complement", _complement),
    ("two-interval-quasi-lattice", _interval_spectra),
    ("two-interval-as-ifs", _as_ifs),
    ("radix-factorization", _factor),
    ("quarter-cantor-spectrum", _quarter_cantor),
    ("new-spectrum-orthogonal", _new_spectrum),
    ("distinct-spectra-family", _family),
    ("direct-sum-composition", _compose),
    ("middle-third-cantor-family", _cantor_third),
    ("non-spectral-orthogonal-family", _counterexample_family),
    ("staircase-product-spectrum", _staircase_spectrum),
    ("staircase-translation-tiling", _staircase_tiling),
    ("staircase-no-bounded-lattice", _no_lattice),
    ("rearranged-cube-fold", _rearranged_cube),
    ("two-interval-parseval", _two_interval_parseval),
]


def _run_one(tag: str, fn) -> dict:
    try:
        return {"tag": tag, "passed": bool(fn()), "error": None}
    except Exception as exc:  # noqa: BLE001 - a crashing check is a failed check
        return {"tag": tag, "passed": False, "error": f"{type(exc).__name__}: {exc}"}


def run_golden(threads: int = 1) -> list[dict]:
    """Run every check; results come back in a fixed order regardless of ``threads``."""
    if threads <= 1:
        return [_run_one(tag, fn) for tag, fn in CHECKS]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda item: _run_one(*item), CHECKS))
