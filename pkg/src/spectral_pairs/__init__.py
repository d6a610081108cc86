"""Spectral pairs: finite sets, interval unions, affine IFS measures."""
from .exact_core import delta_hat, mask_poly, vanishing_sum
from .finite_spectral import (
    NotSpectralError,
    OperationChain,
    RationalSpectrum,
    StepI,
    StepII,
    certify_finite_pair,
    decompose_complementing,
    enumerate_spectra,
    find_complement,
    spectrum_from_chain,
)
from .ifs_measures import (
    AffineIFS,
    HypothesisError,
    affine_transform_pair,
    compose_spectra,
    cycle_spectrum,
    digit_power_spectrum,
    factor_convolution,
    infinite_spectra_family,
    invariant_ft,
    spectrum_from_old,
)
from .interval_sets import IntervalUnion, QuasiLattice, as_affine_ifs, spectra_of_interval_union, tiles_real_line
from .multidim import (
    BoxUnionRegion,
    check_translation_tiling,
    derive_product_spectrum,
    lattice_tiling_search,
    product_spectrum,
    rearranged_cube,
    staircase,
)
from .validation import deficiency_witness, greedy_orthogonal_family, parseval_scan

__version__ = "0.1.0"
