"""fockforge: coherent-state families on truncated Fock spaces and the
numerical verification of their claimed properties."""

__version__ = "0.1.0"

from .fock import (FockBasis, MultiIndex, SectorLabel, StateVector, build_basis,
                   coherent_tail_bound, inner_product, sector_of)
from .specfun import MeasureSpec, bessel_i, bessel_k, ln_gamma, measure_density
from .states import (BGParams, CatParams, PhiCatParams, SquaredCatParams,
                     UpqParams, bg_overlap_closed_form, bg_su11_cs, glauber_cs,
                     multimode_cat, phi_cat, squared_amp_cat, upq_bg_cs)

__all__ = [
    "__version__",
    "FockBasis", "MultiIndex", "SectorLabel", "StateVector",
    "build_basis", "coherent_tail_bound", "inner_product", "sector_of",
    "MeasureSpec", "bessel_i", "bessel_k", "ln_gamma", "measure_density",
    "BGParams", "CatParams", "PhiCatParams", "SquaredCatParams", "UpqParams",
    "bg_overlap_closed_form", "bg_su11_cs", "glauber_cs", "multimode_cat",
    "phi_cat", "squared_amp_cat", "upq_bg_cs",
]
