"""Local densities of hermitian lattices over ramified quadratic extensions of unramified 2-adic rings."""

from __future__ import annotations

from .density import DensityReport, density_from_decomposition, local_density
from .errors import Herm2Error
from .jordan import JordanDecomposition, abstract_decomposition, jordan_split, split_with_retry
from .lattice import HermitianLattice, new_lattice
from .oracle import CountProfile, isometry_search, normalized_density
from .ring import BElem, Case, RingContext, make_ring

__all__ = [
    "BElem", "Case", "CountProfile", "DensityReport", "Herm2Error", "HermitianLattice",
    "JordanDecomposition", "RingContext", "abstract_decomposition", "density_from_decomposition",
    "isometry_search", "jordan_split", "local_density", "make_ring", "new_lattice",
    "normalized_density", "split_with_retry",
]
