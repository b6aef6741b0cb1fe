"""Lattice independence (NBB sets), adjoint matroids and derived matroids."""

from .adjoint import enumerate_adjoints, is_adjoint, lopp_independents, sandwich_bounds
from .bits import SetFamily
from .catalog import catalog
from .derived import delta_prime, derived_matroid, val_x
from .lattice import FiniteLattice, build_lattice, lattice_of_flats
from .matroid import Matroid, from_bases, from_matrix, linear_derived_matroid
from .nbb import check_matroid, embed, independence_family

__version__ = "0.1.0"

__all__ = [
    "FiniteLattice",
    "Matroid",
    "SetFamily",
    "build_lattice",
    "catalog",
    "check_matroid",
    "delta_prime",
    "derived_matroid",
    "embed",
    "enumerate_adjoints",
    "from_bases",
    "from_matrix",
    "independence_family",
    "is_adjoint",
    "lattice_of_flats",
    "linear_derived_matroid",
    "lopp_independents",
    "sandwich_bounds",
    "val_x",
]
