"""Photonic band structures of 2D atomic dipole lattices."""

from .lattice import (K0, LatticeSpec, LevelScheme, PhysicalParams,
                      bz_grid, bz_path, full_scheme, high_symmetry_points,
                      nb_square_lattice, reciprocal_basis, sigma_scheme,
                      square_lattice, triangular_lattice)
from .bloch import (BandPoint, BandTable, BlochMatrix, band_sweep,
                    build_bloch_matrix, light_cone_classify, momentum_sum,
                    solve_bands)

__all__ = [
    "K0", "LatticeSpec", "LevelScheme", "PhysicalParams", "bz_grid",
    "bz_path", "full_scheme", "high_symmetry_points", "nb_square_lattice",
    "reciprocal_basis", "sigma_scheme", "square_lattice",
    "triangular_lattice", "BandPoint", "BandTable", "BlochMatrix",
    "band_sweep", "build_bloch_matrix", "light_cone_classify",
    "momentum_sum", "solve_bands",
]
__version__ = "0.1.0"
