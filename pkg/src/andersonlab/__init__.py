"""Monte Carlo laboratory for spectral statistics of the discrete
Anderson model with Holder-continuous disorder."""

__version__ = "0.1.0"

from .disorder import (ALPHA_POWER, UNIFORM_DENSITY, DisorderSpec, SeedPath,
                       concentration, coupled_wegner_constant,
                       sample_potential, wegner_constant)
from .lattice import (BoxGeometry, BoxPartition, FiniteHamiltonian, Rectangle,
                      boundary_layers, build_hamiltonian, cube, energy_scale,
                      interval, partition_box, sub_scale, unit_box)
from .spectral import (GreenQuery, SpectralData, count_in_window, eigensolve,
                       green, local_weight, window_count, windowed_eigenpairs)

__all__ = [
    "ALPHA_POWER", "UNIFORM_DENSITY", "DisorderSpec", "SeedPath",
    "concentration", "coupled_wegner_constant", "sample_potential",
    "wegner_constant",
    "BoxGeometry", "BoxPartition", "FiniteHamiltonian", "Rectangle",
    "boundary_layers", "build_hamiltonian", "cube", "energy_scale",
    "interval", "partition_box", "sub_scale", "unit_box",
    "GreenQuery", "SpectralData", "count_in_window", "eigensolve", "green",
    "local_weight", "window_count", "windowed_eigenpairs",
    "__version__",
]
