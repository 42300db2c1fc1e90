"""Laplacians on weighted networks: dipoles, spectral reciprocity, defect vectors and heat kernels."""

from ._netlap import (
    Network,
    NetlapError,
    defect_fractions,
    defect_limit,
    dipole,
    from_edges,
    from_json,
    generate,
    gram_matrix,
    heat_kernel,
    off_diagonal_growth,
    reciprocity,
    stochastic_mass,
    verify_eigen_equation,
)

__all__ = [
    "Network",
    "NetlapError",
    "defect_fractions",
    "defect_limit",
    "dipole",
    "from_edges",
    "from_json",
    "generate",
    "gram_matrix",
    "heat_kernel",
    "off_diagonal_growth",
    "reciprocity",
    "stochastic_mass",
    "verify_eigen_equation",
]
