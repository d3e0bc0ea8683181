"""Exact evolution of a single bosonic mode in a lossy self-Kerr medium."""
from .channel import (ChannelParams, DensityMatrix, coherent_cutoff, evolve_density,
                      kraus_pair, kraus_sandwich, lambda_coeff, normalization_defect)
from .errors import (ConvergenceError, DimensionError, DomainError, IntegratorError,
                     KerrWignerError, QuadratureError, ScalingRequiredError, SeriesError,
                     TruncationError, ValidationError)
from .photon_stats import (PnDistribution, closed_form_pn, pn_from_density, pn_overlap,
                           pn_overlap_distribution)
from .special_fn import (HermiteTable, hermite2, hermite2_scaled, hermite_bilinear_sum,
                         hermite_diagonal_sum, laguerre)
from .wigner import (Coherent, Matrix, Number, WignerGrid, damping_kernel, evolve_wigner,
                     initial_wigner, wigner_coherent_evolved, wigner_from_density, wigner_grid)

__version__ = "0.1.0"

__all__ = [
    "ChannelParams",
    "DensityMatrix",
    "coherent_cutoff",
    "evolve_density",
    "kraus_pair",
    "kraus_sandwich",
    "lambda_coeff",
    "normalization_defect",
    "ConvergenceError",
    "DimensionError",
    "DomainError",
    "IntegratorError",
    "KerrWignerError",
    "QuadratureError",
    "ScalingRequiredError",
    "SeriesError",
    "TruncationError",
    "ValidationError",
    "PnDistribution",
    "closed_form_pn",
    "pn_from_density",
    "pn_overlap",
    "pn_overlap_distribution",
    "HermiteTable",
    "hermite2",
    "hermite2_scaled",
    "hermite_bilinear_sum",
    "hermite_diagonal_sum",
    "laguerre",
    "Coherent",
    "Matrix",
    "Number",
    "WignerGrid",
    "damping_kernel",
    "evolve_wigner",
    "initial_wigner",
    "wigner_coherent_evolved",
    "wigner_from_density",
    "wigner_grid",
]
