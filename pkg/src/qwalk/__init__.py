"""Continuous-time quantum walks on circulant and Abelian group-circulant graphs."""

from .graphs import (
    CirculantSpec,
    GroupCirculantSpec,
    HadamardMatrix,
    ResourceLimitError,
    Spectrum,
    adjacency_matrix,
    character,
    eigenvalues_circulant,
    eigenvalues_group,
    graph_from_dict,
    hadamard_matrix,
    load_graph,
    make_circulant,
    make_complete,
    make_cycle,
    make_group_circulant,
    make_hypercube,
    repeated_eigenvalue_witness,
    spectrum,
)
from .mixing import (
    AverageDistribution,
    MixingSearchResult,
    average_distribution,
    average_distribution_integrated,
    average_error_envelope,
    ds_bound,
    fourier_coefficients,
    is_average_uniform,
    search_min_tv,
    tv_distance,
    tv_to_uniform,
)
from .numtheory import MixingVerdict, Verdict, classify_cycle, diophantine_certificate, two_adic_split
from .walk import (
    AmplitudeVector,
    Distribution,
    amplitude_even_cycle,
    coarse_grain,
    evolve,
    evolve_batch,
    fold_pair,
    instantaneous_distribution,
    parity_sums,
)

__version__ = "0.1.0"

__all__ = [
    "CirculantSpec",
    "GroupCirculantSpec",
    "HadamardMatrix",
    "ResourceLimitError",
    "Spectrum",
    "adjacency_matrix",
    "character",
    "eigenvalues_circulant",
    "eigenvalues_group",
    "graph_from_dict",
    "hadamard_matrix",
    "load_graph",
    "make_circulant",
    "make_complete",
    "make_cycle",
    "make_group_circulant",
    "make_hypercube",
    "repeated_eigenvalue_witness",
    "spectrum",
    "AverageDistribution",
    "MixingSearchResult",
    "average_distribution",
    "average_distribution_integrated",
    "average_error_envelope",
    "ds_bound",
    "fourier_coefficients",
    "is_average_uniform",
    "search_min_tv",
    "tv_distance",
    "tv_to_uniform",
    "MixingVerdict",
    "Verdict",
    "classify_cycle",
    "diophantine_certificate",
    "two_adic_split",
    "AmplitudeVector",
    "Distribution",
    "amplitude_even_cycle",
    "coarse_grain",
    "evolve",
    "evolve_batch",
    "fold_pair",
    "instantaneous_distribution",
    "parity_sums",
]
