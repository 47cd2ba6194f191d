"""State-context-property (SCOP) systems: lattices, collapse kernels,
Hilbert-space realizations, conceptual distances and a CHSH test."""

from . import core, distances, hilbert, kernels, lattice, nonclassicality
from .core import (
    CoupleClass,
    ScopRealization,
    ScopSystem,
    Trajectory,
    classify_couple,
    collapse_sequence,
    make_rng,
    reduced_probability,
    relativize,
    sample_collapse,
    transition_distribution,
    validate_scop,
    weight,
)
from .distances import (
    ExemplarSet,
    FeatureProfile,
    d_mu,
    d_p,
    d_w,
    exemplar_distance,
    frequency_profile,
    prototype_distance,
    theta_mu,
    weight_frequency_comparison,
)
from .docfile import ScopDocument, load_document, load_profiles, parse_document
from .errors import ScopError
from .hilbert import QuantumRealization, QuantumScop, SpectralFamily, Subspace, as_scop, q_collapse, q_weight
from .lattice import PropertyLattice, powerset_lattice, validate_lattice
from .nonclassicality import CorrelationData, chsh_value, kolmogorov_feasible
from .report import ValidationReport

__version__ = "0.1.0"
