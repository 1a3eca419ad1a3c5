"""statewalk: random-matrix state walks, Gaussian-packet geometry, and the
statistical verification suite built on them."""

__version__ = "0.1.0"

from .ensembles import (
    EnsembleSpec,
    HermitianSample,
    eigenvalues,
    sample_goe,
    sample_gue,
    spacing_ratio_stat,
)
from .gaussian import (
    GaussianParams,
    Grid,
    ManifoldPoint,
    gaussian_state,
    induced_metric_ratio,
    overlap_closed_form,
    overlap_quadrature,
    realize_fs_distance,
    translation_tangent_basis,
    wave_packet,
)
from .hilbert import (
    State,
    TangentVector,
    fs_distance,
    horizontal_project,
    normalize,
    tangent_components,
    transition_probability,
)
from .reports import TestReport
from .rng import split_rng
from .walk import (
    ConstrainedTrajectory,
    WalkConfig,
    WalkTrajectory,
    constrained_walk,
    project_onto_translations,
    run_walk,
    unconstrained_step,
    walk_with_drift,
)

__all__ = [
    "EnsembleSpec", "HermitianSample", "eigenvalues", "sample_goe", "sample_gue",
    "spacing_ratio_stat", "GaussianParams", "Grid", "ManifoldPoint",
    "gaussian_state", "induced_metric_ratio", "overlap_closed_form",
    "overlap_quadrature", "realize_fs_distance", "translation_tangent_basis",
    "wave_packet", "State", "TangentVector", "fs_distance", "horizontal_project",
    "normalize", "tangent_components", "transition_probability", "TestReport",
    "split_rng", "ConstrainedTrajectory", "WalkConfig", "WalkTrajectory",
    "constrained_walk", "project_onto_translations", "run_walk",
    "unconstrained_step", "walk_with_drift",
]
