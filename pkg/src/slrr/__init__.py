"""Low-rank representation on the sphere of square-root densities."""
from .clustering import affinity_from_w, clustering_accuracy, ncut
from .errors import (
    AntipodalError,
    DegenerateAffinityError,
    DimensionError,
    SlrrError,
    SvdFailure,
)
from .features import Histogram, RawSample, add_noise_snr, histogram, to_sqrt_density
from .geometry import SpherePoint, TangentVector, exp_map, geodesic_distance, log_map
from .gram import build_geodesic_weights, build_gram, build_tangent_factors
from .kernels import BACKEND
from .solver import SolveResult, SolverConfig, objective, solve
from .synth import LabeledSphereSet, SynthSpec, generate

__all__ = [
    "AntipodalError", "BACKEND", "DegenerateAffinityError", "DimensionError", "Histogram",
    "LabeledSphereSet", "RawSample", "SlrrError", "SolveResult", "SolverConfig", "SpherePoint",
    "SvdFailure", "SynthSpec", "TangentVector", "add_noise_snr", "affinity_from_w",
    "build_geodesic_weights", "build_gram", "build_tangent_factors", "clustering_accuracy",
    "exp_map", "generate", "geodesic_distance", "histogram", "log_map", "ncut", "objective",
    "solve", "to_sqrt_density",
]
__version__ = "0.1.0"
