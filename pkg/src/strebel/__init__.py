"""Jenkins-Strebel Teichmueller rays: asymptotic distances, comparison maps and a modulus oracle."""

from .asymptotics import (
    AsymptoticResult,
    asymptotic_distance,
    detour_metric,
    lower_bound,
    minimal_shifted_distance,
    modulus_ratio_term,
    optimal_shift,
    shifted_asymptotic_distance,
)
from .errors import (
    DomainError,
    MissingInputError,
    SpecParseError,
    StrebelError,
    UseReciprocalError,
    ValidationError,
)
from .flow import AffineStretch, RayPoint, distance_along_ray, limit_point, ray_point
from .oracle import GridDomain, annulus_modulus, pushforward_modulus, quad_modulus
from .qc_maps import (
    InterpolationParams,
    assemble_F,
    choose_X,
    cross_ratio,
    dilatation_P,
    eval_H,
    exponent_bound,
    quasisymmetry_sup,
)
from .surface import (
    CylinderDecomposition,
    NotSimilar,
    RaySpec,
    SimilarPair,
    similarity_check,
    validate_decomposition,
)

__version__ = "0.1.0"
