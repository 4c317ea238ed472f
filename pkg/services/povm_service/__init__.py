"""(N,M)-POVM construction, validation and serialization."""

from services.povm_service.nm_povm import (
    build_eigframe,
    build_povm,
    feasible_x_range,
    gamma,
    informationally_complete_classes,
    is_informationally_complete,
    max_feasible_x,
    povm_from_elements,
    random_rotation,
    rescale_factor,
    scaled_x,
    scaled_x_range,
    sts_spectrum,
    validate_povm,
)

__all__ = [
    "build_eigframe",
    "build_povm",
    "feasible_x_range",
    "gamma",
    "informationally_complete_classes",
    "is_informationally_complete",
    "max_feasible_x",
    "povm_from_elements",
    "random_rotation",
    "rescale_factor",
    "scaled_x",
    "scaled_x_range",
    "sts_spectrum",
    "validate_povm",
]
