"""Shared utilities package."""

from .retry import retry_over_seeds
from .rng import SCHEME, derive_rng, derive_seed
from .validators import (
    CapExceededError,
    ValidationError,
    parse_grid,
    validate_cap,
    validate_class_sizes,
    validate_distribution,
    validate_probability,
    validate_vertex_count,
)

__all__ = [
    "SCHEME",
    "CapExceededError",
    "ValidationError",
    "derive_rng",
    "derive_seed",
    "parse_grid",
    "retry_over_seeds",
    "validate_cap",
    "validate_class_sizes",
    "validate_distribution",
    "validate_probability",
    "validate_vertex_count",
]
