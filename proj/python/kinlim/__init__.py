"""Kinetic BGK solver with polytropic equilibria and its aggregation-diffusion limit."""

from ._kinlim import (
    ConfigError,
    ConsistencyError,
    DomainError,
    KinlimError,
    ModelParams,
    NumericalFailure,
    Run,
    ShapeError,
    StabilityError,
    TruncationError,
    UnsupportedSpec,
    Xorshift64Star,
    config_reference,
    derive_params,
    equilibrium_moments,
    equilibrium_profile,
    max_gamma,
    parse_run_file,
    parse_run_text,
    property_suite,
    support_radius,
)

__all__ = [
    "ConfigError",
    "ConsistencyError",
    "DomainError",
    "KinlimError",
    "ModelParams",
    "NumericalFailure",
    "Run",
    "ShapeError",
    "StabilityError",
    "TruncationError",
    "UnsupportedSpec",
    "Xorshift64Star",
    "config_reference",
    "derive_params",
    "equilibrium_moments",
    "equilibrium_profile",
    "max_gamma",
    "parse_run_file",
    "parse_run_text",
    "property_suite",
    "support_radius",
]
