"""Reflected diffusions via extended Skorokhod maps."""

from ._reflectolab import (
    BoundViolation,
    CapacityError,
    DomainError,
    UnsolvableStep,
    __version__,
    blowup,
    gps_directions,
    gps_esm_2d_exact,
    gps_esm_discrete,
    gps_step,
    hitting_probability,
    p_variation_sum,
    run_cli,
    simulate,
    sm_one_dim,
    uniform_grid,
    valley_esm,
    variation_ladder,
    xi_map,
    xi_oracle_check,
)

__all__ = [
    "BoundViolation",
    "CapacityError",
    "DomainError",
    "UnsolvableStep",
    "__version__",
    "blowup",
    "gps_directions",
    "gps_esm_2d_exact",
    "gps_esm_discrete",
    "gps_step",
    "hitting_probability",
    "p_variation_sum",
    "run_cli",
    "simulate",
    "sm_one_dim",
    "uniform_grid",
    "valley_esm",
    "variation_ladder",
    "xi_map",
    "xi_oracle_check",
]
