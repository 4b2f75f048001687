"""NLS and GP hierarchy Morawetz checks.

Fields are numpy complex arrays of shape ``grid.shape``; mixtures are passed
as ``(grid, weights, orbitals)`` with unit-mass orbitals.
"""

from ._core import (
    ConfigError,
    ContractError,
    Grid,
    NumericalAbort,
    Weight,
    boundary_ratio,
    builtin_names,
    builtin_yaml,
    energy,
    evolve,
    gp_interaction_action,
    gp_interaction_rhs,
    gp_one_particle_action,
    gp_one_particle_rhs,
    h_alpha_norm,
    h_xi_norm,
    initial_data,
    interaction_action,
    interaction_terms,
    marginal,
    mass,
    momentum,
    morawetz_action,
    morawetz_rhs,
    reduction_consistency,
    run_builtin,
    run_config,
    soliton,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
