"""Floquet and kicked-system numerics."""

from ._floquetlab import (
    ConfigError,
    ContractError,
    DomainError,
    Error,
    NumericError,
    ResourceGuardError,
    b_inverse,
    cantor_value,
    classify_energy,
    continued_fraction,
    cotg_residual,
    delta_eps,
    delta_eps_cos_moment,
    delta_eps_integral,
    discrepancy,
    eigenphase_sequence,
    eigenphases,
    erdos_turan_bound,
    floquet_matrix,
    in_cantor_set,
    kicked_top,
    mirror_phase,
    phi_tilde,
    power_law_fit,
    removed_measure,
    run,
    sequence_mod1,
    subcommands,
    weyl_sum,
)

__version__ = "0.3.0"
