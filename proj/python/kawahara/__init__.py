"""Kawahara equation with delayed boundary feedback."""

from ._kawahara import (
    KawaharaError,
    SystemParams,
    decay_certificate,
    default_weights,
    find_critical_lengths,
    fit_exponential,
    gain_matrix_M,
    length_bound,
    membership_residual,
    parse_config,
    q_roots,
    run_subcommand,
    simulate,
    smallness_radius,
    spectral_scan,
    subcommands,
    three_real_roots_threshold,
    validate_params,
)

__all__ = [
    "KawaharaError",
    "SystemParams",
    "decay_certificate",
    "default_weights",
    "find_critical_lengths",
    "fit_exponential",
    "gain_matrix_M",
    "length_bound",
    "membership_residual",
    "parse_config",
    "q_roots",
    "run_subcommand",
    "simulate",
    "smallness_radius",
    "spectral_scan",
    "subcommands",
    "three_real_roots_threshold",
    "validate_params",
]
