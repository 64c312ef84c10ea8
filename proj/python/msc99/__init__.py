"""MSC(99) coin-tossing protocol simulation and attack analysis."""

from ._msc99 import (
    EffectiveParams,
    Optimum,
    OptimalL,
    ProtocolParams,
    bias_bound_effective,
    bias_from_K,
    bias_lower_bound,
    binomial_overlap_form,
    effective_params,
    fidelity,
    fidelity_gaussian,
    fidelity_parity,
    gaussian_alpha,
    helstrom_pe,
    max_bias,
    optimal_l,
    parity_length,
    parity_mixture,
    pe_complement_gaussian,
    pe_parity,
    phi,
    psi,
    run_attack,
    run_honest,
    trace_distance,
    verify_result,
)

__all__ = [
    "EffectiveParams",
    "Optimum",
    "OptimalL",
    "ProtocolParams",
    "bias_bound_effective",
    "bias_from_K",
    "bias_lower_bound",
    "binomial_overlap_form",
    "effective_params",
    "fidelity",
    "fidelity_gaussian",
    "fidelity_parity",
    "gaussian_alpha",
    "helstrom_pe",
    "max_bias",
    "optimal_l",
    "parity_length",
    "parity_mixture",
    "pe_complement_gaussian",
    "pe_parity",
    "phi",
    "psi",
    "run_attack",
    "run_honest",
    "trace_distance",
    "verify_result",
]
