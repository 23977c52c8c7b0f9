"""Rate analysis and protocol simulation for mdiQKD with an adaptive pairing measurement.

Analytic sifted-key statistics of a multiplexed, loss-heralded pairing scheme,
the resulting secret-key-rate curves against the predetermined-pairing
baseline, and a seeded Monte Carlo engine that cross-validates every analytic
quantity.
"""
from .config import MonteCarloSettings, OutputSettings, RunConfig, SweepRange, load_config
from .devices import (
    ChannelParams,
    DerivedProbs,
    DeviceParams,
    bell_success_prob,
    dark_click_prob,
    derived_probs,
    error_rates,
    feedforward_transmittance,
    multiplexing_estimate,
    outperformance_condition,
    qnd_success_prob,
    required_multiplexing,
    transmittance,
)
from .errors import (
    ConfigError,
    ConsistencyError,
    MultiplexingOverflowError,
    NoCrossoverError,
    ParameterError,
)
from .keyrate import (
    RateReport,
    binary_entropy,
    crossover_distance,
    original_mdiqkd_rate,
    rate_report,
    secret_key_rate,
    sweep_reports,
    throughput_hz,
)
from .montecarlo import (
    BATCH_TRIALS,
    DEFAULT_VALIDATION_GRID,
    EmpiricalDistribution,
    GridPointResult,
    RoundOutcome,
    SimEstimate,
    estimate_error_rate,
    estimate_mean_sifted,
    estimate_sifted_dist,
    simulate_round,
    validate_agreement,
)
from .pairing_stats import (
    EXACT_DEFICIT_LIMIT,
    DeficitEstimate,
    PairingStatistics,
    arrival_dist,
    asymptotic_rate,
    binomial_pmf,
    binomial_pmf_vector,
    mean_sifted_pairs,
    min_pair_dist,
    pairing_deficit,
    pairing_deficit_exact,
    pairing_deficit_normal,
    sifted_pair_dist,
)

__version__ = "0.1.0"

__all__ = [
    "BATCH_TRIALS",
    "ChannelParams",
    "ConfigError",
    "ConsistencyError",
    "DEFAULT_VALIDATION_GRID",
    "DeficitEstimate",
    "DerivedProbs",
    "DeviceParams",
    "EXACT_DEFICIT_LIMIT",
    "EmpiricalDistribution",
    "GridPointResult",
    "MonteCarloSettings",
    "MultiplexingOverflowError",
    "NoCrossoverError",
    "OutputSettings",
    "PairingStatistics",
    "ParameterError",
    "RateReport",
    "RoundOutcome",
    "RunConfig",
    "SimEstimate",
    "SweepRange",
    "arrival_dist",
    "asymptotic_rate",
    "bell_success_prob",
    "binary_entropy",
    "binomial_pmf",
    "binomial_pmf_vector",
    "crossover_distance",
    "dark_click_prob",
    "derived_probs",
    "error_rates",
    "estimate_error_rate",
    "estimate_mean_sifted",
    "estimate_sifted_dist",
    "feedforward_transmittance",
    "load_config",
    "mean_sifted_pairs",
    "min_pair_dist",
    "multiplexing_estimate",
    "original_mdiqkd_rate",
    "outperformance_condition",
    "pairing_deficit",
    "pairing_deficit_exact",
    "pairing_deficit_normal",
    "qnd_success_prob",
    "rate_report",
    "required_multiplexing",
    "secret_key_rate",
    "sifted_pair_dist",
    "simulate_round",
    "sweep_reports",
    "throughput_hz",
    "transmittance",
    "validate_agreement",
]
