"""Stochastic oracle: round-by-round simulation of the adaptive pairing protocol.

Every estimator draws from counter-based Philox streams derived from one
master seed: trials are split into fixed-size batches, batch ``i`` of logical
stream ``s`` uses ``Philox(key=seed).jumped(s * STREAM_STRIDE + i)``, and
batch results are reduced in batch order. Outputs are therefore bit-identical
for a given (config, seed) regardless of how many workers execute the batches.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .devices import DerivedProbs
from .errors import ParameterError
from .pairing_stats import mean_sifted_pairs, _check_count, _check_prob

__all__ = [
    "BATCH_TRIALS",
    "DEFAULT_VALIDATION_GRID",
    "EmpiricalDistribution",
    "GridPointResult",
    "RoundOutcome",
    "SimEstimate",
    "estimate_error_rate",
    "estimate_mean_sifted",
    "estimate_sifted_dist",
    "simulate_round",
    "validate_agreement",
]

BATCH_TRIALS = 16_384
# Batches per logical stream; grid point k gets stream offset k * STREAM_STRIDE.
STREAM_STRIDE = 1 << 20

Stages = tuple[float, float, float]


@dataclass(frozen=True)
class RoundOutcome:
    """Counts from one multiplexed round."""

    k_alice: int
    k_bob: int
    pairs_formed: int
    n_sifted: int
    error_flags: np.ndarray

    def __post_init__(self) -> None:
        if not (self.n_sifted <= self.pairs_formed == min(self.k_alice, self.k_bob)):
            raise ParameterError("round counts violate n_sifted <= pairs = min(k_a, k_b)")


@dataclass(frozen=True)
class SimEstimate:
    """Monte Carlo mean with its standard error.

    ``samples`` counts the atomic observations pooled into the mean (rounds
    for the pair-count estimators, sifted pairs for the error estimator).
    ``degenerate`` marks estimates whose spread could not be measured
    (single trial, or no accepted events at all).
    """

    mean: float
    std_error: float
    trials: int
    seed: int
    samples: int = 0
    degenerate: bool = False


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Histogram of sifted-pair counts over many simulated rounds."""

    counts: np.ndarray
    trials: int
    seed: int

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / float(self.trials)

    def total_variation(self, reference: np.ndarray) -> float:
        return 0.5 * float(np.abs(self.frequencies - np.asarray(reference)).sum())


def _bitgen(seed: int, stream: int, batch: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(stream * STREAM_STRIDE + batch))


def _batch_sizes(trials: int) -> list[int]:
    full, rest = divmod(trials, BATCH_TRIALS)
    return [BATCH_TRIALS] * full + ([rest] if rest else [])


def _draw_heralded(rng: np.random.Generator, size: int, m: int, p_herald: float,
                   stages: Stages | None) -> np.ndarray:
    """Heralded pulse counts for one side; staged mode draws each loss stage."""
    if stages is None:
        return rng.binomial(m, p_herald, size)
    counts = np.full(size, m)
    for stage_prob in stages:
        counts = rng.binomial(counts, stage_prob)
    return counts


def _draw_sifted(rng: np.random.Generator, size: int, m: int, p_herald: float,
                 p_bm: float, stages: Stages | None) -> np.ndarray:
    k_alice = _draw_heralded(rng, size, m, p_herald, stages)
    k_bob = _draw_heralded(rng, size, m, p_herald, stages)
    pairs = np.minimum(k_alice, k_bob)
    return rng.binomial(pairs, p_bm)


def _validate_stages(p_herald: float, stages: Stages | None) -> None:
    if stages is None:
        return
    for s in stages:
        _check_prob("stage probability", s)
    if not math.isclose(math.prod(stages), p_herald, rel_tol=1e-12, abs_tol=1e-15):
        raise ParameterError("staged probabilities must multiply to p_herald")


def simulate_round(
    m: int,
    p_herald: float,
    p_bm: float,
    rng: np.random.Generator,
    *,
    w_dark: float = 0.0,
    misalignment: float = 0.0,
    stages: Stages | None = None,
) -> RoundOutcome:
    """Simulate one round: herald both sides, pair the minimum, sift pairs.

    Per-pulse source/channel/heralding successes are collapsed into a single
    Bernoulli(p_herald) unless ``stages`` requests the three-stage draw (a
    debug mode; both are distributionally identical). When error probabilities
    are given, each sifted pair is tagged dark with probability ``w_dark``
    (error chance 1/2) or signal (error chance ``misalignment``).
    """
    m = _check_count("m", m, minimum=1)
    _check_prob("p_herald", p_herald)
    _check_prob("p_bm", p_bm)
    _check_prob("w_dark", w_dark)
    _check_prob("misalignment", misalignment)
    _validate_stages(p_herald, stages)
    k_alice = int(_draw_heralded(rng, 1, m, p_herald, stages)[0])
    k_bob = int(_draw_heralded(rng, 1, m, p_herald, stages)[0])
    pairs = min(k_alice, k_bob)
    n_sifted = int(rng.binomial(pairs, p_bm))
    dark = rng.random(n_sifted) < w_dark
    error_flags = rng.random(n_sifted) < np.where(dark, 0.5, misalignment)
    return RoundOutcome(k_alice, k_bob, pairs, n_sifted, error_flags)


# --- batch workers (top level so process pools can pickle them) ---


def _mean_batch(args) -> tuple[int, float, float]:
    seed, stream, batch, size, m, p_herald, p_bm, stages = args
    x = _draw_sifted(_bitgen(seed, stream, batch), size, m, p_herald, p_bm, stages)
    mean = float(x.mean())
    m2 = float(((x - mean) ** 2).sum())
    return size, mean, m2


def _hist_batch(args) -> np.ndarray:
    seed, stream, batch, size, m, p_herald, p_bm, stages = args
    x = _draw_sifted(_bitgen(seed, stream, batch), size, m, p_herald, p_bm, stages)
    return np.bincount(x, minlength=m + 1).astype(np.int64)


def _error_batch(args) -> tuple[int, int]:
    seed, stream, batch, size, m, p_herald, p_bm, w_dark, misalignment = args
    rng = _bitgen(seed, stream, batch)
    sifted = int(_draw_sifted(rng, size, m, p_herald, p_bm, None).sum())
    dark = int(rng.binomial(sifted, w_dark))
    errors = int(rng.binomial(dark, 0.5)) + int(rng.binomial(sifted - dark, misalignment))
    return sifted, errors


def _run_batches(worker, tasks: list, workers: int) -> list:
    if workers <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, tasks))


def _merge_moments(parts: Sequence[tuple[int, float, float]]) -> tuple[int, float, float]:
    """Combine per-batch (count, mean, sum of squared deviations), in order."""
    n, mean, m2 = 0, 0.0, 0.0
    for bn, bmean, bm2 in parts:
        if bn == 0:
            continue
        total = n + bn
        delta = bmean - mean
        mean += delta * bn / total
        m2 += bm2 + delta * delta * n * bn / total
        n = total
    return n, mean, m2


def estimate_mean_sifted(
    m: int,
    p_herald: float,
    p_bm: float,
    trials: int,
    seed: int,
    *,
    workers: int = 1,
    stream: int = 0,
    stages: Stages | None = None,
) -> SimEstimate:
    """Monte Carlo mean of the sifted-pair count per round."""
    m = _check_count("m", m, minimum=1)
    _check_prob("p_herald", p_herald)
    _check_prob("p_bm", p_bm)
    trials = _check_count("trials", trials, minimum=1)
    seed = _check_count("seed", seed)
    _validate_stages(p_herald, stages)
    tasks = [
        (seed, stream, i, size, m, p_herald, p_bm, stages)
        for i, size in enumerate(_batch_sizes(trials))
    ]
    n, mean, m2 = _merge_moments(_run_batches(_mean_batch, tasks, workers))
    if n < 2:
        return SimEstimate(
            mean=mean, std_error=0.0, trials=trials, seed=seed, samples=n, degenerate=True
        )
    std_error = math.sqrt(m2 / (n - 1)) / math.sqrt(n)
    return SimEstimate(mean=mean, std_error=std_error, trials=trials, seed=seed, samples=n)


def estimate_sifted_dist(
    m: int,
    p_herald: float,
    p_bm: float,
    trials: int,
    seed: int,
    *,
    workers: int = 1,
    stream: int = 0,
    stages: Stages | None = None,
) -> EmpiricalDistribution:
    """Empirical distribution of the sifted-pair count per round."""
    m = _check_count("m", m, minimum=1)
    _check_prob("p_herald", p_herald)
    _check_prob("p_bm", p_bm)
    trials = _check_count("trials", trials, minimum=1)
    seed = _check_count("seed", seed)
    _validate_stages(p_herald, stages)
    tasks = [
        (seed, stream, i, size, m, p_herald, p_bm, stages)
        for i, size in enumerate(_batch_sizes(trials))
    ]
    counts = np.zeros(m + 1, dtype=np.int64)
    for part in _run_batches(_hist_batch, tasks, workers):
        counts += part
    return EmpiricalDistribution(counts=counts, trials=trials, seed=seed)


def estimate_error_rate(
    m: int,
    derived: DerivedProbs,
    trials: int,
    seed: int,
    *,
    workers: int = 1,
    stream: int = 0,
) -> SimEstimate:
    """Empirical bit error rate over all sifted pairs across ``trials`` rounds.

    Rounds are simulated at the operating point's heralding and pairing
    probabilities; each sifted pair is tagged dark or signal and commits an
    error accordingly. A run with zero sifted pairs is flagged degenerate
    rather than raising.
    """
    m = _check_count("m", m, minimum=1)
    trials = _check_count("trials", trials, minimum=1)
    seed = _check_count("seed", seed)
    tasks = [
        (seed, stream, i, size, m, derived.p_herald, derived.p_bm,
         derived.w_dark, derived.misalignment)
        for i, size in enumerate(_batch_sizes(trials))
    ]
    sifted = 0
    errors = 0
    for part_sifted, part_errors in _run_batches(_error_batch, tasks, workers):
        sifted += part_sifted
        errors += part_errors
    if sifted == 0:
        return SimEstimate(
            mean=0.0, std_error=0.0, trials=trials, seed=seed, samples=0, degenerate=True
        )
    rate = errors / sifted
    std_error = math.sqrt(rate * (1.0 - rate) / sifted)
    return SimEstimate(mean=rate, std_error=std_error, trials=trials, seed=seed, samples=sifted)


# --- analytic-vs-stochastic agreement grid ---

# (m, p_herald, p_bm); 20 points spanning small to large multiplexing, both
# evaluation tiers of the analytic side (64/65), and exact edge cases.
DEFAULT_VALIDATION_GRID: tuple[tuple[int, float, float], ...] = (
    (1, 0.3, 0.5),
    (1, 0.9, 0.9),
    (2, 0.5, 1.0),
    (2, 0.5, 0.5),
    (5, 0.4, 0.5),
    (5, 1.0, 1.0),
    (10, 0.1, 0.43),
    (10, 0.7, 0.25),
    (20, 0.05, 0.9),
    (20, 0.5, 0.43),
    (50, 0.02, 0.5),
    (50, 0.3, 0.9),
    (64, 0.5, 0.5),
    (65, 0.5, 0.5),
    (100, 0.1, 0.43),
    (100, 0.01, 1.0),
    (150, 0.2, 0.75),
    (150, 0.05, 0.25),
    (200, 0.1, 0.43),
    (200, 0.5, 0.5),
)


@dataclass(frozen=True)
class GridPointResult:
    """Analytic vs Monte Carlo comparison at one grid point."""

    m: int
    p_herald: float
    p_bm: float
    analytic: float
    mc_mean: float
    mc_stderr: float
    z: float
    degenerate: bool = field(default=False)


def validate_agreement(
    points: Sequence[tuple[int, float, float]] | None = None,
    trials: int = 100_000,
    seed: int = 42,
    *,
    workers: int = 1,
) -> list[GridPointResult]:
    """Compare the analytic mean sifted-pair count with Monte Carlo on a grid.

    Each grid point draws from its own logical stream, so adding, removing or
    reordering points never changes another point's numbers.
    """
    if points is None:
        points = DEFAULT_VALIDATION_GRID
    results = []
    for index, (m, p_herald, p_bm) in enumerate(points):
        analytic = mean_sifted_pairs(m, p_herald, p_bm)
        est = estimate_mean_sifted(
            m, p_herald, p_bm, trials, seed, workers=workers, stream=index
        )
        diff = est.mean - analytic
        if est.std_error == 0.0:
            z = 0.0 if diff == 0.0 else math.inf
        else:
            z = diff / est.std_error
        results.append(
            GridPointResult(
                m=m,
                p_herald=p_herald,
                p_bm=p_bm,
                analytic=analytic,
                mc_mean=est.mean,
                mc_stderr=est.std_error,
                z=z,
                degenerate=est.degenerate,
            )
        )
    return results
