"""Combinatorial statistics of adaptive photon pairing.

Analytic distributions for a multiplexed round in which two parties each send
``m`` pulses, every pulse is independently heralded with probability ``p``,
surviving photons are paired across the two sides (the pair count is the
minimum of the two heralded counts), and each pair yields a sifted bit with
probability ``p_bm``.

All functions are pure and numerically careful about three regimes:

* ``m <= 64``: direct product form ``C(m, k) p^k (1-p)^(m-k)``.
* ``m <= 1000``: exact integer binomial coefficients combined with the power
  terms in log space, so no intermediate overflow/underflow and roughly
  1e-13 relative accuracy (needed by the mean-pair identity checks).
* larger ``m``: log-gamma evaluation, stable up to the ~5e8 multiplexing
  sizes that long-haul operating points require.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from .errors import ConsistencyError, ParameterError

__all__ = [
    "EXACT_DEFICIT_LIMIT",
    "DeficitEstimate",
    "PairingStatistics",
    "arrival_dist",
    "asymptotic_rate",
    "binomial_pmf",
    "binomial_pmf_vector",
    "mean_sifted_pairs",
    "min_pair_dist",
    "pairing_deficit",
    "pairing_deficit_exact",
    "pairing_deficit_normal",
    "sifted_pair_dist",
]

# Largest trial count evaluated with the literal product form.
_PRODUCT_FORM_LIMIT = 64
# Largest trial count whose binomial coefficients are kept as exact integers;
# C(1000, 500) ~ 2.7e299 still converts to a finite double.
_EXACT_COMB_LIMIT = 1000
# exp() underflows below roughly -745; keep headroom before folding the
# coefficient into the exponent.
_EXP_UNDERFLOW = -700.0
# Largest multiplexing size for which the pairing deficit is summed exactly.
EXACT_DEFICIT_LIMIT = 100_000
# Eq.-level rounding noise allowed before a negative mass is treated as a bug.
_NEGATIVE_MASS_TOL = -1e-15


def _check_prob(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name} must be a probability in [0, 1], got {value!r}")
    return value


def _check_count(name: str, value: int, minimum: int = 0) -> int:
    try:
        value = int(value)
    except (TypeError, ValueError):
        raise ParameterError(f"{name} must be an integer, got {value!r}") from None
    if value < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {value}")
    return value


@lru_cache(maxsize=2048)
def _comb_row(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact binomial coefficients of row ``m`` as (floats, natural logs)."""
    coeffs = [1] * (m + 1)
    value = 1
    for k in range(1, m + 1):
        value = value * (m - k + 1) // k
        coeffs[k] = value
    floats = np.array([float(c) for c in coeffs])
    logs = np.array([math.log(c) for c in coeffs])
    return floats, logs


def binomial_pmf(k: int, m: int, p: float) -> float:
    """Probability of ``k`` successes among ``m`` independent trials.

    Args:
        k: Number of successes, ``0 <= k <= m``.
        m: Number of trials.
        p: Per-trial success probability.

    Returns:
        ``C(m, k) p^k (1-p)^(m-k)``, evaluated in the accuracy tier suited
        to ``m`` (see module docstring).

    Raises:
        ParameterError: If ``k`` is outside ``[0, m]`` or ``p`` outside ``[0, 1]``.
    """
    m = _check_count("m", m)
    k = _check_count("k", k)
    p = _check_prob("p", p)
    if k > m:
        raise ParameterError(f"k must not exceed m, got k={k}, m={m}")
    if p == 0.0:
        return 1.0 if k == 0 else 0.0
    if p == 1.0:
        return 1.0 if k == m else 0.0
    if m <= _PRODUCT_FORM_LIMIT:
        return math.comb(m, k) * p**k * (1.0 - p) ** (m - k)
    log_powers = k * math.log(p) + (m - k) * math.log1p(-p)
    if m <= _EXACT_COMB_LIMIT:
        coeff = math.comb(m, k)
        if log_powers >= _EXP_UNDERFLOW:
            return float(coeff) * math.exp(log_powers)
        return math.exp(math.log(coeff) + log_powers)
    # same gammaln as the vector path so scalar and vector stay bit-consistent
    log_coeff = float(gammaln(m + 1) - gammaln(k + 1) - gammaln(m - k + 1))
    return math.exp(log_coeff + log_powers)


def binomial_pmf_vector(m: int, p: float) -> np.ndarray:
    """Full pmf vector over ``k = 0..m``, same accuracy tiers as binomial_pmf."""
    m = _check_count("m", m)
    p = _check_prob("p", p)
    if p == 0.0 or p == 1.0:
        out = np.zeros(m + 1)
        out[m if p == 1.0 else 0] = 1.0
        return out
    k = np.arange(m + 1, dtype=float)
    if m <= _PRODUCT_FORM_LIMIT:
        floats, _ = _comb_row(m)
        return floats * p**k * (1.0 - p) ** (m - k)
    log_powers = k * math.log(p) + (m - k) * math.log1p(-p)
    if m <= _EXACT_COMB_LIMIT:
        floats, logs = _comb_row(m)
        safe = log_powers >= _EXP_UNDERFLOW
        out = np.where(safe, floats * np.exp(np.where(safe, log_powers, 0.0)), 0.0)
        if not safe.all():
            tail = ~safe
            out[tail] = np.exp(logs[tail] + log_powers[tail])
        return out
    log_coeff = gammaln(m + 1) - gammaln(k + 1) - gammaln(m - k + 1)
    return np.exp(log_coeff + log_powers)


def arrival_dist(m: int, p_herald: float) -> np.ndarray:
    """Distribution of the number of heralded photons on one side.

    Entry ``k`` is the probability that exactly ``k`` of the ``m`` pulses are
    confirmed to have survived, i.e. a Binomial(m, p_herald) pmf.
    """
    m = _check_count("m", m, minimum=1)
    return binomial_pmf_vector(m, p_herald)


def min_pair_dist(m: int, p_herald: float) -> np.ndarray:
    """Distribution of the number of photon pairs formed in one round.

    The pair count is ``min(X, Y)`` for independent heralded counts
    ``X, Y ~ Binomial(m, p_herald)``:

        P(min = l) = 2 p_l S_l - p_l^2,   S_l = sum_{k >= l} p_k

    Raises:
        ConsistencyError: If rounding produces a negative mass beyond noise
            level (indicates a bug, not an input problem).
    """
    pk = arrival_dist(m, p_herald)
    # Upper-tail sums accumulated from the smallest (far-tail) terms inward.
    tail = np.cumsum(pk[::-1])[::-1]
    f = 2.0 * pk * tail - pk * pk
    low = float(f.min())
    if low < 0.0:
        if low < _NEGATIVE_MASS_TOL:
            raise ConsistencyError(
                f"min-pair mass {low!r} at m={m}, p={p_herald!r} is negative "
                "beyond rounding noise"
            )
        f = np.maximum(f, 0.0)
    return f


def sifted_pair_dist(m: int, p_herald: float, p_bm: float) -> np.ndarray:
    """Distribution of the number of sifted bit pairs in one round.

    Each of the ``l`` formed pairs independently survives the pairing
    measurement with probability ``p_bm``:

        P(n) = sum_{l >= n} B(n | l, p_bm) P(min = l)
    """
    p_bm = _check_prob("p_bm", p_bm)
    f = min_pair_dist(m, p_herald)
    out = np.zeros(m + 1)
    for l in range(m + 1):
        if f[l] == 0.0:
            continue
        out[: l + 1] += f[l] * binomial_pmf_vector(l, p_bm)
    return out


class DeficitEstimate(NamedTuple):
    """A pairing-deficit value plus whether it came from the normal approximation."""

    value: float
    approximate: bool


def pairing_deficit_exact(m: int, p: float) -> float:
    """Per-pulse shortfall of the mean pair count below ``p``, summed exactly.

    ``E[min(X, Y)] = m (p - deficit)`` for independent Binomial(m, p) counts;
    the closed form is

        deficit = p (1-p) [ sum_l B(l|m-1,p)^2 + sum_l B(l|m-1,p) B(l-1|m-1,p) ]

    O(m) time and memory; error-free accumulation via math.fsum.
    """
    m = _check_count("m", m, minimum=1)
    p = _check_prob("p", p)
    if p == 0.0 or p == 1.0:
        return 0.0
    b = binomial_pmf_vector(m - 1, p)
    paired = math.fsum((b * b).tolist())
    shifted = math.fsum((b[1:] * b[:-1]).tolist()) if m > 1 else 0.0
    return p * (1.0 - p) * (paired + shifted)


def pairing_deficit_normal(m: int, p: float) -> float:
    """Normal approximation ``sqrt(p (1-p) / (pi m))`` of the pairing deficit.

    Follows from ``E[min(X, Y)] = m p - E|X - Y| / 2`` with ``X - Y``
    treated as a centered normal of variance ``2 m p (1-p)``. Exact 0 is
    returned for ``p`` in {0, 1}.
    """
    m = _check_count("m", m, minimum=1)
    p = _check_prob("p", p)
    if p == 0.0 or p == 1.0:
        return 0.0
    return math.sqrt(p * (1.0 - p) / (math.pi * m))


def pairing_deficit(m: int, p: float, exact_limit: int = EXACT_DEFICIT_LIMIT) -> DeficitEstimate:
    """Pairing deficit, exact up to ``exact_limit`` and approximate beyond.

    Beyond the limit the deficit is already far below every quantity it gets
    subtracted from, so the normal approximation is reported (flagged).
    """
    m = _check_count("m", m, minimum=1)
    if m <= exact_limit:
        return DeficitEstimate(pairing_deficit_exact(m, p), approximate=False)
    return DeficitEstimate(pairing_deficit_normal(m, p), approximate=True)


def mean_sifted_pairs(m: int, p_herald: float, p_bm: float) -> float:
    """Mean number of sifted bit pairs per round, ``m p_bm (p - deficit)``.

    Agrees with ``p_bm * sum_l l P(min = l)`` to 1e-10 absolute wherever the
    deficit is evaluated exactly; that identity is this module's core
    consistency check.
    """
    p_bm = _check_prob("p_bm", p_bm)
    deficit = pairing_deficit(m, p_herald)
    return m * p_bm * (p_herald - deficit.value)


def asymptotic_rate(p_qnd: float, eta_half: float, eta_s: float, p_bm: float) -> float:
    """Sifted pairs per pulse in the large-multiplexing limit.

    The deficit vanishes as m grows, leaving the plain product
    ``p_bm * p_qnd * eta_half * eta_s``.
    """
    p_qnd = _check_prob("p_qnd", p_qnd)
    eta_half = _check_prob("eta_half", eta_half)
    eta_s = _check_prob("eta_s", eta_s)
    p_bm = _check_prob("p_bm", p_bm)
    return p_bm * p_qnd * eta_half * eta_s


@dataclass(frozen=True)
class PairingStatistics:
    """One round's pairing parameters: multiplexing m, heralding p, pairing p_bm.

    ``p`` is the per-pulse probability that a pulse is heralded as a surviving
    single photon at the measurement node (source, channel and heralding
    efficiencies already multiplied in).
    """

    m: int
    p: float
    p_bm: float

    def __post_init__(self) -> None:
        _check_count("m", self.m, minimum=1)
        _check_prob("p", self.p)
        _check_prob("p_bm", self.p_bm)

    def arrival_dist(self) -> np.ndarray:
        return arrival_dist(self.m, self.p)

    def min_pair_dist(self) -> np.ndarray:
        return min_pair_dist(self.m, self.p)

    def sifted_pair_dist(self) -> np.ndarray:
        return sifted_pair_dist(self.m, self.p, self.p_bm)

    def mean_sifted_pairs(self) -> float:
        return mean_sifted_pairs(self.m, self.p, self.p_bm)
