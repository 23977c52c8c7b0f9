"""Hardware and channel model: parameters and derived success probabilities.

Defaults follow the reference all-photonic device set: source efficiency 0.90
with 300 ps pulses, detector efficiency 0.93 with 1 Hz dark counts, 150 ns
active feedforward, 22 km attenuation length, light speed 2.0e8 m/s in fiber
and a 1 GHz source repetition rate.

Units: distances in km, times in seconds, rates in Hz; the light speed is
given in m/s and converted internally. All unit conversions live here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import MultiplexingOverflowError, ParameterError

__all__ = [
    "ChannelParams",
    "DerivedProbs",
    "DeviceParams",
    "bell_success_prob",
    "dark_click_prob",
    "derived_probs",
    "error_rates",
    "feedforward_transmittance",
    "multiplexing_estimate",
    "outperformance_condition",
    "qnd_success_prob",
    "required_multiplexing",
    "transmittance",
]

# Detectors in one linear-optics pairing analyzer that can register dark counts.
BELL_ANALYZER_DETECTORS = 4
# Intrinsic success ceiling of a linear-optics two-photon joint measurement.
LINEAR_OPTICS_CEILING = 0.5


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ParameterError(message)


@dataclass(frozen=True)
class DeviceParams:
    """Source, detector and feedforward hardware figures.

    Attributes:
        eta_s: Source efficiency.
        tau_s: Pulse width in seconds (also the detection window).
        eta_d: Detector efficiency.
        nu_d: Dark count rate per detector, counts/second.
        tau_a: Duration of one active feedforward, seconds.
        source_rep_rate: Pulse repetition rate, Hz.
        eta_bp: Efficiency of the auxiliary Bell-pair preparation feeding the
            heralding measurement (parallelized generation; default ideal).
        n_ff_qnd: Feedforwards charged to the heralding stage.
        n_ff_pair: Feedforwards charged to the pairing stage (the switch).
        misalignment: Intrinsic bit/phase error probability.
    """

    eta_s: float = 0.90
    tau_s: float = 300e-12
    eta_d: float = 0.93
    nu_d: float = 1.0
    tau_a: float = 150e-9
    source_rep_rate: float = 1e9
    eta_bp: float = 1.0
    n_ff_qnd: int = 1
    n_ff_pair: int = 1
    misalignment: float = 0.0

    def __post_init__(self) -> None:
        for name in ("eta_s", "eta_d", "eta_bp"):
            value = getattr(self, name)
            _require(0.0 <= value <= 1.0, f"{name} must be in [0, 1], got {value!r}")
        for name in ("tau_s", "nu_d", "tau_a", "source_rep_rate"):
            value = getattr(self, name)
            _require(value >= 0.0 and math.isfinite(value), f"{name} must be finite and >= 0")
        for name in ("n_ff_qnd", "n_ff_pair"):
            value = getattr(self, name)
            _require(isinstance(value, int) and value >= 0, f"{name} must be an integer >= 0")
        _require(0.0 <= self.misalignment <= 0.5, "misalignment must be in [0, 0.5]")


@dataclass(frozen=True)
class ChannelParams:
    """Fiber link between the two parties with the measurement node midway.

    Attributes:
        L: End-to-end distance in km (each party is L/2 from the node).
        l_att: Attenuation length in km.
        c: Speed of light in fiber, m/s.
    """

    L: float = 100.0
    l_att: float = 22.0
    c: float = 2.0e8

    def __post_init__(self) -> None:
        _require(self.L >= 0.0 and math.isfinite(self.L), "L must be finite and >= 0")
        _require(self.l_att > 0.0, "l_att must be > 0")
        _require(self.c > 0.0, "c must be > 0")


@dataclass(frozen=True)
class DerivedProbs:
    """All channel/device probabilities needed downstream of the raw parameters."""

    eta_half: float
    eta_full: float
    p_qnd: float
    p_bm: float
    p_dark: float
    p_herald: float
    w_dark: float
    misalignment: float
    e_z: float
    e_x: float

    def __post_init__(self) -> None:
        for name in (
            "eta_half",
            "eta_full",
            "p_qnd",
            "p_bm",
            "p_dark",
            "p_herald",
            "w_dark",
            "misalignment",
        ):
            value = getattr(self, name)
            _require(0.0 <= value <= 1.0, f"{name} must be in [0, 1], got {value!r}")
        _require(abs(self.eta_full - self.eta_half**2) <= 1e-12, "eta_full must equal eta_half^2")
        _require(0.0 <= self.e_z <= 0.5 and 0.0 <= self.e_x <= 0.5, "error rates must be in [0, 0.5]")


def transmittance(d: float, l_att: float) -> float:
    """Survival probability of a photon over ``d`` km of fiber: exp(-d / l_att)."""
    if d < 0.0 or not math.isfinite(d):
        raise ParameterError(f"distance must be finite and >= 0, got {d!r}")
    if l_att <= 0.0:
        raise ParameterError(f"l_att must be > 0, got {l_att!r}")
    return math.exp(-d / l_att)


def feedforward_transmittance(params: DeviceParams, channel: ChannelParams, n_ff: int) -> float:
    """Loss from fiber delay during ``n_ff`` active feedforwards.

    Photons keep running in fiber while a feedforward completes, traversing
    ``c * tau_a`` per application (30 m with the defaults).
    """
    if n_ff < 0:
        raise ParameterError(f"n_ff must be >= 0, got {n_ff!r}")
    km_per_ff = params.tau_a * channel.c / 1000.0
    return transmittance(n_ff * km_per_ff, channel.l_att)


def qnd_success_prob(params: DeviceParams, channel: ChannelParams) -> float:
    """Success probability of the teleportation-based heralding measurement.

    One linear-optics joint measurement (ceiling 1/2), two detector clicks,
    the auxiliary Bell-pair preparation, and the feedforward fiber delay.
    """
    return (
        LINEAR_OPTICS_CEILING
        * params.eta_d**2
        * params.eta_bp
        * feedforward_transmittance(params, channel, params.n_ff_qnd)
    )


def bell_success_prob(params: DeviceParams, channel: ChannelParams) -> float:
    """Success probability of the pairing measurement; as heralding minus the Bell-pair factor."""
    return (
        LINEAR_OPTICS_CEILING
        * params.eta_d**2
        * feedforward_transmittance(params, channel, params.n_ff_pair)
    )


def dark_click_prob(params: DeviceParams) -> float:
    """Probability of a dark count within one detection window (= pulse width)."""
    return -math.expm1(-params.nu_d * params.tau_s)


def error_rates(params: DeviceParams, channel: ChannelParams) -> tuple[float, float]:
    """Bit and phase error rates (e_z, e_x) of the sifted key.

    Misalignment plus half the weight of accepted events that stem from
    dark-count coincidences rather than signal:

        w_dark = n_det p_dark / (p_bm + n_det p_dark)

    conditioned on a heralded photon pair being present. Both rates are equal
    in this model and clamped to [0, 0.5].
    """
    p_bm = bell_success_prob(params, channel)
    p_dark = dark_click_prob(params)
    dark_accept = BELL_ANALYZER_DETECTORS * p_dark
    total_accept = p_bm + dark_accept
    w_dark = dark_accept / total_accept if total_accept > 0.0 else 0.0
    e = min(0.5, max(0.0, params.misalignment + 0.5 * w_dark))
    return e, e


def derived_probs(params: DeviceParams, channel: ChannelParams) -> DerivedProbs:
    """Assemble every derived probability for one operating point."""
    eta_half = transmittance(channel.L / 2.0, channel.l_att)
    p_qnd = qnd_success_prob(params, channel)
    p_bm = bell_success_prob(params, channel)
    p_dark = dark_click_prob(params)
    dark_accept = BELL_ANALYZER_DETECTORS * p_dark
    total_accept = p_bm + dark_accept
    w_dark = dark_accept / total_accept if total_accept > 0.0 else 0.0
    e_z, e_x = error_rates(params, channel)
    return DerivedProbs(
        eta_half=eta_half,
        eta_full=eta_half * eta_half,
        p_qnd=p_qnd,
        p_bm=p_bm,
        p_dark=p_dark,
        p_herald=p_qnd * eta_half * params.eta_s,
        w_dark=w_dark,
        misalignment=params.misalignment,
        e_z=e_z,
        e_x=e_x,
    )


def outperformance_condition(params: DeviceParams, channel: ChannelParams) -> bool:
    """True iff adaptive pairing beats predetermined pairing: p_qnd > eta_half."""
    d = derived_probs(params, channel)
    return d.p_qnd > d.eta_half


def required_multiplexing(rate: float) -> int:
    """Pulses per round needed for one sifted pair on average: ceil(1 / rate)."""
    if not rate > 0.0:
        raise MultiplexingOverflowError(
            f"per-pulse rate {rate!r} underflowed; multiplexing size is unbounded"
        )
    return math.ceil(1.0 / rate)


def multiplexing_estimate(params: DeviceParams, channel: ChannelParams) -> int:
    """Multiplexing size for one sifted pair per round at this operating point."""
    d = derived_probs(params, channel)
    return required_multiplexing(d.p_bm * d.p_qnd * d.eta_half * params.eta_s)
