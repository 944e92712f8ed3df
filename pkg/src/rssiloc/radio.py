"""Log-distance path-loss model and stochastic RSSI measurement.

The deterministic part is the classic log-distance relation

    RSSI(d) = RSSI(d0) - 10 * n * log10(d / d0)

with reference distance d0, reference power RSSI(d0) and path-loss
exponent n. Measurements add zero-mean Gaussian shadowing in the dB
domain (log-normal in linear power); a noisy reading that falls below
receiver sensitivity is reported as absent, mirroring a receiver that
hears nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Dbm

__all__ = [
    "PathLossParams",
    "RadioSpec",
    "ShadowingModel",
    "rssi_at_distance",
    "distance_from_rssi",
    "sample_measured_rssi",
    "sample_rssi_window",
]

# 200 ft indoor range of a typical 802.15.4 module, converted once to meters.
DEFAULT_INDOOR_RANGE_M = 60.96


@dataclass(frozen=True)
class PathLossParams:
    """Parameters of the log-distance model.

    rssi_at_ref : power at the reference distance, dBm
    ref_distance : reference distance d0, meters
    exponent : path-loss exponent n (2 in free space, higher indoors)
    """

    rssi_at_ref: Dbm = -45.0
    ref_distance: float = 1.0
    exponent: float = 2.0

    def __post_init__(self):
        if self.ref_distance <= 0.0:
            raise ValueError(f"ref_distance must be > 0, got {self.ref_distance}")
        if self.exponent <= 0.0:
            raise ValueError(f"exponent must be > 0, got {self.exponent}")


@dataclass(frozen=True)
class RadioSpec:
    """Transceiver limits used for planning and link dropout."""

    tx_power: Dbm = 20.0
    sensitivity: Dbm = -107.0
    max_range: float = DEFAULT_INDOOR_RANGE_M

    def __post_init__(self):
        if self.sensitivity >= self.tx_power:
            raise ValueError("sensitivity must be below tx_power")
        if self.max_range <= 0.0:
            raise ValueError(f"max_range must be > 0, got {self.max_range}")


@dataclass(frozen=True)
class ShadowingModel:
    """Zero-mean Gaussian dB-domain fluctuation of received power."""

    sigma: float = 2.0

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


def rssi_at_distance(params: PathLossParams, d: float) -> Dbm:
    """Noise-free received power at distance d, dBm. Requires d > 0."""
    if d <= 0.0:
        raise ValueError(f"distance must be > 0, got {d}")
    return params.rssi_at_ref - 10.0 * params.exponent * math.log10(d / params.ref_distance)


def distance_from_rssi(params: PathLossParams, rssi: Dbm) -> float:
    """Invert the path-loss model: distance that produces the given RSSI.

    Readings above the reference power legitimately map to distances
    below the reference distance.
    """
    if not math.isfinite(rssi):
        raise ValueError(f"rssi must be finite, got {rssi}")
    return params.ref_distance * 10.0 ** ((params.rssi_at_ref - rssi) / (10.0 * params.exponent))


def sample_measured_rssi(
    params: PathLossParams,
    spec: RadioSpec,
    d: float,
    shadow: ShadowingModel,
    rng: np.random.Generator,
) -> Dbm | None:
    """One noisy RSSI reading at distance d, or None when below sensitivity."""
    value = rssi_at_distance(params, d) + rng.normal(0.0, shadow.sigma)
    if value < spec.sensitivity:
        return None
    return value


def sample_rssi_window(
    params: PathLossParams,
    spec: RadioSpec,
    d: float,
    shadow: ShadowingModel,
    rng: np.random.Generator,
    n: int,
) -> np.ndarray:
    """n noisy readings at distance d; sub-sensitivity entries are NaN.

    Draws n normals in one call, which consumes the generator stream
    exactly like n repeated sample_measured_rssi calls.
    """
    values = rssi_at_distance(params, d) + rng.normal(0.0, shadow.sigma, size=n)
    return np.where(values < spec.sensitivity, np.nan, values)
