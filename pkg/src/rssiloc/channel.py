"""Channel selection state machine.

Scan all 16 channels, average the sampled energy per channel, pick the
quietest one, then watch the packet failure ratio on the active channel
and trigger a rescan once it crosses the configured threshold. Variance
is recorded alongside the mean for reporting; selection itself uses the
mean only.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .geometry import Dbm
from .spectrum import ZIGBEE_CHANNELS, ChannelEnvironment, ZigbeeChannel, channel_energy_sample

__all__ = [
    "ScanConfig",
    "ChannelRecord",
    "ScanReport",
    "ChannelMonitor",
    "scan_all_channels",
    "select_channel",
]


@dataclass(frozen=True)
class ScanConfig:
    """Energy-scan parameters. The sample interval is bookkeeping only;
    the simulator advances virtual time."""

    samples_per_channel: int = 10
    sample_interval_ms: float = 100.0

    def __post_init__(self):
        if self.samples_per_channel < 1:
            raise ValueError("samples_per_channel must be >= 1")


@dataclass(frozen=True)
class ChannelRecord:
    channel: ZigbeeChannel
    mean_energy: Dbm
    variance: float  # dB^2


@dataclass(frozen=True)
class ScanReport:
    """Energy statistics for all 16 channels, ascending index."""

    records: tuple[ChannelRecord, ...]

    def __post_init__(self):
        indices = [r.channel.index for r in self.records]
        if indices != list(ZIGBEE_CHANNELS):
            raise ValueError("report must cover channels 11..26 exactly once, ascending")


def scan_all_channels(
    env: ChannelEnvironment, cfg: ScanConfig, rng: np.random.Generator
) -> ScanReport:
    """Sample every channel `samples_per_channel` times, ascending index,
    and record mean and population variance of the energy readings."""
    records = []
    for index in ZIGBEE_CHANNELS:
        ch = ZigbeeChannel(index)
        samples = np.array(
            [channel_energy_sample(env, ch, rng) for _ in range(cfg.samples_per_channel)]
        )
        records.append(ChannelRecord(ch, float(samples.mean()), float(samples.var())))
    return ScanReport(tuple(records))


def select_channel(report: ScanReport) -> ZigbeeChannel:
    """Channel with minimum mean energy; ties go to the lowest index."""
    best = min(report.records, key=lambda r: (r.mean_energy, r.channel.index))
    return best.channel


class ChannelMonitor:
    """Sliding-window packet-failure watcher for the active channel.

    Single-owner mutable state; a rescan is requested only once the
    window is full and the failure ratio strictly exceeds the threshold.
    """

    def __init__(
        self,
        active_channel: ZigbeeChannel,
        window_size: int = 20,
        failure_threshold: float = 0.2,
    ):
        if window_size < 1:
            raise ValueError("window_size must be >= 1")
        if not 0.0 < failure_threshold <= 1.0:
            raise ValueError("failure_threshold must be in (0, 1]")
        self.active_channel = active_channel
        self.window_size = window_size
        self.failure_threshold = failure_threshold
        self._outcomes: deque[bool] = deque(maxlen=window_size)

    def record_packet_outcome(self, success: bool) -> None:
        self._outcomes.append(success)

    def failure_ratio(self) -> float:
        if not self._outcomes:
            return 0.0
        return sum(1 for ok in self._outcomes if not ok) / len(self._outcomes)

    def should_rescan(self) -> bool:
        if len(self._outcomes) < self.window_size:
            return False
        return self.failure_ratio() > self.failure_threshold

    def switch_to(self, channel: ZigbeeChannel) -> None:
        """Activate a new channel and clear the packet window."""
        self.active_channel = channel
        self._outcomes.clear()
